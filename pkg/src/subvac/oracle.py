"""Exact evolution of atom + truncated cavity mode, used to check first order.

The Hamiltonian keeps both co- and counter-rotating terms:

    H = omega a^dag a + delta_eps |up><up| - g (a + a^dag) (|up><low| + |low><up|),

with ``g = dipole * f``. The coupling is constant on ``[t0, t1]`` and zero
outside it (sudden switching). Photon amplitudes are interaction-picture
amplitudes, so the Schroedinger state at ``t0`` carries the free phases
``exp(-i (n omega + delta_eps) t0)``. Only populations are compared with
perturbation theory, so phase conventions never enter.

Basis ordering: index ``n`` is ``|n>|up>`` and index ``N + 1 + n`` is
``|n>|low>`` for ``n = 0 .. N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import DimensionError, DomainError, NumericalValidityError, TruncationLeakageError
from .perturbation import AtomParams, TransitWindow, prob_P2
from .states import PhotonState, make_vacuum

__all__ = [
    "CompositeState",
    "OracleConfig",
    "FirstOrderComparison",
    "hamiltonian",
    "evolve",
    "exact_P2",
    "exact_ratio",
    "compare_first_order",
]

# above this Fock cutoff "auto" switches from dense expm to adaptive stepping
DENSE_MAX_N = 128
UNITARITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CompositeState:
    """Atom-mode amplitudes: upper block first, then lower block."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size < 2 or amps.size % 2:
            raise DimensionError(f"composite amplitude vector must have even length >= 2, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def fock_dim(self) -> int:
        return self.amplitudes.size // 2

    @property
    def upper(self) -> np.ndarray:
        return self.amplitudes[: self.fock_dim]

    @property
    def lower(self) -> np.ndarray:
        return self.amplitudes[self.fock_dim :]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def lower_probability(self) -> float:
        return float(np.sum(np.abs(self.lower) ** 2))

    def photon_distribution(self) -> np.ndarray:
        return np.abs(self.upper) ** 2 + np.abs(self.lower) ** 2

    @classmethod
    def excited(cls, s: PhotonState, fock_dim: int, omega: float = 0.0, delta_eps: float = 0.0, t0: float = 0.0):
        """Upper atom level times photon state ``s``, free-evolved to ``t0``."""
        if s.truncation_dim > fock_dim:
            raise DimensionError(
                f"photon state of dim {s.truncation_dim} does not fit in Fock cutoff {fock_dim}"
            )
        n = np.arange(fock_dim)
        amps = np.zeros(2 * fock_dim, dtype=complex)
        amps[:fock_dim] = s.padded(fock_dim) * np.exp(-1j * (n * omega + delta_eps) * t0)
        return cls(amps)


@dataclass(frozen=True)
class OracleConfig:
    """``truncation_dim`` is the number of Fock levels kept (N + 1).

    ``integrator`` is ``"matrix_exponential"``, ``"adaptive_stepper"`` or
    ``"auto"`` (dense expm up to N = 128, adaptive above). ``steps`` splits
    the window into equal expm sub-steps. ``tolerance`` is the adaptive
    stepper's relative tolerance.
    """

    truncation_dim: int = 33
    integrator: str = "auto"
    tolerance: float = 1e-12
    steps: int = 1
    leakage_tol: float = 1e-6

    def __post_init__(self):
        if self.truncation_dim < 3:
            raise DomainError(f"truncation_dim must be >= 3, got {self.truncation_dim}")
        if self.integrator not in ("matrix_exponential", "adaptive_stepper", "auto"):
            raise DomainError(f"unknown integrator {self.integrator!r}")
        if not self.tolerance > 0:
            raise DomainError(f"tolerance must be > 0, got {self.tolerance}")
        if self.steps < 1:
            raise DomainError(f"steps must be >= 1, got {self.steps}")


def hamiltonian(fock_dim: int, g: float, omega: float, delta_eps: float, sparse: bool = False):
    n = np.arange(fock_dim, dtype=float)
    x = sp.diags(np.sqrt(n[1:]), 1) + sp.diags(np.sqrt(n[1:]), -1)
    h_up = sp.diags(omega * n + delta_eps)
    h_low = sp.diags(omega * n)
    H = sp.bmat([[h_up, -g * x], [-g * x, h_low]], format="csr")
    return H if sparse else H.toarray()


def _integrator(cfg: OracleConfig) -> str:
    if cfg.integrator != "auto":
        return cfg.integrator
    return "matrix_exponential" if cfg.truncation_dim - 1 <= DENSE_MAX_N else "adaptive_stepper"


def _check_leakage(state: CompositeState, cfg: OracleConfig, when: str):
    top = float(np.sum(state.photon_distribution()[-2:]))
    if top > cfg.leakage_tol:
        raise TruncationLeakageError(
            f"population {top:.3g} in the top two Fock levels {when}; "
            f"increase truncation_dim beyond {cfg.truncation_dim}"
        )


def evolve(
    s0: CompositeState, f: float, omega: float, atom: AtomParams, w: TransitWindow, cfg: OracleConfig
) -> CompositeState:
    """Propagate ``s0`` (the state at ``w.t0``) to ``w.t1`` under the full Hamiltonian."""
    if s0.fock_dim != cfg.truncation_dim:
        raise DimensionError(f"state has {s0.fock_dim} Fock levels, config expects {cfg.truncation_dim}")
    _check_leakage(s0, cfg, "in the initial state")
    g = atom.dipole * f
    dt = w.duration
    psi = np.array(s0.amplitudes)
    if _integrator(cfg) == "matrix_exponential":
        H = hamiltonian(cfg.truncation_dim, g, omega, atom.delta_eps)
        U = expm(-1j * H * (dt / cfg.steps))
        for _ in range(cfg.steps):
            psi = U @ psi
    else:
        H = hamiltonian(cfg.truncation_dim, g, omega, atom.delta_eps, sparse=True)
        sol = solve_ivp(
            lambda t, y: -1j * (H @ y),
            (0.0, dt),
            psi,
            method="DOP853",
            rtol=cfg.tolerance,
            atol=cfg.tolerance * 1e-3,
        )
        if not sol.success:
            raise NumericalValidityError(f"adaptive stepper failed: {sol.message}")
        psi = sol.y[:, -1]
    out = CompositeState(psi)
    drift = abs(out.norm - s0.norm)
    if drift > UNITARITY_TOL:
        raise NumericalValidityError(f"norm drifted by {drift:.3g} during evolution")
    _check_leakage(out, cfg, "after evolution")
    return out


def exact_P2(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow, cfg: OracleConfig) -> float:
    """Probability of finding the atom in its lower level at ``t1``."""
    s0 = CompositeState.excited(s, cfg.truncation_dim, omega, atom.delta_eps, w.t0)
    return evolve(s0, f, omega, atom, w, cfg).lower_probability()


def exact_ratio(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow, cfg: OracleConfig) -> float:
    """Exact P2 / P2(vacuum) for the same coupling and window."""
    return exact_P2(s, f, omega, atom, w, cfg) / exact_P2(make_vacuum(3), f, omega, atom, w, cfg)


@dataclass(frozen=True)
class FirstOrderComparison:
    p2_exact: float
    p2_first_order: float
    abs_discrepancy: float  # exact minus first order
    rel_discrepancy: float
    halved_abs_discrepancy: float
    halving_ratio: float  # discrepancy(g) / discrepancy(g/2)
    scaling_exponent: float  # log2 of halving_ratio; 4 when the leading error is O(g^4)
    truncation_shift: float  # |P2_exact(N+4) - P2_exact(N)|
    coupling: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compare_first_order(
    s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow, cfg: OracleConfig
) -> FirstOrderComparison:
    """Exact vs first-order P2, with a coupling-halving scaling test and a cutoff check."""
    exact = exact_P2(s, f, omega, atom, w, cfg)
    pert = prob_P2(s, f, omega, atom, w)
    disc = exact - pert
    exact_half = exact_P2(s, 0.5 * f, omega, atom, w, cfg)
    disc_half = exact_half - prob_P2(s, 0.5 * f, omega, atom, w)
    if disc_half != 0.0 and disc != 0.0:
        ratio = abs(disc / disc_half)
        exponent = math.log2(ratio)
    else:
        ratio = exponent = float("nan")
    bigger = OracleConfig(
        truncation_dim=cfg.truncation_dim + 4,
        integrator=cfg.integrator,
        tolerance=cfg.tolerance,
        steps=cfg.steps,
        leakage_tol=cfg.leakage_tol,
    )
    shift = abs(exact_P2(s, f, omega, atom, w, bigger) - exact)
    return FirstOrderComparison(
        p2_exact=exact,
        p2_first_order=pert,
        abs_discrepancy=disc,
        rel_discrepancy=abs(disc) / pert if pert > 0 else float("inf"),
        halved_abs_discrepancy=disc_half,
        halving_ratio=ratio,
        scaling_exponent=exponent,
        truncation_shift=shift,
        coupling=atom.dipole * f,
    )
