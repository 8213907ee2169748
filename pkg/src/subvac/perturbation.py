"""First-order de-excitation probability of a two-level atom in a single-mode field.

The atom starts in its upper level and the cavity mode in an arbitrary pure
state. The interaction is switched on suddenly at ``t0`` and off at ``t1``.
Both emission (``I2``, co-rotating) and absorption-side (``I1``,
counter-rotating) time integrals are kept; nothing here uses the
rotating-wave approximation.

The mode amplitude ``f`` is taken real. A complex mode phase can always be
absorbed into the photon amplitudes, so nothing is lost.

Validity contracts:

* the ratio ``P2 / P2(0)`` assumes the atom decays into one mode only, which
  is a good approximation near resonance;
* ``delta_P2`` needs no such restriction because the unexcited modes cancel
  in the difference.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateWindowError, DimensionError, DomainError
from .states import (
    PhotonState,
    mean_photon_number,
    pair_correlation,
    subvac_functional,
)

__all__ = [
    "AtomParams",
    "TransitWindow",
    "RegimeThresholds",
    "RegimeReport",
    "RESONANCE_SERIES_THRESHOLD",
    "integral_I1",
    "integral_I2",
    "amplitude_A2m",
    "amplitudes_A2",
    "prob_P2",
    "prob_P2_termwise",
    "prob_P2_vacuum",
    "ratio_P2",
    "ratio_resonant_short",
    "delta_P2",
    "delta_P2_low_omega",
    "delta_P2_high_omega",
    "qi_bound",
    "classify_regime",
    "optimal_beta",
]

# |omega - delta_eps| * (t1 - t0) below which I2 switches to its Taylor series
RESONANCE_SERIES_THRESHOLD = 1e-6


@dataclass(frozen=True)
class AtomParams:
    """Two-level atom: transition angular frequency, dipole element, optional lifetime."""

    delta_eps: float
    dipole: float = 1.0
    lifetime_tau: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.delta_eps) and self.delta_eps > 0):
            raise DomainError(f"delta_eps must be finite and > 0, got {self.delta_eps}")
        if not (np.isfinite(self.dipole) and self.dipole >= 0):
            raise DomainError(f"dipole must be finite and >= 0, got {self.dipole}")
        if self.lifetime_tau is not None and not self.lifetime_tau > 0:
            raise DomainError(f"lifetime_tau must be > 0, got {self.lifetime_tau}")


@dataclass(frozen=True)
class TransitWindow:
    t0: float
    t1: float

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise DomainError("window times must be finite")
        if not self.t1 > self.t0:
            raise DomainError(f"need t1 > t0, got t0={self.t0}, t1={self.t1}")

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t0 + self.t1)


def integral_I1(omega: float, atom: AtomParams, w: TransitWindow) -> complex:
    """Integral of exp(-i (omega + delta_eps) t) over the window."""
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    k = omega + atom.delta_eps
    return complex((np.exp(-1j * k * w.t1) - np.exp(-1j * k * w.t0)) / (-1j * k))


def integral_I2(omega: float, atom: AtomParams, w: TransitWindow) -> complex:
    """Integral of exp(i (omega - delta_eps) t) over the window.

    Near resonance the closed form is 0/0; below
    ``RESONANCE_SERIES_THRESHOLD`` the value is taken from

        exp(i delta tbar) * dt * [1 - (delta dt)^2/24 + (delta dt)^4/1920],

    which is the Taylor expansion of ``exp(i delta tbar) * 2 sin(delta dt/2)/delta``.
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    delta = omega - atom.delta_eps
    dt = w.duration
    x = delta * dt
    if abs(x) < RESONANCE_SERIES_THRESHOLD:
        x2 = x * x
        return complex(np.exp(1j * delta * w.midpoint) * dt * (1.0 - x2 / 24.0 + x2 * x2 / 1920.0))
    return complex((np.exp(1j * delta * w.t1) - np.exp(1j * delta * w.t0)) / (1j * delta))


def amplitudes_A2(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow) -> np.ndarray:
    """Lower-level amplitudes A_{2m} for m = 0 .. N+1.

    ``A_{2m} = i d [sqrt(m+1) c_{m+1} f I1 + sqrt(m) c_{m-1} f I2]`` with
    amplitudes beyond the truncation taken as zero. The vector is one longer
    than the state because emission can populate ``|N+1>``.
    """
    I1 = integral_I1(omega, atom, w)
    I2 = integral_I2(omega, atom, w)
    dim = s.truncation_dim
    c = s.padded(dim + 2)
    m = np.arange(dim + 1)
    up = np.sqrt(m + 1.0) * c[1 : dim + 2]
    down = np.zeros(dim + 1, dtype=complex)
    down[1:] = np.sqrt(m[1:]) * c[:dim]
    return 1j * atom.dipole * f * (up * I1 + down * I2)


def amplitude_A2m(s: PhotonState, m: int, f: float, omega: float, atom: AtomParams, w: TransitWindow) -> complex:
    if not 0 <= m <= s.truncation_dim:
        raise DimensionError(f"m={m} outside 0..{s.truncation_dim}")
    return complex(amplitudes_A2(s, f, omega, atom, w)[m])


def prob_P2(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow) -> float:
    """d^2 f^2 [<n>|I1|^2 + (<n>+1)|I2|^2 + 2 Re(C conj(I1) I2)]."""
    I1 = integral_I1(omega, atom, w)
    I2 = integral_I2(omega, atom, w)
    nbar = mean_photon_number(s)
    C = pair_correlation(s) if s.truncation_dim >= 3 else 0.0
    bracket = nbar * abs(I1) ** 2 + (nbar + 1.0) * abs(I2) ** 2 + 2.0 * (C * np.conj(I1) * I2).real
    return float(atom.dipole**2 * f**2 * bracket)


def prob_P2_termwise(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow) -> float:
    """Sum of |A_{2m}|^2; must agree with :func:`prob_P2`."""
    return float(np.sum(np.abs(amplitudes_A2(s, f, omega, atom, w)) ** 2))


def prob_P2_vacuum(f: float, omega: float, atom: AtomParams, w: TransitWindow) -> float:
    """Vacuum reference P2(0) = d^2 f^2 |I2|^2 (single-mode decay)."""
    return float(atom.dipole**2 * f**2 * abs(integral_I2(omega, atom, w)) ** 2)


def ratio_P2(s: PhotonState, omega: float, atom: AtomParams, w: TransitWindow) -> float:
    """P2 / P2(0); the mode amplitude and the dipole cancel.

    Raises DegenerateWindowError where I2 vanishes, e.g. a window spanning a
    whole number of detuning periods.
    """
    I1 = integral_I1(omega, atom, w)
    I2 = integral_I2(omega, atom, w)
    # I2 = 0 only through cancellation, so compare against the window length
    if abs(I2) <= 1e-12 * w.duration:
        raise DegenerateWindowError(
            f"|I2| = {abs(I2):.3g} vanishes for omega={omega}, window={w}"
        )
    nbar = mean_photon_number(s)
    C = pair_correlation(s) if s.truncation_dim >= 3 else 0.0
    i2sq = abs(I2) ** 2
    return float(nbar * abs(I1) ** 2 / i2sq + nbar + 1.0 + 2.0 * (C * I2 * np.conj(I1)).real / i2sq)


def ratio_resonant_short(s: PhotonState, omega: float, t0: float) -> float:
    """Short-transit, on-resonance limit of P2/P2(0).

    Equals ``2<n> + 1 + 2 Re(C exp(2 i omega t0))``, i.e. ``1 + <E^2>(t0)/f^2``.
    Only meaningful when omega*(t1-t0) << 1 and delta_eps ~ omega; see
    :func:`classify_regime`.
    """
    return 1.0 + subvac_functional(s, 2.0 * omega * t0)


def delta_P2(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow) -> float:
    """P2 - P2(0) = d^2 f^2 [<n>(|I1|^2 + |I2|^2) + 2 Re(C conj(I1) I2)]."""
    I1 = integral_I1(omega, atom, w)
    I2 = integral_I2(omega, atom, w)
    nbar = mean_photon_number(s)
    C = pair_correlation(s) if s.truncation_dim >= 3 else 0.0
    bracket = nbar * (abs(I1) ** 2 + abs(I2) ** 2) + 2.0 * (C * np.conj(I1) * I2).real
    return float(atom.dipole**2 * f**2 * bracket)


def delta_P2_low_omega(
    s: PhotonState, f: float, atom: AtomParams, w: TransitWindow, omega: float | None = None
) -> float:
    """Far-below-resonance approximation of P2 - P2(0).

    ``2 d^2 (1 - cos(delta_eps dt)) / delta_eps^2 * <E^2>(t0)``. The limit
    assumes omega*t0, omega*t1 << 1, so by default <E^2> is evaluated at
    phase zero; pass ``omega`` to keep the factor exp(2 i omega t0).
    """
    dt = w.duration
    phase = 0.0 if omega is None else 2.0 * omega * w.t0
    e2 = f**2 * subvac_functional(s, phase)
    de = atom.delta_eps
    return float(2.0 * atom.dipole**2 * (1.0 - math.cos(de * dt)) / de**2 * e2)


def delta_P2_high_omega(s: PhotonState, f: float, omega: float, atom: AtomParams, w: TransitWindow) -> float:
    """Far-above-resonance approximation of P2 - P2(0).

    ``(2/omega^2) d^2 f^2 {2<n>(1 - cos(omega dt)) - Re[C (e^{i omega t1} - e^{i omega t0})^2]}``.
    Unlike the low-frequency limit this does not follow <E^2> or its time
    integral.
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    nbar = mean_photon_number(s)
    C = pair_correlation(s) if s.truncation_dim >= 3 else 0.0
    z = np.exp(1j * omega * w.t1) - np.exp(1j * omega * w.t0)
    brace = 2.0 * nbar * (1.0 - math.cos(omega * w.duration)) - (C * z * z).real
    return float(2.0 / omega**2 * atom.dipole**2 * f**2 * brace)


def qi_bound(f_squared: float, atom: AtomParams, window: TransitWindow | None = None) -> float:
    """Lower bound on the far-below-resonance P2 - P2(0).

    Follows from <E^2> >= -f^2. For a given window the bound is
    ``-2 d^2 f^2 (1 - cos(delta_eps dt)) / delta_eps^2``; without a window it
    is the supremum over windows, ``-4 d^2 f^2 / delta_eps^2``, reached when
    delta_eps*dt is an odd multiple of pi.
    """
    if f_squared < 0:
        raise DomainError(f"f_squared must be >= 0, got {f_squared}")
    de = atom.delta_eps
    if window is None:
        factor = 2.0
    else:
        factor = 1.0 - math.cos(de * window.duration)
    return float(-2.0 * atom.dipole**2 * f_squared * factor / de**2)


@dataclass(frozen=True)
class RegimeThresholds:
    """``much_less``: x << 1 means x < much_less; ``much_greater``: x >> 1 means x > much_greater."""

    much_less: float = 0.05
    much_greater: float = 20.0
    resonance_tolerance: float = 0.05


@dataclass(frozen=True)
class RegimeReport:
    omega_dt: float
    deps_dt: float
    omega_over_deps: float
    regime: str
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d


def classify_regime(
    omega: float, atom: AtomParams, w: TransitWindow, thresholds: RegimeThresholds | None = None
) -> RegimeReport:
    """Which closed-form limit applies; advisory only.

    Regimes: ``far_below`` (omega/delta_eps << 1), ``far_above`` (>> 1),
    ``resonant_short`` (omega ~ delta_eps and omega dt << 1),
    ``resonant_general`` (omega ~ delta_eps otherwise) and ``general``.
    """
    th = thresholds or RegimeThresholds()
    dt = w.duration
    omega_dt = omega * dt
    deps_dt = atom.delta_eps * dt
    ratio = omega / atom.delta_eps
    notes = []
    if ratio < th.much_less:
        regime = "far_below"
        if omega_dt >= th.much_less:
            notes.append(f"far_below limit needs omega*dt << 1, got {omega_dt:.6g}")
        if max(abs(omega * w.t0), abs(omega * w.t1)) >= th.much_less:
            notes.append("far_below limit assumes omega*t0 and omega*t1 << 1")
    elif ratio > th.much_greater:
        regime = "far_above"
        if deps_dt >= th.much_less:
            notes.append(f"far_above limit needs delta_eps*dt << 1, got {deps_dt:.6g}")
    elif abs(ratio - 1.0) <= th.resonance_tolerance:
        if omega_dt < th.much_less and deps_dt < th.much_less:
            regime = "resonant_short"
        else:
            regime = "resonant_general"
    else:
        regime = "general"
        notes.append("ratio P2/P2(0) assumes single-mode decay, valid only near resonance")
    return RegimeReport(omega_dt, deps_dt, ratio, regime, th, tuple(notes))


def optimal_beta() -> float:
    """beta minimising the worst-phase short-window ratio for (|0> + beta|2>)/norm: (sqrt 6 - 2)/sqrt 2."""
    return (math.sqrt(6.0) - 2.0) / math.sqrt(2.0)
