"""Single-mode photon states and their normal-ordered field moments.

A state is stored as its Fock amplitudes ``c_0 .. c_N``. Everything the
detector model needs from the field reduces to two numbers: the mean photon
number and the pair correlation

    C = sum_n sqrt((n+1)(n+2)) c_n conj(c_{n+2}),

in terms of which the normal-ordered squared electric field at a point with
squared mode amplitude ``f2`` reads

    <E^2>(t) = f2 * [2 <n> + 2 Re(C exp(2 i omega t))].

Amplitudes are interaction-picture amplitudes, i.e. the Fock coefficients at
``t = 0``. A global phase on the amplitudes never changes any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, DomainError, TruncationError

__all__ = [
    "PhotonState",
    "FieldPoint",
    "NORM_TOL",
    "SQUEEZE_NORM_LOSS",
    "make_number_state",
    "make_vacuum",
    "make_vacuum_plus_two",
    "make_squeezed_vacuum",
    "make_random_state",
    "squeezed_dim",
    "mean_photon_number",
    "pair_correlation",
    "ladder_sums",
    "subvac_functional",
    "subvac_minimum",
    "subvac_maximum",
    "worst_phase",
    "subvac_decomposition",
    "mean_E_squared",
    "negative_fraction",
]

NORM_TOL = 1e-12
# smallest admissible pre-normalisation norm
_MIN_NORM = 1e-30
# squeezed states must keep at least 1 - SQUEEZE_NORM_LOSS of their norm
SQUEEZE_NORM_LOSS = 1e-8
# default truncation for squeezed states keeps the discarded tail below this
_SQUEEZE_DEFAULT_TAIL = 1e-14


@dataclass(frozen=True, eq=False)
class PhotonState:
    """Normalised, immutable amplitude vector of one cavity mode.

    The constructor renormalises ``amplitudes``; it rejects vectors whose
    squared norm is below 1e-30.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size < 1:
            raise DimensionError("a photon state needs at least one amplitude")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if norm2 < _MIN_NORM:
            raise DomainError(f"amplitude vector has negligible norm ({norm2:.3g})")
        amps = amps / math.sqrt(norm2)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def truncation_dim(self) -> int:
        return int(self.amplitudes.size)

    def padded(self, dim: int) -> np.ndarray:
        """Amplitudes zero-padded to ``dim`` entries (never truncated)."""
        if dim < self.truncation_dim:
            raise DimensionError(f"cannot pad a dim-{self.truncation_dim} state to {dim}")
        out = np.zeros(dim, dtype=complex)
        out[: self.truncation_dim] = self.amplitudes
        return out

    def __repr__(self):
        return f"PhotonState(dim={self.truncation_dim}, <n>={mean_photon_number(self):.6g})"


@dataclass(frozen=True)
class FieldPoint:
    """Squared mode amplitude and angular frequency at the atom's position."""

    f_squared: float
    omega: float

    def __post_init__(self):
        if not (np.isfinite(self.f_squared) and self.f_squared >= 0):
            raise DomainError(f"f_squared must be finite and >= 0, got {self.f_squared}")
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be finite and > 0, got {self.omega}")


def make_number_state(n: int, dim: int) -> PhotonState:
    if not 0 <= n < dim:
        raise DimensionError(f"number state n={n} does not fit in dim={dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return PhotonState(amps)


def make_vacuum(dim: int = 3) -> PhotonState:
    return make_number_state(0, dim)


def make_vacuum_plus_two(beta: float, dim: int = 3) -> PhotonState:
    """(|0> + beta |2>) / sqrt(1 + beta^2) for real ``beta >= 0``."""
    if not (np.isfinite(beta) and beta >= 0):
        raise DomainError(f"beta must be finite and non-negative, got {beta}")
    if dim < 3:
        raise DimensionError(f"vacuum-plus-two state needs dim >= 3, got {dim}")
    amps = np.zeros(dim, dtype=complex)
    amps[0] = 1.0
    amps[2] = beta
    return PhotonState(amps)


def _squeezed_log_probs(r: float, m: np.ndarray) -> np.ndarray:
    # log |c_{2m}|^2 = 2m log tanh r + log (2m)! - 2m log 2 - 2 log m! - log cosh r
    t = math.tanh(r)
    return (
        2 * m * math.log(t)
        + gammaln(2 * m + 1)
        - 2 * m * math.log(2.0)
        - 2 * gammaln(m + 1)
        - math.log(math.cosh(r))
    )


def squeezed_dim(r: float, tail: float = _SQUEEZE_DEFAULT_TAIL) -> int:
    """Smallest truncation dim whose discarded squeezed-vacuum norm is below ``tail``.

    Uses the bound ``sum_{k>m} p_k < p_m tanh^2 r / (1 - tanh^2 r)`` on the
    even-photon probabilities ``p_m``, which holds because successive ratios
    ``p_{m+1}/p_m = tanh^2 r (2m+1)/(2m+2)`` stay below ``tanh^2 r``.
    """
    if not (np.isfinite(r) and r >= 0):
        raise DomainError(f"squeeze parameter must be finite and >= 0, got {r}")
    if r == 0:
        return 1
    log_geom = 2 * math.log(math.tanh(r)) + 2 * math.log(math.cosh(r))  # log(t^2/(1-t^2))
    log_tail = math.log(tail)
    m_hi = 16
    while _squeezed_log_probs(r, np.array([m_hi]))[0] + log_geom >= log_tail:
        m_hi *= 2
    m = np.arange(m_hi + 1)
    ok = _squeezed_log_probs(r, m) + log_geom < log_tail
    m_star = int(np.argmax(ok))
    return 2 * m_star + 1


def make_squeezed_vacuum(r: float, phi: float = 0.0, dim: int | None = None) -> PhotonState:
    """Squeezed vacuum with squeeze parameter ``zeta = r exp(i phi)``.

    Only even Fock amplitudes are populated,

        c_{2m} = (exp(-i phi) tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r)),

    with the phase chosen so that

        <E^2>(t) = 2 f2 [sinh^2 r + sinh r cosh r cos(phi + 2 omega t)].

    ``dim`` defaults to :func:`squeezed_dim`. A smaller ``dim`` is accepted
    as long as the truncated norm stays above ``1 - 1e-8``; the result is
    renormalised.

    Raises
    ------
    TruncationError
        If ``dim`` discards more than 1e-8 of the norm. ``required_dim`` on
        the exception names the smallest acceptable size.
    """
    if not (np.isfinite(r) and r >= 0):
        raise DomainError(f"squeeze parameter must be finite and >= 0, got {r}")
    if not np.isfinite(phi):
        raise DomainError(f"squeeze phase must be finite, got {phi}")
    if dim is None:
        dim = max(3, squeezed_dim(r))  # room for C even at r = 0
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    amps = np.zeros(dim, dtype=complex)
    if r == 0:
        amps[0] = 1.0
        return PhotonState(amps)
    m = np.arange((dim + 1) // 2)
    log_p = _squeezed_log_probs(r, m)
    kept = float(np.sum(np.exp(log_p)))
    if kept < 1.0 - SQUEEZE_NORM_LOSS:
        need = squeezed_dim(r, SQUEEZE_NORM_LOSS)
        raise TruncationError(
            f"squeezed vacuum r={r} keeps norm {kept:.12f} at dim={dim}; need dim >= {need}",
            required_dim=need,
        )
    amps[0::2] = np.exp(0.5 * log_p - 1j * phi * m)
    return PhotonState(amps)


def make_random_state(dim: int, rng: np.random.Generator) -> PhotonState:
    """Haar-like random state: complex Gaussian amplitudes, normalised."""
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    return PhotonState(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def mean_photon_number(s: PhotonState) -> float:
    n = np.arange(s.truncation_dim)
    return float(np.sum(n * np.abs(s.amplitudes) ** 2))


def pair_correlation(s: PhotonState) -> complex:
    """C = sum_n sqrt((n+1)(n+2)) c_n conj(c_{n+2}), i.e. conj(<a^2>)."""
    if s.truncation_dim < 3:
        raise DimensionError(
            f"pair correlation needs truncation_dim >= 3, got {s.truncation_dim}"
        )
    c = s.amplitudes
    n = np.arange(s.truncation_dim - 2)
    return complex(np.sum(np.sqrt((n + 1.0) * (n + 2.0)) * c[:-2] * np.conj(c[2:])))


def ladder_sums(s: PhotonState) -> tuple[float, float]:
    """The two photon-number sums that appear when squaring the emission amplitudes.

    Returns ``(sum_m (m+1) |c_{m+1}|^2, sum_m m |c_{m-1}|^2)`` over
    ``m = 0 .. N+1`` on the zero-padded amplitude vector; these equal
    ``<n>`` and ``<n> + 1``.
    """
    c = s.padded(s.truncation_dim + 1)
    p = np.abs(c) ** 2
    m = np.arange(c.size)
    up = float(np.sum((m[:-1] + 1) * p[1:]))
    down = float(np.sum(m[1:] * p[:-1]))
    return up, down


def subvac_functional(s: PhotonState, phase: float) -> float:
    """2<n> + 2 Re(C exp(i phase)): the bracket of <E^2>/f2 at ``phase = 2 omega t``."""
    return 2.0 * mean_photon_number(s) + 2.0 * (pair_correlation(s) * np.exp(1j * phase)).real


def subvac_minimum(s: PhotonState) -> float:
    """Minimum of :func:`subvac_functional` over phase, 2<n> - 2|C|; never below -1."""
    return 2.0 * mean_photon_number(s) - 2.0 * abs(pair_correlation(s))


def subvac_maximum(s: PhotonState) -> float:
    return 2.0 * mean_photon_number(s) + 2.0 * abs(pair_correlation(s))


def worst_phase(s: PhotonState) -> float:
    """Phase in [0, 2 pi) at which :func:`subvac_functional` is smallest."""
    return float((np.pi - np.angle(pair_correlation(s))) % (2 * np.pi))


def subvac_decomposition(s: PhotonState) -> float:
    """Minimum-over-phase functional written as -1 plus a sum of squares.

    The amplitudes are first rotated, ``c_n -> c_n exp(-i n alpha)`` with
    ``2 alpha`` the worst phase, which makes ``C`` real and negative. Then

        S = -1 + sum_{n>=1} |sqrt(n) c_n + sqrt(n-1) c_{n-2}|^2,

    which is manifestly >= -1.
    """
    dim = s.truncation_dim
    alpha = 0.5 * worst_phase(s)
    n = np.arange(dim + 2)
    c = s.padded(dim + 2) * np.exp(-1j * n * alpha)
    shifted = np.zeros_like(c)
    shifted[2:] = c[:-2]
    terms = np.abs(np.sqrt(n[1:]) * c[1:] + np.sqrt(n[1:] - 1.0) * shifted[1:]) ** 2
    return float(-1.0 + np.sum(terms))


def mean_E_squared(s: PhotonState, fp: FieldPoint, t) -> np.ndarray | float:
    """Normal-ordered <E^2> at the field point; vectorised over ``t``.

    Bounded below by ``-fp.f_squared``.
    """
    nbar = mean_photon_number(s)
    C = pair_correlation(s)
    t = np.asarray(t, dtype=float)
    out = fp.f_squared * (2.0 * nbar + 2.0 * (C * np.exp(2j * fp.omega * t)).real)
    return float(out) if out.ndim == 0 else out


def negative_fraction(s: PhotonState) -> float:
    """Fraction of each <E^2> period (pi/omega) during which <E^2> < 0.

    <E^2> < 0 exactly when cos(theta) < -<n>/|C| with ``theta`` the
    oscillation phase, so the fraction is arccos(<n>/|C|)/pi when
    ``|C| > <n>`` and zero otherwise.
    """
    nbar = mean_photon_number(s)
    c_abs = abs(pair_correlation(s))
    if c_abs <= nbar:
        return 0.0
    return float(math.acos(nbar / c_abs) / math.pi)
