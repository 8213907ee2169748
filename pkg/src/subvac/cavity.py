"""TE(1,0,1) mode of a rectangular box cavity, in Lorentz-Heaviside natural units.

The box has sides ``a``, ``b``, ``d`` along x, y, z. The atom crosses along
y, the shortest side, so with ``b <= a <= d`` it sees the lowest mode, whose
electric field points along y and does not depend on y.

Mode functions are normalised so that the classical energy of one mode
function equals ``omega / 2``. The squared electric mode amplitude at a
point then plays the role of ``f^2`` in :mod:`subvac.states`.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .states import FieldPoint, PhotonState, mean_photon_number, pair_correlation

__all__ = [
    "CavityGeometry",
    "Position",
    "GeometryStrictnessWarning",
    "MagneticProfile",
    "lowest_mode_frequency",
    "mode_frequency",
    "enumerate_modes",
    "is_lowest_mode",
    "normalization_A10",
    "electric_profile_squared",
    "magnetic_profile_squared",
    "classical_energy_density",
    "field_point",
    "mean_B_squared",
    "mean_energy_density",
    "e2_dominance",
]


class GeometryStrictnessWarning(UserWarning):
    """Box has a == d or b == a; the TE(1,0,1) formulas hold but the ordering is not strict."""


@dataclass(frozen=True)
class CavityGeometry:
    a: float
    b: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "d"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"cavity side {name} must be finite and > 0, got {v}")
        if not (self.b <= self.a <= self.d):
            raise DomainError(
                f"need b <= a <= d, got a={self.a}, b={self.b}, d={self.d}"
            )
        if not self.is_strict:
            warnings.warn(
                f"cavity with a={self.a}, b={self.b}, d={self.d} is not strictly b < a < d",
                GeometryStrictnessWarning,
                stacklevel=3,
            )

    @property
    def is_strict(self) -> bool:
        return self.b < self.a < self.d

    @property
    def volume(self) -> float:
        return self.a * self.b * self.d

    def center(self) -> "Position":
        return Position(self.a / 2, self.b / 2, self.d / 2)


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float


def _check_inside(g: CavityGeometry, p: Position):
    if not (0 <= p.x <= g.a and 0 <= p.y <= g.b and 0 <= p.z <= g.d):
        raise DomainError(f"position {p} lies outside the {g.a} x {g.b} x {g.d} box")


def mode_frequency(g: CavityGeometry, nx: int, ny: int, nz: int) -> float:
    """Angular frequency pi * sqrt((nx/a)^2 + (ny/b)^2 + (nz/d)^2)."""
    return math.pi * math.sqrt((nx / g.a) ** 2 + (ny / g.b) ** 2 + (nz / g.d) ** 2)


def lowest_mode_frequency(g: CavityGeometry) -> float:
    return math.pi * math.sqrt(1.0 / g.a**2 + 1.0 / g.d**2)


def enumerate_modes(g: CavityGeometry, max_index: int = 3) -> list[tuple[str, tuple[int, int, int], float]]:
    """TE and TM modes of the box with indices up to ``max_index``, sorted by frequency.

    Uses z (side ``d``) as the guide axis: TE_{mnp} needs ``p >= 1`` and
    ``(m, n) != (0, 0)``; TM_{mnp} needs ``m, n >= 1``.
    """
    modes = []
    rng = range(max_index + 1)
    for m, n, p in itertools.product(rng, rng, rng):
        w = mode_frequency(g, m, n, p)
        if p >= 1 and (m, n) != (0, 0):
            modes.append(("TE", (m, n, p), w))
        if m >= 1 and n >= 1:
            modes.append(("TM", (m, n, p), w))
    modes.sort(key=lambda item: (item[2], item[0], item[1]))
    return modes


def is_lowest_mode(g: CavityGeometry, max_index: int = 3) -> bool:
    """True when TE(1,0,1) has the smallest frequency among the enumerated modes."""
    w101 = lowest_mode_frequency(g)
    others = [w for kind, idx, w in enumerate_modes(g, max_index) if (kind, idx) != ("TE", (1, 0, 1))]
    return all(w101 <= w for w in others)


def normalization_A10(g: CavityGeometry) -> float:
    """Amplitude with A10^2 = 2 omega / (a b d (1 + a^2/d^2))."""
    w = lowest_mode_frequency(g)
    return math.sqrt(2.0 * w / (g.volume * (1.0 + (g.a / g.d) ** 2)))


def _sines_cosines(g: CavityGeometry, x, z):
    kx, kz = math.pi / g.a, math.pi / g.d
    return np.sin(kx * x), np.cos(kx * x), np.sin(kz * z), np.cos(kz * z)


def electric_profile_squared(g: CavityGeometry, p: Position) -> float:
    """f^2 = E_y^2 = 2 omega^3 a sin^2(pi x/a) sin^2(pi z/d) / (pi^2 b d (1 + a^2/d^2))."""
    _check_inside(g, p)
    w = lowest_mode_frequency(g)
    sx, _, sz, _ = _sines_cosines(g, p.x, p.z)
    peak = 2.0 * w**3 * g.a / (math.pi**2 * g.b * g.d * (1.0 + (g.a / g.d) ** 2))
    return float(peak * sx**2 * sz**2)


class MagneticProfile(NamedTuple):
    magnitude: float  # |B_x|^2 + |B_z|^2
    square: float  # B_x^2 + B_z^2 (coefficient of exp(-2 i omega t)); equals -magnitude


def magnetic_profile_squared(g: CavityGeometry, p: Position) -> MagneticProfile:
    """Squared magnetic mode function.

    The magnetic components carry a factor of ``i`` relative to ``E_y``, so
    their complex square is the negative of their squared modulus.
    """
    _check_inside(g, p)
    A2 = normalization_A10(g) ** 2
    sx, cx, sz, cz = _sines_cosines(g, p.x, p.z)
    mag = float(A2 * (cx**2 * sz**2 + (g.a / g.d) ** 2 * sx**2 * cz**2))
    return MagneticProfile(mag, -mag)


def classical_energy_density(g: CavityGeometry, x, y, z):
    """(E^2 + B^2)/2 of the normalised mode function; vectorised, y-independent."""
    A2 = normalization_A10(g) ** 2
    w = lowest_mode_frequency(g)
    sx, cx, sz, cz = _sines_cosines(g, np.asarray(x, float), np.asarray(z, float))
    rho = 0.5 * A2 * (
        (w * g.a / math.pi) ** 2 * sx**2 * sz**2
        + (g.a / g.d) ** 2 * sx**2 * cz**2
        + cx**2 * sz**2
    )
    return rho + 0.0 * np.asarray(y, float)


def field_point(g: CavityGeometry, p: Position) -> FieldPoint:
    return FieldPoint(electric_profile_squared(g, p), lowest_mode_frequency(g))


def mean_B_squared(s: PhotonState, g: CavityGeometry, p: Position, t):
    """Normal-ordered <B^2> = 2<n>|B_j|^2 + 2 Re(<a^2> B_j^2 exp(-2 i omega t))."""
    prof = magnetic_profile_squared(g, p)
    w = lowest_mode_frequency(g)
    a2 = np.conj(pair_correlation(s))
    t = np.asarray(t, dtype=float)
    out = 2.0 * mean_photon_number(s) * prof.magnitude + 2.0 * (
        a2 * prof.square * np.exp(-2j * w * t)
    ).real
    return float(out) if out.ndim == 0 else out


def _mean_E_squared_at(s: PhotonState, g: CavityGeometry, p: Position, t):
    f2 = electric_profile_squared(g, p)
    w = lowest_mode_frequency(g)
    a2 = np.conj(pair_correlation(s))
    t = np.asarray(t, dtype=float)
    out = 2.0 * mean_photon_number(s) * f2 + 2.0 * (a2 * f2 * np.exp(-2j * w * t)).real
    return float(out) if out.ndim == 0 else out


def mean_energy_density(s: PhotonState, g: CavityGeometry, p: Position, t):
    """Normal-ordered energy density (<E^2> + <B^2>)/2 at ``p``; vectorised over ``t``."""
    return 0.5 * (_mean_E_squared_at(s, g, p, t) + mean_B_squared(s, g, p, t))


def e2_dominance(g: CavityGeometry, p: Position) -> float:
    """|B_j|^2 / |E_j|^2 at ``p``.

    Small values mean a measurement of <E^2> there also measures the
    energy density. Undefined on the electric nodes.
    """
    f2 = electric_profile_squared(g, p)
    if f2 <= 0.0:
        raise DomainError(f"electric mode function vanishes at {p}")
    return magnetic_profile_squared(g, p).magnitude / f2
