"""Experimental feasibility estimates in SI units.

This is the only module that knows about SI units. Physical constants come
from :mod:`scipy.constants` (CODATA 2018): ``c`` is exact by definition of
the metre, ``hbar`` exact by the 2019 SI redefinition.

The experiment: Rydberg atoms (51 -> 50 transition, 51.1 GHz, lifetime
3.6e-2 s, size about 100 nm) cross a cavity along its shortest side ``b``
while the mode holds a vacuum-plus-two-photon state.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar as HBAR

from .errors import DomainError
from .states import make_vacuum_plus_two, negative_fraction

__all__ = [
    "SPEED_OF_LIGHT",
    "HBAR",
    "NaturalUnits",
    "ExperimentSetup",
    "CriterionResult",
    "CriteriaReport",
    "RYDBERG_PRESET",
    "QUOTED_DT_ESTIMATE",
    "cavity_frequency",
    "negative_window",
    "negative_window_heuristic",
    "required_speed",
    "in_transit_decay_probability",
    "check_criteria",
]

# value quoted for the negative-E^2 interval in the order-of-magnitude estimate
QUOTED_DT_ESTIMATE = 3e-11


@dataclass(frozen=True)
class NaturalUnits:
    """hbar = c = 1 with a chosen length scale (metres per natural length unit)."""

    length_scale: float

    def __post_init__(self):
        if not self.length_scale > 0:
            raise DomainError(f"length_scale must be > 0, got {self.length_scale}")

    @property
    def time_scale(self) -> float:
        return self.length_scale / SPEED_OF_LIGHT

    @property
    def energy_scale(self) -> float:
        return HBAR * SPEED_OF_LIGHT / self.length_scale

    def length_to_natural(self, meters):
        return meters / self.length_scale

    def length_to_si(self, x):
        return x * self.length_scale

    def time_to_natural(self, seconds):
        return seconds / self.time_scale

    def time_to_si(self, t):
        return t * self.time_scale

    def angular_frequency_to_natural(self, rad_per_s):
        return rad_per_s * self.time_scale

    def angular_frequency_to_si(self, w):
        return w / self.time_scale

    def energy_to_natural(self, joules):
        return joules / self.energy_scale

    def energy_to_si(self, e):
        return e * self.energy_scale


@dataclass(frozen=True)
class ExperimentSetup:
    cavity_a: float  # m
    cavity_b: float  # m
    cavity_d: float  # m
    transition_frequency: float  # Hz
    atom_size: float  # m
    atom_speed: float  # m/s
    lifetime_tau: float  # s
    beta: float = 0.32

    def __post_init__(self):
        for name in ("cavity_a", "cavity_b", "cavity_d", "transition_frequency",
                     "atom_size", "atom_speed", "lifetime_tau"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise DomainError(f"beta must be finite and >= 0, got {self.beta}")


# n=51 -> n=50 Rydberg transition; b = 1 um cavity; a = d tuned to 51.1 GHz
RYDBERG_PRESET = ExperimentSetup(
    cavity_a=4.146e-3,
    cavity_b=1e-6,
    cavity_d=4.146e-3,
    transition_frequency=51.1e9,
    atom_size=100e-9,
    atom_speed=3.3e5,
    lifetime_tau=3.6e-2,
    beta=0.32,
)


def cavity_frequency(a: float, d: float) -> float:
    """Lowest-mode frequency (c/2) sqrt(1/a^2 + 1/d^2) in Hz."""
    return 0.5 * SPEED_OF_LIGHT * math.sqrt(1.0 / a**2 + 1.0 / d**2)


def negative_window(frequency: float, beta: float) -> float:
    """Duration in seconds of each interval with <E^2> < 0 for the vacuum-plus-two state.

    <E^2> oscillates with period 1/(2 f); the negative fraction of that period
    comes from :func:`subvac.states.negative_fraction`.
    """
    if not frequency > 0:
        raise DomainError(f"frequency must be > 0, got {frequency}")
    return negative_fraction(make_vacuum_plus_two(beta)) / (2.0 * frequency)


def negative_window_heuristic(frequency: float) -> float:
    """The rough estimate 1/(6 f), i.e. pi/(3 omega)."""
    return 1.0 / (6.0 * frequency)


def required_speed(b: float, window: float) -> float:
    """Minimum speed to cross ``b`` within ``window`` seconds."""
    if window <= 0:
        return math.inf
    return b / window


def in_transit_decay_probability(setup: ExperimentSetup) -> float:
    """Linearised spontaneous-decay probability (b/v)/tau, clamped to 1."""
    p = (setup.cavity_b / setup.atom_speed) / setup.lifetime_tau
    if p > 1.0:
        warnings.warn(
            f"linearised decay probability {p:.3g} exceeds 1; transit is not short compared with tau",
            RuntimeWarning,
            stacklevel=2,
        )
        return 1.0
    return p


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool | None  # None: informational only
    value: float | None
    margin: float | None
    note: str = ""


@dataclass(frozen=True)
class CriteriaReport:
    setup: ExperimentSetup
    criteria: tuple[CriterionResult, ...]
    cavity_frequency: float
    negative_window: float
    negative_window_heuristic: float
    negative_fraction: float
    required_speed: float
    transit_time: float
    in_transit_decay_probability: float
    much_less: float
    footnotes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["criteria"] = [asdict(c) for c in self.criteria]
        d["footnotes"] = list(self.footnotes)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def render_text(self) -> str:
        lines = ["Feasibility report", "=================="]
        for c in self.criteria:
            flag = "info" if c.passed is None else ("PASS" if c.passed else "FAIL")
            val = "" if c.value is None else f" value={c.value:.6g}"
            mar = "" if c.margin is None else f" margin={c.margin:.6g}"
            lines.append(f"({c.number}) [{flag}] {c.name}:{val}{mar}")
            if c.note:
                lines.append(f"      {c.note}")
        lines += [
            f"cavity frequency      : {self.cavity_frequency:.6e} Hz",
            f"negative-E2 fraction  : {self.negative_fraction:.6f} of each period",
            f"negative-E2 window    : {self.negative_window:.6e} s (1/(6f) gives {self.negative_window_heuristic:.6e} s)",
            f"required speed        : {self.required_speed:.6e} m/s",
            f"transit time b/v      : {self.transit_time:.6e} s",
            f"in-transit decay prob : {self.in_transit_decay_probability:.6e}",
        ]
        for i, note in enumerate(self.footnotes, 1):
            lines.append(f"[{i}] {note}")
        return "\n".join(lines)


def check_criteria(setup: ExperimentSetup, much_less: float = 0.05) -> CriteriaReport:
    """Evaluate the seven measurement criteria for ``setup``.

    ``much_less`` is the numeric reading of "<<" used for criteria (1) and (6).
    """
    f_atom = setup.transition_frequency
    f_cav = cavity_frequency(setup.cavity_a, setup.cavity_d)
    frac = negative_fraction(make_vacuum_plus_two(setup.beta))
    dt_neg = negative_window(f_atom, setup.beta)
    dt_heur = negative_window_heuristic(f_atom)
    v_req = required_speed(setup.cavity_b, dt_neg)
    transit = setup.cavity_b / setup.atom_speed
    p_decay = in_transit_decay_probability(setup)
    detuning = abs(f_cav - f_atom) / f_atom
    beta_c = setup.atom_speed / SPEED_OF_LIGHT
    ordered = setup.cavity_b < setup.cavity_a <= setup.cavity_d

    crit = (
        CriterionResult(1, "cavity mode resonant with the transition", detuning < much_less,
                        detuning, much_less - detuning, "relative detuning |f_cavity - f_atom| / f_atom"),
        CriterionResult(2, "Rydberg transition in the microwave range", None, f_atom, None,
                        "informational: n=51 -> n=50, f = 51.1 GHz, wavelength about 6 mm"),
        CriterionResult(3, "excited mode is the lowest TE(1,0,1) mode", ordered,
                        f_cav, None, "f_cavity = (c/2) sqrt(1/a^2 + 1/d^2); requires b < a <= d"),
        CriterionResult(4, "atom fits in the cavity (b > atom size)", setup.cavity_b > setup.atom_size,
                        setup.cavity_b / setup.atom_size, setup.cavity_b / setup.atom_size, "margin is b / atom size"),
        CriterionResult(5, "transit time b/v within the negative-E2 window", transit <= dt_neg,
                        transit, dt_neg / transit, f"needs v >= {v_req:.4g} m/s"),
        CriterionResult(6, "non-relativistic atom (v/c << 1)", beta_c < much_less,
                        beta_c, much_less / beta_c, ""),
        CriterionResult(7, "transit time comparable to the excited-state lifetime", 0.1 <= transit / setup.lifetime_tau <= 10.0,
                        transit / setup.lifetime_tau, None,
                        f"decay probability while crossing is {p_decay:.3g}; compensate with atom flux"),
    )
    footnotes = (
        f"The order-of-magnitude estimate quotes dt ~ 1/(6f) ~ {QUOTED_DT_ESTIMATE:.0e} s; "
        f"1/(6f) at f = {f_atom:.4g} Hz is {dt_heur:.3g} s and the exact negative interval "
        f"is {dt_neg:.3g} s. The quoted {QUOTED_DT_ESTIMATE:.0e} s is off by a factor of ten; "
        f"the companion speed estimate (3e5 m/s for b = 1 um) agrees with the computed values.",
    )
    return CriteriaReport(
        setup=setup,
        criteria=crit,
        cavity_frequency=f_cav,
        negative_window=dt_neg,
        negative_window_heuristic=dt_heur,
        negative_fraction=frac,
        required_speed=v_req,
        transit_time=transit,
        in_transit_decay_probability=p_decay,
        much_less=much_less,
        footnotes=footnotes,
    )
