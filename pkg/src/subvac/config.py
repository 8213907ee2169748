"""YAML scenario configs and their translation into model objects.

Errors name the offending field and, when the file is available, its line.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from pathlib import Path

import numpy as np
import yaml

from .cavity import CavityGeometry, Position, field_point
from .errors import InputError, SubvacError
from .oracle import OracleConfig
from .perturbation import AtomParams, RegimeThresholds, TransitWindow
from .states import (
    FieldPoint,
    PhotonState,
    make_number_state,
    make_random_state,
    make_squeezed_vacuum,
    make_vacuum,
    make_vacuum_plus_two,
)


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads 1e5 and 1.0e-3 as floats (YAML 1.1 wants a sign and a dot)."""


_FLOAT = re.compile(
    r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
    |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
    |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
    |[-+]?\.(?:inf|Inf|INF)
    |\.(?:nan|NaN|NAN))$""",
    re.X,
)
_Loader.yaml_implicit_resolvers = {k: list(v) for k, v in yaml.SafeLoader.yaml_implicit_resolvers.items()}
for _ch in "-+0123456789.":
    _Loader.yaml_implicit_resolvers[_ch] = [
        (tag, rx) for tag, rx in _Loader.yaml_implicit_resolvers.get(_ch, []) if tag != "tag:yaml.org,2002:float"
    ]
_Loader.add_implicit_resolver("tag:yaml.org,2002:float", _FLOAT, list("-+0123456789."))


class ConfigError(SubvacError):
    """Malformed or inconsistent scenario configuration."""


class Scenario:
    """Parsed config mapping plus the source line of every key."""

    def __init__(self, data: dict | None = None, lines: dict | None = None, source: str = "<defaults>"):
        self.data = data or {}
        self.lines = lines or {}
        self.source = source

    def where(self, *path) -> str:
        dotted = ".".join(str(p) for p in path)
        line = self.lines.get(tuple(path))
        loc = f"{self.source}:{line}" if line else self.source
        return f"{loc}: field '{dotted}'"

    def section(self, name: str) -> dict | None:
        sec = self.data.get(name)
        if sec is not None and not isinstance(sec, dict):
            raise ConfigError(f"{self.where(name)} must be a mapping")
        return sec

    def number(self, section: str, key: str, default=None, required: bool = True) -> float | None:
        sec = self.section(section) or {}
        if key not in sec:
            if default is None and required:
                raise ConfigError(f"{self.where(section, key)} is required")
            return default
        value = sec[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{self.where(section, key)} must be a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{self.where(section, key)} must be finite, got {value!r}")
        return float(value)

    def integer(self, section: str, key: str, default=None) -> int | None:
        sec = self.section(section) or {}
        if key not in sec:
            if default is None:
                raise ConfigError(f"{self.where(section, key)} is required")
            return default
        value = sec[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{self.where(section, key)} must be an integer, got {value!r}")
        return value

    def digest(self) -> str:
        blob = json.dumps(self.data, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def _line_map(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            p = path + (key_node.value,)
            out[p] = key_node.start_mark.line + 1
            _line_map(value_node, p, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _line_map(item, path + (i,), out)
    return out


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        data = yaml.load(text, Loader=_Loader)
        node = yaml.compose(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(f"{loc}: YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    return Scenario(data, _line_map(node) if node is not None else {}, source)


def load_scenario(path: str | Path | None) -> Scenario:
    if path is None:
        return Scenario()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_scenario(text, str(path))


def _wrap(scn: Scenario, section: str, build):
    try:
        return build()
    except ConfigError:
        raise
    except InputError as exc:
        raise ConfigError(f"{scn.where(section)}: {exc}") from None


def build_state(scn: Scenario, seed: int | None = None) -> PhotonState:
    sec = scn.section("state")
    if sec is None:
        raise ConfigError(f"{scn.where('state')} is required")
    kind = sec.get("kind")

    def build():
        if kind == "vacuum":
            return make_vacuum(scn.integer("state", "dim", 3))
        if kind == "number":
            return make_number_state(scn.integer("state", "n"), scn.integer("state", "dim", scn.integer("state", "n") + 3))
        if kind == "vacuum_plus_two":
            return make_vacuum_plus_two(scn.number("state", "beta"), scn.integer("state", "dim", 3))
        if kind == "squeezed_vacuum":
            dim = sec.get("dim")
            if dim is not None:
                dim = scn.integer("state", "dim")
            return make_squeezed_vacuum(scn.number("state", "r"), scn.number("state", "phi", 0.0), dim)
        if kind == "amplitudes":
            re = sec.get("real")
            im = sec.get("imag", [0.0] * len(re or []))
            if not isinstance(re, list) or not isinstance(im, list) or len(re) != len(im):
                raise ConfigError(f"{scn.where('state', 'real')} and 'imag' must be equal-length lists")
            return PhotonState(np.asarray(re, float) + 1j * np.asarray(im, float))
        if kind == "random":
            s = seed if seed is not None else scn.integer("state", "seed", 0)
            return make_random_state(scn.integer("state", "dim"), np.random.default_rng(s))
        raise ConfigError(
            f"{scn.where('state', 'kind')} must be one of vacuum, number, vacuum_plus_two, "
            f"squeezed_vacuum, amplitudes, random; got {kind!r}"
        )

    return _wrap(scn, "state", build)


def build_geometry(scn: Scenario) -> CavityGeometry | None:
    if scn.section("geometry") is None:
        return None
    return _wrap(scn, "geometry", lambda: CavityGeometry(
        scn.number("geometry", "a"), scn.number("geometry", "b"), scn.number("geometry", "d")))


def build_position(scn: Scenario, g: CavityGeometry) -> Position:
    if scn.section("position") is None:
        return g.center()
    c = g.center()
    return Position(
        scn.number("position", "x", c.x),
        scn.number("position", "y", c.y),
        scn.number("position", "z", c.z),
    )


def build_field(scn: Scenario) -> tuple[FieldPoint, CavityGeometry | None, Position | None]:
    """Field point from ``field: {f_squared, omega}`` or from ``geometry`` + ``position``."""
    if scn.section("field") is not None:
        fp = _wrap(scn, "field", lambda: FieldPoint(
            scn.number("field", "f_squared"), scn.number("field", "omega")))
        return fp, None, None
    g = build_geometry(scn)
    if g is None:
        raise ConfigError(f"{scn.where('field')}: give either 'field' or 'geometry'")
    p = build_position(scn, g)
    return _wrap(scn, "position", lambda: field_point(g, p)), g, p


def build_atom(scn: Scenario, omega: float | None = None) -> AtomParams:
    sec = scn.section("atom")
    if sec is None:
        raise ConfigError(f"{scn.where('atom')} is required")
    de = sec.get("delta_eps")
    if de == "resonant":
        if omega is None:
            raise ConfigError(f"{scn.where('atom', 'delta_eps')}: 'resonant' needs a mode frequency")
        de = omega
    else:
        de = scn.number("atom", "delta_eps")
    tau = scn.number("atom", "lifetime_tau", required=False)
    return _wrap(scn, "atom", lambda: AtomParams(de, scn.number("atom", "dipole", 1.0), tau))


def build_window(scn: Scenario) -> TransitWindow:
    sec = scn.section("window")
    if sec is None:
        raise ConfigError(f"{scn.where('window')} is required")
    t0 = scn.number("window", "t0", 0.0)
    if "t1" in sec:
        t1 = scn.number("window", "t1")
    else:
        t1 = t0 + scn.number("window", "duration")
    return _wrap(scn, "window", lambda: TransitWindow(t0, t1))


def build_thresholds(scn: Scenario) -> RegimeThresholds:
    d = RegimeThresholds()
    if scn.section("thresholds") is None:
        return d
    return RegimeThresholds(
        scn.number("thresholds", "much_less", d.much_less),
        scn.number("thresholds", "much_greater", d.much_greater),
        scn.number("thresholds", "resonance_tolerance", d.resonance_tolerance),
    )


def build_oracle_config(scn: Scenario) -> OracleConfig:
    d = OracleConfig()
    sec = scn.section("oracle") or {}
    integrator = sec.get("integrator", d.integrator)
    return _wrap(scn, "oracle", lambda: OracleConfig(
        truncation_dim=scn.integer("oracle", "truncation_dim", d.truncation_dim),
        integrator=integrator,
        tolerance=scn.number("oracle", "tolerance", d.tolerance),
        steps=scn.integer("oracle", "steps", d.steps),
        leakage_tol=scn.number("oracle", "leakage_tol", d.leakage_tol),
    ))


def build_grid(scn: Scenario, section: str, start: float, stop: float, steps: int) -> np.ndarray:
    if scn.section(section) is not None:
        start = scn.number(section, "start", start)
        stop = scn.number(section, "stop", stop)
        steps = scn.integer(section, "steps", steps)
    if steps < 1:
        raise ConfigError(f"{scn.where(section, 'steps')} must be >= 1, got {steps}")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ConfigError(f"{scn.where(section)}: range must be finite")
    return np.linspace(start, stop, steps)
