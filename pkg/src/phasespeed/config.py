"""Scenario configuration: flat ``key = value`` lines under ``[section]`` headers.

Example::

    scenario = quench-classical

    [units]
    hbar = 1
    mass = 1
    omega0 = 1

    [state]
    kind = classical-gaussian 0.7071067811865476 0.7071067811865476

    [time]
    t_max = 5        # in units of 1/omega0
    steps = 500

    [bounds]
    evaluate = csl, csl-timeavg

Keys outside the schema are rejected, with the offending line number.
"""

from dataclasses import dataclass, field
import math
from pathlib import Path

from .bounds import Bound
from .exceptions import ConfigError
from .states import MAX_LEVEL, GaussianSpec, UnitsSpec

SCENARIOS = ("quench-classical", "quench-quantum", "stationary", "custom-omega")
STATE_KINDS = ("ho-eigenstate", "gaussian", "classical-gaussian")

_SCHEMA = {
    "": {"scenario"},
    "units": {"hbar", "mass", "omega0"},
    "grid": {"n", "halfwidth_sigmas"},
    "state": {"kind", "center_q", "center_p"},
    "hamiltonian": {"omega_final"},
    "time": {"t_max", "steps"},
    "bounds": {"evaluate"},
    "output": {"dir"},
}

_DEFAULT_BOUNDS = {
    "classical-gaussian": (Bound.CSL, Bound.CSL_TIMEAVG),
    "ho-eigenstate": (Bound.QSL, Bound.SSL),
    "gaussian": (Bound.QSL, Bound.SSL),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed run configuration.  Times and frequencies are in units of omega0."""

    scenario: str = "quench-classical"
    units: UnitsSpec = field(default_factory=UnitsSpec)
    grid_n: int = 512
    halfwidth_sigmas: float = 8.0
    state_kind: str = "classical-gaussian"
    level: int = 0
    sigma_q: float | None = None
    sigma_p: float | None = None
    center_q: float = 0.0
    center_p: float = 0.0
    omega_final: float | None = None
    t_max: float = 5.0
    steps: int = 500
    bounds: tuple = (Bound.CSL, Bound.CSL_TIMEAVG)
    out_dir: str = "out"

    @property
    def quantum(self):
        return self.state_kind != "classical-gaussian"

    def gaussian_spec(self):
        """Widths and centre of the initial state; unset widths match the trap."""
        matched = self.units.matched_gaussian()
        return GaussianSpec(self.center_q, self.center_p,
                            matched.sigma_q if self.sigma_q is None else self.sigma_q,
                            matched.sigma_p if self.sigma_p is None else self.sigma_p)

    def post_quench_omega(self):
        w0 = self.units.omega0
        if self.scenario in ("quench-classical", "quench-quantum"):
            return 0.0
        if self.scenario == "stationary":
            return w0
        return self.omega_final * w0


def _number(raw, lineno, key, kind=float):
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}", lineno) from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite", lineno)
    return value


def _read(text):
    """Return {section: {key: (value, lineno)}} with strict structure checks."""
    entries = {"": {}}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            if section in entries:
                raise ConfigError(f"duplicate section [{section}]", lineno)
            entries[section] = {}
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if key not in _SCHEMA[section]:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"unknown key {key!r} in {where}", lineno)
        if key in entries[section]:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigError(f"{key}: missing value", lineno)
        entries[section][key] = (value, lineno)
    return entries


def parse_config(text):
    """Parse configuration text into a :class:`ScenarioConfig`.

    Raises
    ------
    ConfigError
        On a syntax error or any key or value outside the schema.
    """
    e = _read(text)
    get = lambda sec, key: e.get(sec, {}).get(key)  # noqa: E731
    kw = {}

    if (item := get("", "scenario")) is not None:
        if item[0] not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}", item[1])
        kw["scenario"] = item[0]
    scenario = kw.get("scenario", "quench-classical")

    units = {}
    for key in ("hbar", "mass", "omega0"):
        if (item := get("units", key)) is not None:
            units[key] = _number(item[0], item[1], key)
            if units[key] <= 0.0:
                raise ConfigError(f"{key} must be positive", item[1])
    kw["units"] = UnitsSpec(**units)

    if (item := get("grid", "n")) is not None:
        kw["grid_n"] = _number(item[0], item[1], "n", int)
        if kw["grid_n"] < 16:
            raise ConfigError("n must be at least 16", item[1])
    if (item := get("grid", "halfwidth_sigmas")) is not None:
        kw["halfwidth_sigmas"] = _number(item[0], item[1], "halfwidth_sigmas")
        if kw["halfwidth_sigmas"] <= 0.0:
            raise ConfigError("halfwidth_sigmas must be positive", item[1])

    kind = "classical-gaussian" if scenario == "quench-classical" else "ho-eigenstate"
    if (item := get("state", "kind")) is not None:
        value, lineno = item
        kind, *args = value.split()
        if kind not in STATE_KINDS:
            raise ConfigError(f"state kind must be one of {', '.join(STATE_KINDS)}", lineno)
        if kind == "ho-eigenstate":
            if len(args) > 1:
                raise ConfigError("ho-eigenstate takes one level argument", lineno)
            if args:
                kw["level"] = _number(args[0], lineno, "level", int)
                if not 0 <= kw["level"] <= MAX_LEVEL:
                    raise ConfigError(f"level must lie in 0..{MAX_LEVEL}", lineno)
        else:
            if len(args) not in (0, 2):
                raise ConfigError(f"{kind} takes sigma_q and sigma_p (or nothing)", lineno)
            if args:
                kw["sigma_q"] = _number(args[0], lineno, "sigma_q")
                kw["sigma_p"] = _number(args[1], lineno, "sigma_p")
                if kw["sigma_q"] <= 0.0 or kw["sigma_p"] <= 0.0:
                    raise ConfigError("widths must be positive", lineno)
    kw["state_kind"] = kind
    for key in ("center_q", "center_p"):
        if (item := get("state", key)) is not None:
            if kind == "ho-eigenstate":
                raise ConfigError(f"{key} does not apply to ho-eigenstate", item[1])
            kw[key] = _number(item[0], item[1], key)

    item = get("hamiltonian", "omega_final")
    if scenario == "custom-omega":
        if item is None:
            raise ConfigError("custom-omega needs [hamiltonian] omega_final")
        kw["omega_final"] = _number(item[0], item[1], "omega_final")
        if kw["omega_final"] < 0.0:
            raise ConfigError("omega_final must be non-negative", item[1])
    elif item is not None:
        raise ConfigError("omega_final applies only to scenario custom-omega", item[1])

    if (item := get("time", "t_max")) is not None:
        kw["t_max"] = _number(item[0], item[1], "t_max")
        if kw["t_max"] <= 0.0:
            raise ConfigError("t_max must be positive", item[1])
    if (item := get("time", "steps")) is not None:
        kw["steps"] = _number(item[0], item[1], "steps", int)
        if kw["steps"] < 100:
            raise ConfigError("steps must be at least 100", item[1])

    bounds = _DEFAULT_BOUNDS[kind]
    if (item := get("bounds", "evaluate")) is not None:
        value, lineno = item
        names = [n.strip() for n in value.split(",") if n.strip()]
        try:
            bounds = tuple(Bound(n) for n in names)
        except ValueError:
            raise ConfigError(
                f"bounds must be drawn from {', '.join(b.value for b in Bound)}", lineno
            ) from None
        if not bounds or len(set(bounds)) != len(bounds):
            raise ConfigError("bounds must be a non-empty list without repeats", lineno)
        for b in bounds:
            if not b.classical and kind == "classical-gaussian":
                raise ConfigError(f"{b.value} needs a quantum state", lineno)
            if b.classical and kind == "ho-eigenstate" and kw.get("level", 0) > 0:
                raise ConfigError(
                    f"{b.value} needs a non-negative Wigner function; level > 0 is not",
                    lineno,
                )
    kw["bounds"] = bounds

    if (item := get("output", "dir")) is not None:
        kw["out_dir"] = item[0]
    return ScenarioConfig(**kw)


def load_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)
