"""Sweep configuration: flat ``key = value`` files plus command-line overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from .params import DEFAULT_MAX_L, ModelParams, ParameterError, make_params

AXES = ("J", "omega", "L", "spread")
OBSERVABLES = ("widths", "spacing", "npc", "sigma", "census", "theory")

MODEL_KEYS = ("L", "omega", "omega0", "nu", "profile", "a", "b", "spread", "field_seed",
              "coupling", "J", "random", "seed")

# key -> (type, default)
SWEEP_KEYS: Dict[str, Tuple[type, Any]] = {
    "axis": (str, None),
    "values": (list, None),
    "ensemble": (int, 1),
    "observables": (list, []),
    "bins": (int, 40),
    "s_max": (float, 4.0),
    "threshold": (float, 1e-6),
    "representation": (str, "mean-field"),
    "unfolding": (str, "local"),
    "window": (int, 21),
    "master_seed": (int, 0),
    "workers": (int, 0),
    "output": (str, None),
    "format": (str, "csv"),
    "overwrite": (bool, False),
    "allow_large": (bool, False),
    "timing": (bool, False),
}

MODEL_TYPES: Dict[str, type] = {
    "L": int, "omega": float, "omega0": float, "nu": float, "profile": str, "a": float,
    "b": float, "spread": float, "field_seed": int, "coupling": str, "J": float,
    "random": bool, "seed": int,
}

MODEL_DEFAULTS = {"omega": 100.0, "omega0": 100.0, "a": 1.0, "profile": "gradient", "coupling": "N"}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass(frozen=True)
class SweepConfig:
    """A grid of parameter points times an ensemble of seeds."""

    base: Dict[str, Any]
    axis: Optional[str] = None
    values: Tuple[float, ...] = ()
    ensemble: int = 1
    observables: Tuple[str, ...] = ()
    bins: int = 40
    s_max: float = 4.0
    threshold: float = 1e-6
    representation: str = "mean-field"
    unfolding: str = "local"
    window: int = 21
    master_seed: int = 0
    workers: int = 0
    output: Optional[str] = None
    format: str = "csv"
    overwrite: bool = False
    allow_large: bool = False
    timing: bool = False

    @property
    def grid(self) -> Tuple:
        return self.values if self.axis else (None,)

    def base_params(self) -> ModelParams:
        return make_params(self.model_record())

    def model_record(self, axis_value=None) -> Dict[str, Any]:
        rec = dict(self.base)
        if self.axis is not None and axis_value is not None:
            rec[self.axis] = int(axis_value) if self.axis == "L" else axis_value
        if self.allow_large:
            rec["max_L"] = max(int(rec["L"]), DEFAULT_MAX_L)
        return rec

    def echo(self) -> Dict[str, Any]:
        """Flat description used as the output header block."""
        out = {f"model.{k}": v for k, v in self.base.items()}
        out.update(axis=self.axis or "", values=",".join(format(v, ".17g") for v in self.values),
                   ensemble=self.ensemble, observables=",".join(self.observables),
                   bins=self.bins, s_max=self.s_max, threshold=self.threshold,
                   representation=self.representation, unfolding=self.unfolding, window=self.window,
                   master_seed=self.master_seed)
        return out


def _convert(key: str, typ: type, raw: Any):
    if raw is None:
        return None
    try:
        if typ is bool:
            if isinstance(raw, bool):
                return raw
            t = str(raw).strip().lower()
            if t in ("true", "yes", "1", "on"):
                return True
            if t in ("false", "no", "0", "off"):
                return False
            raise ValueError
        if typ is int:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError
            v = float(raw) if isinstance(raw, str) and any(c in raw for c in ".eE") else raw
            if isinstance(v, float) and not v.is_integer():
                raise ValueError
            return int(v)
        if typ is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if typ is list:
            if isinstance(raw, (list, tuple)):
                return list(raw)
            return [x.strip() for x in str(raw).split(",") if x.strip()]
        return str(raw).strip()
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected {typ.__name__}, got {raw!r}") from None


def parse_text(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def expand_values(spec) -> List[float]:
    """Grid values from a list, or from ``log:start:stop:n`` / ``lin:start:stop:n``."""
    items = spec if isinstance(spec, list) else [spec]
    if len(items) == 1 and isinstance(items[0], str) and items[0].split(":")[0] in ("log", "lin"):
        parts = items[0].split(":")
        if len(parts) != 4:
            raise ConfigError(f"values: expected kind:start:stop:n, got {items[0]!r}")
        try:
            a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"values: bad range {items[0]!r}") from None
        if n < 1:
            raise ConfigError("values: need at least one point")
        if parts[0] == "log":
            if a <= 0 or b <= 0:
                raise ConfigError("values: log range needs positive bounds")
            return [float(x) for x in np.geomspace(a, b, n)]
        return [float(x) for x in np.linspace(a, b, n)]
    try:
        return [float(x) for x in items]
    except (TypeError, ValueError):
        raise ConfigError(f"values: expected numbers, got {spec!r}") from None


def parse_config(text: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> SweepConfig:
    """Build a validated :class:`SweepConfig`; ``overrides`` win over ``text``.

    Override values of None are ignored (unset command-line flags).
    """
    raw: Dict[str, Any] = parse_text(text) if text else {}
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    unknown = sorted(set(raw) - set(MODEL_KEYS) - set(SWEEP_KEYS))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    base: Dict[str, Any] = dict(MODEL_DEFAULTS)
    for k in MODEL_KEYS:
        if k in raw:
            base[k] = _convert(k, MODEL_TYPES[k], raw[k])
    if "L" not in base:
        raise ConfigError("L: required")
    base.setdefault("omega0", 100.0)
    base.setdefault("nu", base["omega0"])
    if base.get("profile", "gradient") != "gradient" and "a" not in raw:
        base.pop("a", None)

    sw = {}
    for k, (typ, default) in SWEEP_KEYS.items():
        sw[k] = _convert(k, typ, raw[k]) if k in raw else default

    axis = sw["axis"] or None
    if axis is not None and axis not in AXES:
        raise ConfigError(f"axis: must be one of {', '.join(AXES)}, got {axis!r}")
    values: Tuple[float, ...] = ()
    if axis is not None:
        if sw["values"] is None:
            raise ConfigError("values: required when an axis is given")
        values = tuple(expand_values(sw["values"]))
        if not values:
            raise ConfigError("values: must not be empty")
        d = np.diff(values)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ConfigError("values: must be strictly monotone")
        if axis == "L" and any(float(v) != int(v) for v in values):
            raise ConfigError("values: L values must be integers")
        if axis == "L" and str(base.get("coupling", "")).lower() == "custom":
            raise ConfigError("axis: cannot sweep L with a fixed-size custom coupling matrix")
        if axis == "spread" and base.get("profile") != "homogeneous":
            raise ConfigError("axis: spread sweeps need profile = homogeneous")
    elif sw["values"]:
        raise ConfigError("values: given without an axis")

    obs = tuple(str(o).strip().lower() for o in sw["observables"])
    bad = [o for o in obs if o not in OBSERVABLES]
    if bad:
        raise ConfigError(f"observables: unknown {', '.join(bad)}; choose from {', '.join(OBSERVABLES)}")
    if sw["ensemble"] < 1:
        raise ConfigError("ensemble: must be >= 1")
    randomised = bool(base.get("random")) or base.get("profile") == "homogeneous"
    if sw["ensemble"] > 1 and not randomised:
        raise ConfigError("ensemble: more than one member needs random couplings or a homogeneous random field")
    if sw["bins"] < 1:
        raise ConfigError("bins: must be >= 1")
    if sw["s_max"] <= 0:
        raise ConfigError("s_max: must be > 0")
    if sw["representation"] not in ("z", "mean-field"):
        raise ConfigError("representation: must be 'z' or 'mean-field'")
    if sw["unfolding"] not in ("local", "mean"):
        raise ConfigError("unfolding: must be 'local' or 'mean'")
    if sw["format"] not in ("csv", "jsonl"):
        raise ConfigError("format: must be 'csv' or 'jsonl'")
    if sw["workers"] < 0:
        raise ConfigError("workers: must be >= 0")

    cfg = SweepConfig(base=base, axis=axis, values=values, ensemble=sw["ensemble"], observables=obs,
                      bins=sw["bins"], s_max=sw["s_max"], threshold=sw["threshold"],
                      representation=sw["representation"], unfolding=sw["unfolding"], window=sw["window"],
                      master_seed=sw["master_seed"], workers=sw["workers"], output=sw["output"],
                      format=sw["format"], overwrite=sw["overwrite"], allow_large=sw["allow_large"],
                      timing=sw["timing"])
    # validate every grid point's model up front
    try:
        for v in cfg.grid:
            make_params(cfg.model_record(v))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    return cfg
