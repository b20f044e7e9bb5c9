"""Model parameters, field profiles and coupling specifications.

Randomness everywhere in the package goes through :func:`make_rng`, a
``numpy`` PCG64 generator seeded from a ``SeedSequence``.  Child streams
are derived with ``spawn_key`` tuples, so a stream depends only on the
master seed and its key, never on the order in which streams are drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Union

import numpy as np

DEFAULT_MAX_L = 14

# spawn keys separating independent random streams that share one seed
_FIELD_STREAM = 0
_COUPLING_STREAM = 1


class ParameterError(ValueError):
    """Raised for invalid model or coupling parameters."""


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` and an optional spawn key path."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def uniform_pm1(rng: np.random.Generator, size: int) -> np.ndarray:
    # Generator.random draws 53-bit mantissas on [0, 1)
    return 2.0 * rng.random(size) - 1.0


# --------------------------------------------------------------------------
# field profiles


@dataclass(frozen=True)
class ConstantGradient:
    """omega_k = omega0 + a*k."""

    a: float = 1.0

    def frequencies(self, L: int, omega0: float, nu: float) -> np.ndarray:
        return omega0 + self.a * np.arange(L, dtype=float)


@dataclass(frozen=True)
class QuadraticGradient:
    """omega_k = omega0 + b*k**2."""

    b: float = 1.0

    def frequencies(self, L: int, omega0: float, nu: float) -> np.ndarray:
        k = np.arange(L, dtype=float)
        return omega0 + self.b * k**2


@dataclass(frozen=True)
class Homogeneous:
    """omega_k drawn uniformly in (nu - spread/2, nu + spread/2)."""

    spread: float = 0.0
    seed: int = 0

    def frequencies(self, L: int, omega0: float, nu: float) -> np.ndarray:
        if self.spread == 0.0:
            return np.full(L, float(nu))
        rng = make_rng(self.seed, _FIELD_STREAM)
        return nu + self.spread * (rng.random(L) - 0.5)


FieldProfile = Union[ConstantGradient, QuadraticGradient, Homogeneous]


# --------------------------------------------------------------------------
# couplings

COUPLING_KINDS = ("N", "NN", "A", "Custom")


@dataclass(frozen=True)
class CouplingSpec:
    """Which bonds exist and how strong they are.

    ``kind`` selects the bond pattern: ``N`` nearest neighbours,
    ``NN`` distances 1 and 2, ``A`` all pairs, ``Custom`` an explicit
    symmetric matrix (scaled by ``J``).  With ``random`` every bond is
    ``J * xi`` with ``xi`` uniform in [-1, 1].
    """

    kind: str = "N"
    J: float = 1.0
    random: bool = False
    seed: int = 0
    custom_matrix: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in COUPLING_KINDS:
            raise ParameterError(f"unknown coupling kind {self.kind!r}")
        if not math.isfinite(self.J):
            raise ParameterError("coupling J must be finite")
        if self.kind == "Custom":
            if self.custom_matrix is None:
                raise ParameterError("Custom coupling requires custom_matrix")
            m = np.array(self.custom_matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ParameterError("custom_matrix must be square")
            if not np.all(np.isfinite(m)):
                raise ParameterError("custom_matrix must be finite")
            if not np.array_equal(m, m.T):
                raise ParameterError("custom_matrix must be symmetric")
            if np.any(np.diag(m) != 0.0):
                raise ParameterError("custom_matrix must have zero diagonal")
            m.flags.writeable = False
            object.__setattr__(self, "custom_matrix", m)

    def bond_pattern(self, L: int) -> np.ndarray:
        """Boolean upper-triangular mask of the bonds present for ``L`` sites."""
        k, n = np.indices((L, L))
        dist = n - k
        if self.kind == "N":
            return dist == 1
        if self.kind == "NN":
            return (dist == 1) | (dist == 2)
        if self.kind == "A":
            return dist >= 1
        return (dist >= 1) & (self.custom_matrix != 0.0)


def coupling_matrix(spec: CouplingSpec, L: int) -> np.ndarray:
    """Symmetric L x L matrix of bond strengths J_{k,n} with zero diagonal.

    Random bonds are drawn in row-major order over the upper triangle, so
    a given seed always assigns the same xi to the same bond.
    """
    if spec.kind == "Custom" and spec.custom_matrix.shape != (L, L):
        raise ParameterError(f"custom_matrix has shape {spec.custom_matrix.shape}, expected ({L}, {L})")
    mask = spec.bond_pattern(L)
    J = np.zeros((L, L))
    if spec.kind == "Custom":
        J[mask] = spec.J * spec.custom_matrix[mask]
    else:
        J[mask] = spec.J
    if spec.random:
        rows, cols = np.nonzero(mask)
        xi = uniform_pm1(make_rng(spec.seed, _COUPLING_STREAM), rows.size)
        J[rows, cols] *= xi
    J = J + J.T
    J.flags.writeable = False
    return J


# --------------------------------------------------------------------------
# model parameters


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of one qubit chain.

    The detunings ``delta`` are materialised at construction, so a
    homogeneous random field is frozen disorder for the lifetime of the
    object.
    """

    L: int
    omega: float = 100.0
    omega0: float = 100.0
    nu: float = 100.0
    field_profile: FieldProfile = ConstantGradient(1.0)
    coupling: CouplingSpec = CouplingSpec()
    max_L: int = DEFAULT_MAX_L
    delta: np.ndarray = field(init=False, repr=False, compare=False)
    couplings: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.L, bool) or int(self.L) != self.L:
            raise ParameterError("L must be an integer")
        object.__setattr__(self, "L", int(self.L))
        if self.L < 2:
            raise ParameterError(f"L must be >= 2, got {self.L}")
        if self.L > self.max_L:
            raise ParameterError(f"L={self.L} exceeds the configured maximum {self.max_L}")
        for name in ("omega", "omega0", "nu"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if not self.omega > 0:
            raise ParameterError(f"omega must be > 0, got {self.omega}")
        prof = self.field_profile
        if isinstance(prof, Homogeneous):
            if not (math.isfinite(prof.spread) and prof.spread >= 0):
                raise ParameterError("homogeneous spread must be finite and >= 0")
        elif isinstance(prof, ConstantGradient):
            if not math.isfinite(prof.a):
                raise ParameterError("gradient a must be finite")
        elif isinstance(prof, QuadraticGradient):
            if not math.isfinite(prof.b):
                raise ParameterError("gradient b must be finite")
        else:
            raise ParameterError(f"unknown field profile {prof!r}")
        delta = prof.frequencies(self.L, self.omega0, self.nu) - self.nu
        delta.flags.writeable = False
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "couplings", coupling_matrix(self.coupling, self.L))

    @property
    def dim(self) -> int:
        return 1 << self.L

    @property
    def J(self) -> float:
        return self.coupling.J

    @property
    def gradient(self) -> float:
        """Linear gradient a (0 for non-gradient profiles)."""
        prof = self.field_profile
        return prof.a if isinstance(prof, ConstantGradient) else 0.0

    def with_coupling(self, **changes) -> "ModelParams":
        return replace(self, coupling=replace(self.coupling, **changes))

    def with_field(self, **changes) -> "ModelParams":
        return replace(self, field_profile=replace(self.field_profile, **changes))

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def describe(self) -> dict:
        """Flat, JSON-friendly parameter echo."""
        prof = self.field_profile
        out = {"L": self.L, "omega": self.omega, "omega0": self.omega0, "nu": self.nu}
        if isinstance(prof, ConstantGradient):
            out.update(profile="gradient", a=prof.a)
        elif isinstance(prof, QuadraticGradient):
            out.update(profile="quadratic", b=prof.b)
        else:
            out.update(profile="homogeneous", spread=prof.spread, field_seed=prof.seed)
        c = self.coupling
        out.update(coupling=c.kind, J=c.J, random=c.random, seed=c.seed)
        return out


_PROFILE_ALIASES = {
    "gradient": "gradient", "constant": "gradient", "constantgradient": "gradient",
    "homogeneous": "homogeneous",
    "quadratic": "quadratic", "quadraticgradient": "quadratic",
}


def make_params(raw: Mapping[str, Any]) -> ModelParams:
    """Validate a flat configuration record into :class:`ModelParams`.

    Recognised keys: ``L, omega, omega0, nu, profile, a, b, spread,
    field_seed, coupling, J, random, seed, custom_matrix, max_L``.
    ``nu`` defaults to ``omega0`` so that delta_0 = 0.
    """
    known = {"L", "omega", "omega0", "nu", "profile", "a", "b", "spread", "field_seed",
             "coupling", "J", "random", "seed", "custom_matrix", "max_L"}
    unknown = set(raw) - known
    if unknown:
        raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
    if "L" not in raw:
        raise ParameterError("missing required key 'L'")

    def num(key, default):
        v = raw.get(key, default)
        try:
            v = float(v)
        except (TypeError, ValueError):
            raise ParameterError(f"{key}: expected a number, got {v!r}") from None
        if not math.isfinite(v):
            raise ParameterError(f"{key}: must be finite")
        return v

    omega0 = num("omega0", 100.0)
    nu = num("nu", omega0)
    profile = str(raw.get("profile", "gradient")).lower()
    if profile not in _PROFILE_ALIASES:
        raise ParameterError(f"profile: unknown field profile {raw['profile']!r}")
    profile = _PROFILE_ALIASES[profile]
    if profile == "gradient":
        prof: FieldProfile = ConstantGradient(num("a", 1.0))
    elif profile == "quadratic":
        prof = QuadraticGradient(num("b", 1.0))
    else:
        prof = Homogeneous(num("spread", 0.0), int(raw.get("field_seed", raw.get("seed", 0))))

    matrix = raw.get("custom_matrix")
    kind = str(raw.get("coupling", "Custom" if matrix is not None else "N"))
    kind = {"n": "N", "nn": "NN", "a": "A", "custom": "Custom"}.get(kind.lower(), kind)
    coupling = CouplingSpec(
        kind=kind,
        J=num("J", 1.0),
        random=_as_bool(raw.get("random", False), "random"),
        seed=int(raw.get("seed", 0)),
        custom_matrix=None if matrix is None else np.asarray(matrix, dtype=float),
    )
    L = raw["L"]
    try:
        L_int = int(L)
    except (TypeError, ValueError):
        raise ParameterError(f"L: expected an integer, got {L!r}") from None
    if L_int != float(L):
        raise ParameterError(f"L: expected an integer, got {L!r}")
    return ModelParams(
        L=L_int, omega=num("omega", 100.0), omega0=omega0, nu=nu,
        field_profile=prof, coupling=coupling, max_L=int(raw.get("max_L", DEFAULT_MAX_L)),
    )


def _as_bool(v, key: str) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, np.integer)) and v in (0, 1):
        return bool(v)
    if isinstance(v, str) and v.lower() in ("true", "yes", "1", "false", "no", "0"):
        return v.lower() in ("true", "yes", "1")
    raise ParameterError(f"{key}: expected a boolean, got {v!r}")


def gradient_chain(L: int, omega: float = 100.0, J: float = 1.0, a: float = 1.0,
                   kind: str = "N", random: bool = False, seed: int = 0) -> ModelParams:
    """Constant-gradient chain with nu = omega0, the most common setup."""
    return ModelParams(L=L, omega=omega, field_profile=ConstantGradient(a),
                       coupling=CouplingSpec(kind=kind, J=J, random=random, seed=seed))


def popcounts(L: int) -> np.ndarray:
    """Number of set bits of every basis index 0 .. 2**L - 1."""
    s = np.arange(1 << L)
    bits = (s[:, None] >> np.arange(L)) & 1
    return bits.sum(axis=1)


def spin_signs(L: int) -> np.ndarray:
    """m_k(s) for every basis state: +1/2 for bit 0, -1/2 for bit 1; shape (2**L, L)."""
    s = np.arange(1 << L)
    bits = (s[:, None] >> np.arange(L)) & 1
    return 0.5 - bits

