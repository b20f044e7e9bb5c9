"""Closed-form band-width, delocalisation and chaos-border estimates.

All functions take plain numbers.  Order-unity constants are used exactly
as they appear in the analytic estimates; these are scaling laws, not
precise predictions.  Several of them (the overlap compatibility bound in
particular) mix quantities of different dimension unless a = 1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .params import ConstantGradient, Homogeneous, ModelParams


def n_central(L: int) -> int:
    """Number of states in the central band, C(L, L/2)."""
    if L % 2:
        raise ValueError(f"central band size needs even L, got {L}")
    return math.comb(L, L // 2)


def width_unperturbed(L: int, a: float, omega: float) -> float:
    """Central band width at J = 0: L^2 (L-1) a^2 / (8 Omega)."""
    if L % 2:
        raise ValueError(f"needs even L, got {L}")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return L**2 * (L - 1) * a**2 / (8.0 * omega)


def width_interacting(L: int, a: float, J: float) -> float:
    """Interaction-dominated band width (L-2) J a."""
    if L < 3:
        raise ValueError("needs L >= 3")
    return (L - 2) * J * a


def crossover_j0(L: int, a: float, omega: float) -> float:
    """J where the two width laws meet, approximately L^2 a / (8 Omega)."""
    return L**2 * a / (8.0 * omega)


def crossover_j0_exact(L: int, a: float, omega: float) -> float:
    """Root of width_unperturbed = width_interacting without dropping (L-1)/(L-2)."""
    return width_unperturbed(L, a, omega) / ((L - 2) * a)


@dataclass(frozen=True)
class OverlapEstimate:
    jb: float
    compatibility_bound: float   # J >= sqrt(L/8)
    any_j_min_L: float           # bands overlap for any J once L >= 2 (Omega/a)^(2/3)
    overlaps_for_any_j: bool


def overlap_jb(L: int, a: float, omega: float) -> OverlapEstimate:
    """Band-overlap coupling Omega / (a L) with its side conditions."""
    if a <= 0 or omega <= 0:
        raise ValueError("a and omega must be positive")
    lmin = 2.0 * (omega / a) ** (2.0 / 3.0)
    return OverlapEstimate(omega / (a * L), math.sqrt(L / 8.0), lmin, L >= lmin)


@dataclass(frozen=True)
class DelocBorder:
    delta_e_f: float
    m_f: float
    d_f: float
    j_cr: float


def deloc_border(kind: str, L: int, a: float, omega: float) -> DelocBorder:
    """Delocalisation border for N, NN or A coupling in a constant gradient.

    N and NN use (Delta E)_f = (a^2/Omega)(L - 3/2), M_f = L/2;
    A uses (Delta E)_f = a^2 L^2 / (2 Omega), M_f = L^2/4.  All three give
    J_cr = 4 a^2 / Omega, from J/2 = 2 a^2 / Omega.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if kind in ("N", "NN"):
        de = a**2 / omega * (L - 1.5)
        mf = L / 2.0
    elif kind == "A":
        de = a**2 * L**2 / (2.0 * omega)
        mf = L**2 / 4.0
    else:
        raise ValueError(f"no delocalisation estimate for coupling kind {kind!r}")
    # asymptotic spacing of directly coupled states, L >> 1
    d_f = 2.0 * a**2 / omega
    return DelocBorder(de, mf, d_f, 2.0 * d_f)


def chaos_border(L: int, a: float, omega: float) -> float:
    """J_c = (16/L) sqrt(a^2 L^2 + Omega^2)."""
    return 16.0 / L * math.sqrt(a**2 * L**2 + omega**2)


def deloc_border_homogeneous(L: int, omega: float, spread: float) -> float:
    """J_cr = spread^2 / (4 Omega L) for a randomly detuned homogeneous field."""
    if spread < 0:
        raise ValueError("spread must be >= 0")
    return spread**2 / (4.0 * omega * L)


@dataclass(frozen=True)
class ScalingReport:
    kind: str
    delta_e_f_scale: Optional[float]  # b^2 L^3 / Omega, proportionality only
    m_f_exponent: Optional[int]
    j_cr_exponent: Optional[int]


def quadratic_gradient_scaling(kind: str, L: int, b: float, omega: float) -> ScalingReport:
    """Scaling of the border for omega_k = omega0 + b k^2.

    (Delta E)_f grows like L^3; M_f ~ L (N) or L^2 (A), so J_cr ~ L^2 or L.
    Absolute prefactors are not known and are not reported.
    """
    if kind not in ("N", "A"):
        raise ValueError("scaling is known for N and A coupling only")
    if b == 0:
        return ScalingReport(kind, None, None, None)
    m_exp = 1 if kind == "N" else 2
    return ScalingReport(kind, b**2 * L**3 / omega, m_exp, 3 - m_exp)


@dataclass(frozen=True)
class BorderEstimates:
    n_cb: Optional[int]
    width_J0: float
    width_Jdom: float
    j0_crossover: float
    jb_overlap: float
    delta_e_f: float
    m_f: float
    d_f: float
    j_cr_deloc: float
    j_chaos: float
    j_cr_homogeneous: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)


def border_estimates(params: ModelParams) -> BorderEstimates:
    """Every estimate evaluated for ``params`` (gradient a = 0 for non-gradient fields)."""
    L, om, J = params.L, params.omega, params.J
    prof = params.field_profile
    a = prof.a if isinstance(prof, ConstantGradient) else 0.0
    kind = params.coupling.kind if params.coupling.kind in ("N", "NN", "A") else "N"
    deloc = deloc_border(kind, L, a, om)
    even = L % 2 == 0
    jhom = deloc_border_homogeneous(L, om, prof.spread) if isinstance(prof, Homogeneous) else None
    return BorderEstimates(
        n_cb=n_central(L) if even else None,
        width_J0=width_unperturbed(L, a, om) if even else float("nan"),
        width_Jdom=width_interacting(L, a, J) if L >= 3 else float("nan"),
        j0_crossover=crossover_j0(L, a, om),
        jb_overlap=om / (a * L) if a > 0 else float("inf"),
        delta_e_f=deloc.delta_e_f, m_f=deloc.m_f, d_f=deloc.d_f, j_cr_deloc=deloc.j_cr,
        j_chaos=chaos_border(L, a, om),
        j_cr_homogeneous=jhom,
    )
