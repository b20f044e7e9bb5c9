"""Band identification, band widths and nearest-neighbour spacing statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.ndimage import uniform_filter1d

from .eigensolve import EigensolveError, Spectrum, eigh
from .hamiltonian import build_z_hamiltonian
from .params import ModelParams

DEFAULT_BINS = 40
DEFAULT_S_MAX = 4.0
SMALL_S = 0.1


@dataclass(frozen=True)
class Band:
    """Inclusive index range [lo_index, hi_index] of a sorted spectrum."""

    lo_index: int
    hi_index: int
    e_min: float
    e_max: float

    @property
    def width(self) -> float:
        return self.e_max - self.e_min

    @property
    def center(self) -> float:
        return 0.5 * (self.e_min + self.e_max)

    @property
    def size(self) -> int:
        return self.hi_index - self.lo_index + 1

    def energies(self, spec: Spectrum) -> np.ndarray:
        return spec.eigenvalues[self.lo_index:self.hi_index + 1]


def _values(spec) -> np.ndarray:
    return spec.eigenvalues if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)


def identify_bands(spec, params: Optional[ModelParams] = None, gap: Optional[float] = None) -> List[Band]:
    """Split a sorted spectrum wherever consecutive levels differ by more than ``gap``.

    ``gap`` defaults to Omega/2 taken from ``params``.
    """
    w = _values(spec)
    if gap is None:
        if params is None:
            raise ValueError("need params or an explicit gap")
        gap = 0.5 * params.omega
    if w.size == 0:
        return []
    if np.any(np.diff(w) < 0):
        raise ValueError("spectrum must be sorted")
    cuts = np.nonzero(np.diff(w) > gap)[0]
    starts = np.concatenate(([0], cuts + 1))
    ends = np.concatenate((cuts, [w.size - 1]))
    return [Band(int(s), int(e), float(w[s]), float(w[e])) for s, e in zip(starts, ends)]


def central_band(bands: Sequence[Band], spec) -> Band:
    """Band whose centre is nearest the middle of the full spectrum."""
    if not bands:
        raise ValueError("empty band list")
    w = _values(spec)
    mid = 0.5 * (w[0] + w[-1])
    return min(bands, key=lambda b: abs(b.center - mid))


def central_band_index(bands: Sequence[Band], spec) -> int:
    return list(bands).index(central_band(bands, spec))


@dataclass(frozen=True)
class WidthPoint:
    """One grid point of a band-width scan."""

    value: float
    width: float
    e_min: float
    e_max: float
    n_bands: int
    lower_edges: Optional[tuple] = None  # (e_min, e_max) of the band just below
    upper_edges: Optional[tuple] = None
    error: Optional[str] = None


def central_band_width_scan(params: ModelParams, grid: Iterable[float], axis: str = "J") -> List[WidthPoint]:
    """Central band width and neighbouring band edges along an Omega or J grid."""
    if axis not in ("J", "omega"):
        raise ValueError("axis must be 'J' or 'omega'")
    out = []
    for x in grid:
        p = params.with_coupling(J=float(x)) if axis == "J" else params.replace(omega=float(x))
        try:
            spec = eigh(build_z_hamiltonian(p), vectors=False)
        except EigensolveError as exc:
            nan = float("nan")
            out.append(WidthPoint(float(x), nan, nan, nan, 0, error=str(exc)))
            continue
        bands = identify_bands(spec, p)
        i = central_band_index(bands, spec)
        c = bands[i]
        lower = (bands[i - 1].e_min, bands[i - 1].e_max) if i > 0 else None
        upper = (bands[i + 1].e_min, bands[i + 1].e_max) if i + 1 < len(bands) else None
        out.append(WidthPoint(float(x), c.width, c.e_min, c.e_max, len(bands), lower, upper))
    return out


# --------------------------------------------------------------------------
# spacing statistics


@dataclass(frozen=True)
class SpacingHistogram:
    """Probability density of mean-normalised nearest-neighbour spacings."""

    bin_edges: np.ndarray
    densities: np.ndarray
    mean_spacing: float
    sample_count: int
    overflow: int = 0

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def mass_below(self, s: float) -> float:
        """Integral of the histogram density over [0, s]."""
        lo, hi = self.bin_edges[:-1], self.bin_edges[1:]
        overlap = np.clip(np.minimum(hi, s) - lo, 0.0, None)
        return float(np.sum(self.densities * overlap))


UNFOLDINGS = ("local", "mean")
DEFAULT_UNFOLDING = "local"
DEFAULT_WINDOW = 21


DEGENERACY_RTOL = 1e-10


def degeneracy_tol(spec) -> float:
    """Gaps below this are rounding noise inside a degenerate cluster."""
    w = _values(spec)
    return DEGENERACY_RTOL * max(1.0, float(np.max(np.abs(w)))) if w.size else 0.0


def normalized_spacings(energies: np.ndarray, unfolding: str = DEFAULT_UNFOLDING,
                        window: int = DEFAULT_WINDOW, tol: Optional[float] = None) -> np.ndarray:
    """Consecutive spacings in units of the mean level spacing.

    Gaps not larger than ``tol`` (default: :func:`degeneracy_tol` of the
    energies themselves) are set to exactly zero, so numerically
    degenerate levels give s = 0 instead of amplified rounding noise.

    ``unfolding="mean"`` divides by the arithmetic mean of all spacings.
    ``unfolding="local"`` divides each spacing by the running mean of the
    ``window`` spacings centred on it, then rescales to unit mean; this
    removes the variation of the level density across a band.
    """
    e = np.sort(np.asarray(energies, dtype=float))
    s = np.diff(e)
    if s.size == 0:
        raise ValueError("need at least two levels")
    s[s <= (degeneracy_tol(e) if tol is None else tol)] = 0.0
    m = s.mean()
    if m <= 0:
        raise ValueError("all levels are degenerate; spacings cannot be normalised")
    if unfolding == "mean":
        return s / m
    if unfolding != "local":
        raise ValueError(f"unknown unfolding {unfolding!r}")
    if window < 1:
        raise ValueError("window must be >= 1")
    local = uniform_filter1d(s, size=min(window, s.size), mode="nearest")
    # runs of exactly degenerate levels have no local scale
    local = np.where(local > 0, local, m)
    u = s / local
    return u / u.mean()


def histogram_spacings(spacings: np.ndarray, bins: int = DEFAULT_BINS, s_max: float = DEFAULT_S_MAX,
                       mean_spacing: float = 1.0) -> SpacingHistogram:
    """Histogram already-normalised spacings; values beyond s_max land in the last bin."""
    s = np.asarray(spacings, dtype=float)
    if s.size == 0:
        raise ValueError("no spacings to histogram")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise ValueError("spacings must be finite and non-negative")
    if bins < 1 or s_max <= 0:
        raise ValueError("need bins >= 1 and s_max > 0")
    edges = np.linspace(0.0, s_max, bins + 1)
    overflow = int(np.sum(s >= s_max))
    idx = np.minimum((s / (s_max / bins)).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins).astype(float)
    dens = counts / (s.size * (s_max / bins))
    return SpacingHistogram(edges, dens, float(mean_spacing), int(s.size), overflow)


def spacing_distribution(spec, band: Band, bins: int = DEFAULT_BINS, s_max: float = DEFAULT_S_MAX,
                         unfolding: str = DEFAULT_UNFOLDING, window: int = DEFAULT_WINDOW) -> SpacingHistogram:
    """P(s) of consecutive levels inside ``band``."""
    if band.size < 2:
        raise ValueError(f"band has {band.size} level(s); need at least 2 for spacings")
    e = _values(spec)[band.lo_index:band.hi_index + 1]
    mean = float(np.diff(e).mean())
    s = normalized_spacings(e, unfolding, window, degeneracy_tol(spec))
    return histogram_spacings(s, bins, s_max, mean)


def pooled_spacings(spectra_and_bands, unfolding: str = DEFAULT_UNFOLDING, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Concatenate per-spectrum normalised in-band spacings (ensemble pooling)."""
    parts = []
    for spec, band in spectra_and_bands:
        e = _values(spec)[band.lo_index:band.hi_index + 1]
        parts.append(normalized_spacings(e, unfolding, window, degeneracy_tol(spec)))
    return np.concatenate(parts)


def reference_density(kind: str, s):
    """Poisson exp(-s) or the orthogonal Wigner surmise (pi s/2) exp(-pi s^2/4)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be non-negative")
    k = kind.lower()
    if k == "poisson":
        return np.exp(-s)
    if k in ("wd", "wigner-dyson", "wignerdyson", "goe"):
        return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s**2)
    if k in ("gue",):
        return 32.0 / np.pi**2 * s**2 * np.exp(-4.0 * s**2 / np.pi)
    raise ValueError(f"unknown reference distribution {kind!r}")


def reference_mass_below(kind: str, s: float) -> float:
    """Cumulative probability of the reference density on [0, s]."""
    k = kind.lower()
    if k == "poisson":
        return 1.0 - math.exp(-s)
    if k in ("wd", "wigner-dyson", "wignerdyson", "goe"):
        return 1.0 - math.exp(-0.25 * math.pi * s * s)
    raise ValueError(f"unknown reference distribution {kind!r}")


@dataclass(frozen=True)
class Distance:
    l1: float
    small_s_mass: float


def distribution_distance(h: SpacingHistogram, kind: str) -> Distance:
    """L1 distance between the histogram and a reference density at bin midpoints."""
    ref = reference_density(kind, h.midpoints)
    return Distance(float(np.sum(np.abs(h.densities - ref)) * h.bin_width), h.mass_below(SMALL_S))


def closer_to(h: SpacingHistogram) -> str:
    """'poisson' or 'wd', whichever reference is nearer in L1."""
    dp = distribution_distance(h, "poisson").l1
    dw = distribution_distance(h, "wd").l1
    return "poisson" if dp < dw else "wd"
