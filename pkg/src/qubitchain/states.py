"""Eigenstate structure: participation numbers, widths and coupled-state census."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .eigensolve import Spectrum
from .hamiltonian import HermitianMatrix, MeanFieldData, popcounts
from .spectral import Band

NORM_TOL = 1e-9
DEFAULT_THRESHOLD = 1e-6


class NormalizationError(ValueError):
    pass


def _check_norm(w: np.ndarray):
    norms = w.sum(axis=0)
    bad = np.abs(norms - 1.0) > NORM_TOL * 2
    if np.any(bad):
        raise NormalizationError(f"state norm^2 {norms[bad].ravel()[0]!r} differs from 1")


def ipr(state: np.ndarray) -> float:
    """Number of principal components [sum_n |psi_n|^4]^-1 of a normalised state."""
    w = np.abs(np.asarray(state)) ** 2
    _check_norm(w)
    return float(1.0 / np.sum(w**2))


def state_width(state: np.ndarray) -> float:
    """Index-space spread [sum n^2 |psi_n|^2 - (sum n |psi_n|^2)^2]^(1/2), n from 0."""
    w = np.abs(np.asarray(state)) ** 2
    _check_norm(w)
    n = np.arange(w.size, dtype=float)
    mean = np.dot(n, w)
    var = np.dot((n - mean) ** 2, w)
    return float(np.sqrt(max(var, 0.0)))


def ipr_columns(V: np.ndarray) -> np.ndarray:
    w = np.abs(V) ** 2
    _check_norm(w)
    return 1.0 / np.sum(w**2, axis=0)


def width_columns(V: np.ndarray) -> np.ndarray:
    w = np.abs(V) ** 2
    _check_norm(w)
    n = np.arange(V.shape[0], dtype=float)
    mean = n @ w
    var = (n**2) @ w - mean**2
    return np.sqrt(np.clip(var, 0.0, None))


@dataclass(frozen=True)
class EigenstateMetrics:
    """Per-state energy, N_pc and sigma for one band in one representation."""

    energies: np.ndarray
    npc: np.ndarray
    sigma: np.ndarray
    band: Optional[Band]
    representation: str

    @property
    def mean_npc(self) -> float:
        return float(np.mean(self.npc))

    @property
    def mean_sigma(self) -> float:
        return float(np.mean(self.sigma))


def representation_vectors(spec: Spectrum, representation: str, mf: Optional[MeanFieldData] = None,
                           cols: slice = slice(None)) -> np.ndarray:
    """Eigenvector columns expressed in the requested basis.

    ``spec`` must come from a z-representation Hamiltonian when the
    mean-field basis is requested (vectors are rotated by U^dagger).
    """
    if spec.eigenvectors is None:
        raise ValueError("spectrum has no eigenvectors")
    V = spec.eigenvectors[:, cols]
    if representation == "z":
        return V
    if representation == "mean-field":
        if mf is None:
            raise ValueError("mean-field representation needs MeanFieldData")
        return mf.to_mean_field(V)
    raise ValueError(f"unknown representation {representation!r}")


def band_metrics(spec: Spectrum, band: Optional[Band], representation: str = "z",
                 mf: Optional[MeanFieldData] = None) -> EigenstateMetrics:
    """N_pc and sigma for every eigenstate in ``band`` (whole spectrum if None)."""
    cols = slice(None) if band is None else slice(band.lo_index, band.hi_index + 1)
    V = representation_vectors(spec, representation, mf, cols)
    return EigenstateMetrics(spec.eigenvalues[cols].copy(), ipr_columns(V), width_columns(V), band, representation)


def npc_profile(spec: Spectrum, representation: str = "z", mf: Optional[MeanFieldData] = None) -> np.ndarray:
    """(energy, N_pc) for all eigenstates in increasing energy; shape (N, 2)."""
    V = representation_vectors(spec, representation, mf)
    return np.column_stack([spec.eigenvalues, ipr_columns(V)])


@dataclass(frozen=True)
class Census:
    """Coupled-state statistics of the central band in the mean-field basis."""

    m_f: float
    delta_e_f: float
    rows: int

    @property
    def d_f(self) -> float:
        return self.delta_e_f / self.m_f if self.m_f > 0 else float("inf")


def central_band_states(L: int) -> np.ndarray:
    """Mean-field basis indices with equal numbers of raised and lowered quasi-particles."""
    if L % 2:
        raise ValueError("the central band needs an even number of qubits")
    return np.nonzero(popcounts(L) == L // 2)[0]


def coupling_census(H_mf: HermitianMatrix, diagonal: np.ndarray, states: Optional[np.ndarray] = None,
                    threshold: float = DEFAULT_THRESHOLD) -> Census:
    """M_f and (Delta E)_f among the given mean-field basis states.

    M_f is the mean number of above-threshold off-diagonal elements per row
    linking a band state to another band state; (Delta E)_f is the largest
    unperturbed energy difference |D_i - D_j| over such pairs.  ``states``
    defaults to the central band of the mean-field basis.
    """
    if H_mf.representation != "mean-field":
        raise ValueError("census needs a mean-field representation matrix")
    if states is None:
        states = central_band_states(H_mf.L)
    states = np.asarray(states)
    if states.size == 0:
        raise ValueError("empty band")
    sub = np.abs(H_mf.data[np.ix_(states, states)])
    np.fill_diagonal(sub, 0.0)
    coupled = sub > threshold
    m_f = float(coupled.sum(axis=1).mean())
    D = np.asarray(diagonal)[states]
    i, j = np.nonzero(coupled)
    de = float(np.max(np.abs(D[i] - D[j]))) if i.size else 0.0
    return Census(m_f, de, int(states.size))
