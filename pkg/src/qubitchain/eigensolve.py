"""Dense Hermitian eigendecomposition with an explicit accuracy contract."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .hamiltonian import HermitianMatrix

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-9
ORTHO_TOL = 1e-9


class EigensolveError(RuntimeError):
    """Non-Hermitian input or a failed decomposition."""


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with matching eigenvector columns.

    ``eigenvectors`` is None for a values-only solve.  ``residual_bound``
    is max_j ||H v_j - lambda_j v_j|| / ||H||_F, or NaN when unchecked.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    residual_bound: float = float("nan")
    L: Optional[int] = None

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def _describe(H) -> str:
    if isinstance(H, HermitianMatrix):
        return f"{H.representation} matrix, L={H.L}, N={H.dim}"
    return f"matrix of shape {np.shape(H)}"


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # largest-magnitude component of every column made real and positive
    idx = np.argmax(np.abs(V), axis=0)
    cols = np.arange(V.shape[1])
    piv = V[idx, cols]
    V = V * (np.abs(piv) / piv)[None, :]
    V[idx, cols] = np.abs(piv)
    return V


def eigh(H: Union[HermitianMatrix, np.ndarray], vectors: bool = True, check: bool = True) -> Spectrum:
    """Full eigendecomposition of a dense Hermitian matrix.

    Backed by LAPACK's divide-and-conquer driver (Householder
    tridiagonalisation followed by a tridiagonal eigensolver).  When the
    matrix is real, or carries a phase gauge that makes it real, the solve
    runs in real arithmetic and the eigenvectors are mapped back.

    Parameters
    ----------
    H : HermitianMatrix or ndarray
    vectors : bool
        Also compute eigenvectors.
    check : bool
        Verify the residual and orthonormality contract (costs one extra
        matrix product).
    """
    if isinstance(H, HermitianMatrix):
        A, L = H.data, H.L
        scale = H.max_abs()
    else:
        A, L = np.asarray(H), None
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise EigensolveError(f"expected a square matrix: {_describe(H)}")
        scale = float(np.max(np.abs(A))) if A.size else 0.0
    n = A.shape[0]
    if n == 0:
        raise EigensolveError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise EigensolveError(f"non-finite entries in {_describe(H)}")
    herm_err = float(np.max(np.abs(A - A.conj().T)))
    if herm_err > HERMITIAN_TOL * max(1.0, scale):
        raise EigensolveError(f"input is not Hermitian (max |H - H^+| = {herm_err:.3g}): {_describe(H)}")

    gauge = None
    if isinstance(H, HermitianMatrix):
        R = H.real_form()
        gauge = H.gauge if R is not None else None
    elif np.iscomplexobj(A) and np.any(A.imag):
        R = None
    else:
        R = np.ascontiguousarray(A.real)
    M = R if R is not None else np.ascontiguousarray(A)

    try:
        if vectors:
            w, V = scipy.linalg.eigh(M, driver="evd", check_finite=False)
        else:
            w = scipy.linalg.eigh(M, eigvals_only=True, driver="evd", check_finite=False)
            V = None
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolveError(f"eigendecomposition failed to converge for {_describe(H)}: {exc}") from exc

    residual = float("nan")
    if V is not None:
        if check:
            fro = np.linalg.norm(M)
            res = np.linalg.norm(M @ V - V * w[None, :], axis=0)
            residual = float(res.max() / fro) if fro > 0 else float(res.max())
            ortho = float(np.max(np.abs(V.conj().T @ V - np.eye(n))))
            if residual > RESIDUAL_TOL or ortho > ORTHO_TOL:
                raise EigensolveError(
                    f"accuracy contract violated (residual {residual:.3g}, orthogonality {ortho:.3g}) "
                    f"for {_describe(H)}")
        if gauge is not None:
            V = gauge[:, None] * V
        V = _fix_phases(V.astype(complex, copy=False))
        V.flags.writeable = False
    w.flags.writeable = False
    return Spectrum(w, V, residual, L)


def eigvalsh(H: Union[HermitianMatrix, np.ndarray]) -> Spectrum:
    """Eigenvalues only."""
    return eigh(H, vectors=False)
