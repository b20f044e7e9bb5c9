"""Hamiltonian construction in the z-representation and the mean-field basis.

Basis conventions
-----------------
Qubit ``k`` is bit ``k`` of the basis index.  In the z-representation bit
value 0 is spin up (I^z = +1/2) and bit value 1 is spin down (I^z = -1/2).
In the mean-field basis bit value 0 puts quasi-particle ``k`` in its lower
single-particle level (-eps_k) and bit value 1 in the upper one (+eps_k).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .params import ModelParams, ParameterError, popcounts, spin_signs

SZ = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
SY = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)

REPRESENTATIONS = ("z", "mean-field")


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense Hermitian operator on the 2**L dimensional chain space.

    ``gauge`` optionally holds a diagonal phase vector ``g`` such that
    ``conj(g)[:, None] * data * g[None, :]`` is real symmetric; the
    eigensolver uses it to work in real arithmetic.
    """

    data: np.ndarray
    L: int
    representation: str = "z"
    gauge: Optional[np.ndarray] = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {data.shape}")
        if data.shape[0] != 1 << self.L:
            raise ValueError(f"dimension {data.shape[0]} does not match L={self.L}")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        data = data.astype(complex, copy=False)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        if self.gauge is not None:
            g = np.asarray(self.gauge, dtype=complex)
            g.flags.writeable = False
            object.__setattr__(self, "gauge", g)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T))) if self.dim else 0.0

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data)))

    def real_form(self) -> Optional[np.ndarray]:
        """Real symmetric matrix unitarily equivalent through ``gauge``, if any."""
        if self.gauge is None:
            if np.any(self.data.imag):
                return None
            return np.ascontiguousarray(self.data.real)
        g = self.gauge
        r = g.conj()[:, None] * self.data * g[None, :]
        if np.max(np.abs(r.imag), initial=0.0) > 1e-12 * max(1.0, self.max_abs()):
            return None
        return np.ascontiguousarray(r.real)


def z_gauge(L: int) -> np.ndarray:
    """Phases i**popcount(s); they turn the z-representation Hamiltonian real."""
    return (1j) ** (popcounts(L) % 4)


def z_diagonal(params: ModelParams) -> np.ndarray:
    """-sum_k delta_k m_k(s) - 2 sum_{k<n} J_kn m_k(s) m_n(s) for every basis state."""
    m = spin_signs(params.L)
    return -(m @ params.delta) - np.einsum("sk,kn,sn->s", m, params.couplings, m)


def build_z_hamiltonian(params: ModelParams) -> HermitianMatrix:
    """Hamiltonian of the chain during one pulse, in the rotating frame.

    H = sum_k (-delta_k I^z_k + Omega I^y_k) - 2 sum_{k<n} J_kn I^z_k I^z_n
    """
    L = params.L
    if L > params.max_L:
        raise ParameterError(f"L={L} exceeds the configured maximum {params.max_L}")
    N = 1 << L
    H = np.zeros((N, N), dtype=complex)
    H[np.diag_indices(N)] = z_diagonal(params)
    s = np.arange(N)
    for k in range(L):
        lo = s[(s >> k) & 1 == 0]
        hi = lo | (1 << k)
        # I^y |0_k> = (i/2)|1_k>
        H[hi, lo] = 0.5j * params.omega
        H[lo, hi] = -0.5j * params.omega
    return HermitianMatrix(H, L, "z", gauge=z_gauge(L))


def hamming_neighbors(L: int) -> np.ndarray:
    """Boolean N x N mask of basis pairs differing in exactly one bit."""
    s = np.arange(1 << L)
    x = s[:, None] ^ s[None, :]
    return (x != 0) & ((x & (x - 1)) == 0)


# --------------------------------------------------------------------------
# mean-field representation


def _phase_fix(v: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(v)))
    return v * (abs(v[j]) / v[j])


def single_qubit_rotation(delta: float, omega: float) -> np.ndarray:
    """2x2 unitary whose columns are the eigenvectors of -delta I^z + omega I^y.

    Column 0 belongs to the lower eigenvalue.  Each column has its
    largest-magnitude component real and positive.
    """
    gamma = np.hypot(delta, omega)
    cols = []
    for lam in (-0.5 * gamma, 0.5 * gamma):
        v = np.array([omega, 1j * (delta + 2 * lam)], dtype=complex)
        v /= np.linalg.norm(v)
        cols.append(_phase_fix(v))
    return np.column_stack(cols)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product with factor 0 acting on qubit 0 (least significant bit)."""
    return reduce(np.kron, list(factors)[::-1])


@dataclass(frozen=True)
class MeanFieldData:
    """Quasi-particle data of the non-interacting part H0."""

    L: int
    epsilons: np.ndarray
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    factors: tuple  # per-qubit 2x2 rotations

    @property
    def gammas(self) -> np.ndarray:
        return 2.0 * self.epsilons

    @property
    def rotation(self) -> np.ndarray:
        """Full N x N unitary U (built on demand; 4**L complex entries)."""
        return kron_all(self.factors)

    def unperturbed_energies(self) -> np.ndarray:
        """D_0: sum_k (+eps_k if bit k set else -eps_k) for every basis state."""
        m = spin_signs(self.L)
        return -2.0 * (m @ self.epsilons)

    def gauge(self) -> np.ndarray:
        """Phases making U^dagger H U real when H is real in the z-gauge."""
        col_phases = [f[0] / np.abs(f[0]) for f in self.factors]
        return kron_all(col_phases).conj()

    def apply_dagger(self, X: np.ndarray) -> np.ndarray:
        """U^dagger X without forming U; X has 2**L rows."""
        return apply_local([f.conj().T for f in self.factors], X)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return apply_local(list(self.factors), X)

    def rotate(self, H: HermitianMatrix) -> HermitianMatrix:
        """U^dagger H U as a mean-field representation matrix."""
        if H.representation != "z":
            raise ValueError("rotate expects a z-representation matrix")
        Y = self.apply_dagger(H.data)
        Z = self.apply_dagger(Y.conj().T).conj().T
        Z = 0.5 * (Z + Z.conj().T)
        return HermitianMatrix(Z, self.L, "mean-field", gauge=self.gauge())

    def to_mean_field(self, vectors: np.ndarray) -> np.ndarray:
        """Express z-representation state vectors (columns) in the mean-field basis."""
        return self.apply_dagger(vectors)


def apply_local(ops: Sequence[np.ndarray], X: np.ndarray) -> np.ndarray:
    """Apply ``kron_all(ops)`` to the rows of ``X`` one qubit at a time."""
    L = len(ops)
    vec = X.ndim == 1
    X = X.reshape(X.shape[0], -1) if not vec else X[:, None]
    M = X.shape[1]
    T = np.asarray(X, dtype=complex).reshape((2,) * L + (M,))
    for k, op in enumerate(ops):
        ax = L - 1 - k
        T = np.moveaxis(np.tensordot(op, T, axes=([1], [ax])), 0, ax)
    out = T.reshape(1 << L, M)
    return out[:, 0] if vec else out


def mean_field(params: ModelParams) -> MeanFieldData:
    """Quasi-particle energies, mixing coefficients and the basis rotation."""
    d = params.delta
    gamma = np.hypot(d, params.omega)
    eps = 0.5 * gamma
    a = params.omega / gamma
    b = -d / gamma
    factors = tuple(single_qubit_rotation(dk, params.omega) for dk in d)
    for arr in (eps, a, b):
        arr.flags.writeable = False
    return MeanFieldData(params.L, eps, a, b, factors)


def _local_parts(mf: MeanFieldData):
    """Per qubit: rotated I^z split as b_k P + a_k Q with P diagonal, Q off-diagonal."""
    P = np.diag([-0.5, 0.5]).astype(complex)
    Qs = []
    for U, a, b in zip(mf.factors, mf.a_coeffs, mf.b_coeffs):
        Zt = U.conj().T @ SZ @ U
        Qs.append((Zt - b * P) / a)
    return P, Qs


def two_site_operator(A: np.ndarray, k: int, B: np.ndarray, n: int, L: int) -> np.ndarray:
    """Dense matrix of A_k B_n (identity on all other qubits)."""
    N = 1 << L
    s = np.arange(N)
    sk, sn = (s >> k) & 1, (s >> n) & 1
    out = np.zeros((N, N), dtype=complex)
    for fk in (0, 1):
        for fn in (0, 1):
            tk, tn = sk ^ fk, sn ^ fn
            amp = A[tk, sk] * B[tn, sn]
            t = s ^ (fk << k) ^ (fn << n)
            out[t, s] += amp
    return out


def build_interaction_terms(params: ModelParams):
    """V_diag, V_band, V_off in the mean-field basis.

    Each coupled pair contributes -2 (J_kn/J) Z_k Z_n with the rotated
    I^z split into its diagonal (b-weighted) and off-diagonal (a-weighted)
    parts.  Their sum times J reproduces the rotated interaction.
    """
    L, N = params.L, params.dim
    J = params.J
    mf = mean_field(params)
    P, Qs = _local_parts(mf)
    a, b = mf.a_coeffs, mf.b_coeffs
    v_diag = np.zeros((N, N), dtype=complex)
    v_band = np.zeros((N, N), dtype=complex)
    v_off = np.zeros((N, N), dtype=complex)
    if J != 0:
        rows, cols = np.nonzero(np.triu(params.couplings, 1))
        for k, n in zip(rows, cols):
            w = -2.0 * params.couplings[k, n] / J
            if b[k] != 0 and b[n] != 0:
                v_diag += w * b[k] * b[n] * two_site_operator(P, k, P, n, L)
            v_band += w * a[k] * a[n] * two_site_operator(Qs[k], k, Qs[n], n, L)
            if b[n] != 0:
                v_off += w * a[k] * b[n] * two_site_operator(Qs[k], k, P, n, L)
            if b[k] != 0:
                v_off += w * b[k] * a[n] * two_site_operator(P, k, Qs[n], n, L)
    g = mf.gauge()
    return tuple(HermitianMatrix(v, L, "mean-field", gauge=g) for v in (v_diag, v_band, v_off))


def build_quasi_integrable(params: ModelParams) -> HermitianMatrix:
    """H_a = sum_k gamma_k I^z_k - sum_k J_k I^y_k I^y_{k+1} in the mean-field labels.

    gamma_k = sqrt(delta_k**2 + Omega**2) and J_k = 2 J_{k,k+1}.  The
    rotated-frame I^z and I^y are the diagonal and unit off-diagonal parts
    of the rotated z-spin, matching the labels used by
    :func:`build_interaction_terms`.
    """
    if params.coupling.kind != "N":
        raise ParameterError("the quasi-integrable Hamiltonian needs nearest-neighbour coupling")
    L = params.L
    mf = mean_field(params)
    P, Qs = _local_parts(mf)
    H = np.diag(mf.unperturbed_energies()).astype(complex)
    for k in range(L - 1):
        Jk = 2.0 * params.couplings[k, k + 1]
        if Jk:
            H -= Jk * two_site_operator(Qs[k], k, Qs[k + 1], k + 1, L)
    return HermitianMatrix(H, L, "mean-field", gauge=mf.gauge())


def down_spin_counts(L: int) -> np.ndarray:
    """Number of set bits per basis state (band label in the mean-field basis)."""
    return popcounts(L)
