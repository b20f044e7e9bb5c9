import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qubitchain.eigensolve import eigh
from qubitchain.hamiltonian import (build_interaction_terms, build_quasi_integrable, build_z_hamiltonian,
                                    hamming_neighbors, kron_all, mean_field, single_qubit_rotation, SY, SZ,
                                    two_site_operator)
from qubitchain.params import (ConstantGradient, CouplingSpec, Homogeneous, ModelParams, ParameterError,
                               popcounts)
from qubitchain.states import central_band_states, coupling_census


def chain(L, omega=100.0, a=1.0, J=1.0, kind="N", random=False, seed=0):
    return ModelParams(L=L, omega=omega, field_profile=ConstantGradient(a),
                       coupling=CouplingSpec(kind, J=J, random=random, seed=seed))


def detuned(delta, omega=100.0, J=0.0, kind="N"):
    # omega_k = omega0 + a k with a = delta_1 reproduces delta = (0, delta_1, ...)
    return ModelParams(L=len(delta), omega=omega, field_profile=ConstantGradient(delta[1]),
                       coupling=CouplingSpec(kind, J=J))


def operator_on(op, k, L):
    return kron_all([op if q == k else np.eye(2) for q in range(L)])


params_strategy = st.builds(
    lambda L, om, a, J, kind, rnd, seed: chain(L, om, a, J, kind, rnd, seed),
    st.integers(2, 5), st.floats(1, 200), st.floats(-3, 3), st.floats(-5, 5),
    st.sampled_from(["N", "NN", "A"]), st.booleans(), st.integers(0, 1000))


# z-representation

def test_diagonal_two_qubits_no_coupling():
    H = build_z_hamiltonian(detuned([0.0, 1.0], J=0.0))
    assert np.allclose(np.diag(H.data).real, [-0.5, -0.5, 0.5, 0.5], atol=0)


def test_diagonal_two_qubits_with_coupling():
    H = build_z_hamiltonian(detuned([0.0, 1.0], J=1.0))
    assert np.allclose(np.diag(H.data).real, [-1.0, 0.0, 1.0, 0.0], atol=0)


def test_l8_sparsity_pattern():
    L = 8
    p = chain(L, omega=100, a=1, J=1)
    H = build_z_hamiltonian(p).data
    off = H - np.diag(np.diag(H))
    per_row = np.count_nonzero(off, axis=1)
    assert np.all(per_row == L)
    r, c = np.nonzero(off)
    assert all(bin(int(x)).count("1") == 1 for x in r ^ c)
    assert np.array_equal(off != 0, hamming_neighbors(L))


def test_off_diagonal_census_and_values():
    L, om = 8, 100.0
    H = build_z_hamiltonian(chain(L, omega=om, J=0.7)).data
    iu = np.triu_indices(1 << L, 1)
    upper = H[iu]
    nz = upper[upper != 0]
    assert nz.size == L * 2 ** (L - 1) == 1024
    assert np.all(np.abs(nz - (-0.5j * om)) == 0)  # row has the bit clear: -i Omega/2 above the diagonal


def test_raising_element_sign():
    om = 10.0
    H = build_z_hamiltonian(chain(3, omega=om)).data
    for s in range(8):
        for k in range(3):
            if not (s >> k) & 1:
                assert H[s | (1 << k), s] == 0.5j * om
                assert H[s, s | (1 << k)] == -0.5j * om


def test_matches_explicit_spin_operators():
    L = 3
    p = ModelParams(L=L, omega=7.0, field_profile=ConstantGradient(1.3),
                    coupling=CouplingSpec("A", J=0.9, random=True, seed=4))
    H = sum(-p.delta[k] * operator_on(SZ, k, L) + p.omega * operator_on(SY, k, L) for k in range(L))
    for k in range(L):
        for n in range(k + 1, L):
            H = H - 2 * p.couplings[k, n] * operator_on(SZ, k, L) @ operator_on(SZ, n, L)
    assert np.max(np.abs(H - build_z_hamiltonian(p).data)) < 1e-13


@given(params_strategy)
def test_hermitian_traceless_and_real_gauge(p):
    H = build_z_hamiltonian(p)
    scale = H.max_abs()
    assert H.hermiticity_error() <= 1e-12 * scale
    assert abs(np.trace(H.data)) <= 1e-12 * H.dim * np.max(np.abs(np.diag(H.data)), initial=1.0)
    R = H.real_form()
    assert R is not None and np.array_equal(R, R.T)


def test_size_guard():
    p = ModelParams(L=3, max_L=3)
    object.__setattr__(p, "max_L", 2)
    with pytest.raises(ParameterError):
        build_z_hamiltonian(p)


# mean-field basis

def test_zero_detuning_mean_field():
    mf = mean_field(ModelParams(L=4, omega=10.0, field_profile=Homogeneous(0.0, 7)))
    assert np.all(mf.epsilons == 5.0)
    assert np.all(mf.a_coeffs == 1.0)
    assert np.all(mf.b_coeffs == 0.0)


def test_quasi_particle_energy_and_its_expansion():
    mf = mean_field(chain(11, omega=100.0, a=1.0))
    eps10 = mf.epsilons[10]
    assert eps10 == pytest.approx(0.5 * np.sqrt(100 + 10000), rel=1e-15)
    assert eps10 == pytest.approx(50.2494, abs=5e-5)
    approx = 0.5 * (100 + 100 / 200)
    assert abs(eps10 - approx) < 1e-3


@given(params_strategy)
def test_mean_field_coefficients_and_rotation(p):
    mf = mean_field(p)
    assert np.allclose(mf.a_coeffs**2 + mf.b_coeffs**2, 1.0, atol=1e-12)
    U = mf.rotation
    assert np.max(np.abs(U.conj().T @ U - np.eye(p.dim))) <= 1e-10
    H0 = build_z_hamiltonian(p.with_coupling(J=0.0))
    D = U.conj().T @ H0.data @ U
    assert np.max(np.abs(D - np.diag(np.diag(D)))) <= 1e-10 * max(1.0, H0.max_abs())
    sums = sorted(sum(s * e for s, e in zip(signs, mf.epsilons))
                  for signs in itertools.product((-1, 1), repeat=p.L))
    assert np.allclose(np.sort(np.diag(D).real), sums, atol=1e-10 * max(1.0, H0.max_abs()))
    assert np.allclose(np.diag(D).real, mf.unperturbed_energies(), atol=1e-10 * max(1.0, H0.max_abs()))


@given(st.floats(-50, 50), st.floats(0.1, 200))
def test_single_qubit_rotation_conventions(delta, omega):
    U = single_qubit_rotation(delta, omega)
    h = -delta * SZ + omega * SY
    d = U.conj().T @ h @ U
    g = np.hypot(delta, omega)
    assert np.allclose(d, np.diag([-0.5 * g, 0.5 * g]), atol=1e-12 * g)
    for j in range(2):
        big = U[np.argmax(np.abs(U[:, j])), j]
        assert big.imag == 0 and big.real > 0


def test_rotate_matches_dense_rotation():
    p = chain(5, omega=30.0, a=2.0, J=0.8, kind="NN")
    mf = mean_field(p)
    H = build_z_hamiltonian(p)
    U = mf.rotation
    assert np.max(np.abs(mf.rotate(H).data - U.conj().T @ H.data @ U)) < 1e-11


# interaction terms

def test_no_coupling_gives_zero_terms():
    for V in build_interaction_terms(chain(4, J=0.0)):
        assert not np.any(V.data)


def test_zero_detuning_leaves_only_band_term():
    p = ModelParams(L=4, omega=10.0, field_profile=Homogeneous(0.0), coupling=CouplingSpec("N", J=0.5))
    vd, vb, vo = build_interaction_terms(p)
    assert not np.any(vd.data) and not np.any(vo.data)
    mf = mean_field(p)
    U = mf.rotation
    # with delta = 0 the rotation maps I^z onto a pure flip operator
    ZZ = sum(-2 * p.couplings[k, k + 1] * operator_on(SZ, k, 4) @ operator_on(SZ, k + 1, 4) for k in range(3))
    assert np.max(np.abs(p.J * vb.data - U.conj().T @ ZZ @ U)) < 1e-12
    for k in range(4):
        Zr = mf.factors[k].conj().T @ SZ @ mf.factors[k]
        assert np.allclose(np.diag(Zr), 0, atol=1e-15)


@given(params_strategy)
def test_rotation_identity(p):
    H = build_z_hamiltonian(p)
    mf = mean_field(p)
    vd, vb, vo = build_interaction_terms(p)
    rhs = np.diag(mf.unperturbed_energies()) + p.J * (vd.data + vb.data + vo.data)
    assert np.max(np.abs(mf.rotate(H).data - rhs)) <= 1e-10 * H.max_abs()


def test_selection_rule_by_quasi_particle_count():
    p = chain(6, omega=100, a=1, J=1)
    vd, vb, vo = build_interaction_terms(p)
    pc = popcounts(6)
    dn = pc[:, None] - pc[None, :]
    assert np.all(dn[np.abs(vd.data) > 0] == 0)
    r, c = np.nonzero(np.abs(vd.data) > 0)
    assert np.array_equal(r, c)
    band = np.abs(dn[np.abs(vb.data) > 1e-14])
    assert set(band.tolist()) == {0, 2}
    off = np.abs(dn[np.abs(vo.data) > 1e-14])
    assert set(off.tolist()) == {1}


def test_central_band_rows_couple_to_about_half_l_states():
    p = chain(8, omega=100, a=1, J=1)
    mf = mean_field(p)
    c = coupling_census(mf.rotate(build_z_hamiltonian(p)), mf.unperturbed_energies(), central_band_states(8))
    assert c.rows == 70
    assert abs(c.m_f - 4) <= 0.15 * 4


def test_two_site_operator_matches_kron():
    A = np.array([[1, 2], [3, 4]], dtype=complex)
    B = np.array([[0, 1j], [5, 0]], dtype=complex)
    want = operator_on(A, 0, 3) @ operator_on(B, 2, 3)
    assert np.array_equal(two_site_operator(A, 0, B, 2, 3), want)


# quasi-integrable Hamiltonian

def test_quasi_integrable_without_coupling_is_diagonal():
    p = chain(4, omega=50, a=2, J=0.0)
    Ha = build_quasi_integrable(p).data
    gam = np.hypot(p.delta, p.omega)
    sums = sorted(sum(s * g / 2 for s, g in zip(signs, gam)) for signs in itertools.product((-1, 1), repeat=4))
    assert not np.any(Ha - np.diag(np.diag(Ha)))
    assert np.allclose(np.sort(np.diag(Ha).real), sums, atol=1e-12)


def test_quasi_integrable_two_qubit_oracle():
    om, J = 100.0, 3.0
    p = ModelParams(L=2, omega=om, field_profile=Homogeneous(0.0), coupling=CouplingSpec("N", J=J))
    w = eigh(build_quasi_integrable(p)).eigenvalues
    r = np.sqrt(om**2 + J**2 / 4)
    assert np.allclose(w, sorted([-r, r, -J / 2, J / 2]), atol=1e-12)
    # delta = 0: the approximation is exact
    assert np.allclose(w, eigh(build_z_hamiltonian(p)).eigenvalues, atol=1e-12)


def test_quasi_integrable_spectrum_close_to_full():
    p = chain(10, omega=100, a=1, J=1)
    H = build_z_hamiltonian(p)
    E = eigh(H, vectors=False).eigenvalues
    Ea = eigh(build_quasi_integrable(p), vectors=False).eigenvalues
    dev = np.max(np.abs(E - Ea)) / np.linalg.norm(H.data, 2)
    assert dev <= 1.0 / p.omega


def test_quasi_integrable_is_rotated_hamiltonian_without_diag_and_off_terms():
    p = chain(5, omega=100, a=1, J=0.5)
    mf = mean_field(p)
    vd, vb, vo = build_interaction_terms(p)
    approx = mf.rotate(build_z_hamiltonian(p)).data - p.J * (vd.data + vo.data)
    Ha = build_quasi_integrable(p).data
    # differs only through the a_k a_{k+1} ~ 1 - O(delta^2/Omega^2) weights
    tol = 2 * p.J * np.max(1 - mf.a_coeffs[:-1] * mf.a_coeffs[1:]) + 1e-12
    assert np.max(np.abs(Ha - approx)) <= tol


def test_quasi_integrable_rejects_other_couplings():
    with pytest.raises(ParameterError):
        build_quasi_integrable(chain(4, kind="A"))
