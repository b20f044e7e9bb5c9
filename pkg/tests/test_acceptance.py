"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``CRITERION n: PASS|FAIL`` line with the measured
numbers and then asserts.  Run on its own with

    pytest -v -s tests/test_acceptance.py

or ``python3 tests/test_acceptance.py`` for the plain list of lines.
"""

import math
from dataclasses import replace
from functools import lru_cache

import numpy as np

from qubitchain.eigensolve import eigh
from qubitchain.hamiltonian import build_interaction_terms, build_z_hamiltonian, mean_field
from qubitchain.params import ConstantGradient, CouplingSpec, Homogeneous, ModelParams
from qubitchain.spectral import (central_band, distribution_distance, histogram_spacings, identify_bands,
                                 pooled_spacings, reference_mass_below, spacing_distribution)
from qubitchain.states import band_metrics, central_band_states, coupling_census, ipr, state_width
from qubitchain.theory import chaos_border, deloc_border, deloc_border_homogeneous, n_central, width_unperturbed

RESULTS = {}


def report(n, ok, detail):
    line = f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line, flush=True)
    return ok


def chain(L, omega=100.0, a=1.0, J=0.0, kind="N", random=False, seed=0):
    return ModelParams(L=L, omega=omega, field_profile=ConstantGradient(a),
                       coupling=CouplingSpec(kind, J=J, random=random, seed=seed))


@lru_cache(maxsize=None)
def values_only(p):
    return eigh(build_z_hamiltonian(p), vectors=False)


def central(p, spec=None):
    spec = spec or values_only(p)
    bands = identify_bands(spec, p)
    return spec, bands, central_band(bands, spec)


def central_mean(p, representation):
    """Central-band mean (N_pc, sigma) and the number of bands."""
    spec = eigh(build_z_hamiltonian(p))
    bands = identify_bands(spec, p)
    mf = mean_field(p) if representation == "mean-field" else None
    m = band_metrics(spec, central_band(bands, spec), representation, mf)
    return m.mean_npc, m.mean_sigma, len(bands)


def rel(x, target):
    return abs(x - target) / abs(target)


# ---------------------------------------------------------------------------


def test_c01_structural_exactness():
    L, om = 8, 100.0
    H = build_z_hamiltonian(chain(L, omega=om, J=1.0))
    A = H.data
    upper = A[np.triu_indices(A.shape[0], 1)]
    nz = upper[upper != 0]
    herm = H.hermiticity_error()
    tr = abs(np.trace(A))
    ok = (nz.size == L * 2 ** (L - 1) == 1024 and np.all(np.abs(np.abs(nz) - om / 2) == 0)
          and np.all(nz.real == 0) and herm <= 1e-12 and tr <= 1e-12)
    assert report(1, ok, f"upper nonzeros {nz.size} (want 1024), all +-i*{om / 2:g}: "
                         f"{bool(np.all(np.abs(nz) == om / 2))}, max|H-H^+| {herm:.1e}, |trace| {tr:.1e}")


def test_c02_mean_field_identity():
    p = chain(8, omega=100.0, a=1.0, J=1.0)
    H = build_z_hamiltonian(p)
    mf = mean_field(p)
    vd, vb, vo = build_interaction_terms(p)
    rhs = np.diag(mf.unperturbed_energies()) + p.J * (vd.data + vb.data + vo.data)
    dev = np.max(np.abs(mf.rotate(H).data - rhs)) / H.max_abs()
    assert report(2, dev <= 1e-10, f"||U^+HU - (D0 + J V)||_max / ||H||_max = {dev:.2e} (<= 1e-10)")


def test_c03_band_census():
    rows, ok = [], True
    for L in (8, 10, 12):
        p = chain(L)
        spec, bands, cb = central(p)
        pops = [b.size for b in bands]
        good = pops == [math.comb(L, m) for m in range(L + 1)] and cb.size == n_central(L)
        ok &= good
        rows.append(f"L={L}: {len(bands)} bands, central {cb.size}")
    assert report(3, ok, "; ".join(rows))


def test_c04_unperturbed_width_law():
    rows, ok = [], True
    for om in (50.0, 100.0, 200.0, 400.0):
        _, _, cb = central(chain(10, omega=om))
        want = width_unperturbed(10, 1.0, om)
        ok &= rel(cb.width, want) <= 0.05
        rows.append(f"Omega={om:g}: {cb.width:.4f}/{want:.4f}")
    assert report(4, ok, "width/theory " + ", ".join(rows) + " (5%)")


def test_c05_interaction_dominated_width():
    rows, ok = [], True
    for J in (1.0, 10.0):
        _, bands, cb = central(chain(10, J=J))
        want = (10 - 2) * J
        ok &= rel(cb.width, want) <= 0.10
        rows.append(f"J={J:g}: {cb.width:.3f} vs {want:g} ({len(bands)} bands)")
    assert report(5, ok, "; ".join(rows) + " (10%)")


def test_c06_overlap_onset():
    onset = None
    for J in np.arange(1.0, 20.01, 0.5):
        p = chain(10, J=float(J))
        if len(identify_bands(values_only(p), p)) < 11:
            onset = float(J)
            break
    ok = onset is not None and 7 <= onset <= 20
    assert report(6, ok, f"first J with < 11 bands: {onset} (want 7..20; Omega/(aL) = 10)")


def test_c07_coupled_state_statistics():
    rows, ok = [], True
    for kind in ("N", "A"):
        for L in (6, 8, 10, 12):
            p = chain(L, J=1.0, kind=kind)
            mf = mean_field(p)
            c = coupling_census(mf.rotate(build_z_hamiltonian(p)), mf.unperturbed_energies(),
                                central_band_states(L))
            if kind == "N":
                de, m, mtol = (L - 1.5) / 100.0, L / 2, 0.15
            else:
                de, m, mtol = L**2 / 200.0, L**2 / 4, 0.25
            good = rel(c.delta_e_f, de) <= 0.10 and rel(c.m_f, m) <= mtol
            ok &= good
            rows.append(f"{kind} L={L}: dE_f {c.delta_e_f / de:.3f}x, M_f {c.m_f / m:.3f}x")
    assert report(7, ok, "measured/theory " + "; ".join(rows))


def test_c08_spacing_regimes():
    def hist(J):
        spec, _, cb = central(chain(12, J=J))
        return spacing_distribution(spec, cb)

    h0, h1, h2 = hist(0.0002), hist(1.0), hist(100.0)
    small = h0.mass_below(0.1)
    pois = reference_mass_below("poisson", 0.1)
    d1 = (distribution_distance(h1, "poisson").l1, distribution_distance(h1, "wd").l1)
    d2 = (distribution_distance(h2, "poisson").l1, distribution_distance(h2, "wd").l1)
    ok = small >= 2 * pois and d1[0] < d1[1] and d2[1] < d2[0]
    assert report(8, ok, f"J=2e-4 mass(s<0.1) {small:.3f} (>= {2 * pois:.3f}); "
                         f"J=1 L1 P/WD {d1[0]:.2f}/{d1[1]:.2f}; J=100 L1 P/WD {d2[0]:.2f}/{d2[1]:.2f}")


def test_c09_ipr_saturation_and_collapse():
    configs = [(8, 100.0), (10, 100.0), (12, 100.0), (10, 200.0)]
    rise = (0.3, 1.0, 3.0)
    ok, rows, curves = True, [], {}
    for L, om in configs:
        jcr = deloc_border("N", L, 1.0, om).j_cr
        low, _, _ = central_mean(chain(L, om, J=0.1 * jcr), "mean-field")
        sat, _, nb = central_mean(chain(L, om, J=30 * jcr), "mean-field")
        target = n_central(L) / 3
        curves[(L, om)] = [central_mean(chain(L, om, J=x * jcr), "mean-field")[0] for x in rise]
        good = low <= 2 and nb == L + 1 and rel(sat, target) <= 0.2
        ok &= good
        rows.append(f"(L={L},Om={om:g}) 0.1Jcr {low:.2f}, 30Jcr {sat:.1f}/{target:.1f}")
    spread = []
    for i, x in enumerate(rise):
        vals = [c[i] for c in curves.values()]
        s = max(vals) / min(vals) - 1
        spread.append(f"{x:g}Jcr {s:.0%}")
        ok &= s <= 0.25
    assert report(9, ok, "; ".join(rows) + "; collapse spread " + ", ".join(spread) + " (25%)")


def test_c10_z_width_independent_of_coupling():
    sig = [central_mean(chain(12, J=J), "z")[1] for J in (1e-4, 1e-2, 1.0, 1e2)]
    var = (max(sig) - min(sig)) / min(sig)
    assert report(10, var < 0.2, "sigma " + ", ".join(f"{s:.0f}" for s in sig) + f"; variation {var:.1%} (< 20%)")


def test_c11_chaos_border():
    jc = chaos_border(12, 1.0, 100.0)
    assert report(11, 128 <= jc <= 140, f"chaos_border(12, 1, 100) = {jc:.2f} (128..140)")


def test_c12_all_to_all_transition():
    verdicts = []
    for J in (0.01, 0.1):
        parts = []
        for seed in range(30):
            p = chain(10, J=J, kind="A", random=True, seed=seed)
            spec, _, cb = central(p)
            parts.append((spec, cb))
        h = histogram_spacings(pooled_spacings(parts))
        verdicts.append((distribution_distance(h, "poisson").l1, distribution_distance(h, "wd").l1))
    ok = verdicts[0][0] < verdicts[0][1] and verdicts[1][1] < verdicts[1][0]
    assert report(12, ok, f"30 seeds, L1 P/WD: J=0.01 {verdicts[0][0]:.2f}/{verdicts[0][1]:.2f}, "
                          f"J=0.1 {verdicts[1][0]:.2f}/{verdicts[1][1]:.2f}")


def test_c13_next_nearest_chaos():
    d = []
    for J in (0.001, 1.0):
        spec, _, cb = central(chain(12, J=J, kind="NN", random=True, seed=0))
        h = spacing_distribution(spec, cb)
        d.append((distribution_distance(h, "poisson").l1, distribution_distance(h, "wd").l1))
    ok = d[0][0] < d[0][1] and d[1][1] < d[1][0]
    assert report(13, ok, f"L1 P/WD: J=0.001 {d[0][0]:.2f}/{d[0][1]:.2f}, J=1 {d[1][0]:.2f}/{d[1][1]:.2f}")


def test_c14_homogeneous_field_collapse():
    om, seeds, rise = 100.0, 10, (0.3, 1.0, 3.0)
    pairs = [(8, 4.0), (10, 4.0 * math.sqrt(10 / 8))]
    curves = []
    for L, spread in pairs:
        jcr = deloc_border_homogeneous(L, om, spread)
        curve = []
        for x in rise:
            vals = []
            for s in range(seeds):
                p = ModelParams(L=L, omega=om, field_profile=Homogeneous(spread, s),
                                coupling=CouplingSpec("N", J=x * jcr))
                vals.append(central_mean(p, "mean-field")[0])
            curve.append(float(np.mean(vals)))
        curves.append(curve)
    spread_pct = [max(a, b) / min(a, b) - 1 for a, b in zip(*curves)]
    ok = all(s <= 0.25 for s in spread_pct)
    detail = ", ".join(f"{x:g}Jcr {a:.2f} vs {b:.2f}" for x, a, b in zip(rise, *curves))
    assert report(14, ok, f"mean N_pc (L=8 vs L=10, equal D^2/4OmL): {detail} (25%)")


def test_c15_delocalisation_without_chaos():
    p = chain(10, omega=1000.0, J=1.0)
    spec = eigh(build_z_hamiltonian(p))
    bands = identify_bands(spec, p)
    cb = central_band(bands, spec)
    h = spacing_distribution(spec, cb)
    dp, dw = distribution_distance(h, "poisson").l1, distribution_distance(h, "wd").l1
    npc = band_metrics(spec, cb, "mean-field", mean_field(p)).mean_npc
    ok = dp < dw and npc >= 10 and len(bands) == 11
    assert report(15, ok, f"L1 P/WD {dp:.2f}/{dw:.2f}, mean N_pc {npc:.1f} (>= 10), {len(bands)} bands")


def test_c16_property_suites():
    from qubitchain.config import parse_config
    from qubitchain.output import emit, read_jsonl
    from qubitchain.sweep import run_sweep

    r = np.random.default_rng(16)
    worst_res = worst_orth = 0.0
    for n in (5, 33, 128):
        A = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
        A = A + A.conj().T
        s = eigh(A)
        V, w = s.eigenvectors, s.eigenvalues
        worst_res = max(worst_res, np.linalg.norm(A @ V - V * w, axis=0).max() / np.linalg.norm(A))
        worst_orth = max(worst_orth, np.max(np.abs(V.conj().T @ V - np.eye(n))))
    N = 4096
    e = np.zeros(N)
    e[0] = 1
    oracles = (ipr(e) == 1 and abs(ipr(np.full(N, N**-0.5)) - N) < 1e-9 * N and state_width(e) == 0
               and abs(state_width(np.full(N, N**-0.5)) - math.sqrt((N * N - 1) / 12)) < 1e-9 * N)
    text = ("L = 6\ncoupling = A\nrandom = true\naxis = J\nvalues = 0.05, 0.5\nensemble = 2\n"
            "observables = widths, spacing, npc, census, theory\n")
    rows1 = run_sweep(parse_config(text, {"workers": 1}))
    rows2 = run_sweep(parse_config(text, {"workers": 2}))
    determinism = emit(rows1) == emit(rows2)
    round_trip = read_jsonl(emit(rows1, "jsonl"))[1] == [replace(x, wall_time=0.0) for x in rows1]
    ok = worst_res <= 1e-9 and worst_orth <= 1e-9 and oracles and determinism and round_trip
    assert report(16, ok, f"residual {worst_res:.1e}, orthogonality {worst_orth:.1e}, ipr/sigma oracles {oracles}, "
                          f"sweep determinism {determinism}, jsonl round trip {round_trip}")


if __name__ == "__main__":
    import sys
    fails = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            fails += 1
    sys.exit(1 if fails else 0)
