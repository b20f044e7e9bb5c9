"""Seeded parameter sweeps: grid x ensemble, one pipeline per point."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from .config import SweepConfig
from .eigensolve import EigensolveError, eigh
from .hamiltonian import build_z_hamiltonian, mean_field
from .output import ResultRow
from .params import ModelParams, make_params
from .spectral import (central_band, degeneracy_tol, distribution_distance, histogram_spacings, identify_bands,
                       normalized_spacings)
from .states import band_metrics, central_band_states, coupling_census
from .theory import border_estimates

REFERENCES = ("poisson", "wd", "gue")


def point_seed(master_seed: int, grid_index: int, ensemble_index: int) -> int:
    """63-bit seed for one sweep point, independent of execution order."""
    ss = np.random.SeedSequence([int(master_seed), int(grid_index), int(ensemble_index)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def point_params(cfg: SweepConfig, gi: int, ei: int) -> ModelParams:
    """Model for grid point ``gi`` and ensemble member ``ei``.

    Random couplings and homogeneous fields get seeds derived from the
    master seed; other models keep the configured seeds.
    """
    rec = cfg.model_record(cfg.grid[gi])
    if rec.get("random") or rec.get("profile") == "homogeneous":
        s = point_seed(cfg.master_seed, gi, ei)
        rec["seed"] = s
        rec["field_seed"] = s
    return make_params(rec)


def _hist_stats(spacings: np.ndarray, cfg: SweepConfig) -> Tuple[object, dict]:
    h = histogram_spacings(spacings, cfg.bins, cfg.s_max)
    stats = {f"l1_{k}": distribution_distance(h, k).l1 for k in REFERENCES}
    stats["small_s_mass"] = h.mass_below(0.1)
    stats["closer"] = "poisson" if stats["l1_poisson"] < stats["l1_wd"] else "wd"
    stats["n_spacings"] = int(spacings.size)
    return h, stats


def evaluate_point(cfg: SweepConfig, gi: int, ei: int) -> Tuple[List[ResultRow], Optional[np.ndarray]]:
    """Run the pipeline for one point; returns its rows and, when spacing
    statistics were requested, the normalised central-band spacings."""
    t0 = time.perf_counter()
    axis = cfg.axis or ""
    gv = cfg.grid[gi]
    p = point_params(cfg, gi, ei)
    echo = p.describe()

    def row(obs, values):
        return ResultRow(echo, obs, values, gi, ei, axis, gv, 0.0)

    obs = set(cfg.observables)
    if not obs:
        return [row("params", {})], None

    rows: List[ResultRow] = []
    spacings = None
    try:
        need_vectors = bool(obs & {"npc", "sigma"})
        spec = None
        if obs & {"widths", "spacing", "npc", "sigma"}:
            spec = eigh(build_z_hamiltonian(p), vectors=need_vectors, check=need_vectors)
            bands = identify_bands(spec, p)
            cb = central_band(bands, spec)
        if "widths" in obs:
            rows.append(row("band_width", {"band_width": cb.width, "e_min": cb.e_min, "e_max": cb.e_max,
                                           "n_bands": len(bands), "band_size": cb.size}))
        if "spacing" in obs:
            spacings = normalized_spacings(cb.energies(spec), cfg.unfolding, cfg.window, degeneracy_tol(spec))
            h, stats = _hist_stats(spacings, cfg)
            for lo, hi, d in zip(h.bin_edges[:-1], h.bin_edges[1:], h.densities):
                rows.append(row("spacing_bin", {"bin_lo": float(lo), "bin_hi": float(hi), "density": float(d)}))
            rows.append(row("spacing_stats", stats))
        if obs & {"npc", "sigma"}:
            mf = mean_field(p) if cfg.representation == "mean-field" else None
            m = band_metrics(spec, cb, cfg.representation, mf)
            vals = {"representation": cfg.representation, "band_size": cb.size}
            if "npc" in obs:
                vals["mean_npc"] = m.mean_npc
            if "sigma" in obs:
                vals["mean_sigma"] = m.mean_sigma
            rows.append(row("eigenstates", vals))
        if "census" in obs:
            mf = mean_field(p)
            H_mf = mf.rotate(build_z_hamiltonian(p))
            c = coupling_census(H_mf, mf.unperturbed_energies(), central_band_states(p.L), cfg.threshold)
            rows.append(row("census", {"m_f": c.m_f, "delta_e_f": c.delta_e_f, "d_f": c.d_f}))
        if "theory" in obs:
            th = border_estimates(p).as_dict()
            rows.append(row("theory", {f"th_{k}": v for k, v in th.items()}))
    except (EigensolveError, ValueError, np.linalg.LinAlgError, MemoryError) as exc:
        rows.append(row("error", {"error": f"{type(exc).__name__}: {exc}"}))
        spacings = None
    dt = time.perf_counter() - t0
    rows = [ResultRow(r.params, r.observable, r.values, r.grid_index, r.ensemble_index, r.axis,
                      r.grid_value, dt) for r in rows]
    return rows, spacings


def _task(args):
    cfg, gi, ei = args
    return evaluate_point(cfg, gi, ei)


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def run_sweep(cfg: SweepConfig) -> List[ResultRow]:
    """Evaluate every (grid point, ensemble member) and return rows in that order.

    With ``ensemble > 1`` and spacing statistics requested, an extra
    ``pooled_spacing_*`` block per grid point pools the normalised spacings
    of all members before histogramming.  Worker count changes only speed,
    never output.
    """
    tasks = [(cfg, gi, ei) for gi in range(len(cfg.grid)) for ei in range(cfg.ensemble)]
    workers = cfg.workers or default_workers()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]

    rows: List[ResultRow] = []
    for gi in range(len(cfg.grid)):
        chunk = results[gi * cfg.ensemble:(gi + 1) * cfg.ensemble]
        for r, _ in chunk:
            rows.extend(r)
        parts = [s for _, s in chunk if s is not None]
        if cfg.ensemble > 1 and "spacing" in cfg.observables and parts:
            pooled = np.concatenate(parts)
            h, stats = _hist_stats(pooled, cfg)
            echo = point_params(cfg, gi, 0).describe()
            stats["members"] = len(parts)
            stats["master_seed"] = cfg.master_seed
            base = dict(params=echo, grid_index=gi, ensemble_index=-1, axis=cfg.axis or "",
                        grid_value=cfg.grid[gi])
            for lo, hi, d in zip(h.bin_edges[:-1], h.bin_edges[1:], h.densities):
                rows.append(ResultRow(observable="pooled_spacing_bin",
                                      values={"bin_lo": float(lo), "bin_hi": float(hi), "density": float(d)},
                                      **base))
            rows.append(ResultRow(observable="pooled_spacing_stats", values=stats, **base))
    return rows
