"""Command-line front end: ``qubitchain <verb> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path
from typing import List, Mapping, Optional, Sequence

import numpy as np

from .config import ConfigError, SweepConfig, parse_config
from .eigensolve import EigensolveError, eigh
from .hamiltonian import build_z_hamiltonian, mean_field
from .output import OutputError, emit, format_value, write_atomic
from .params import ParameterError
from .spectral import (DEFAULT_BINS, DEFAULT_S_MAX, central_band, central_band_index, distribution_distance,
                       identify_bands, spacing_distribution)
from .states import band_metrics, central_band_states, coupling_census
from .sweep import run_sweep
from .theory import border_estimates

OUTPUT_DIR_ENV = "QUBITCHAIN_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("model")
    g.add_argument("--config", metavar="FILE", help="key = value configuration file; flags override it")
    g.add_argument("--L", type=int, dest="L", help="number of qubits")
    g.add_argument("--omega", type=float, help="Rabi frequency (default 100)")
    g.add_argument("--omega0", type=float, help="Larmor frequency of qubit 0 (default 100)")
    g.add_argument("--nu", type=float, help="rotating-frame frequency (default omega0)")
    g.add_argument("--profile", choices=["gradient", "quadratic", "homogeneous"])
    g.add_argument("--a", type=float, help="linear field gradient (default 1)")
    g.add_argument("--b", type=float, help="quadratic field coefficient")
    g.add_argument("--spread", type=float, help="homogeneous field spread")
    g.add_argument("--field-seed", type=int, dest="field_seed")
    g.add_argument("--coupling", choices=["N", "NN", "A"])
    g.add_argument("--J", type=float, dest="J", help="interaction strength")
    g.add_argument("--random", action="store_const", const=True, help="random bond amplitudes in [-1, 1]")
    g.add_argument("--seed", type=int, help="bond randomness seed")
    g.add_argument("--allow-large", action="store_const", const=True, dest="allow_large",
                   help="lift the L <= 14 guard")


def _out_flags(p: argparse.ArgumentParser):
    p.add_argument("--output", "-o", help=f"output file (relative paths go under ${OUTPUT_DIR_ENV} when set)")
    p.add_argument("--overwrite", action="store_const", const=True, help="replace an existing output file")


MODEL_DESTS = ("L", "omega", "omega0", "nu", "profile", "a", "b", "spread", "field_seed", "coupling", "J",
               "random", "seed", "allow_large")
SWEEP_DESTS = ("axis", "values", "ensemble", "observables", "bins", "s_max", "threshold", "representation",
               "unfolding", "window", "master_seed", "workers", "output", "format", "overwrite", "timing")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qubitchain", description="Exact diagonalisation of driven qubit chains.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("matrix", help="dump Hamiltonian entries as 'row col re im' triplets")
    _model_flags(p)
    _out_flags(p)
    p.add_argument("--representation", choices=["z", "mean-field"], default="z")
    p.add_argument("--threshold", type=float, default=1e-6, help="minimum modulus (default 1e-6)")

    p = sub.add_parser("spectrum", help="all eigenvalues")
    _model_flags(p)
    _out_flags(p)

    p = sub.add_parser("bands", help="band decomposition of the spectrum")
    _model_flags(p)
    _out_flags(p)

    p = sub.add_parser("spacing", help="central-band level-spacing histogram")
    _model_flags(p)
    _out_flags(p)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--s-max", type=float, dest="s_max", default=DEFAULT_S_MAX)
    p.add_argument("--unfolding", choices=["local", "mean"], default="local")
    p.add_argument("--window", type=int, default=21)
    p.add_argument("--all", action="store_true", help="use the whole spectrum instead of the central band")

    p = sub.add_parser("states", help="per-eigenstate N_pc and sigma")
    _model_flags(p)
    _out_flags(p)
    p.add_argument("--representation", choices=["z", "mean-field"], default="mean-field")
    p.add_argument("--all", action="store_true", help="every eigenstate instead of the central band")

    p = sub.add_parser("census", help="coupled-state count M_f and span (Delta E)_f")
    _model_flags(p)
    _out_flags(p)
    p.add_argument("--threshold", type=float, default=1e-6)

    p = sub.add_parser("theory", help="closed-form band and border estimates")
    _model_flags(p)
    _out_flags(p)
    p.add_argument("--format", choices=["csv", "text"], default="text")

    p = sub.add_parser("sweep", help="seeded parameter sweep")
    _model_flags(p)
    p.add_argument("--axis", choices=["J", "omega", "L", "spread"])
    p.add_argument("--values", help="comma-separated list, or log:start:stop:n / lin:start:stop:n")
    p.add_argument("--ensemble", type=int)
    p.add_argument("--observables", help="comma-separated subset of widths,spacing,npc,sigma,census,theory")
    p.add_argument("--bins", type=int)
    p.add_argument("--s-max", type=float, dest="s_max")
    p.add_argument("--threshold", type=float)
    p.add_argument("--representation", choices=["z", "mean-field"])
    p.add_argument("--unfolding", choices=["local", "mean"])
    p.add_argument("--window", type=int)
    p.add_argument("--master-seed", type=int, dest="master_seed")
    p.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    p.add_argument("--format", choices=["csv", "jsonl"])
    p.add_argument("--timing", action="store_const", const=True, help="add wall-time column (not reproducible)")
    _out_flags(p)
    return ap


# --------------------------------------------------------------------------


def _read_config(path: Optional[str]) -> Optional[str]:
    if not path:
        return None
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror or exc}") from exc


def _config(args, dests: Sequence[str]) -> SweepConfig:
    overrides = {d: getattr(args, d, None) for d in dests}
    return parse_config(_read_config(args.config), overrides)


def resolve_output(path: Optional[str], env: Optional[Mapping[str, str]] = None) -> Optional[Path]:
    if not path:
        return None
    env = os.environ if env is None else env
    p = Path(path)
    base = env.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _deliver(data: bytes, args, stdout) -> None:
    dest = resolve_output(getattr(args, "output", None))
    if dest is None:
        stdout.write(data.decode())
        return
    write_atomic(dest, data, overwrite=bool(getattr(args, "overwrite", False)))


def table(header: List[str], records, meta: Mapping) -> bytes:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={format_value(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for rec in records:
        w.writerow([format_value(v) for v in rec])
    return buf.getvalue().encode()


def _py(v):
    return v.item() if isinstance(v, np.generic) else v


def cmd_matrix(args, params):
    H = build_z_hamiltonian(params)
    if args.representation == "mean-field":
        H = mean_field(params).rotate(H)
    A = H.data
    r, c = np.nonzero(np.abs(A) > args.threshold)
    meta = dict(params.describe(), representation=args.representation, threshold=args.threshold, dim=params.dim)
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={format_value(v)}\n")
    buf.write("row col re im\n")
    for i, j in zip(r.tolist(), c.tolist()):
        z = A[i, j]
        buf.write(f"{i} {j} {format_value(float(z.real))} {format_value(float(z.imag))}\n")
    return buf.getvalue().encode()


def cmd_spectrum(args, params):
    spec = eigh(build_z_hamiltonian(params), vectors=False)
    return table(["index", "energy"], ((i, float(e)) for i, e in enumerate(spec.eigenvalues)), params.describe())


def cmd_bands(args, params):
    spec = eigh(build_z_hamiltonian(params), vectors=False)
    bands = identify_bands(spec, params)
    ci = central_band_index(bands, spec)
    recs = ((i, b.lo_index, b.hi_index, b.size, b.e_min, b.e_max, b.width, i == ci) for i, b in enumerate(bands))
    return table(["band", "lo_index", "hi_index", "size", "e_min", "e_max", "width", "central"], recs,
                 dict(params.describe(), n_bands=len(bands)))


def cmd_spacing(args, params):
    from .spectral import Band
    spec = eigh(build_z_hamiltonian(params), vectors=False)
    if args.all:
        w = spec.eigenvalues
        band = Band(0, len(w) - 1, float(w[0]), float(w[-1]))
    else:
        band = central_band(identify_bands(spec, params), spec)
    h = spacing_distribution(spec, band, args.bins, args.s_max, args.unfolding, args.window)
    meta = dict(params.describe(), band_lo=band.lo_index, band_hi=band.hi_index, unfolding=args.unfolding,
                mean_spacing=h.mean_spacing, samples=h.sample_count, overflow=h.overflow)
    for k in ("poisson", "wd", "gue"):
        meta[f"l1_{k}"] = distribution_distance(h, k).l1
    meta["small_s_mass"] = h.mass_below(0.1)
    recs = zip(h.bin_edges[:-1].tolist(), h.bin_edges[1:].tolist(), h.densities.tolist())
    return table(["bin_lo", "bin_hi", "density"], recs, meta)


def cmd_states(args, params):
    spec = eigh(build_z_hamiltonian(params), vectors=True)
    band = None if args.all else central_band(identify_bands(spec, params), spec)
    mf = mean_field(params) if args.representation == "mean-field" else None
    m = band_metrics(spec, band, args.representation, mf)
    meta = dict(params.describe(), representation=args.representation, mean_npc=m.mean_npc, mean_sigma=m.mean_sigma)
    return table(["energy", "npc", "sigma"], zip(m.energies.tolist(), m.npc.tolist(), m.sigma.tolist()), meta)


def cmd_census(args, params):
    mf = mean_field(params)
    H_mf = mf.rotate(build_z_hamiltonian(params))
    c = coupling_census(H_mf, mf.unperturbed_energies(), central_band_states(params.L), args.threshold)
    return table(["m_f", "delta_e_f", "d_f", "band_states"], [(c.m_f, c.delta_e_f, c.d_f, c.rows)],
                 dict(params.describe(), threshold=args.threshold))


def cmd_theory(args, params):
    est = {k: _py(v) for k, v in border_estimates(params).as_dict().items()}
    if args.format == "csv":
        return table(["quantity", "value"], est.items(), params.describe())
    width = max(len(k) for k in est)
    lines = [f"# {k}={format_value(v)}" for k, v in params.describe().items()]
    lines += [f"{k:<{width}}  {'' if v is None else format(v, '.6g')}" for k, v in est.items()]
    return ("\n".join(lines) + "\n").encode()


VERBS = {"matrix": cmd_matrix, "spectrum": cmd_spectrum, "bands": cmd_bands, "spacing": cmd_spacing,
         "states": cmd_states, "census": cmd_census, "theory": cmd_theory}


def cmd_sweep(args, stdout):
    cfg = _config(args, MODEL_DESTS + SWEEP_DESTS)
    rows = run_sweep(cfg)
    meta = {"format": "qubitchain-rows-v1"}
    meta.update(cfg.echo())
    data = emit(rows, cfg.format, meta=meta, timing=cfg.timing)
    args.output, args.overwrite = cfg.output, cfg.overwrite
    _deliver(data, args, stdout)
    return EXIT_NUMERIC if rows and all(r.observable == "error" for r in rows) else EXIT_OK


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.verb == "sweep":
            return cmd_sweep(args, stdout)
        cfg = _config(args, MODEL_DESTS)
        params = cfg.base_params()
        data = VERBS[args.verb](args, params)
        _deliver(data, args, stdout)
        return EXIT_OK
    except (ConfigError, ParameterError, UsageError) as exc:
        print(f"qubitchain: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (EigensolveError, np.linalg.LinAlgError, MemoryError, ValueError) as exc:
        print(f"qubitchain: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"qubitchain: I/O failure: {exc}", file=stderr)
        return EXIT_IO


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
