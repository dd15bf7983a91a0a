"""Command line entry point: ``vortexfv <subcommand>``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O or input-file error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, parse_config, resolve_threads
from .timeint import NonFiniteState, UnsupportedCombination

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, np.integer, str)) else _fmt(v) for v in row])


def _write_json(path: Path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out: Path, command: str, cfg: RunConfig, threads: int) -> None:
    _write_json(out / "manifest.json", {
        "command": command,
        "version": __version__,
        "config": cfg.to_dict(),
        "threads": threads,
    })


def build_mesh_from_config(cfg: RunConfig, n: int | None = None, seed: int | None = None):
    from .cases import make_case
    from .mesh import read_mesh
    from .meshgen import GENERATORS, generate

    case = make_case(cfg.case, **cfg.case_params)
    boundary = cfg.boundary or case.boundary
    if cfg.mesh in GENERATORS:
        kw = {} if cfg.amplitude is None else {"amplitude": cfg.amplitude}
        return generate(cfg.mesh, n or cfg.n, cfg.seed if seed is None else seed, boundary=boundary, **kw)
    return read_mesh(cfg.mesh)


def dump_fields(path: Path, mesh, state) -> None:
    x, y = mesh.cell_centroid.T
    rows = zip(range(mesh.n_cells), x, y, mesh.cell_area, *state)
    _write_csv(path, ["cell_id", "x_c", "y_c", "area", "u", "v", "p"], rows)


def dump_nodes(path: Path, mesh, state) -> None:
    from .operators import curl_C, divergence_D

    v = np.asarray(state)[:2].T
    xy = mesh.node_coords
    rows = zip(range(mesh.n_nodes), xy[:, 0], xy[:, 1], mesh.dual_area,
               divergence_D(mesh, v), curl_C(mesh, v))
    _write_csv(path, ["node_id", "x", "y", "dual_area", "div", "curl"], rows)


def _radial_values(cfg: RunConfig, state):
    q = np.asarray(state)
    if cfg.radial_variable == "speed":
        return np.hypot(q[0], q[1])
    return q["uvp".index(cfg.radial_variable)]


def run_simulation(cfg: RunConfig, threads: int = 1) -> dict:
    """Run one case and write fields, nodal diagnostics, time series, radial scatter and a summary."""
    from .cases import diagnostics, initialize, make_case, radial_scatter, totals
    from .timeint import TimeControl, run, select_rhs

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "run", cfg, threads)
    case = make_case(cfg.case, **cfg.case_params)
    mesh = build_mesh_from_config(cfg)
    rhs = select_rhs(cfg.scheme, cfg.order, cfg.stencil)
    q0 = initialize(case, mesh)

    dumps = []

    def dump(mesh_, q, step):
        tag = f"{step:06d}"
        dump_fields(out / f"fields_{tag}.csv", mesh_, q)
        dump_nodes(out / f"nodes_{tag}.csv", mesh_, q)
        dumps.append(tag)

    observers = {
        "vorticity_l1": lambda m, q: diagnostics(m, q)["vorticity_l1"],
        "divergence_l1": lambda m, q: diagnostics(m, q)["divergence_l1"],
    }
    for i, name in enumerate("uvp"):
        observers[f"total_{name}"] = lambda m, q, i=i: float(totals(m, q)[i])

    wall = time.perf_counter()
    control = TimeControl(cfl=cfg.cfl, t_end=cfg.t_end, order=cfg.order, observe_every=cfg.output_every)

    def on_sample(step, t, q):
        if step == 0 or (cfg.output_every and step % cfg.output_every == 0) or t == cfg.t_end:
            if not dumps or dumps[-1] != f"{step:06d}":
                dump(mesh, q, step)

    res = run(mesh, q0, control, rhs=rhs, observers=observers, callback=on_sample)
    wall = time.perf_counter() - wall

    series = res.series
    names = ["t"] + list(observers)
    _write_csv(out / "series.csv", names, zip(*(series[k] for k in names)))
    _write_csv(out / "radial.csv", ["r", "value"], radial_scatter(mesh, _radial_values(cfg, res.state)))

    diag = diagnostics(mesh, res.state)
    summary = {
        "time": res.time,
        "steps": res.steps,
        "n_cells": mesh.n_cells,
        "totals": dict(zip("uvp", map(float, totals(mesh, res.state)))),
        "initial_totals": dict(zip("uvp", map(float, totals(mesh, q0)))),
        "max_vorticity_l1": float(np.max(series["vorticity_l1"])),
        "wall_time": wall,
        **diag,
    }
    if hasattr(case, "exact"):
        from .cases import error_l1

        summary["l1_error"] = error_l1(mesh, res.state, lambda x, y: case.exact(res.time, x, y)).errors
    _write_json(out / "summary.json", summary)
    return summary


def run_convergence(cfg: RunConfig, threads: int = 1) -> list[dict]:
    """Refinement study over ``cfg.levels``; writes ``convergence.csv``."""
    from .cases import convergence_study, make_case

    case = make_case(cfg.case, **cfg.case_params)
    if not hasattr(case, "exact"):
        raise ConfigError("case", f"{cfg.case!r} has no exact solution for a convergence study")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "converge", cfg, threads)
    meshes = [build_mesh_from_config(cfg, n=n, seed=cfg.seed + i) for i, n in enumerate(cfg.levels)]
    reports, rates = convergence_study(case, meshes, scheme=cfg.scheme, order=cfg.order,
                                       t_end=cfg.t_end, cfl=cfg.cfl, stencil=cfg.stencil)
    rows = []
    for i, (n, rep) in enumerate(zip(cfg.levels, reports)):
        rate = rates[i - 1] if i else {k: math.nan for k in "uvp"}
        rows.append({"level": n, "n_cells": rep.n_cells, "h": rep.h,
                     **{f"err_{k}": rep.errors[k] for k in "uvp"},
                     **{f"rate_{k}": rate[k] for k in "uvp"}})
    header = list(rows[0])
    _write_csv(out / "convergence.csv", header, ([r[k] for k in header] for r in rows))
    return rows


def run_fourier(cfg: RunConfig, scheme: str, threads: int = 1) -> dict:
    """Stability and kernel scan of a Cartesian symbol; writes ``fourier_scan.csv``."""
    from .fourier import SCHEMES, scan_table

    if scheme not in SCHEMES:
        raise ConfigError("fourier_scheme", f"must be one of {SCHEMES}")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, "fourier", cfg, threads)
    table = scan_table(scheme, cfg.cfl, cfg.samples, stencil=cfg.stencil)
    rows = ((r[0], r[1], int(r[2]), r[3]) for r in table)
    _write_csv(out / "fourier_scan.csv", ["k_x", "k_y", "kernel_dim", "spectral_radius"], rows)
    summary = {
        "scheme": scheme,
        "cfl": cfg.cfl,
        "samples": cfg.samples,
        "max_spectral_radius": float(table[:, 3].max()),
        "kernel_dims": sorted({int(d) for d in table[:, 2]}),
    }
    _write_json(out / "fourier_summary.json", summary)
    return summary


def mesh_gen(kind: str, n: int, seed: int, boundary: str, path: str, amplitude=None) -> None:
    from .mesh import write_mesh
    from .meshgen import generate

    kw = {} if amplitude is None else {"amplitude": amplitude}
    write_mesh(generate(kind, n, seed, boundary=boundary, **kw), path)


def mesh_check(path: str) -> dict:
    from .mesh import check_mesh, corner_area_residual, read_mesh

    mesh = read_mesh(path)
    out = {"n_cells": mesh.n_cells, "n_nodes": mesh.n_nodes, "n_edges": mesh.n_edges,
           "max_sides": int(mesh.cell_sides.max()), **check_mesh(mesh)}
    out["corner_area_identity"] = corner_area_residual(mesh)
    return out


def operators_check(mesh, seed: int = 0) -> dict:
    """Residuals of the discrete operator identities on ``mesh`` with random fields."""
    from .operators import alpha_residual, curl_of_gradient_matrix, duality_residual, edge_cancellation

    rng = np.random.default_rng(seed)
    v = rng.standard_normal((mesh.n_cells, 2))
    phi = rng.standard_normal(mesh.n_nodes)
    psi = rng.standard_normal(mesh.n_nodes)
    cg = curl_of_gradient_matrix(mesh)
    h = math.sqrt(mesh.cell_area.sum() / mesh.n_cells)
    pairs = edge_cancellation(mesh)
    return {
        "duality": duality_residual(mesh, v, phi),
        "alpha": alpha_residual(mesh, psi),
        "curl_grad_relative": float(np.abs(cg).max() * h * h),
        "edge_cancellation": float(np.abs(pairs.sum(axis=1)).max()) if len(pairs) else 0.0,
    }


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vortexfv", description="Node-conservative finite volumes for linear acoustics.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: VORTEXFV_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    def config_flags(sp):
        sp.add_argument("-c", "--config", help="flat key = value configuration file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key (repeatable)")
        for name in ("case", "mesh", "n", "seed", "amplitude", "boundary", "scheme", "order", "stencil",
                     "cfl", "t_end", "output_every", "output_dir", "radial_variable", "levels", "samples"):
            sp.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None)

    config_flags(sub.add_parser("run", help="run a benchmark case"))
    config_flags(sub.add_parser("converge", help="refinement study with L1 error rates"))
    fp = sub.add_parser("fourier", help="stability and kernel scan of a Cartesian symbol")
    config_flags(fp)
    fp.add_argument("--fourier-scheme", default="nodal_pressure_1")

    mp = sub.add_parser("mesh", help="mesh utilities")
    msub = mp.add_subparsers(dest="mesh_command", required=True)
    g = msub.add_parser("gen", help="generate a mesh file")
    g.add_argument("kind")
    g.add_argument("n", type=int)
    g.add_argument("output")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--boundary", default="periodic")
    g.add_argument("--amplitude", type=float, default=None)
    c = msub.add_parser("check", help="validate a mesh file and report geometric residuals")
    c.add_argument("path")

    op = sub.add_parser("operators", help="discrete operator identities")
    osub = op.add_subparsers(dest="operators_command", required=True)
    oc = osub.add_parser("check", help="residuals of the operator identities")
    oc.add_argument("path", nargs="?", help="mesh file (default: generated mesh)")
    oc.add_argument("--kind", default="quad")
    oc.add_argument("--n", type=int, default=16)
    oc.add_argument("--seed", type=int, default=0)
    return p


def _overrides(args) -> dict:
    keys = ("case", "mesh", "n", "seed", "amplitude", "boundary", "scheme", "order", "stencil",
            "cfl", "t_end", "output_every", "output_dir", "radial_variable", "levels", "samples")
    out = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        k, v = item.split("=", 1)
        out[k.strip()] = v
    return out


def _apply_threads(threads: int) -> None:
    # the kernels are single-threaded numpy; the setting caps any BLAS pool
    for var in _THREAD_VARS:
        os.environ[var] = str(threads)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads = resolve_threads(args.threads)
        _apply_threads(threads)
        if args.command in ("run", "converge", "fourier"):
            cfg = parse_config(args.config, _overrides(args))
            cfg.threads = threads
            if args.command == "run":
                result = run_simulation(cfg, threads)
            elif args.command == "converge":
                result = run_convergence(cfg, threads)
            else:
                result = run_fourier(cfg, args.fourier_scheme, threads)
        elif args.command == "mesh":
            if args.mesh_command == "gen":
                mesh_gen(args.kind, args.n, args.seed, args.boundary, args.output, args.amplitude)
                result = {"written": args.output}
            else:
                result = mesh_check(args.path)
        else:
            from .mesh import read_mesh
            from .meshgen import generate

            mesh = read_mesh(args.path) if args.path else generate(args.kind, args.n, args.seed)
            result = operators_check(mesh, args.seed)
        print(json.dumps(result, indent=2, sort_keys=True, default=float))
        return EXIT_OK
    except (ConfigError, UnsupportedCombination) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteState as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        # mesh validation and parse errors are ValueErrors raised while reading input
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
