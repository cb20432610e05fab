"""Command-line entry points: benchmark sweeps, single steady-state solves
with a validation report, and bandwidth/profile inspection of Matrix Market
files."""

from __future__ import annotations

import argparse
import sys

from . import bench, kernels, liouville, ordering, sparse, steady
from .models import ModelSpec, build_model

__all__ = ["main"]


def _parse_sizes(text):
    """Accept '4:32:4' (inclusive range), '4,8,12', or a single integer."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) == 2:
            start, stop = (int(p) for p in parts)
            step = 1
        elif len(parts) == 3:
            start, stop, step = (int(p) for p in parts)
        else:
            raise argparse.ArgumentTypeError(f"bad size range {text!r}")
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad size range {text!r}")
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def _parse_list(text):
    return [p.strip() for p in text.split(",") if p.strip()]


def _overrides(args):
    pairs = {}
    if args.params_file:
        spec = ModelSpec.from_file(args.params_file)
        pairs.update(spec.overrides)
    for raw in args.param or []:
        key, sep, value = raw.partition("=")
        if not sep:
            raise SystemExit(f"expected key=value for --param, got {raw!r}")
        pairs[key.strip()] = float(value.strip())
    return pairs


def _add_model_args(parser):
    parser.add_argument("--system", required=True,
                        choices=["jc", "spin", "optomech"])
    parser.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="model parameter override (repeatable)")
    parser.add_argument("--params-file", metavar="FILE",
                        help="key=value parameter file")


def _add_solver_args(parser):
    parser.add_argument("--tol", type=float, default=1e-14)
    parser.add_argument("--drop-tol", type=float, default=1e-4,
                        help="incomplete-LU drop tolerance d")
    parser.add_argument("--fill", type=float, default=300.0,
                        help="incomplete-LU fill budget p (per-column cap "
                             "p*nnz/n)")
    parser.add_argument("--restart", type=int, default=20)
    parser.add_argument("--max-iter", type=int, default=1000)
    parser.add_argument("--sigma", type=float, default=1e-15)
    parser.add_argument("--seed", type=int, default=steady.DEFAULT_SEED)


def _cmd_bench(args):
    spec = bench.SweepSpec(
        system=args.system, sizes=_parse_sizes(args.sizes),
        methods=_parse_list(args.methods),
        orderings=_parse_list(args.orderings),
        tol=args.tol, drop_tol=args.drop_tol, fill_limit=args.fill,
        restart_m=args.restart, max_iter=args.max_iter, sigma=args.sigma,
        seed=args.seed, overrides=_overrides(args))
    print(f"kernel backend: {kernels.BACKEND}")
    print(f"drop tolerance d = {args.drop_tol:g}, fill budget p = "
          f"{args.fill:g}")
    records = bench.run_bench(spec)
    bench.write_results(records, args.out, args.format)
    failed = sum(1 for r in records if not r.converged)
    print(f"wrote {len(records)} records to {args.out}"
          + (f" ({failed} not converged)" if failed else ""))
    return 0


def _cmd_solve(args):
    spec = ModelSpec(args.system, args.size, _overrides(args))
    h, c_ops = build_model(spec)
    L = liouville.build_liouvillian(h, c_ops)
    print(f"kernel backend: {kernels.BACKEND}")
    print(f"system: {spec.name}  size {spec.size}  D = {L.hilbert_dim}  "
          f"n = {L.matrix.nrows}  nnz = {L.matrix.nnz}")
    method = args.method
    if method == "direct":
        res = steady.solve_direct(L, args.ordering)
    elif method in ("gmres", "bicgstab"):
        print(f"drop tolerance d = {args.drop_tol:g}")
        res = steady.solve_iterative(
            L, args.ordering, solver=method, d=args.drop_tol, p=args.fill,
            tol=args.tol, restart_m=args.restart, max_iter=args.max_iter)
    else:
        inner = "direct" if method == "power" else "iterative"
        solver = method.split("-", 1)[1] if "-" in method else "gmres"
        if inner == "iterative":
            print(f"drop tolerance d = {args.drop_tol:g}")
        res = steady.inverse_power(
            L, sigma=args.sigma, tol=args.tol, inner=inner,
            ordering_name=args.ordering, solver=solver, d=args.drop_tol,
            p=args.fill, restart_m=args.restart, max_iter=args.max_iter,
            seed=args.seed)
    print(f"method: {res.method}  ordering: {res.ordering}")
    print(f"converged: {res.converged}  iterations: {res.iterations}  "
          f"breakdown: {res.breakdown}")
    print(f"residual: {res.residual:.3e}  fill factor: {res.fill_factor:.3f}"
          + (f"  condest: {res.condest:.3e}" if res.condest is not None
             else ""))
    print(f"times: build {res.build_time:.3f}s  factor "
          f"{res.factor_time:.3f}s  solve {res.solve_time:.3f}s")
    if args.export_matrix:
        variant = ("shifted" if res.method.startswith("power")
                   else "modified")
        vsys = (liouville.shift(L, args.sigma) if variant == "shifted"
                else liouville.build_modified(L))
        sparse.write_matrix_market(vsys.matrix, args.export_matrix,
                                   comment=f"{spec.name} size {spec.size} "
                                           f"{variant}")
        print(f"wrote {variant} system matrix to {args.export_matrix}")
    report = steady.validate(res, L)
    print("validation:")
    for line in report.lines():
        print("  " + line)
    return 0 if report.all_passed else 1


def _cmd_inspect(args):
    m = sparse.read_matrix_market(args.path)
    bp = ordering.band_profile(m)
    print(f"{args.path}: {m.nrows} x {m.ncols}, nnz = {m.nnz}")
    print(f"upper bandwidth {bp.ub}  lower bandwidth {bp.lb}  "
          f"bandwidth {bp.bandwidth}")
    print(f"upper profile {bp.up}  lower profile {bp.lp}  "
          f"profile {bp.profile}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rhosolve",
        description="Sparse steady-state solvers for open quantum systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bench = sub.add_parser("bench", help="run a benchmark sweep")
    _add_model_args(p_bench)
    p_bench.add_argument("--sizes", required=True,
                         help="'4:32:4' inclusive range or '4,8,12' list")
    p_bench.add_argument("--methods", default="direct",
                         help="comma list from: " + ",".join(bench.METHODS))
    p_bench.add_argument("--orderings", default="natural",
                         help="comma list from: " + ",".join(bench.ORDERINGS))
    _add_solver_args(p_bench)
    p_bench.add_argument("--out", required=True)
    p_bench.add_argument("--format", choices=["csv", "json"], default="csv")
    p_bench.set_defaults(func=_cmd_bench)

    p_solve = sub.add_parser(
        "solve", help="single steady-state solve with validation report "
                      "(exit 1 if validation fails)")
    _add_model_args(p_solve)
    p_solve.add_argument("--size", type=int, required=True)
    p_solve.add_argument("--method", default="direct",
                         choices=list(bench.METHODS))
    p_solve.add_argument("--ordering", default="natural",
                         choices=list(bench.ORDERINGS))
    _add_solver_args(p_solve)
    p_solve.add_argument("--export-matrix", metavar="FILE",
                         help="write the solver-ready system matrix in "
                              "Matrix Market format")
    p_solve.set_defaults(func=_cmd_solve)

    p_inspect = sub.add_parser(
        "inspect", help="print bandwidth/profile of a Matrix Market file")
    p_inspect.add_argument("path")
    p_inspect.set_defaults(func=_cmd_inspect)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
