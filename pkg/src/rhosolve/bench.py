"""Benchmark sweep harness: runs method x ordering combinations over model
sizes and collects per-run records suitable for CSV/JSON export."""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from . import liouville, ordering, sparse, steady
from .models import ModelSpec, build_model

__all__ = ["BenchRecord", "SweepSpec", "run_bench", "write_results",
           "read_results", "METHODS", "ORDERINGS", "TIMING_COLUMNS"]

# method token -> (Liouvillian variant it solves, steady-state entry point)
METHODS = ("direct", "gmres", "bicgstab", "power", "power-gmres",
           "power-bicgstab")
ORDERINGS = ("natural", "rcm", "cmd")
TIMING_COLUMNS = ("build_time", "factor_time", "solve_time")


@dataclass
class BenchRecord:
    """One benchmark run. Field order defines the CSV column order.

    bandwidth/profile are measured on the solver-ready variant matrix
    before and after the ordering permutation; reduction factors are
    before/after kept to 4 significant digits. The trailing fields
    snapshot every tunable so a record can be reproduced on its own.
    """

    system: str
    size: int
    hilbert_dim: int
    liouvillian_variant: str
    ordering: str
    method: str
    nnz_L_liouvillian: int
    bandwidth_before: int
    bandwidth_after: int
    bandwidth_reduction: float
    profile_before: int
    profile_after: int
    profile_reduction: float
    fill_factor: float
    condest: float | None
    converged: bool
    breakdown: bool
    iterations: int
    residual: float
    build_time: float
    factor_time: float
    solve_time: float
    d: float
    p: float
    tol: float
    m: int
    sigma: float
    w: float
    seed: int


@dataclass
class SweepSpec:
    """A sweep request: one system, a list of sizes, and the method and
    ordering sets to cross."""

    system: str
    sizes: list
    methods: list
    orderings: list
    tol: float = 1e-14
    drop_tol: float = 1e-4
    fill_limit: float = 300.0
    restart_m: int = 20
    max_iter: int = 1000
    sigma: float = 1e-15
    seed: int = steady.DEFAULT_SEED
    overrides: dict = dataclasses.field(default_factory=dict)

    def check(self):
        if not self.sizes:
            raise ValueError("no sizes given")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; expected one of "
                                 f"{METHODS}")
        for o in self.orderings:
            if o not in ORDERINGS:
                raise ValueError(f"unknown ordering {o!r}; expected one of "
                                 f"{ORDERINGS}")
        if any(int(s) < 2 for s in self.sizes):
            raise ValueError("sizes must be >= 2")


def _variant_for(method):
    return "shifted" if method.startswith("power") else "modified"


def _variant_system(L, method, sigma, w):
    if _variant_for(method) == "shifted":
        return liouville.shift(L, sigma)
    return liouville.build_modified(L, w)


def _ordered_view(system, ordering_name):
    """The variant matrix as the factorization will see it, for the
    before/after bandwidth and profile columns."""
    m = system.matrix
    if ordering_name == "natural":
        return m, "natural"
    if ordering_name == "rcm":
        p = ordering.rcm(m)
        return sparse.permute(m, p, p), "rcm"
    label = "cmd"
    rowp = sparse.Permutation.identity(m.nrows)
    if m.diagonal_stored_count() < m.nrows:
        rowp = ordering.weighted_mbm(m)
        label = "cmd+mbm"
    rm = sparse.permute(m, rowp, sparse.Permutation.identity(m.nrows))
    colp = ordering.col_min_degree(rm)
    return sparse.permute(rm, sparse.Permutation.identity(m.nrows), colp), label


def _round4(x):
    return float(f"{x:.4g}") if math.isfinite(x) else x


def _run_one(L, method, ordering_name, spec, w_value):
    if method == "direct":
        return steady.solve_direct(L, ordering_name, w=w_value)
    if method in ("gmres", "bicgstab"):
        return steady.solve_iterative(
            L, ordering_name, solver=method, d=spec.drop_tol,
            p=spec.fill_limit, tol=spec.tol, restart_m=spec.restart_m,
            max_iter=spec.max_iter, w=w_value)
    inner = "direct" if method == "power" else "iterative"
    solver = method.split("-", 1)[1] if "-" in method else "gmres"
    return steady.inverse_power(
        L, sigma=spec.sigma, tol=spec.tol, inner=inner,
        ordering_name=ordering_name, solver=solver, d=spec.drop_tol,
        p=spec.fill_limit, restart_m=spec.restart_m,
        max_iter=spec.max_iter, seed=spec.seed)


def run_bench(spec):
    """Execute a sweep and return one BenchRecord per combination.

    Failures (non-convergence, breakdown, solver errors) become records
    with converged=False and, where applicable, breakdown=True; the sweep
    itself never aborts."""
    spec.check()
    records = []
    for size in spec.sizes:
        model = ModelSpec(spec.system, int(size), dict(spec.overrides))
        h, c_ops = build_model(model)
        L = liouville.build_liouvillian(h, c_ops)
        w_value = liouville.default_weight(L)
        for method in spec.methods:
            variant = _variant_for(method)
            vsys = _variant_system(L, method, spec.sigma, w_value)
            bp_before = ordering.band_profile(vsys.matrix)
            for ordering_name in spec.orderings:
                view, label = _ordered_view(vsys, ordering_name)
                bp_after = ordering.band_profile(view)
                t0 = time.perf_counter()
                try:
                    res = _run_one(L, method, ordering_name, spec, w_value)
                    rec = BenchRecord(
                        system=model.name, size=model.size,
                        hilbert_dim=L.hilbert_dim,
                        liouvillian_variant=variant, ordering=res.ordering,
                        method=res.method,
                        nnz_L_liouvillian=vsys.matrix.nnz,
                        bandwidth_before=bp_before.bandwidth,
                        bandwidth_after=bp_after.bandwidth,
                        bandwidth_reduction=_round4(
                            bp_before.bandwidth / bp_after.bandwidth),
                        profile_before=bp_before.profile,
                        profile_after=bp_after.profile,
                        profile_reduction=_round4(
                            bp_before.profile / bp_after.profile),
                        fill_factor=res.fill_factor,
                        condest=res.condest,
                        converged=res.converged, breakdown=res.breakdown,
                        iterations=res.iterations, residual=res.residual,
                        build_time=res.build_time,
                        factor_time=res.factor_time,
                        solve_time=res.solve_time,
                        d=spec.drop_tol, p=spec.fill_limit, tol=spec.tol,
                        m=spec.restart_m, sigma=spec.sigma, w=w_value,
                        seed=spec.seed)
                except (ValueError, RuntimeError, MemoryError):
                    rec = BenchRecord(
                        system=model.name, size=model.size,
                        hilbert_dim=L.hilbert_dim,
                        liouvillian_variant=variant, ordering=label,
                        method=method,
                        nnz_L_liouvillian=vsys.matrix.nnz,
                        bandwidth_before=bp_before.bandwidth,
                        bandwidth_after=bp_after.bandwidth,
                        bandwidth_reduction=_round4(
                            bp_before.bandwidth / bp_after.bandwidth),
                        profile_before=bp_before.profile,
                        profile_after=bp_after.profile,
                        profile_reduction=_round4(
                            bp_before.profile / bp_after.profile),
                        fill_factor=float("nan"), condest=None,
                        converged=False, breakdown=True, iterations=0,
                        residual=float("nan"), build_time=0.0,
                        factor_time=0.0,
                        solve_time=time.perf_counter() - t0,
                        d=spec.drop_tol, p=spec.fill_limit, tol=spec.tol,
                        m=spec.restart_m, sigma=spec.sigma, w=w_value,
                        seed=spec.seed)
                records.append(rec)
    return records


_FIELDS = [f.name for f in dataclasses.fields(BenchRecord)]
_REDUCTION_FIELDS = ("bandwidth_reduction", "profile_reduction")
_INT_FIELDS = ("size", "hilbert_dim", "nnz_L_liouvillian",
               "bandwidth_before", "bandwidth_after", "profile_before",
               "profile_after", "iterations", "m", "seed")
_BOOL_FIELDS = ("converged", "breakdown")


def _csv_cell(name, value):
    if value is None:
        return ""
    if name in _BOOL_FIELDS:
        return "true" if value else "false"
    if name in _INT_FIELDS:
        return str(int(value))
    if isinstance(value, float):
        if name in _REDUCTION_FIELDS:
            return f"{value:.4g}"
        return f"{value:.17g}"
    return str(value)


def write_results(records, path, fmt="csv"):
    """Write records as CSV (fixed header, field order) or a JSON array.
    Floats carry 17 significant digits; reductions 4."""
    if fmt == "csv":
        lines = [",".join(_FIELDS)]
        for rec in records:
            lines.append(",".join(
                _csv_cell(name, getattr(rec, name)) for name in _FIELDS))
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    elif fmt == "json":
        payload = [dataclasses.asdict(rec) for rec in records]
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _parse_cell(name, text):
    if text == "":
        return None
    if name in _BOOL_FIELDS:
        return text == "true"
    if name in _INT_FIELDS:
        return int(text)
    if name in ("system", "liouvillian_variant", "ordering", "method"):
        return text
    return float(text)


def read_results(path):
    """Read a CSV written by write_results back into BenchRecord objects."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [ln.rstrip("\n") for ln in handle if ln.strip()]
    header = lines[0].split(",")
    if header != _FIELDS:
        raise ValueError("unexpected CSV header")
    out = []
    for ln in lines[1:]:
        cells = ln.split(",")
        kwargs = {name: _parse_cell(name, cell)
                  for name, cell in zip(header, cells)}
        out.append(BenchRecord(**kwargs))
    return out
