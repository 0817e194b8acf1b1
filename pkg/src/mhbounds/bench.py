"""Benchmark runner: configure a case, solve its modes, evaluate the
two-sided bounds and efficiency indices, and emit tables.

Output tables carry one row per Fourier mode (mode sweep) or one row per
grid (grid sweep), plus optional "overall (N=...)" aggregation rows, in the
column layout  label,t_sec,minorant,ieff_minorant,majorant,ieff_majorant,
ieff_ratio,ieff_m1.  Runs are deterministic for a fixed configuration with
one worker.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import mesh as meshmod
from . import oracle
from .bounds import (
    BoundParams,
    ModeBounds,
    aggregate,
    combined_norm_weights,
    efficiency_indices,
    evaluate_mode,
    m1_index,
)
from .cases import CaseBind, ExampleCase, make_case
from .femcore import FemContext, prolong
from .saddlesolve import SolveStats, build_precond_I, build_precond_II, minres
from .systems import build_matrices, build_mode_system

COLUMNS = [
    "label",
    "t_sec",
    "minorant",
    "ieff_minorant",
    "majorant",
    "ieff_majorant",
    "ieff_ratio",
    "ieff_m1",
]


@dataclass
class ExperimentConfig:
    """Everything a run needs; defaults follow the benchmark definitions."""

    example: int
    grid: int = 64
    modes: tuple = (0,)
    overall: tuple = ()
    lam: float | None = None
    omega: float | None = None
    tol: float = 1e-10
    maxiter: int = 300
    paper_mode: bool = False
    precond_family: int = 0
    nref: int | None = None
    reference: str = "auto"  # auto | analytic | fine | none
    alpha_tail: float = 1e-8
    m1_variant: str = "extra"  # "extra" or "full" numerator for ieff_m1
    workers: int = 1
    out: str | None = None

    def validate(self) -> list[str]:
        errors = []
        if self.example not in range(1, 7):
            errors.append(f"example must be 1..6, got {self.example}")
        if self.grid < 1:
            errors.append("grid must be positive")
        if self.example in (3, 6) and self.grid % 2:
            errors.append("examples 3 and 6 need an even grid")
        if any(k < 0 for k in self.modes):
            errors.append("modes must be nonnegative")
        if self.reference not in ("auto", "analytic", "fine", "none"):
            errors.append(f"unknown reference mode {self.reference!r}")
        if self.reference == "fine" and self.nref is None:
            errors.append("reference='fine' needs --nref")
        if self.nref is not None and self.nref < self.grid:
            errors.append("nref must not be below the grid")
        if self.overall and max(self.overall) > max(self.modes, default=-1):
            pass  # extra modes are solved on demand
        if self.precond_family not in (0, 1):
            errors.append("precond family must be 0 or 1")
        if self.m1_variant not in ("extra", "full"):
            errors.append("m1 variant must be 'extra' or 'full'")
        return errors


@dataclass
class ModeReport:
    k: int
    t_sec: float
    bounds: ModeBounds
    stats: SolveStats
    solution: object = None
    reference: float = np.nan
    err_l2: float = np.nan
    err_h1: float = np.nan

    def combined_err2(self, problem: str, params: BoundParams) -> float:
        w_l2, w_h1 = combined_norm_weights(problem, params, self.k)
        return w_l2 * self.err_l2 + w_h1 * self.err_h1


@dataclass
class TableRow:
    label: str
    t_sec: float
    minorant: float
    ieff_minorant: float
    majorant: float
    ieff_majorant: float
    ieff_ratio: float
    ieff_m1: float

    def as_list(self):
        return [getattr(self, c) for c in COLUMNS]


@dataclass
class BoundsReport:
    config: ExperimentConfig
    problem: str
    params: BoundParams
    mode_reports: dict
    rows: list = field(default_factory=list)
    overall_rows: list = field(default_factory=list)
    reference_kind: str = "none"
    notes: list = field(default_factory=list)

    @property
    def all_rows(self):
        return self.rows + self.overall_rows


class _Solver:
    """Assemble-and-solve helper shared by runs and the fine reference."""

    def __init__(self, case: ExampleCase, n: int, config: ExperimentConfig):
        self.case = case
        self.config = config
        self.mesh = meshmod.build(n)
        self.ctx = FemContext(self.mesh)
        self.mats = build_matrices(self.ctx, case.sigma, case.nu)
        self.bind = CaseBind(case, self.ctx)
        self.params = BoundParams(
            lam=case.lam, omega=case.omega, sigma=case.sigma, nu=case.nu,
            alpha_tail=config.alpha_tail,
        )

    def solve_mode(self, k: int):
        rhs_c, rhs_s = self.bind.rhs(k)
        system = build_mode_system(
            self.case.problem, self.mats, k, self.case.lam, self.case.omega, rhs_c, rhs_s
        )
        if self.case.problem == "I":
            precond = build_precond_I(self.mats, k, self.case.lam, self.case.omega)
        else:
            precond = build_precond_II(
                self.mats, k, self.case.lam, self.case.omega,
                family=self.config.precond_family,
            )
        fixed = 8 if self.config.paper_mode else None
        return minres(
            system, precond, tol=self.config.tol, maxiter=self.config.maxiter,
            fixed_iters=fixed,
        )

    def run_mode(self, k: int) -> ModeReport:
        start = time.perf_counter()
        sol, stats = self.solve_mode(k)
        bounds = evaluate_mode(
            self.case.problem, self.ctx, self.mats, self.params, sol,
            self.bind.mode_data(k),
        )
        elapsed = time.perf_counter() - start
        return ModeReport(k=k, t_sec=elapsed, bounds=bounds, stats=stats, solution=sol)


def fine_grid_reference(case: ExampleCase, nref: int, ks, config: ExperimentConfig):
    """Reference costs and state fields from a finer-grid solve.

    Returns (costs, fields, fine_solver); costs[k] is the per-mode cost of
    the fine solution, fields[k] the full nodal state pair for error norms.
    """
    fine = _Solver(case, nref, config)
    costs, fields = {}, {}
    for k in ks:
        sol, _ = fine.solve_mode(k)
        data = fine.bind.mode_data(k)
        ctx = fine.ctx
        misfit = energy = 0.0
        parts = [(sol.y_c, sol.p_c, data.y_qp_c, data.g_qp_c)]
        if k > 0:
            parts.append((sol.y_s, sol.p_s, data.y_qp_s, data.g_qp_s))
        store = []
        for yv, pv, yd_qp, gd_qp in parts:
            y_full = ctx.to_full(yv)
            if case.problem == "I":
                misfit += ctx.norm2(ctx.p1_at_qp(y_full) - yd_qp)
            else:
                misfit += ctx.vec_norm2(ctx.p1_grad(y_full)[:, None, :] - gd_qp)
            energy += float(pv @ (fine.mats.M @ pv))
            store.append(y_full)
        costs[k] = 0.5 * misfit + energy / (2 * case.lam)
        fields[k] = store
    return costs, fields, fine


def _fine_error_norms(fine, fields_k, coarse_ctx, sol):
    """(||e||^2, ||grad e||^2) of the coarse state against the fine one."""
    parts = [sol.y_c] if sol.y_s is None else [sol.y_c, sol.y_s]
    l2 = h1 = 0.0
    for ref_full, vec in zip(fields_k, parts):
        e = ref_full - prolong(coarse_ctx.mesh, coarse_ctx.to_full(vec), fine.mesh)
        l2 += float(e @ (fine.ctx.M_full @ e))
        h1 += float(e @ (fine.ctx.K_full @ e))
    return l2, h1


def _overall_reference(case: ExampleCase) -> float:
    """Exact total cost of an analytic case by time quadrature."""
    lam, omega = case.lam, case.omega
    if case.problem == "I":
        mis = oracle.time_norm2(
            lambda t: case.exact_y_time(t) - case.time_factor(t), omega
        ) * 0.25
    else:
        mis = oracle.time_norm2(
            lambda t: case.exact_y_time(t) - case.time_factor(t) * case.data_scale,
            omega,
        ) * (case.eigen_kappa * 0.25)
    energy = oracle.time_norm2(case.exact_u_time, omega) * 0.25
    return 0.5 * mis + 0.5 * lam * energy


def run(config: ExperimentConfig) -> BoundsReport:
    """Execute one experiment; see ExperimentConfig for the knobs."""
    errors = config.validate()
    if errors:
        raise ValueError("; ".join(errors))
    case = make_case(config.example, lam=config.lam, omega=config.omega)
    solver = _Solver(case, config.grid, config)
    params = solver.params

    needed = sorted(set(config.modes) | set(range(max(config.overall) + 1)) if config.overall
                    else set(config.modes))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            reports = {r.k: r for r in pool.map(solver.run_mode, needed)}
    else:
        reports = {k: solver.run_mode(k) for k in needed}

    report = BoundsReport(
        config=config, problem=case.problem, params=params, mode_reports=reports
    )

    # reference quantities (excluded from the per-mode timings)
    kind = config.reference
    if kind == "auto":
        if case.has_analytic_reference:
            kind = "analytic"
        elif config.nref is not None:
            kind = "fine"
        else:
            kind = "none"
    report.reference_kind = kind if kind == "none" else (
        "analytic" if kind == "analytic" else f"fine-grid {config.nref}"
    )
    if kind == "analytic":
        for k, rep in reports.items():
            rep.reference = solver.bind.reference_cost(k)
            rep.err_l2, rep.err_h1 = solver.bind.error_norms(k, rep.solution)
    elif kind == "fine":
        costs, fields, fine = fine_grid_reference(case, config.nref, needed, config)
        for k, rep in reports.items():
            rep.reference = costs[k]
            rep.err_l2, rep.err_h1 = _fine_error_norms(fine, fields[k], solver.ctx, rep.solution)

    for k in sorted(config.modes):
        rep = reports[k]
        report.rows.append(_mode_row(case, params, rep, config))

    for n_trunc in config.overall:
        report.overall_rows.append(
            _overall_row(case, params, reports, n_trunc, config, kind)
        )
    if config.out:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"example{config.example}_n{config.grid}"
        write_csv(report, out / f"{stem}.csv")
        write_markdown(report, out / f"{stem}.md")
    return report


def _m1_numerator(b: ModeBounds, variant: str) -> float:
    return b.m1_extra if variant == "extra" else b.m1


def _mode_row(case, params, rep: ModeReport, config) -> TableRow:
    b = rep.bounds
    idx = efficiency_indices(b.minorant, b.majorant, rep.reference if np.isfinite(rep.reference) else None)
    if np.isfinite(rep.err_l2):
        err2 = rep.combined_err2(case.problem, params)
        ieff_m1 = m1_index(_m1_numerator(b, config.m1_variant), err2)
    else:
        ieff_m1 = np.nan
    return TableRow(
        label=f"k={rep.k}",
        t_sec=rep.t_sec,
        minorant=b.minorant,
        ieff_minorant=idx["ieff_minorant"],
        majorant=b.majorant,
        ieff_majorant=idx["ieff_majorant"],
        ieff_ratio=idx["ieff_ratio"],
        ieff_m1=ieff_m1,
    )


def _overall_row(case, params, reports, n_trunc, config, ref_kind) -> TableRow:
    used = [reports[k].bounds for k in range(n_trunc + 1)]
    remainder = case.remainder(n_trunc).value
    total = aggregate(used, params, remainder)
    reference = _overall_reference(case) if ref_kind == "analytic" else None
    idx = efficiency_indices(total.minorant, total.majorant, reference)
    T = params.period
    if all(np.isfinite(reports[k].err_l2) for k in range(n_trunc + 1)):
        err2 = reports[0].combined_err2(case.problem, params) * T
        err2 += 0.5 * T * sum(
            reports[k].combined_err2(case.problem, params) for k in range(1, n_trunc + 1)
        )
        num = _m1_numerator(reports[0].bounds, config.m1_variant) * T + 0.5 * T * sum(
            _m1_numerator(reports[k].bounds, config.m1_variant) for k in range(1, n_trunc + 1)
        )
        ieff_m1 = m1_index(num, err2)
    else:
        ieff_m1 = np.nan
    t_total = sum(reports[k].t_sec for k in range(n_trunc + 1))
    return TableRow(
        label=f"overall (N={n_trunc})",
        t_sec=t_total,
        minorant=total.minorant,
        ieff_minorant=idx["ieff_minorant"],
        majorant=total.majorant,
        ieff_majorant=idx["ieff_majorant"],
        ieff_ratio=idx["ieff_ratio"],
        ieff_m1=ieff_m1,
    )


def grid_sweep(config: ExperimentConfig, grids, mode: int = 0) -> list[TableRow]:
    """One row per grid for a fixed mode, labelled like '64x64'."""
    rows = []
    for n in grids:
        rep = run(replace(config, grid=n, modes=(mode,), overall=(), out=None))
        row = rep.rows[0]
        row.label = f"{n}x{n}"
        rows.append(row)
    return rows


# -- table I/O ---------------------------------------------------------------


def write_csv(report_or_rows, path) -> None:
    rows = report_or_rows.all_rows if isinstance(report_or_rows, BoundsReport) else report_or_rows
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([row.label] + [repr(float(v)) for v in row.as_list()[1:]])


def read_csv(path) -> list[TableRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != COLUMNS:
            raise ValueError(f"unexpected table header {header}")
        return [
            TableRow(rec[0], *[float(v) for v in rec[1:]])
            for rec in reader
        ]


def write_markdown(report: BoundsReport, path) -> None:
    lines = [
        f"# example {report.config.example} (problem {report.problem}), "
        f"grid {report.config.grid}x{report.config.grid}",
        "",
        f"reference: {report.reference_kind}",
        "",
        "| " + " | ".join(COLUMNS) + " |",
        "|" + "|".join(["---"] * len(COLUMNS)) + "|",
    ]
    for row in report.all_rows:
        vals = row.as_list()
        cells = [row.label, f"{row.t_sec:.2f}"] + [
            "n/a" if not np.isfinite(v) else f"{v:.3e}" if abs(v) > 1e3 or (v != 0 and abs(v) < 1e-2) else f"{v:.4g}"
            for v in vals[2:]
        ]
        lines.append("| " + " | ".join(cells) + " |")
    for note in report.notes:
        lines.extend(["", f"note: {note}"])
    Path(path).write_text("\n".join(lines) + "\n")


# -- command line ------------------------------------------------------------


def _parse_int_list(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mhbounds",
        description="two-sided cost bounds for the time-periodic benchmark problems",
    )
    p.add_argument("--example", type=int, required=True, help="case id 1..6")
    p.add_argument("--grid", type=int, default=64, help="cells per side")
    p.add_argument("--modes", type=_parse_int_list, default=(0,),
                   help="Fourier modes, e.g. '0-8' or '0,1,3'")
    p.add_argument("--overall", type=_parse_int_list, default=(),
                   help="truncation indices for overall rows, e.g. '3,8'")
    p.add_argument("--sweep", type=_parse_int_list, default=None,
                   help="grid sweep over these sizes (uses the first mode)")
    p.add_argument("--problem", choices=["I", "II"], default=None,
                   help="sanity check: expected problem tag of the example")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--paper-mode", action="store_true",
                   help="run exactly 8 MinRes steps instead of a tolerance")
    p.add_argument("--family", type=int, default=0, choices=[0, 1],
                   help="Schur preconditioner family (problem II)")
    p.add_argument("--nref", type=int, default=None, help="fine reference grid")
    p.add_argument("--reference", default="auto",
                   choices=["auto", "analytic", "fine", "none"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="output directory for tables")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = ExperimentConfig(
        example=args.example,
        grid=args.grid,
        modes=args.modes,
        overall=args.overall,
        lam=args.lam,
        omega=args.omega,
        tol=args.tol,
        paper_mode=args.paper_mode,
        precond_family=args.family,
        nref=args.nref,
        reference=args.reference,
        workers=args.workers,
        out=args.out,
    )
    errors = config.validate()
    if args.problem is not None:
        expected = "I" if args.example <= 3 else "II"
        if args.problem != expected:
            errors.append(f"example {args.example} is problem {expected}")
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        if args.sweep:
            rows = grid_sweep(config, args.sweep, mode=config.modes[0])
            if args.out:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
                write_csv(rows, out / f"example{args.example}_sweep.csv")
            for row in rows:
                print(row.label, f"min={row.minorant:.4e}", f"maj={row.majorant:.4e}",
                      f"ratio={row.ieff_ratio:.3f}")
        else:
            report = run(config)
            for row in report.all_rows:
                print(row.label, f"min={row.minorant:.4e}", f"maj={row.majorant:.4e}",
                      f"ratio={row.ieff_ratio:.3f}",
                      f"ieff-={row.ieff_minorant:.3f}" if np.isfinite(row.ieff_minorant) else "ieff-=n/a")
    except (ValueError, RuntimeError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
