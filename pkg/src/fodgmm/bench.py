"""Timing harness comparing the two pipelines over a (T, N) grid.

For each grid cell and method the harness generates independent panels
from deterministic per-replication seeds, times only the estimation call
(panel generation and instrument-history setup are excluded; instrument
densification, transforms, moment sums, inversions, and the final ratio
are all inside it), and accumulates total wall-clock seconds on the
monotonic clock. Warm-up iterations run untimed first. Seeds depend only
on (base seed, T, N, replication), never on the method, so both pipelines
time identical data, and every replication's two estimates are audited
for equality.

Grid cells run sequentially so timings stay comparable; a parallel-cells
mode exists for equivalence-audit runs and marks its timings
non-comparable.
"""

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import flop_model as fm
from .dgp import DgpConfig, simulate
from .errors import DegenerateEstimateError, SingularWeightMatrixError
from .estimator import fd_estimate, fod_estimate

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    threadpool_limits = None

EQUIV_RTOL = 1e-8

DEFAULT_T_GRID = (5, 10, 15, 20, 25, 30, 35, 40, 45, 50)
DEFAULT_N_GRID = (100, 200, 300, 400, 500)


@dataclass(frozen=True)
class BenchPlan:
    """Grid, replication count, and seeding for one benchmark run."""

    t_grid: tuple[int, ...] = DEFAULT_T_GRID
    n_grid: tuple[int, ...] = DEFAULT_N_GRID
    replications: int = 100
    methods: tuple[str, ...] = ("fd", "fod")
    warmup: int = 3
    base_seed: int = 20180801
    delta: float = 0.5

    def __post_init__(self):
        if not self.t_grid or not self.n_grid:
            raise ValueError("grids must be nonempty")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if any(m not in ("fd", "fod") for m in self.methods):
            raise ValueError(f"unknown method in {self.methods}")
        if not self.methods:
            raise ValueError("at least one method required")


@dataclass
class CellResult:
    """One (method, T, N) cell: total timed seconds plus per-replication audit."""

    method: str
    T: int
    N: int
    total_seconds: float = 0.0
    estimates: list[float] = field(default_factory=list)
    model_flops: int = 0
    skipped: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.skipped is None and self.error is None


@dataclass
class BenchResult:
    plan: BenchPlan
    cells: list[CellResult]
    audits: list[dict] = field(default_factory=list)
    timing_comparable: bool = True

    def cell(self, method: str, T: int, N: int) -> CellResult:
        for c in self.cells:
            if c.method == method and c.T == T and c.N == N:
                return c
        raise KeyError(f"no cell ({method}, T={T}, N={N})")

    @property
    def has_failures(self) -> bool:
        return any(c.error for c in self.cells) or any(
            not a["ok"] for a in self.audits
        )

    def as_dict(self) -> dict:
        return {
            "schema_version": 1,
            "plan": asdict(self.plan),
            "timing_comparable": self.timing_comparable,
            "cells": [asdict(c) for c in self.cells],
            "audits": self.audits,
        }


def replication_seed(base_seed: int, T: int, N: int, replication: int) -> int:
    """Stable 64-bit seed for one replication; independent of the method."""
    material = f"{base_seed}:{T}:{N}:{replication}".encode()
    return int.from_bytes(hashlib.blake2b(material, digest_size=8).digest(), "little")


_PIPELINES = {"fd": fd_estimate, "fod": fod_estimate}


def _run_cell_pair(plan: BenchPlan, T: int, N: int) -> tuple[list[CellResult], list[dict]]:
    """Run all methods for one grid cell; returns cell results and audits."""
    cells = {}
    for method in plan.methods:
        cell = CellResult(
            method=method, T=T, N=N, model_flops=fm.total_flops(method, T, N)
        )
        if method == "fod" and N < T - 1:
            cell.skipped = (
                f"orthogonal-deviations pipeline needs N >= T-1 "
                f"(N={N}, T={T}); period grams beyond t={N} are rank deficient"
            )
        cells[method] = cell
    active = [m for m in plan.methods if cells[m].skipped is None]

    if active:
        warm_cfg = DgpConfig(
            delta=plan.delta,
            T=T,
            N=N,
            seed=replication_seed(plan.base_seed, T, N, -1),
        )
        warm_panel = simulate(warm_cfg)
        for method in active:
            for _ in range(plan.warmup):
                try:
                    _PIPELINES[method](warm_panel)
                except (SingularWeightMatrixError, DegenerateEstimateError):
                    break  # the timed loop will record the failure

    audits = []
    for r in range(plan.replications):
        cfg = DgpConfig(
            delta=plan.delta, T=T, N=N, seed=replication_seed(plan.base_seed, T, N, r)
        )
        panel = simulate(cfg)
        rep_values = {}
        for method in active:
            cell = cells[method]
            if cell.error is not None:
                continue
            try:
                start = time.perf_counter()
                est = _PIPELINES[method](panel)
                cell.total_seconds += time.perf_counter() - start
            except (SingularWeightMatrixError, DegenerateEstimateError) as exc:
                cell.error = f"replication {r}: {exc}"
                continue
            cell.estimates.append(est.delta_hat)
            rep_values[method] = est.delta_hat
        if "fd" in rep_values and "fod" in rep_values:
            diff = abs(rep_values["fd"] - rep_values["fod"])
            tol = EQUIV_RTOL * (1.0 + abs(rep_values["fd"]))
            audits.append(
                {
                    "T": T,
                    "N": N,
                    "replication": r,
                    "abs_diff": diff,
                    "ok": bool(diff <= tol),
                }
            )
    return [cells[m] for m in plan.methods], audits


def run(plan: BenchPlan, parallel_cells: bool = False) -> BenchResult:
    """Execute the plan; sequential by default for timing integrity.

    With ``parallel_cells=True`` grid cells run in separate processes;
    estimates and audits are unchanged but timings are marked
    non-comparable in the result.
    """
    grid = [(T, N) for T in plan.t_grid for N in plan.n_grid]
    cells: list[CellResult] = []
    audits: list[dict] = []
    if parallel_cells:
        with ProcessPoolExecutor() as pool:
            for cell_list, cell_audits in pool.map(
                _run_cell_pair, *zip(*[(plan, T, N) for T, N in grid])
            ):
                cells.extend(cell_list)
                audits.extend(cell_audits)
        return BenchResult(plan=plan, cells=cells, audits=audits, timing_comparable=False)

    if threadpool_limits is not None:
        limiter = threadpool_limits(limits=1)  # timed region stays single-threaded
    else:  # pragma: no cover
        limiter = None
    try:
        for T, N in grid:
            cell_list, cell_audits = _run_cell_pair(plan, T, N)
            cells.extend(cell_list)
            audits.extend(cell_audits)
    finally:
        if limiter is not None:
            limiter.unregister()
    return BenchResult(plan=plan, cells=cells, audits=audits)


def table1(result: BenchResult) -> dict[tuple[int, int], float | None]:
    """First-difference over orthogonal-deviations time per (N, T) cell."""
    ratios: dict[tuple[int, int], float | None] = {}
    plan = result.plan
    if "fd" not in plan.methods or "fod" not in plan.methods:
        raise ValueError("ratio table needs both methods in the plan")
    for N in plan.n_grid:
        for T in plan.t_grid:
            fd = result.cell("fd", T, N)
            fod = result.cell("fod", T, N)
            if fd.ok and fod.ok and fod.total_seconds > 0:
                ratios[(N, T)] = fd.total_seconds / fod.total_seconds
            else:
                ratios[(N, T)] = None
    return ratios


def scaling_curves(result: BenchResult, axis: str) -> dict:
    """Times normalized by the reference cell, next to model predictions.

    ``axis='N'`` varies N at the smallest T in the grid; ``axis='T'``
    varies T at the smallest N. The reference cell is (min T, min N).
    Model series divide the flop totals the same way.
    """
    if axis not in ("N", "T"):
        raise ValueError(f"axis must be 'N' or 'T', got {axis!r}")
    plan = result.plan
    t_ref, n_ref = min(plan.t_grid), min(plan.n_grid)
    points = (
        [(t_ref, N) for N in sorted(plan.n_grid)]
        if axis == "N"
        else [(T, n_ref) for T in sorted(plan.t_grid)]
    )
    series: dict[str, dict[int, float | None]] = {}
    for method in plan.methods:
        ref = result.cell(method, t_ref, n_ref)
        measured: dict[int, float | None] = {}
        model: dict[int, float | None] = {}
        ref_flops = fm.total_flops(method, t_ref, n_ref)
        for T, N in points:
            key = N if axis == "N" else T
            cell = result.cell(method, T, N)
            if ref.ok and cell.ok and ref.total_seconds > 0:
                measured[key] = cell.total_seconds / ref.total_seconds
            else:
                measured[key] = None
            model[key] = fm.total_flops(method, T, N) / ref_flops
        series[method] = measured
        series[f"{method}_model"] = model
    return {"axis": axis, "reference": {"T": t_ref, "N": n_ref}, "series": series}


def _write_csv_table(path, ratios, plan):
    with open(path, "w", newline="") as f:
        f.write("N\\T," + ",".join(str(T) for T in plan.t_grid) + "\n")
        for N in plan.n_grid:
            row = [str(N)]
            for T in plan.t_grid:
                val = ratios[(N, T)]
                row.append("" if val is None else repr(val))
            f.write(",".join(row) + "\n")


def _write_csv_series(path, curves):
    keys = sorted(next(iter(curves["series"].values())).keys())
    names = list(curves["series"].keys())
    with open(path, "w", newline="") as f:
        f.write(curves["axis"] + "," + ",".join(names) + "\n")
        for k in keys:
            row = [str(k)]
            for name in names:
                val = curves["series"][name][k]
                row.append("" if val is None else repr(val))
            f.write(",".join(row) + "\n")


def _plot_series(path, curves, logy):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    styles = {"fd": "-o", "fod": "--s", "fd_model": ":", "fod_model": ":"}
    for name, pts in curves["series"].items():
        xs = sorted(k for k, v in pts.items() if v is not None)
        ys = [pts[x] for x in xs]
        ax.plot(xs, ys, styles.get(name, "-"), label=name)
    ax.set_xlabel(curves["axis"])
    ref = curves["reference"]
    ax.set_ylabel(f"time over time at (T={ref['T']}, N={ref['N']})")
    if logy:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def emit(result: BenchResult, out_dir, plots: bool = False) -> list[str]:
    """Write table1.csv, fig1.csv, fig2.csv, bench.json (and optional SVGs)."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    plan = result.plan
    both = "fd" in plan.methods and "fod" in plan.methods
    if both:
        _write_csv_table(out / "table1.csv", table1(result), plan)
        written.append(str(out / "table1.csv"))

    fig1 = scaling_curves(result, "N")
    _write_csv_series(out / "fig1.csv", fig1)
    written.append(str(out / "fig1.csv"))

    fig2 = scaling_curves(result, "T")
    _write_csv_series(out / "fig2.csv", fig2)
    written.append(str(out / "fig2.csv"))

    payload = result.as_dict()
    payload["table1"] = (
        [{"N": N, "T": T, "ratio": v} for (N, T), v in table1(result).items()]
        if both
        else []
    )
    payload["fig1"] = fig1
    payload["fig2"] = fig2
    with open(out / "bench.json", "w") as f:
        json.dump(payload, f, indent=2)
    written.append(str(out / "bench.json"))

    if plots:
        _plot_series(out / "fig1.svg", fig1, logy=False)
        _plot_series(out / "fig2.svg", fig2, logy=True)
        written.extend([str(out / "fig1.svg"), str(out / "fig2.svg")])
    return written
