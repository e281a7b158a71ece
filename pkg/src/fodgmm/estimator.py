"""One-step GMM for the AR(1) panel model, by two numerically equal routes.

Both pipelines instrument the transformed equation with the lagged-level
history vectors and weight with the inverse of the instruments' transformed
gram. The first-difference (FD) route works with one stacked m-dimensional
moment system and inverts a single m x m weighting matrix (m = T(T-1)/2);
the forward-orthogonal-deviations (FOD) route solves T-1 separate
per-period systems, inverting a t x t gram for each period t. The two
deliver the same point estimate, but their computational cost scales very
differently in T (see flop_model).

Fidelity contract. The pipelines execute the textbook dense recipes:
instruments are materialized densely, all products are dense, weighting
matrices are inverted explicitly via pivoted LU, and sums over units and
periods accumulate in ascending order. Units are processed in fixed-size
blocks to bound transient memory; blocking reassociates the unit sums but
performs the identical multiset of scalar operations, so results are
deterministic and the instrumented flop counts are block-size invariant.

Passing a FlopCounter tallies every dense-kernel scalar operation as it
executes, stage by stage; these counts match the closed forms in
flop_model exactly (inversion stages excepted, which carry a canonical
cubic charge).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import flop_model as fm
from ._linalg import SingularFactorization, cholesky_inverse, explicit_inverse
from .errors import DegenerateEstimateError, SingularWeightMatrixError
from .instruments import block_offsets
from .panel import PanelData
from .transform import build_fd, build_fod

# units per processing block, both pipelines. Bounds the FD pipeline's
# transient dense-instrument buffers at O(UNIT_BLOCK * T * m) (about 10 MB
# at T = 50) and keeps the FOD per-period strips cache-sized. Results and
# flop counts are block-size invariant; the constant was calibrated by
# measurement on the target host.
UNIT_BLOCK = 20

DENOMINATOR_FLOOR = 1e-300

# extra instrumented stage for the FOD denominator, which the cost model
# deliberately leaves unpriced (its inputs are already computed)
FOD_DENOMINATOR_STAGE = "denominator"


class FlopCounter:
    """Tallies scalar flops per pipeline stage as operations execute."""

    def __init__(self):
        self.stages: dict[str, int] = {}

    def add(self, stage: str, flops: int) -> None:
        self.stages[stage] = self.stages.get(stage, 0) + int(flops)

    @property
    def total(self) -> int:
        return sum(self.stages.values())


@dataclass(frozen=True)
class Estimate:
    """Point estimate with the pieces needed to audit it."""

    delta_hat: float
    method: str
    m: int
    diagnostics: dict = field(default_factory=dict)


def _final_ratio(num: float, den: float, method: str, m: int, diag: dict) -> Estimate:
    if abs(den) < DENOMINATOR_FLOOR:
        raise DegenerateEstimateError(
            f"{method} estimate denominator {den!r} is numerically zero"
        )
    diag["numerator"] = float(num)
    diag["denominator"] = float(den)
    return Estimate(delta_hat=num / den, method=method, m=m, diagnostics=diag)


def _invert(A: np.ndarray, solver: str) -> tuple[np.ndarray, float]:
    if solver == "lu":
        return explicit_inverse(A)
    if solver == "cholesky":
        return cholesky_inverse(A)
    raise ValueError(f"solver must be 'lu' or 'cholesky', got {solver!r}")


# scatter plans for densifying the block-diagonal instrument matrices;
# index arrays only (no numerical state), keyed by T
_FD_PLANS: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _fd_plan(T: int):
    plan = _FD_PLANS.get(T)
    if plan is None:
        offs = block_offsets(T)
        rows = np.repeat(np.arange(T - 1), np.arange(1, T))
        cols = np.concatenate([offs[t - 1] + np.arange(t) for t in range(1, T)])
        hist = np.concatenate([np.arange(t) for t in range(1, T)])
        plan = (rows, cols, hist)
        _FD_PLANS[T] = plan
    return plan


# transform matrices are inputs to the cost accounting (their construction
# is charged zero flops), so their entries may be reused across calls; the
# weighting kernel G = DD' is NOT cached, the accounting charges it per call
_TRANSFORM_CACHE: dict[tuple[str, int], np.ndarray] = {}


def _transform_entries(kind: str, T: int) -> np.ndarray:
    key = (kind, T)
    entries = _TRANSFORM_CACHE.get(key)
    if entries is None:
        entries = (build_fd(T) if kind == "fd" else build_fod(T)).entries
        _TRANSFORM_CACHE[key] = entries
    return entries


def fd_estimate(
    panel: PanelData,
    *,
    counter: FlopCounter | None = None,
    solver: str = "lu",
    unit_block: int = UNIT_BLOCK,
) -> Estimate:
    """One-step GMM through the first-difference pipeline.

    Differences the outcomes, stacks all m moment conditions, forms the
    m x m weighting matrix from the per-unit dense products Z'(DD')Z, and
    inverts it explicitly. Cost grows like N*T^5 for the weighting matrix
    plus T^6 for its inversion.

    Parameters
    ----------
    panel : PanelData
        N x (T+1) outcomes.
    counter : FlopCounter, optional
        Receives per-stage scalar-operation tallies.
    solver : str
        'lu' (default, matches the cost accounting) or 'cholesky'
        (opt-in fast path, excluded from benchmarks).
    unit_block : int
        Units per processing block.

    Raises
    ------
    SingularWeightMatrixError
        If the m x m weighting matrix is numerically singular.
    DegenerateEstimateError
        If the estimate denominator vanishes.
    """
    Y = panel.y
    N, T = panel.N, panel.T
    m = T * (T - 1) // 2
    c = counter

    D = _transform_entries("fd", T)
    Yt = Y[:, 1:] @ D.T
    if c:
        c.add(fm.FD_TRANSFORM, N * (T - 1) * (2 * T - 1))
    Ylt = Y[:, :T] @ D.T
    if c:
        c.add(fm.FD_MOMENT_LAG, N * (T - 1) * (2 * T - 1))

    G = D @ D.T  # rebuilt every call; the accounting charges it per estimate
    if c:
        c.add(fm.FD_KERNEL, (T - 1) ** 2 * (2 * T - 1))

    rows, cols, hist = _fd_plan(T)
    H = Y[:, hist]  # every unit's instrument values, gathered once
    blk = max(1, min(unit_block, N))
    Zbuf = np.zeros((blk, T - 1, m))  # scatter hits the same slots each block

    s = None
    sl = None
    A = None
    for lo in range(0, N, blk):
        hi = min(N, lo + blk)
        cnt = hi - lo
        Zs = Zbuf[:cnt]
        Zs[:, rows, cols] = H[lo:hi]  # materialize the dense blocks
        Ztall = Zs.reshape(cnt * (T - 1), m)
        # the two moment vectors are separate stacked products: m rows
        # against the cnt*(T-1) stacked transformed outcomes
        s_c = Ztall.T @ Yt[lo:hi].reshape(-1)
        sl_c = Ztall.T @ Ylt[lo:hi].reshape(-1)
        if c:
            per_vector = m * (2 * cnt * (T - 1) - 1)
            c.add(fm.FD_MOMENT, per_vector)
            c.add(fm.FD_MOMENT_LAG, per_vector)
        GZ = np.matmul(G, Zs)
        if c:
            c.add(fm.FD_GZ, cnt * m * (T - 1) * (2 * T - 3))
        # fused Z'(GZ) product and within-block summation: the single GEMM
        # executes cnt*m^2*(2T-3) product flops plus (cnt-1)*m^2 additions
        A_c = Ztall.T @ GZ.reshape(cnt * (T - 1), m)
        if c:
            c.add(fm.FD_ZGZ, cnt * m * m * (2 * T - 3))
            c.add(fm.FD_ZGZ_SUM, (cnt - 1) * m * m)
        if s is None:
            s = s_c
            sl = sl_c
            A = A_c
        else:
            s += s_c
            sl += sl_c
            A += A_c
            if c:
                c.add(fm.FD_MOMENT, m)
                c.add(fm.FD_MOMENT_LAG, m)
                c.add(fm.FD_ZGZ_SUM, m * m)

    try:
        A_inv, pivot_ratio = _invert(A, solver)
    except SingularFactorization as exc:
        raise SingularWeightMatrixError(
            f"weighting matrix of dimension m={m} is numerically singular "
            f"({exc}); the stacked instruments span fewer than m directions",
            dimension=m,
        ) from exc
    if c:
        c.add(fm.FD_INVERT, m**3)  # canonical cubic charge

    a = sl @ A_inv
    if c:
        c.add(fm.FD_WEIGHTED, m * (2 * m - 1))
    num = float(a @ s)
    den = float(a @ sl)
    if c:
        c.add(fm.FD_FINAL, 2 * (2 * m - 1))
    return _final_ratio(num, den, "fd", m, {"min_pivot_ratio": pivot_ratio})


def fod_estimate(
    panel: PanelData,
    *,
    counter: FlopCounter | None = None,
    solver: str = "lu",
    unit_block: int = UNIT_BLOCK,
) -> Estimate:
    """One-step GMM through the forward-orthogonal-deviations pipeline.

    Transforms the outcomes once, then for each period t forms the t x N
    instrument stack, its gram matrix, and the two period moments, inverts
    the t x t gram, and accumulates the estimate's numerator and
    denominator over periods. Cost grows like N*T^3 plus T^4 for the
    inversions; no m x m matrix ever appears.

    Requires every period gram to be invertible, which needs N >= T-1 and
    non-degenerate data; the first rank-deficient period is reported.
    """
    Y = panel.y
    N, T = panel.N, panel.T
    m = T * (T - 1) // 2
    c = counter

    F = _transform_entries("fod", T)
    Ycol = np.ascontiguousarray(Y.T)  # period-major copy of the panel
    Ytd = F @ Ycol[1:]
    if c:
        c.add(fm.FOD_MOMENTS, N * (T - 1) * (2 * T - 1))
    Yltd = F @ Ycol[:T]
    if c:
        c.add(fm.FOD_MOMENTS_LAG, N * (T - 1) * (2 * T - 1))

    blk = max(1, min(unit_block, N))
    num = 0.0
    den = 0.0
    min_ratio = np.inf
    for t in range(1, T):
        St = None
        st = None
        slt = None
        ytd_row = Ytd[t - 1]
        yltd_row = Yltd[t - 1]
        for lo in range(0, N, blk):
            hi = min(N, lo + blk)
            cnt = hi - lo
            Z = np.ascontiguousarray(Ycol[:t, lo:hi])  # t x cnt instrument stack
            St_c = Z @ Z.T
            st_c = Z @ ytd_row[lo:hi]
            slt_c = Z @ yltd_row[lo:hi]
            if c:
                c.add(fm.FOD_GRAMS, t * t * (2 * cnt - 1))
                c.add(fm.FOD_MOMENTS, t * (2 * cnt - 1))
                c.add(fm.FOD_MOMENTS_LAG, t * (2 * cnt - 1))
            if St is None:
                St = St_c
                st = st_c
                slt = slt_c
            else:
                St += St_c
                st += st_c
                slt += slt_c
                if c:
                    c.add(fm.FOD_GRAMS, t * t)
                    c.add(fm.FOD_MOMENTS, t)
                    c.add(fm.FOD_MOMENTS_LAG, t)
        try:
            St_inv, ratio = _invert(St, solver)
        except SingularFactorization as exc:
            raise SingularWeightMatrixError(
                f"instrument gram matrix for period t={t} (dimension {t}) is "
                f"numerically singular ({exc}); N >= T-1 and non-degenerate "
                f"histories are required",
                dimension=t,
                period=t,
            ) from exc
        if c:
            c.add(fm.FOD_INVERT, t**3)  # canonical cubic charge
        if ratio < min_ratio:
            min_ratio = ratio
        at = slt @ St_inv
        if c:
            c.add(fm.FOD_WEIGHTED, t * (2 * t - 1))
        num_t = float(at @ st)
        den_t = float(at @ slt)
        if c:
            c.add(fm.FOD_NUM_PRODUCTS, 2 * t - 1)
            c.add(FOD_DENOMINATOR_STAGE, 2 * t - 1)
        if t == 1:
            num = num_t
            den = den_t
        else:
            num += num_t
            den += den_t
            if c:
                c.add(fm.FOD_NUM_SUM, 1)
                c.add(FOD_DENOMINATOR_STAGE, 1)
    return _final_ratio(num, den, "fod", m, {"min_pivot_ratio": float(min_ratio)})


_PIPELINES = {"fd": fd_estimate, "fod": fod_estimate}


def estimate(panel: PanelData, method: str, **kwargs) -> Estimate:
    """Dispatch to a pipeline and record its wall-clock duration.

    ``method`` is 'fd' or 'fod'. The duration (monotonic clock, seconds)
    lands in ``diagnostics['duration_seconds']`` for the benchmark harness.
    """
    try:
        pipeline = _PIPELINES[method]
    except KeyError:
        raise ValueError(f"method must be one of {sorted(_PIPELINES)}, got {method!r}")
    start = time.perf_counter()
    result = pipeline(panel, **kwargs)
    elapsed = time.perf_counter() - start
    diag = dict(result.diagnostics)
    diag["duration_seconds"] = elapsed
    return Estimate(
        delta_hat=result.delta_hat,
        method=result.method,
        m=result.m,
        diagnostics=diag,
    )


def _reference_fd_estimate(panel: PanelData) -> float:
    """Straight per-unit transcription of the first-difference formula.

    Slow oracle used in tests to pin the blocked implementation: loops
    units one at a time through dense block-diagonal instrument matrices.
    """
    from .instruments import block_diag_view, build_instruments

    Y = panel.y
    N, T = panel.N, panel.T
    m = T * (T - 1) // 2
    D = build_fd(T).entries
    G = D @ D.T
    blocks = build_instruments(panel)
    s = np.zeros(m)
    sl = np.zeros(m)
    A = np.zeros((m, m))
    for i in range(N):
        Z = block_diag_view(blocks, i)
        s += Z.T @ (D @ Y[i, 1:])
        sl += Z.T @ (D @ Y[i, :T])
        A += Z.T @ (G @ Z)
    A_inv = np.linalg.inv(A)
    a = sl @ A_inv
    return float(a @ s) / float(a @ sl)


def _reference_fod_estimate(panel: PanelData) -> float:
    """Straight per-unit transcription of the orthogonal-deviations formula."""
    from .instruments import build_instruments

    Y = panel.y
    N, T = panel.N, panel.T
    F = build_fod(T).entries
    Ytd = Y[:, 1:] @ F.T
    Yltd = Y[:, :T] @ F.T
    blocks = build_instruments(panel)
    num = 0.0
    den = 0.0
    for t in range(1, T):
        St = np.zeros((t, t))
        st = np.zeros(t)
        slt = np.zeros(t)
        for i in range(N):
            z = blocks.vector(i, t)
            St += np.outer(z, z)
            st += z * Ytd[i, t - 1]
            slt += z * Yltd[i, t - 1]
        at = slt @ np.linalg.inv(St)
        num += float(at @ st)
        den += float(at @ slt)
    return num / den
