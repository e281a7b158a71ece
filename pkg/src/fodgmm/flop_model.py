"""Exact flop-count model of the two estimation pipelines.

Every stage cost is a closed form in T and N, evaluated in exact integer
arithmetic (Python ints), derived from three dense-kernel facts: scaling a
q x r matrix costs qr flops, adding two costs qr, and multiplying
(q x r) @ (r x s) costs qs(2r - 1). A flop is one floating-point addition,
subtraction, multiplication, or division.

Inversion stages are charged the canonical cubic constant (order q for a
q x q matrix cubed), since only the order of inversion cost is pinned down;
all other stages are exact and are cross-checked operation by operation
against the instrumented estimator (see tests).

Stage names are part of the public report schema; tests and the CLI select
individual formulas by name.
"""

import json
import math
from dataclasses import dataclass

# first-difference pipeline stages, in execution order
FD_TRANSFORM = "transform"
FD_MOMENT = "moment vector"
FD_MOMENT_LAG = "lagged moment vector"
FD_KERNEL = "weighting kernel"
FD_GZ = "GZ products"
FD_ZGZ = "ZGZ products"
FD_ZGZ_SUM = "ZGZ summation"
FD_INVERT = "inversion"
FD_WEIGHTED = "weighted moment vector"
FD_FINAL = "final dot products"

FD_STAGES = (
    FD_TRANSFORM,
    FD_MOMENT,
    FD_MOMENT_LAG,
    FD_KERNEL,
    FD_GZ,
    FD_ZGZ,
    FD_ZGZ_SUM,
    FD_INVERT,
    FD_WEIGHTED,
    FD_FINAL,
)

# forward-orthogonal-deviations pipeline stages
FOD_MOMENTS = "transform and moments"
FOD_MOMENTS_LAG = "transform and lagged moments"
FOD_GRAMS = "instrument grams"
FOD_INVERT = "gram inversions"
FOD_WEIGHTED = "weighted moments"
FOD_NUM_PRODUCTS = "numerator products"
FOD_NUM_SUM = "numerator summation"

FOD_STAGES = (
    FOD_MOMENTS,
    FOD_MOMENTS_LAG,
    FOD_GRAMS,
    FOD_INVERT,
    FOD_WEIGHTED,
    FOD_NUM_PRODUCTS,
    FOD_NUM_SUM,
)

# stages whose constant is canonical rather than exact; excluded from the
# instrumented cross-check
INVERSION_STAGES = frozenset({FD_INVERT, FOD_INVERT})


@dataclass(frozen=True)
class FlopReport:
    """Per-stage exact flop counts for one pipeline at one (T, N)."""

    method: str
    T: int
    N: int
    stages: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(count for _, count in self.stages)

    def stage(self, name: str) -> int:
        for stage_name, count in self.stages:
            if stage_name == name:
                return count
        raise KeyError(f"unknown stage {name!r} for method {self.method!r}")

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "T": self.T,
            "N": self.N,
            "stages": [{"name": n, "flops": c} for n, c in self.stages],
            "total": self.total,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.as_dict(), **kwargs)


def _validate(T: int, N: int) -> None:
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")


def moment_count(T: int) -> int:
    """Total instrument dimension m = T(T-1)/2."""
    return T * (T - 1) // 2


def fd_flops(T: int, N: int) -> FlopReport:
    """Stage costs of the first-difference pipeline.

    The two moment vectors are each charged as one stacked product of the
    m x N(T-1) instrument matrix with the stacked transformed outcomes
    (the lagged one also carries its own transform cost); the weighting
    matrix costs cover the per-unit dense products plus the N-1 summations.
    """
    _validate(T, N)
    m = moment_count(T)
    transform = N * (T - 1) * (2 * T - 1)
    moment = m * (2 * N * (T - 1) - 1)
    stages = (
        (FD_TRANSFORM, transform),
        (FD_MOMENT, moment),
        (FD_MOMENT_LAG, transform + moment),
        (FD_KERNEL, (T - 1) ** 2 * (2 * T - 1)),
        (FD_GZ, N * m * (T - 1) * (2 * T - 3)),
        (FD_ZGZ, N * m * m * (2 * T - 3)),
        (FD_ZGZ_SUM, (N - 1) * m * m),
        (FD_INVERT, m**3),
        (FD_WEIGHTED, m * (2 * m - 1)),
        (FD_FINAL, 2 * (2 * m - 1)),
    )
    return FlopReport(method="fd", T=T, N=N, stages=stages)


def fod_flops(T: int, N: int) -> FlopReport:
    """Stage costs of the forward-orthogonal-deviations pipeline.

    Per period t the instrument stack is t x N, so the moment products
    cost t(2N-1), the gram matrices t^2(2N-1), and the weighted moments
    t(2t-1); the closed forms below are those sums over t = 1..T-1. The
    denominator reuses already-computed vectors and is not charged.
    """
    _validate(T, N)
    sum_t = T * (T - 1) // 2
    sum_t2 = (T - 1) * T * (2 * T - 1) // 6
    sum_t3 = sum_t**2
    transform = N * (T - 1) * (2 * T - 1)
    stages = (
        (FOD_MOMENTS, transform + (2 * N - 1) * sum_t),
        (FOD_MOMENTS_LAG, transform + (2 * N - 1) * sum_t),
        (FOD_GRAMS, (2 * N - 1) * sum_t2),
        (FOD_INVERT, sum_t3),
        (FOD_WEIGHTED, 2 * sum_t2 - sum_t),
        (FOD_NUM_PRODUCTS, T * (T - 2) + 1),
        (FOD_NUM_SUM, T - 2),
    )
    return FlopReport(method="fod", T=T, N=N, stages=stages)


def total_flops(method: str, T: int, N: int) -> int:
    if method == "fd":
        return fd_flops(T, N).total
    if method == "fod":
        return fod_flops(T, N).total
    raise ValueError(f"unknown method {method!r}")


def growth_exponent(method: str, T: int, N: int, direction: str) -> float:
    """Local doubling exponent of the total cost.

    Returns log2(total(2T, N) / total(T, N)) for direction ``"in_T"`` and
    log2(total(T, 2N) / total(T, N)) for ``"in_N"``, evaluated on exact
    totals. As T grows this approaches 6 for the first-difference pipeline
    and 4 for orthogonal deviations; in N both approach 1.
    """
    base = total_flops(method, T, N)
    if direction == "in_T":
        doubled = total_flops(method, 2 * T, N)
    elif direction == "in_N":
        doubled = total_flops(method, T, 2 * N)
    else:
        raise ValueError(f"direction must be 'in_T' or 'in_N', got {direction!r}")
    return math.log2(doubled / base)


def flop_ratio(T: int, N: int) -> float:
    """Total first-difference flops over total orthogonal-deviations flops."""
    return fd_flops(T, N).total / fod_flops(T, N).total
