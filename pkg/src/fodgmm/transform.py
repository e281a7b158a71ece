"""First-difference and forward-orthogonal-deviations transformation matrices.

Both transforms map a length-T outcome vector to T-1 values and annihilate
unit-specific intercepts (every row sums to zero):

* first differences (FD): row t is (..., -1, +1, ...), i.e. y[t+1] - y[t];
* forward orthogonal deviations (FOD): row t subtracts the mean of the
  future values from the current one and rescales, so the rows are
  orthonormal.

The matrices are materialized densely and applied through dense products:
the cost model charges full dense matrix-vector work for this step, and the
benchmark relies on that accounting, so a structured O(T) differencing path
is deliberately not offered.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

FD = "fd"
FOD = "fod"


@dataclass(frozen=True)
class TransformMatrix:
    """(T-1) x T dense transform, immutable after construction."""

    kind: str
    entries: np.ndarray

    def __post_init__(self):
        self.entries.flags.writeable = False

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def build_fd(T: int) -> TransformMatrix:
    """Banded (T-1) x T matrix with -1 on the diagonal, +1 beside it."""
    if T < 2:
        raise DimensionError(
            f"T must be >= 2: no differenced observations exist for T={T}"
        )
    D = np.zeros((T - 1, T))
    i = np.arange(T - 1)
    D[i, i] = -1.0
    D[i, i + 1] = 1.0
    return TransformMatrix(kind=FD, entries=D)


def build_fod(T: int) -> TransformMatrix:
    """Forward-orthogonal-deviations matrix with orthonormal rows.

    Row t (1-based) is sqrt((T-t)/(T-t+1)) times
    (0, ..., 0, 1, -1/(T-t), ..., -1/(T-t)), so each transformed value is
    the current observation minus the mean of all later ones, scaled to
    keep the transformed errors homoskedastic.
    """
    if T < 2:
        raise DimensionError(
            f"T must be >= 2: no orthogonal deviations exist for T={T}"
        )
    F = np.zeros((T - 1, T))
    for t in range(1, T):
        scale = math.sqrt((T - t) / (T - t + 1.0))
        F[t - 1, t - 1] = scale
        F[t - 1, t:] = -scale / (T - t)
    return TransformMatrix(kind=FOD, entries=F)


def apply(matrix: TransformMatrix, v: np.ndarray) -> np.ndarray:
    """Dense product matrix @ v, mapping T values to T-1."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (matrix.cols,):
        raise DimensionError(
            f"vector of length {v.shape} does not match transform with "
            f"{matrix.cols} columns"
        )
    return matrix.entries @ v
