"""Instrument blocks for the AR(1) panel: growing prefixes of each unit's history.

For period t = 1..T-1 the instrument vector of unit i is
z[i,t] = (y[i,0], ..., y[i,t-1]); each period extends the previous period's
vector by one trailing element, so all blocks of a unit are prefixes of one
length-(T-1) history vector and only that vector is stored. The total
instrument dimension is m = T(T-1)/2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .panel import PanelData


def block_offsets(T: int) -> np.ndarray:
    """Column offset of period t's block inside the stacked m columns: t(t-1)/2."""
    t = np.arange(T - 1)
    return t * (t + 1) // 2


@dataclass(frozen=True)
class InstrumentBlocks:
    """Per-unit instrument histories; ``histories[i]`` is (y[i,0] .. y[i,T-2])."""

    histories: np.ndarray

    def __post_init__(self):
        self.histories.flags.writeable = False

    @property
    def N(self) -> int:
        return self.histories.shape[0]

    @property
    def T(self) -> int:
        return self.histories.shape[1] + 1

    @property
    def m(self) -> int:
        T = self.T
        return T * (T - 1) // 2

    def vector(self, i: int, t: int) -> np.ndarray:
        """Instrument vector z[i,t] for 1-based period t: the length-t prefix."""
        if not 1 <= t <= self.T - 1:
            raise DimensionError(f"period t={t} outside 1..{self.T - 1}")
        return self.histories[i, :t]


def build_instruments(panel: PanelData) -> InstrumentBlocks:
    """Collect every unit's instrument history from the panel."""
    if panel.T < 2:
        raise DimensionError(f"panel needs T >= 2 to instrument, got T={panel.T}")
    return InstrumentBlocks(histories=panel.y[:, : panel.T - 1].copy())


def block_diag_view(blocks: InstrumentBlocks, i: int) -> np.ndarray:
    """Dense (T-1) x m block-diagonal instrument matrix of unit i.

    Row t (1-based) carries z[i,t] in columns t(t-1)/2 .. t(t-1)/2 + t - 1
    and zeros elsewhere.
    """
    T = blocks.T
    offs = block_offsets(T)
    Z = np.zeros((T - 1, blocks.m))
    hist = blocks.histories[i]
    for t in range(1, T):
        Z[t - 1, offs[t - 1] : offs[t - 1] + t] = hist[:t]
    return Z
