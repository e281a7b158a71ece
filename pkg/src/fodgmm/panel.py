"""Balanced panel container and CSV round-trip I/O.

A panel holds N units observed over periods 0..T, stored as an N x (T+1)
array whose column 0 is the first available observation of each unit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PanelFormatError

CSV_HEADER = "unit,time,y"


@dataclass(frozen=True)
class PanelData:
    """N x (T+1) outcome array; column 0 holds each unit's first observation."""

    y: np.ndarray

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if y.ndim != 2:
            raise DimensionError(f"panel array must be 2-d, got ndim={y.ndim}")
        if y.shape[0] < 1:
            raise DimensionError("panel needs at least one unit")
        if y.shape[1] < 3:
            raise DimensionError(
                f"panel needs T >= 2 estimation periods (got {y.shape[1] - 1})"
            )
        if not np.isfinite(y).all():
            raise ValueError("panel contains non-finite values")
        y.flags.writeable = False
        object.__setattr__(self, "y", y)

    @property
    def N(self) -> int:
        return self.y.shape[0]

    @property
    def T(self) -> int:
        return self.y.shape[1] - 1


def write_panel_csv(panel: PanelData, path) -> None:
    """Write ``unit,time,y`` rows, units 1..N and times 0..T.

    Values are written with shortest round-trip decimal formatting, so
    reading the file back reproduces the array bit for bit.
    """
    y = panel.y
    with open(path, "w", newline="") as f:
        f.write(CSV_HEADER + "\n")
        for i in range(panel.N):
            row = y[i]
            for t in range(panel.T + 1):
                f.write(f"{i + 1},{t},{float(row[t])!r}\n")


def read_panel_csv(path) -> PanelData:
    """Parse a ``unit,time,y`` file back into a PanelData.

    The file must describe a balanced panel (every unit observed at every
    time 0..T). Malformed rows raise PanelFormatError naming the line.
    """
    cells: dict[tuple[int, int], float] = {}
    max_unit = 0
    max_time = -1
    with open(path, newline="") as f:
        header = f.readline().strip()
        if header != CSV_HEADER:
            raise PanelFormatError(
                f"line 1: expected header '{CSV_HEADER}', got '{header}'", line=1
            )
        for lineno, raw in enumerate(f, start=2):
            raw = raw.strip()
            if not raw:
                continue
            parts = raw.split(",")
            if len(parts) != 3:
                raise PanelFormatError(
                    f"line {lineno}: expected 3 fields, got {len(parts)}", line=lineno
                )
            try:
                unit = int(parts[0])
                time = int(parts[1])
                val = float(parts[2])
            except ValueError as exc:
                raise PanelFormatError(f"line {lineno}: {exc}", line=lineno) from exc
            if unit < 1 or time < 0:
                raise PanelFormatError(
                    f"line {lineno}: unit must be >= 1 and time >= 0", line=lineno
                )
            if (unit, time) in cells:
                raise PanelFormatError(
                    f"line {lineno}: duplicate (unit={unit}, time={time})", line=lineno
                )
            cells[(unit, time)] = val
            max_unit = max(max_unit, unit)
            max_time = max(max_time, time)
    if not cells:
        raise PanelFormatError("no data rows")
    n_expected = max_unit * (max_time + 1)
    if len(cells) != n_expected:
        raise PanelFormatError(
            f"unbalanced panel: expected {n_expected} rows for "
            f"{max_unit} units x times 0..{max_time}, got {len(cells)}"
        )
    y = np.empty((max_unit, max_time + 1))
    for (unit, time), val in cells.items():
        y[unit - 1, time] = val
    return PanelData(y=y)
