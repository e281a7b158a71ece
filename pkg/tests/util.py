"""Shared panel builders for the tests (independent of the dgp module)."""

import numpy as np

from fodgmm import PanelData


def ar1_panel(delta: float, T: int, N: int, seed: int, burn: int = 50) -> PanelData:
    """Stationary AR(1) panel with unit effects, plain numpy RNG."""
    rng = np.random.default_rng(seed)
    eta = rng.standard_normal(N)
    y = np.zeros(N)
    for _ in range(burn):
        y = delta * y + eta + rng.standard_normal(N)
    out = np.empty((N, T + 1))
    out[:, 0] = y
    for t in range(1, T + 1):
        y = delta * y + eta + rng.standard_normal(N)
        out[:, t] = y
    return PanelData(y=out)


def noiseless_panel(delta: float, T: int, N: int, seed: int) -> PanelData:
    """Zero unit effects, zero shocks: y[t] = delta * y[t-1] from random y[0]."""
    rng = np.random.default_rng(seed)
    out = np.empty((N, T + 1))
    out[:, 0] = rng.standard_normal(N)
    for t in range(1, T + 1):
        out[:, t] = delta * out[:, t - 1]
    return PanelData(y=out)
