"""Monte Carlo panel generator: stationary AR(1) with unit effects.

Each unit follows y[t] = delta*y[t-1] + eta_i + v[t] from a zero start
``burn_in`` periods before time 0, so the retained observations y[0..T]
are effectively draws from the stationary process.

Randomness contract
-------------------
Draws come from the Philox 4x64 counter-based generator, one independent
stream per unit keyed by (seed << 64) | unit_index. Growing N therefore
appends units without perturbing earlier ones, and units may be generated
in any order or in parallel with identical output. Within a unit the draw
order is: the unit effect first, then one shock per period from the start
of the burn-in through T. Standard normals are produced by inverse-CDF:
u = (k + 0.5) / 2**53 with k a 53-bit Philox integer, z = ndtri(u).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .panel import PanelData

DEFAULT_BURN_IN = 50


@dataclass(frozen=True)
class DgpConfig:
    """Simulation design; defaults give delta=0.5 with standard-normal components."""

    delta: float
    T: int
    N: int
    seed: int
    burn_in: int = DEFAULT_BURN_IN
    eta_sd: float = 1.0
    v_sd: float = 1.0

    def __post_init__(self):
        if self.T < 2:
            raise ValueError(f"T must be >= 2, got {self.T}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.burn_in > 0 and not abs(self.delta) < 1.0:
            raise ValueError(
                f"|delta| < 1 required for a stationary burn-in, got {self.delta}"
            )
        if self.eta_sd < 0 or self.v_sd < 0:
            raise ValueError("standard deviations must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def _unit_normals(config: DgpConfig) -> np.ndarray:
    """(N, 1 + burn_in + T) standard normals, one keyed stream per unit."""
    n_draws = 1 + config.burn_in + config.T
    raw = np.empty((config.N, n_draws), dtype=np.float64)
    base = int(config.seed) << 64
    for i in range(config.N):
        gen = np.random.Generator(np.random.Philox(key=base | i))
        raw[i] = gen.integers(0, 1 << 53, size=n_draws, dtype=np.uint64)
    u = (raw + 0.5) * 2.0**-53  # strictly inside (0, 1)
    return ndtri(u)


def simulate(config: DgpConfig) -> PanelData:
    """Generate a panel: burn in from zero, keep y[0..T] per unit."""
    z = _unit_normals(config)
    eta = config.eta_sd * z[:, 0]
    v = config.v_sd * z[:, 1:]
    y = np.zeros(config.N)
    for k in range(config.burn_in):  # periods -burn_in+1 .. 0
        y = config.delta * y + eta + v[:, k]
    out = np.empty((config.N, config.T + 1))
    out[:, 0] = y
    for t in range(1, config.T + 1):
        y = config.delta * y + eta + v[:, config.burn_in + t - 1]
        out[:, t] = y
    return PanelData(y=out)


def stationary_variance(delta: float, eta_sd: float = 1.0, v_sd: float = 1.0) -> float:
    """Long-run variance of y: eta_sd^2/(1-delta)^2 + v_sd^2/(1-delta^2)."""
    return eta_sd**2 / (1.0 - delta) ** 2 + v_sd**2 / (1.0 - delta**2)
