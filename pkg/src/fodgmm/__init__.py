"""One-step AR(1) panel GMM: first-difference and forward-orthogonal-deviations
pipelines, an exact flop-count model of both, a seedable Monte Carlo panel
generator, and a benchmark harness that measures how their costs scale."""

from .bench import BenchPlan, BenchResult, run as run_benchmark, scaling_curves, table1
from .dgp import DgpConfig, simulate, stationary_variance
from .errors import (
    DegenerateEstimateError,
    DimensionError,
    PanelFormatError,
    SingularWeightMatrixError,
)
from .estimator import Estimate, FlopCounter, estimate, fd_estimate, fod_estimate
from .flop_model import (
    FlopReport,
    fd_flops,
    flop_ratio,
    fod_flops,
    growth_exponent,
    moment_count,
)
from .instruments import InstrumentBlocks, block_diag_view, build_instruments
from .panel import PanelData, read_panel_csv, write_panel_csv
from .transform import TransformMatrix, apply, build_fd, build_fod

__version__ = "0.1.0"

__all__ = [
    "BenchPlan",
    "BenchResult",
    "DegenerateEstimateError",
    "DgpConfig",
    "DimensionError",
    "Estimate",
    "FlopCounter",
    "FlopReport",
    "InstrumentBlocks",
    "PanelData",
    "PanelFormatError",
    "SingularWeightMatrixError",
    "TransformMatrix",
    "apply",
    "block_diag_view",
    "build_fd",
    "build_fod",
    "build_instruments",
    "estimate",
    "fd_estimate",
    "fd_flops",
    "flop_ratio",
    "fod_estimate",
    "fod_flops",
    "growth_exponent",
    "moment_count",
    "read_panel_csv",
    "run_benchmark",
    "scaling_curves",
    "simulate",
    "stationary_variance",
    "table1",
    "write_panel_csv",
]
