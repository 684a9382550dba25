"""Trajectory design for angle-of-arrival sensing with a single moving antenna.

The antenna samples one snapshot every ``T_s`` seconds while moving at most
``v_max`` metres per second inside a segment or rectangle. The Cramér-Rao
bound of the direction cosine depends on the sampled positions only through
their (co)variances, so trajectory design becomes variance maximization.
"""

__version__ = "0.1.0"

from .crb import CrbReport, Regime, crb_1d, crb_2d  # noqa: E402
from .estimator import MleSettings, mle_1d, mle_2d, monte_carlo  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .model import (  # noqa: E402
    Region1D,
    Region2D,
    SensingConfig,
    SpatialAoA,
    Trajectory1D,
    Trajectory2D,
    TrajectoryError,
    synthesize_received,
)
from .traj1d import benchmark_1d, optimal_trajectory  # noqa: E402
from .traj2d import ScaSettings, benchmark_2d, optimize_2d  # noqa: E402

__all__ = [
    "BACKEND",
    "CrbReport",
    "MleSettings",
    "Regime",
    "Region1D",
    "Region2D",
    "ScaSettings",
    "SensingConfig",
    "SpatialAoA",
    "Trajectory1D",
    "Trajectory2D",
    "TrajectoryError",
    "benchmark_1d",
    "benchmark_2d",
    "crb_1d",
    "crb_2d",
    "mle_1d",
    "mle_2d",
    "monte_carlo",
    "optimal_trajectory",
    "optimize_2d",
    "synthesize_received",
]
