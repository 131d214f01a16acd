from .coevolution import cooperative_coevolution
from .config import RunResult, SolverConfig
from .construct import (
    calibrate_rent,
    decomposed_pipeline,
    greedy_packing,
    nearest_neighbor_tour,
    two_opt,
)
from .evolution import joint_ea

__all__ = [
    "RunResult",
    "SolverConfig",
    "calibrate_rent",
    "cooperative_coevolution",
    "decomposed_pipeline",
    "greedy_packing",
    "joint_ea",
    "nearest_neighbor_tour",
    "two_opt",
]
