"""Traveling Thief Problem: instances, evaluation, exact oracles, solvers and analyses."""

from .analysis import (
    DependencyReport,
    Direction,
    SweepPoint,
    SweepResult,
    Witness,
    capacity_probe,
    capacity_sensitivity,
    decomposed_optimum,
    dependency_test,
    rent_sweep,
    slope_sweep,
    verify_witness,
)
from .errors import ConfigError, OracleLimitError, ParseError, TTPError, ValidationError
from .evaluate import Evaluation, PackingPlan, Tour, objective, repair_packing, speed, tour_length
from .instance import (
    City,
    GeneratorConfig,
    Item,
    KPClass,
    Rounding,
    SpeedModel,
    TtpInstance,
    distance,
    generate_instance,
    instance_from_rows,
    parse_instance,
    read_instance,
    serialize_instance,
    validate_instance,
    write_instance,
)
from .oracle import OracleLimits, Solution, solve_exact_kp, solve_exact_tsp, solve_exact_ttp
from .solvers import (
    RunResult,
    SolverConfig,
    calibrate_rent,
    cooperative_coevolution,
    decomposed_pipeline,
    greedy_packing,
    joint_ea,
    nearest_neighbor_tour,
    two_opt,
)

__version__ = "0.1.0"
