"""Dependency and decomposability analyses driven by the exact oracle."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .evaluate import PackingPlan, Tour, objective, tour_length
from .instance import TtpInstance
from .oracle import (
    LENGTH_RTOL,
    OracleLimits,
    _feasible_masks,
    all_tours,
    solve_exact_kp,
    solve_exact_ttp,
    solve_exact_tsp,
    time_matrix,
)

# Relative tolerance for treating two objective values as tied.
TIE_RTOL = 1e-9


class Direction(enum.Enum):
    TSP_KP = "tsp-kp"
    KP_TSP = "kp-tsp"

    @property
    def labels(self) -> tuple[str, str]:
        return ("TSP", "KP") if self is Direction.TSP_KP else ("KP", "TSP")


@dataclass(frozen=True)
class Witness:
    """Two settings of the leading component with different conditional optima.

    ``best`` is optimal under ``a`` but not under ``a_prime``, where
    ``best_prime`` does strictly better.
    """

    a: Tour | PackingPlan
    a_prime: Tour | PackingPlan
    best: Tour | PackingPlan
    best_prime: Tour | PackingPlan


@dataclass(frozen=True)
class DependencyReport:
    direction: tuple[str, str]
    dependent: bool
    witness: Witness | None
    instances_tested: int = 1


def _optimal(vals: np.ndarray) -> np.ndarray:
    """Row-wise mask of the entries tied with the row maximum."""
    top = vals.max(axis=1, keepdims=True)
    return vals >= top - TIE_RTOL * np.maximum(1.0, np.abs(top))


def dependency_test(
    inst: TtpInstance, direction: Direction | str, limits: OracleLimits = OracleLimits()
) -> DependencyReport:
    """Does fixing the leading component move the best choice for the other one?

    Neither TTP component needs data from the other to produce a solution, so
    only the conditional-optimum part is checked.  For every setting ``a`` of
    the leading component, all conditionally optimal settings of the follower
    are collected (ties included).  The follower depends on the leader iff no
    single setting is optimal for every ``a``.
    """
    direction = Direction(direction)
    limits.check(inst)
    tours = all_tours(inst.n)
    mask_ids, masks, profits = _feasible_masks(inst)
    leader_is_tour = direction is Direction.TSP_KP
    n_lead = len(tours) if leader_is_tour else len(mask_ids)
    n_follow = len(mask_ids) if leader_is_tour else len(tours)

    def block(lo: int, hi: int) -> np.ndarray:
        if leader_is_tour:
            return profits[None, :] - inst.rent * time_matrix(inst, tours[lo:hi], masks)
        t = time_matrix(inst, tours, masks[lo:hi]).T
        return profits[lo:hi, None] - inst.rent * t

    always = np.ones(n_follow, dtype=bool)
    rep_b = -1
    step = max(1, 2**20 // max(1, n_follow))
    for lo in range(0, n_lead, step):
        opt = _optimal(block(lo, min(n_lead, lo + step)))
        if rep_b < 0:
            rep_b = int(np.argmax(opt[0]))
        always &= opt.all(axis=0)

    dependent = not always.any()
    witness = None
    if dependent:
        # rep_b is optimal under the first leader setting; find one where it is not
        for lo in range(0, n_lead, step):
            vals = block(lo, min(n_lead, lo + step))
            beaten = np.flatnonzero(~_optimal(vals)[:, rep_b])
            if beaten.size:
                r = int(beaten[0])
                alt = int(np.argmax(vals[r]))
                witness = _witness(inst, leader_is_tour, tours, mask_ids, 0, lo + r, rep_b, alt)
                break
    return DependencyReport(direction.labels, dependent, witness)


def _witness(inst, leader_is_tour, tours, mask_ids, a, a2, b, b2) -> Witness:
    def as_tour(k):
        return Tour.from_array(tours[k])

    def as_plan(k):
        return PackingPlan.from_mask(inst.m, int(mask_ids[k]))

    lead, follow = (as_tour, as_plan) if leader_is_tour else (as_plan, as_tour)
    return Witness(lead(a), lead(a2), follow(b), follow(b2))


def verify_witness(inst: TtpInstance, direction: Direction | str, w: Witness) -> bool:
    """Re-check a witness with direct objective calls."""
    direction = Direction(direction)

    def value(lead, follow):
        if direction is Direction.TSP_KP:
            return objective(inst, lead, follow).objective
        return objective(inst, follow, lead).objective

    under_a = value(w.a, w.best)
    # best must be strictly worse than best_prime once the leader moves to a_prime
    lost = value(w.a_prime, w.best) < value(w.a_prime, w.best_prime) - TIE_RTOL * max(
        1.0, abs(value(w.a_prime, w.best_prime))
    )
    return math.isfinite(under_a) and lost


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    value: float
    objective: float
    packing_matches_kp: bool
    tour_matches_tsp: bool
    plan_empty: bool
    # change in objective from the previous point (capacity sweeps only)
    delta: float | None = None


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    points: list[SweepPoint] = field(default_factory=list)
    # capacity from which the objective stops improving (capacity sweeps only)
    saturation: float | None = None
    # |oracle B - (P*_KP - r L*_TSP / v_max)| at v_min == v_max (slope sweeps only)
    decomposition_gap: float | None = None


def _profit(inst: TtpInstance, plan: PackingPlan) -> float:
    total = 0.0
    for it, s in zip(inst.items, plan.selected):
        if s:
            total += it.profit
    return total


def _point(inst: TtpInstance, value: float, limits: OracleLimits, delta=None) -> SweepPoint:
    sol = solve_exact_ttp(inst, limits)
    kp = solve_exact_kp(inst.items, inst.capacity)
    kp_profit = _profit(inst, kp)
    tsp = solve_exact_tsp(inst, limits)
    tsp_len = tour_length(inst, tsp)
    same_length = abs(tour_length(inst, sol.tour) - tsp_len) <= LENGTH_RTOL * max(1.0, tsp_len)
    # under ties the oracle's pick is arbitrary, so also accept a shortest tour that is just as good
    tol = TIE_RTOL * max(1.0, abs(sol.objective))
    tied = any(objective(inst, t, sol.plan).objective >= sol.objective - tol for t in (tsp, tsp.reversed()))
    return SweepPoint(
        value=float(value),
        objective=sol.objective,
        packing_matches_kp=sol.evaluation.profit == kp_profit,
        tour_matches_tsp=same_length or tied,
        plan_empty=not any(sol.plan.selected),
        delta=delta,
    )


def rent_sweep(
    inst: TtpInstance, rents: list[float], limits: OracleLimits = OracleLimits()
) -> SweepResult:
    if not rents:
        raise ValueError("rents must not be empty")
    limits.check(inst)
    points = [_point(inst.replace(rent=float(r)), r, limits) for r in sorted(rents)]
    return SweepResult("rent", points)


def decomposed_optimum(inst: TtpInstance, limits: OracleLimits = OracleLimits()) -> float:
    """KP-optimal profit minus the rent for the shortest tour at top speed."""
    profit = _profit(inst, solve_exact_kp(inst.items, inst.capacity))
    length = tour_length(inst, solve_exact_tsp(inst, limits))
    return profit - inst.rent * length / inst.speed.v_max


def slope_sweep(
    inst: TtpInstance, v_min_values: list[float], limits: OracleLimits = OracleLimits()
) -> SweepResult:
    """Vary v_min (hence the speed slope) with v_max fixed; points are keyed by v_min."""
    if not v_min_values:
        raise ValueError("v_min_values must not be empty")
    limits.check(inst)
    v_max = inst.speed.v_max
    if any(not 0 < v <= v_max for v in v_min_values):
        raise ValueError(f"v_min values must lie in (0, {v_max}]")
    points = []
    gap = None
    for v in sorted(v_min_values):
        probe = inst.replace(v_min=float(v))
        pt = _point(probe, v, limits)
        points.append(pt)
        if v == v_max:
            gap = abs(pt.objective - decomposed_optimum(probe, limits))
    return SweepResult("slope", points, decomposition_gap=gap)


def capacity_probe(inst: TtpInstance, capacity: float) -> TtpInstance:
    """``inst`` with a different knapsack capacity but the same speed-versus-load curve.

    The curve ``max(v_min, v_max - s * w)`` keeps the original drop rate ``s``,
    so only the feasibility limit moves.  Past the original capacity the thief
    simply crawls at ``v_min``.
    """
    if capacity < 0:
        raise ValueError(f"capacity must be non-negative, got {capacity}")
    sp = inst.speed
    rate = sp.slope
    v_min = max(sp.v_min, sp.v_max - rate * capacity)
    return inst.replace(capacity=float(capacity), v_min=v_min, pinned_slope=rate)


def capacity_sensitivity(
    inst: TtpInstance, capacities: list[float], limits: OracleLimits = OracleLimits()
) -> SweepResult:
    """Oracle optimum as the knapsack grows, with the speed curve held fixed.

    ``saturation`` is the first capacity after which every further step leaves
    the objective unchanged, or None if the last step still moved it.
    """
    if not capacities:
        raise ValueError("capacities must not be empty")
    limits.check(inst)
    probes = [(float(w), capacity_probe(inst, w)) for w in sorted(capacities)]
    points = []
    prev = None
    for w, probe in probes:
        pt = _point(probe, w, limits)
        delta = None if prev is None else pt.objective - prev
        points.append(dataclasses.replace(pt, delta=delta))
        prev = pt.objective
    saturation = None
    for k in range(len(points) - 1):
        if all(p.delta == 0 for p in points[k + 1 :]):
            saturation = points[k].value
            break
    return SweepResult("capacity", points, saturation=saturation)
