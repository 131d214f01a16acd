"""Constructive heuristics and the decomposed (one component at a time) baseline."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..evaluate import PackingPlan, Tour, check_tour, evaluate_arrays, objective
from ..instance import TtpInstance
from ..oracle import Solution
from .config import RunResult, SolverConfig


def nearest_neighbor_order(dist: np.ndarray) -> np.ndarray:
    n = dist.shape[0]
    order = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    for k in range(1, n):
        row = np.where(seen, np.inf, dist[order[k - 1]])
        nxt = int(np.argmin(row))  # first minimum = lowest index
        order[k] = nxt
        seen[nxt] = True
    return order


def nearest_neighbor_tour(inst: TtpInstance) -> Tour:
    return Tour.from_array(nearest_neighbor_order(inst.dist))


def two_opt(inst: TtpInstance, tour: Tour) -> Tour:
    """Best-improvement 2-opt on the weight-free length; city 1 stays first."""
    check_tour(inst, tour)
    return Tour.from_array(kernels.two_opt(inst.dist, tour.to_array()))


def _greedy(inst: TtpInstance, order: np.ndarray, budget: int | None = None):
    """Greedy packing on a fixed tour; returns (selection, evals, history)."""
    m = inst.m
    sel = np.zeros(m, dtype=np.bool_)
    *_, obj = evaluate_arrays(inst, order[None, :], sel[None, :])
    cur = float(obj[0])
    evals = 1
    history = [(evals, cur)]
    load = 0.0
    w = inst.item_weights
    while budget is None or evals < budget:
        cand = np.flatnonzero(~sel & (load + w <= inst.capacity))
        if budget is not None:
            cand = cand[: budget - evals]
        if cand.size == 0:
            break
        trial = np.repeat(sel[None, :], cand.size, axis=0)
        trial[np.arange(cand.size), cand] = True
        orders = np.repeat(order[None, :], cand.size, axis=0)
        *_, obj = evaluate_arrays(inst, orders, trial)
        evals += cand.size
        gain = obj - cur
        k = int(np.argmax(gain))
        if not gain[k] > 0:
            break
        sel[cand[k]] = True
        load += w[cand[k]]
        cur = float(obj[k])
        history.append((evals, cur))
    return sel, evals, history


def greedy_packing(inst: TtpInstance, tour: Tour) -> PackingPlan:
    """Add the item with the largest positive objective gain until none is left."""
    check_tour(inst, tour)
    sel, _, _ = _greedy(inst, tour.to_array())
    return PackingPlan(sel)


def decomposed_pipeline(inst: TtpInstance, cfg: SolverConfig = SolverConfig()) -> RunResult:
    """Solve the routing part alone, then pack on the frozen tour."""
    cfg.check()
    order = kernels.two_opt(inst.dist, nearest_neighbor_order(inst.dist))
    sel, evals, history = _greedy(inst, order, cfg.eval_budget)
    tour, plan = Tour.from_array(order), PackingPlan(sel)
    return RunResult(Solution(tour, plan, objective(inst, tour, plan)), evals, history)


def calibrate_rent(
    inst: TtpInstance, time_share: float = 0.5, iterations: int = 40
) -> TtpInstance:
    """Pick the rent so that rent * T is about ``time_share`` * P at the pipeline solution.

    Bisection on the rent; the pipeline is re-run at every probe because the
    packing it chooses depends on the rent.
    """
    order = kernels.two_opt(inst.dist, nearest_neighbor_order(inst.dist))

    def gap(rent: float) -> float:
        probe = inst.replace(rent=rent)
        sel, _, _ = _greedy(probe, order)
        _, p, t, _ = evaluate_arrays(probe, order[None, :], sel[None, :])
        return rent * t[0] - time_share * p[0]

    lo, hi = 0.0, 1.0
    while gap(hi) < 0:
        lo, hi = hi, hi * 2
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return inst.replace(rent=float(f"{hi:.6g}"))
