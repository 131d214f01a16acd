"""Exact solvers for oracle-scale instances.

These enumerate everything and are the ground truth the heuristics and the
analysis suite are checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import OracleLimitError
from .evaluate import Evaluation, PackingPlan, Tour, objective
from .instance import Item, TtpInstance

# Relative tolerance used to call two tour lengths equal.
LENGTH_RTOL = 1e-9


@dataclass(frozen=True)
class OracleLimits:
    max_cities: int = 9
    max_items: int = 14

    def check(self, inst: TtpInstance, *, items: bool = True) -> None:
        if inst.n > self.max_cities:
            raise OracleLimitError(f"{inst.n} cities exceed the oracle limit of {self.max_cities}")
        if items and inst.m > self.max_items:
            raise OracleLimitError(f"{inst.m} items exceed the oracle limit of {self.max_items}")


@dataclass(frozen=True)
class Solution:
    tour: Tour
    plan: PackingPlan
    evaluation: Evaluation

    @property
    def objective(self) -> float:
        return self.evaluation.objective


@lru_cache(maxsize=16)
def all_tours(n: int) -> np.ndarray:
    """Every directed tour from the depot, 0-based, in lexicographic order."""
    body = np.array(list(itertools.permutations(range(1, n))), dtype=np.int64).reshape(-1, n - 1)
    out = np.zeros((body.shape[0], n), dtype=np.int64)
    out[:, 1:] = body
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def all_masks(m: int) -> np.ndarray:
    """Boolean matrix of every subset; row ``k`` is the binary expansion of ``k``."""
    k = np.arange(2**m, dtype=np.int64)[:, None]
    out = (k >> np.arange(m, dtype=np.int64)) & 1
    out = out.astype(np.bool_)
    out.setflags(write=False)
    return out


def subset_sums(values: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Sum of ``values`` over each mask row, accumulated in item order."""
    acc = np.zeros(masks.shape[0])
    for i in range(values.shape[0]):
        acc = acc + np.where(masks[:, i], values[i], 0.0)
    return acc


def tour_lengths(inst: TtpInstance, tours: np.ndarray) -> np.ndarray:
    legs = inst.dist[tours, np.roll(tours, -1, axis=1)]
    return np.cumsum(legs, axis=1)[:, -1]


def time_matrix(inst: TtpInstance, tours: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Travel time of every (tour, plan) pair as a ``len(tours) x len(masks)`` matrix."""
    sp = inst.speed
    cw = kernels.city_weights(
        np.ascontiguousarray(masks), inst.item_weights, inst.item_cities, inst.n
    )
    return kernels.tour_times(
        inst.dist,
        np.ascontiguousarray(tours),
        cw,
        float(sp.v_max),
        float(sp.v_min),
        float(sp.capacity),
        float(sp.slope),
    )


def solve_exact_tsp(inst: TtpInstance, limits: OracleLimits = OracleLimits()) -> Tour:
    """Shortest closed tour by enumeration; near-equal lengths tie lexicographically."""
    limits.check(inst, items=False)
    tours = all_tours(inst.n)
    lengths = tour_lengths(inst, tours)
    best = lengths.min()
    k = int(np.flatnonzero(lengths <= best + LENGTH_RTOL * max(1.0, abs(best)))[0])
    return Tour.from_array(tours[k])


def kp_enumerate(profits: np.ndarray, weights: np.ndarray, capacity: float) -> int:
    """Best subset mask by brute force; ties go to the smallest mask."""
    masks = all_masks(len(profits))
    p = subset_sums(np.asarray(profits, float), masks)
    w = subset_sums(np.asarray(weights, float), masks)
    p = np.where(w <= capacity, p, -np.inf)
    return int(np.argmax(p))


def _kp_dp(profits: np.ndarray, weights: np.ndarray, capacity: int) -> list[bool]:
    m = len(profits)
    w = weights.astype(np.int64)
    # table[i, c]: best profit from the first i items within capacity c
    table = np.zeros((m + 1, capacity + 1))
    for i in range(m):
        prev = table[i]
        row = prev.copy()
        if w[i] <= capacity:
            cand = prev[: capacity + 1 - w[i]] + profits[i]
            row[w[i] :] = np.maximum(prev[w[i] :], cand)
        table[i + 1] = row
    # Walk from the most significant item down, leaving an item out whenever the
    # remaining target is still reachable without it: the smallest mask wins.
    take = [False] * m
    c = capacity
    target = table[m, capacity]
    for i in range(m - 1, -1, -1):
        if table[i, c] >= target:
            continue
        take[i] = True
        c -= w[i]
        target -= profits[i]
    return take


def solve_exact_kp(items: list[Item] | tuple[Item, ...], capacity: float, max_items: int = 30) -> PackingPlan:
    """Profit-maximal packing; ties go to the smallest plan read as a binary number.

    Integer weights use dynamic programming over capacity, anything else falls
    back to subset enumeration (bounded by ``max_items``).
    """
    m = len(items)
    if m == 0:
        return PackingPlan([])
    profits = np.array([it.profit for it in items], dtype=float)
    weights = np.array([it.weight for it in items], dtype=float)
    if capacity < 0:
        return PackingPlan.empty(m)
    integral = np.all(weights == np.round(weights)) and np.all(profits == np.round(profits))
    if integral and math.isfinite(capacity):
        cap = int(math.floor(capacity))
        cap = min(cap, int(weights.sum()))
        return PackingPlan(_kp_dp(profits, weights, cap))
    if m > max_items:
        raise OracleLimitError(f"{m} non-integral items exceed the enumeration limit of {max_items}")
    return PackingPlan.from_mask(m, kp_enumerate(profits, weights, capacity))


def _feasible_masks(inst: TtpInstance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    masks = all_masks(inst.m)
    w = subset_sums(inst.item_weights, masks)
    keep = np.flatnonzero(w <= inst.capacity)
    return keep, masks[keep], subset_sums(inst.item_profits, masks[keep])


def solve_exact_ttp(
    inst: TtpInstance, limits: OracleLimits = OracleLimits(), chunk: int = 512
) -> Solution:
    """Maximise the objective over every directed tour and every feasible plan.

    Ties go to the lexicographically smallest tour, then the smallest plan
    mask.  Plans whose profit minus the rent for the shortest possible
    travel time cannot reach the incumbent are dropped before later chunks.
    """
    limits.check(inst)
    tours = all_tours(inst.n)
    mask_ids, masks, profits = _feasible_masks(inst)
    shortest = float(tour_lengths(inst, tours).min())
    # no plan can finish faster than the shortest tour at top speed
    upper = profits - inst.rent * (shortest / inst.speed.v_max)

    best_val = -math.inf
    best_key = (-1, -1)
    alive = np.arange(len(mask_ids))
    for start in range(0, len(tours), chunk):
        block = tours[start : start + chunk]
        if best_val > -math.inf:
            slack = 1e-9 * max(1.0, abs(best_val))
            alive = alive[upper[alive] >= best_val - slack]
        times = time_matrix(inst, block, masks[alive])
        vals = profits[alive][None, :] - inst.rent * times
        flat = int(np.argmax(vals))
        r, c = divmod(flat, vals.shape[1])
        val = float(vals[r, c])
        # later chunks hold later tours, so equal values keep the incumbent
        if val > best_val:
            best_val = val
            best_key = (start + r, int(mask_ids[alive[c]]))
    tour = Tour.from_array(tours[best_key[0]])
    plan = PackingPlan.from_mask(inst.m, best_key[1])
    return Solution(tour, plan, objective(inst, tour, plan))
