"""Speed model, objective evaluation and capacity repair."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ValidationError
from .instance import SpeedModel, TtpInstance

INFEASIBLE = -math.inf


@dataclass(frozen=True)
class Tour:
    """City visiting order, 1-based, starting at the depot (city 1)."""

    order: tuple[int, ...]

    def __init__(self, order: Iterable[int]):
        object.__setattr__(self, "order", tuple(int(c) for c in order))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Tour":
        return cls(int(c) + 1 for c in arr)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.order, dtype=np.int64) - 1

    def __len__(self) -> int:
        return len(self.order)

    def reversed(self) -> "Tour":
        return Tour((self.order[0],) + self.order[:0:-1])


@dataclass(frozen=True)
class PackingPlan:
    """Item membership vector; position ``i`` is item ``i + 1``."""

    selected: tuple[bool, ...]

    def __init__(self, selected: Iterable[bool]):
        object.__setattr__(self, "selected", tuple(bool(s) for s in selected))

    @classmethod
    def empty(cls, m: int) -> "PackingPlan":
        return cls([False] * m)

    @classmethod
    def from_items(cls, m: int, taken: Iterable[int]) -> "PackingPlan":
        sel = [False] * m
        for i in taken:
            sel[i - 1] = True
        return cls(sel)

    @classmethod
    def from_mask(cls, m: int, mask: int) -> "PackingPlan":
        """Item ``i`` is taken when bit ``i - 1`` of ``mask`` is set."""
        return cls(bool(mask >> i & 1) for i in range(m))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, s in enumerate(self.selected) if s)

    def items(self) -> list[int]:
        return [i + 1 for i, s in enumerate(self.selected) if s]

    def to_array(self) -> np.ndarray:
        return np.asarray(self.selected, dtype=np.bool_)

    def __len__(self) -> int:
        return len(self.selected)


@dataclass(frozen=True)
class Evaluation:
    feasible: bool
    total_weight: float
    profit: float
    time: float
    objective: float


def speed(model: SpeedModel, w: float) -> float:
    """Travel speed when carrying weight ``w`` (linear between v_max and v_min)."""
    if not 0 <= w <= model.capacity:
        raise ValueError(f"weight {w} outside [0, {model.capacity}]")
    if w == model.capacity:
        return float(model.v_min)
    v = model.v_max - w * model.slope
    return float(max(v, model.v_min))


def check_tour(inst: TtpInstance, tour: Tour) -> None:
    order = tour.order
    if len(order) != inst.n or sorted(order) != list(range(1, inst.n + 1)):
        raise ValidationError(f"tour is not a permutation of cities 1..{inst.n}")
    if order[0] != 1:
        raise ValidationError("tour must start at city 1")


def check_plan(inst: TtpInstance, plan: PackingPlan) -> None:
    if len(plan) != inst.m:
        raise ValidationError(f"packing plan has length {len(plan)}, expected {inst.m}")


def evaluate_arrays(inst: TtpInstance, orders: np.ndarray, sels: np.ndarray):
    """Row-wise (total_weight, profit, time, objective) for 0-based tours and plans.

    Infeasible rows get ``-inf`` as objective.
    """
    sp = inst.speed
    tw, profit, time = kernels.evaluate_pairs(
        inst.dist,
        np.ascontiguousarray(orders, dtype=np.int64),
        np.ascontiguousarray(sels, dtype=np.bool_).reshape(len(orders), inst.m),
        inst.item_weights,
        inst.item_profits,
        inst.item_cities,
        float(sp.v_max),
        float(sp.v_min),
        float(sp.capacity),
        float(sp.slope),
    )
    obj = np.where(tw <= sp.capacity, profit - inst.rent * time, INFEASIBLE)
    return tw, profit, time, obj


def objective(inst: TtpInstance, tour: Tour, plan: PackingPlan) -> Evaluation:
    """Simulate the thief along ``tour`` collecting the items of ``plan``.

    Items are picked up on arrival, so they slow down every later leg,
    including the closing leg back to city 1.
    """
    check_tour(inst, tour)
    check_plan(inst, plan)
    tw, profit, time, obj = evaluate_arrays(inst, tour.to_array()[None, :], plan.to_array()[None, :])
    return Evaluation(
        feasible=bool(tw[0] <= inst.capacity),
        total_weight=float(tw[0]),
        profit=float(profit[0]),
        time=float(time[0]),
        objective=float(obj[0]),
    )


def tour_length(inst: TtpInstance, tour: Tour | Sequence[int] | np.ndarray) -> float:
    """Closed weight-free length; accepts a Tour or a 0-based order array."""
    arr = tour.to_array() if isinstance(tour, Tour) else np.asarray(tour, dtype=np.int64)
    legs = inst.dist[arr, np.roll(arr, -1)]
    return float(np.cumsum(legs)[-1]) if len(legs) else 0.0


def repair_packing(inst: TtpInstance, plan: PackingPlan) -> PackingPlan:
    """Make ``plan`` fit the knapsack.

    Selected items are dropped by ascending profit/weight ratio (higher index
    first on ties) until the load fits; dropped items that fit again are then
    re-added by descending ratio.  Feasible plans come back unchanged.
    """
    check_plan(inst, plan)
    if inst.m == 0:
        return plan
    out = kernels.repair(
        plan.to_array()[None, :], inst.item_weights, inst.removal_order, float(inst.capacity)
    )
    return PackingPlan(out[0])
