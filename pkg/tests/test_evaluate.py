import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ttp import (
    PackingPlan,
    SpeedModel,
    Tour,
    ValidationError,
    instance_from_rows,
    objective,
    repair_packing,
    speed,
)

from conftest import ref_evaluate, tiny_instance


def test_speed_examples():
    model = SpeedModel(v_max=1.0, v_min=0.1, capacity=5)
    assert speed(model, 0) == 1.0
    assert speed(model, 5) == 0.1
    assert speed(model, 2.5) == pytest.approx(0.55, abs=1e-15)
    with pytest.raises(ValueError):
        speed(model, -0.1)
    with pytest.raises(ValueError):
        speed(model, 5.01)


@given(st.floats(0, 1), st.floats(0, 1))
def test_speed_non_increasing(a, b):
    model = SpeedModel(v_max=2.0, v_min=0.3, capacity=1.0)
    lo, hi = sorted((a, b))
    assert speed(model, hi) <= speed(model, lo)
    assert speed(model, hi) >= model.v_min


def test_objective_sample(sample3):
    ev = objective(sample3, Tour([1, 2, 3]), PackingPlan([True, True]))
    t = 3 + 4 / 0.46 + 5 / 0.1
    assert ev.feasible
    assert abs(ev.time - t) <= 1e-9
    assert ev.profit == 140
    assert abs(ev.objective - (140 - t)) <= 1e-9
    assert abs(ev.time - 61.6956522) < 1e-7

    empty = objective(sample3, Tour([1, 2, 3]), PackingPlan([False, False]))
    assert (empty.time, empty.profit, empty.objective) == (12.0, 0.0, -12.0)

    free = objective(sample3.replace(rent=0.0), Tour([1, 2, 3]), PackingPlan([True, True]))
    assert free.objective == free.profit == 140


def test_objective_rejects_malformed(sample3):
    with pytest.raises(ValidationError):
        objective(sample3, Tour([2, 1, 3]), PackingPlan([True, True]))
    with pytest.raises(ValidationError):
        objective(sample3, Tour([1, 2, 2]), PackingPlan([True, True]))
    with pytest.raises(ValidationError):
        objective(sample3, Tour([1, 2, 3]), PackingPlan([True]))


def test_capacity_boundary():
    inst = instance_from_rows([(0, 0), (1, 0), (1, 1)], [(10, 2, 2), (10, 3, 3)], 5, 0.1, 1, 1)
    exact = objective(inst, Tour([1, 2, 3]), PackingPlan([True, True]))
    assert exact.feasible and exact.total_weight == 5
    over = objective(inst.replace(capacity=5 - 1e-9), Tour([1, 2, 3]), PackingPlan([True, True]))
    assert not over.feasible
    assert over.objective == -math.inf
    assert over.profit == 20 and math.isfinite(over.time)


def test_direction_matters(sample3):
    plan = PackingPlan([True, True])
    fwd = objective(sample3, Tour([1, 2, 3]), plan)
    rev = objective(sample3, Tour([1, 3, 2]), plan)
    assert fwd.time != rev.time
    assert rev.time == pytest.approx(41.25, abs=1e-12)


@st.composite
def instance_tour_plan(draw):
    inst = tiny_instance(draw(st.integers(0, 10_000)))
    body = draw(st.permutations(range(2, inst.n + 1)))
    plan = draw(st.lists(st.booleans(), min_size=inst.m, max_size=inst.m))
    return inst, Tour((1, *body)), PackingPlan(plan)


@settings(max_examples=80, deadline=None)
@given(instance_tour_plan())
def test_objective_matches_reference(case):
    inst, tour, plan = case
    ev = objective(inst, tour, plan)
    feas, p, t, b = ref_evaluate(inst, tour.order, set(plan.items()))
    assert ev.feasible == feas
    assert ev.profit == pytest.approx(p, rel=1e-12)
    assert ev.time == pytest.approx(t, rel=1e-9)
    if feas:
        assert abs(ev.objective - (ev.profit - inst.rent * ev.time)) <= 1e-9
        assert ev.objective == pytest.approx(b, rel=1e-9, abs=1e-9)
    else:
        assert ev.objective == -math.inf


@settings(max_examples=60, deadline=None)
@given(instance_tour_plan(), st.data())
def test_adding_an_item_never_speeds_up(case, data):
    inst, tour, plan = case
    plan = repair_packing(inst, plan)
    free = [i for i, s in enumerate(plan.selected) if not s]
    if not free:
        return
    i = data.draw(st.sampled_from(free))
    bigger = list(plan.selected)
    bigger[i] = True
    before = objective(inst, tour, plan)
    after = objective(inst, tour, PackingPlan(bigger))
    if after.feasible:
        assert after.time >= before.time


def test_repair_examples(sample3):
    both = PackingPlan([True, True])
    assert repair_packing(sample3, both) == both
    assert repair_packing(sample3, PackingPlan([False, False])) == PackingPlan([False, False])
    tight = sample3.replace(capacity=2)
    repaired = repair_packing(tight, both)
    assert repaired == PackingPlan([False, True])

    # brute-force: best feasible subset of the input plan
    best = max(
        (s for k in range(3) for s in itertools.combinations([1, 2], k)
         if sum(tight.items[i - 1].weight for i in s) <= 2),
        key=lambda s: sum(tight.items[i - 1].profit for i in s),
    )
    assert repaired.items() == list(best)


@settings(max_examples=80, deadline=None)
@given(instance_tour_plan())
def test_repair_feasible_subset(case):
    inst, _, plan = case
    out = repair_packing(inst, plan)
    assert set(out.items()) <= set(plan.items())
    assert sum(inst.items[i - 1].weight for i in out.items()) <= inst.capacity
    if sum(inst.items[i - 1].weight for i in plan.items()) <= inst.capacity:
        assert out == plan


def test_repair_removal_order():
    # ratios: item1 2.0, item2 1.0, item3 1.0 -> item3 (higher index) goes first
    inst = instance_from_rows([(0, 0), (1, 0)], [(20, 10, 2), (10, 10, 2), (10, 10, 2)], 20, 0.1, 1, 1)
    assert repair_packing(inst, PackingPlan([1, 1, 1])).items() == [1, 2]


def test_plan_helpers():
    plan = PackingPlan.from_items(4, [1, 3])
    assert plan.mask == 0b101
    assert PackingPlan.from_mask(4, 5) == plan
    assert Tour([1, 2, 3, 4]).reversed() == Tour([1, 4, 3, 2])
    assert np.array_equal(Tour([1, 3, 2]).to_array(), [0, 2, 1])
