import itertools
import math

import pytest

from ttp import GeneratorConfig, KPClass, generate_instance, instance_from_rows, parse_instance

SAMPLE3 = """\
PROBLEM NAME: sample3
DIMENSION: 3
NUMBER OF ITEMS: 2
CAPACITY OF KNAPSACK: 5
MIN SPEED: 0.1
MAX SPEED: 1.0
RENTING RATIO: 1.0
EDGE_WEIGHT_TYPE: EUC_2D
NODE_COORD_SECTION (INDEX, X, Y):
1 0.0 0.0
2 3.0 0.0
3 3.0 4.0
ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1 100 3 2
2 40 2 3
"""


# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def sample3_text():
    return SAMPLE3


@pytest.fixture
def sample3():
    return parse_instance(SAMPLE3)


def tiny_instance(seed, n=None, per_city=None, **kw):
    """Random oracle-scale instance: n <= 6, m <= 8 unless overridden."""
    import random

    r = random.Random(seed)
    if n is None:
        n = r.randint(3, 6)
    if per_city is None:
        per_city = 2 if n <= 5 else 1
    cfg = dict(
        n_cities=n,
        items_per_city=per_city,
        kp_class=r.choice(list(KPClass)),
        capacity_factor=r.choice([0.3, 0.5, 0.7]),
        rent=r.choice([0.5, 1.0, 2.0, 5.0]),
        v_min=0.1,
        v_max=1.0,
        seed=seed,
    )
    cfg.update(kw)
    return generate_instance(GeneratorConfig(**cfg))


@pytest.fixture
def tiny():
    return tiny_instance


# ---------------------------------------------------------------------------
# Independent reference: plain Python, written straight from the problem
# statement, no numpy and no package internals.
# ---------------------------------------------------------------------------


def ref_distance(inst, a, b):
    ca, cb = inst.cities[a - 1], inst.cities[b - 1]
    d = math.sqrt((ca.x - cb.x) ** 2 + (ca.y - cb.y) ** 2)
    return float(math.ceil(d)) if inst.rounding.name == "CEIL" else d


def ref_speed(inst, w):
    sp = inst.speed
    return sp.v_max - min(w, sp.capacity) * (sp.v_max - sp.v_min) / sp.capacity


def ref_evaluate(inst, order, taken):
    """Return (feasible, profit, time, objective) for a 1-based tour and a set of item ids."""
    weight = 0.0
    t = 0.0
    for pos, city in enumerate(order):
        for it in inst.items:
            if it.index in taken and it.city == city:
                weight += it.weight
        nxt = order[(pos + 1) % len(order)]
        t += ref_distance(inst, city, nxt) / ref_speed(inst, weight)
    profit = sum(it.profit for it in inst.items if it.index in taken)
    feasible = sum(it.weight for it in inst.items if it.index in taken) <= inst.speed.capacity
    return feasible, profit, t, (profit - inst.rent * t) if feasible else -math.inf


def ref_brute_force(inst):
    """Best objective over all directed tours and all feasible subsets."""
    best = -math.inf
    ids = [it.index for it in inst.items]
    for body in itertools.permutations(range(2, inst.n + 1)):
        order = (1,) + body
        for k in range(len(ids) + 1):
            for taken in itertools.combinations(ids, k):
                feas, _, _, b = ref_evaluate(inst, order, set(taken))
                if feas and b > best:
                    best = b
    return best


def ref_kp(items, capacity):
    best = 0.0
    for k in range(len(items) + 1):
        for sub in itertools.combinations(items, k):
            if sum(it.weight for it in sub) <= capacity:
                best = max(best, sum(it.profit for it in sub))
    return best


def ref_tsp(inst):
    best = math.inf
    for body in itertools.permutations(range(2, inst.n + 1)):
        order = (1,) + body
        best = min(best, sum(ref_distance(inst, order[k], order[(k + 1) % inst.n]) for k in range(inst.n)))
    return best


def unit_square():
    return instance_from_rows([(0, 0), (1, 0), (1, 1), (0, 1)], [], 1, 0.5, 1.0, 1.0, name="square")


def zero_slope_instance(seed, **kw):
    """Tiny instance where carried weight does not slow the thief."""
    return tiny_instance(seed, v_min=1.0, v_max=1.0, **kw)


def extreme_slope_instance(seed):
    """Any pickup leaves the thief crawling: capacity is the lightest item, v_min ~ 0.

    Cities sit on distinct integer grid points, so every leg is at least 1 long.
    """
    import random

    r = random.Random(seed)
    n = r.randint(3, 6)
    coords = r.sample([(x, y) for x in range(10) for y in range(10)], n)
    items = [(r.randint(1, 1000), r.randint(1, 1000), r.randint(2, n)) for _ in range(r.randint(1, 8))]
    capacity = min(w for _, w, _ in items)
    return instance_from_rows(coords, items, capacity, 1e-6, 1.0, r.choice([1.0, 2.0, 5.0]), name=f"steep{seed}")
