import dataclasses

import numpy as np
import pytest

from ttp import (
    ConfigError,
    GeneratorConfig,
    PackingPlan,
    SolverConfig,
    Tour,
    calibrate_rent,
    cooperative_coevolution,
    decomposed_pipeline,
    generate_instance,
    greedy_packing,
    instance_from_rows,
    joint_ea,
    nearest_neighbor_tour,
    objective,
    solve_exact_kp,
    solve_exact_tsp,
    solve_exact_ttp,
    tour_length,
    two_opt,
)

from conftest import tiny_instance, unit_square

SOLVERS = [joint_ea, cooperative_coevolution]


def test_nearest_neighbor_examples(sample3):
    assert nearest_neighbor_tour(sample3) == Tour([1, 2, 3])
    two = instance_from_rows([(0, 0), (1, 0)], [], 1, 0.1, 1, 1)
    assert nearest_neighbor_tour(two) == Tour([1, 2])
    line = instance_from_rows([(0, 0), (1, 0), (2, 0)], [], 1, 0.1, 1, 1)
    assert nearest_neighbor_tour(line) == Tour([1, 2, 3])
    # equidistant choice goes to the lower index
    tie = instance_from_rows([(0, 0), (0, 1), (1, 0), (5, 5)], [], 1, 0.1, 1, 1)
    assert nearest_neighbor_tour(tie).order[:2] == (1, 2)


def test_two_opt_examples(sample3):
    assert two_opt(sample3, Tour([1, 2, 3])) == Tour([1, 2, 3])
    assert two_opt(sample3, Tour([1, 3, 2])) == Tour([1, 3, 2])
    sq = unit_square()
    crossed = Tour([1, 3, 2, 4])
    assert tour_length(sq, crossed) == pytest.approx(2 + 2 * 2**0.5)
    fixed = two_opt(sq, crossed)
    assert tour_length(sq, fixed) == pytest.approx(4.0)
    assert fixed.order[0] == 1


@pytest.mark.parametrize("seed", range(10))
def test_two_opt_never_longer(seed):
    inst = generate_instance(GeneratorConfig(n_cities=30, items_per_city=0, seed=seed))
    rng = np.random.default_rng(seed)
    tour = Tour([1, *(rng.permutation(np.arange(2, 31)))])
    out = two_opt(inst, tour)
    assert tour_length(inst, out) <= tour_length(inst, tour)
    assert out.order[0] == 1 and sorted(out.order) == list(range(1, 31))


def test_greedy_examples(sample3):
    free = sample3.replace(rent=0.0)
    assert greedy_packing(free, Tour([1, 2, 3])) == PackingPlan([True, True])
    steep = instance_from_rows(
        [(0, 0), (10, 0), (10, 10)], [(100, 3, 2), (50, 3, 3)], 3, 1e-9, 1.0, 1.0
    )
    assert greedy_packing(steep, Tour([1, 2, 3])) == PackingPlan([False, False])
    none = instance_from_rows([(0, 0), (1, 0)], [], 1, 0.1, 1, 1)
    assert greedy_packing(none, Tour([1, 2])) == PackingPlan([])


@pytest.mark.parametrize("seed", range(10))
def test_greedy_last_item_helps(seed):
    inst = tiny_instance(seed, n=8, per_city=3)
    tour = nearest_neighbor_tour(inst)
    plan = greedy_packing(inst, tour)
    full = objective(inst, tour, plan)
    assert full.feasible
    # every accepted item, the last one included, had a positive gain
    steps = [b for _, b in decomposed_pipeline(inst).history]
    assert all(x < y for x, y in zip(steps, steps[1:]))
    # the greedy can only stop when no remaining item has positive gain
    for i in range(1, inst.m + 1):
        if i in plan.items():
            continue
        trial = PackingPlan.from_items(inst.m, plan.items() + [i])
        assert objective(inst, tour, trial).objective <= full.objective


def test_pipeline_sample3(sample3):
    # by hand: NN tour (1,2,3) is 2-opt optimal; item 1 gains 89.43, then item 2 gains 0.87
    res = decomposed_pipeline(sample3)
    assert res.best.tour == Tour([1, 2, 3])
    assert res.best.plan == PackingPlan([True, True])
    assert res.best.objective == pytest.approx(140 - (3 + 4 / 0.46 + 5 / 0.1), abs=1e-9)
    assert res.evals_used == 4
    assert [e for e, _ in res.history] == [1, 3, 4]


def test_pipeline_zero_slope_and_no_items():
    inst = tiny_instance(7, n=6, v_min=1.0, v_max=1.0)
    res = decomposed_pipeline(inst)
    tour = two_opt(inst, nearest_neighbor_tour(inst))
    assert res.best.tour == tour
    assert res.best.evaluation == objective(inst, res.best.tour, res.best.plan)
    # decoupled: the greedy plan is the same on any tour
    assert greedy_packing(inst, tour) == greedy_packing(inst, tour.reversed())

    bare = generate_instance(GeneratorConfig(n_cities=7, items_per_city=0, seed=2))
    res = decomposed_pipeline(bare)
    assert res.best.tour == two_opt(bare, nearest_neighbor_tour(bare))
    assert res.best.plan.selected == ()


def test_pipeline_respects_budget():
    inst = generate_instance(GeneratorConfig(n_cities=20, items_per_city=3, seed=1, rent=0.1))
    res = decomposed_pipeline(inst, SolverConfig(eval_budget=30))
    assert res.evals_used <= 30


@pytest.mark.parametrize("solver", SOLVERS)
def test_determinism(solver):
    inst = tiny_instance(5)
    cfg = SolverConfig(seed=123, eval_budget=5000)
    assert solver(inst, cfg) == solver(inst, cfg)
    other = solver(inst, dataclasses.replace(cfg, seed=124))
    assert other.evals_used == 5000


@pytest.mark.parametrize("solver", SOLVERS)
@pytest.mark.parametrize("budget", [1, 7, 49, 50, 51, 333, 2000])
def test_budget_and_history(solver, budget):
    inst = tiny_instance(budget)
    res = solver(inst, SolverConfig(seed=1, eval_budget=budget))
    assert res.evals_used <= budget
    evals = [e for e, _ in res.history]
    vals = [b for _, b in res.history]
    assert evals == sorted(evals) and evals[-1] <= res.evals_used
    assert all(x <= y for x, y in zip(vals, vals[1:]))
    assert vals[-1] == res.best.objective
    assert res.best.evaluation.feasible
    assert res.best.evaluation == objective(inst, res.best.tour, res.best.plan)


@pytest.mark.parametrize("solver", SOLVERS)
def test_solvers_reach_sample3_optimum(solver, sample3):
    res = solver(sample3, SolverConfig(seed=0, eval_budget=2000))
    assert res.best.objective == pytest.approx(98.75, abs=1e-9)


def test_ea_without_items_close_to_tsp():
    for seed in range(3):
        inst = generate_instance(GeneratorConfig(n_cities=8, items_per_city=0, seed=seed, rent=1.0))
        res = joint_ea(inst, SolverConfig(seed=seed, eval_budget=20_000))
        assert tour_length(inst, res.best.tour) <= 1.05 * tour_length(inst, solve_exact_tsp(inst))


def test_cc_zero_slope_decouples():
    inst = tiny_instance(3, n=6, v_min=1.0, v_max=1.0)
    res = cooperative_coevolution(inst, SolverConfig(seed=2, eval_budget=20_000))
    kp = solve_exact_kp(inst.items, inst.capacity)
    assert res.best.evaluation.profit == objective(inst, res.best.tour, kp).profit
    assert tour_length(inst, res.best.tour) == pytest.approx(tour_length(inst, solve_exact_tsp(inst)))


def test_solvers_never_beat_oracle():
    for seed in range(5):
        inst = tiny_instance(100 + seed)
        opt = solve_exact_ttp(inst).objective
        for solver in SOLVERS:
            assert solver(inst, SolverConfig(seed=seed, eval_budget=3000)).best.objective <= opt + 1e-9


@pytest.mark.parametrize(
    "bad",
    [
        dict(eval_budget=0),
        dict(population_size=1),
        dict(elitism=50),
        dict(crossover_rate=1.5),
        dict(mutation_rate_item=-0.1),
        dict(collaborators_random=-1),
        dict(tournament_size=0),
    ],
)
def test_config_errors(bad, sample3):
    with pytest.raises(ConfigError):
        joint_ea(sample3, SolverConfig(**bad))
    with pytest.raises(ConfigError):
        cooperative_coevolution(sample3, SolverConfig(**bad))


def test_calibrate_rent():
    inst = generate_instance(GeneratorConfig(n_cities=20, items_per_city=2, seed=8))
    cal = calibrate_rent(inst)
    res = decomposed_pipeline(cal)
    share = cal.rent * res.best.evaluation.time / res.best.evaluation.profit
    assert 0.4 < share < 0.6
