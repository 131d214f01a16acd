"""Joint evolutionary algorithm over (tour, packing plan) genomes.

The variation helpers here are shared with the cooperative coevolution
solver.  All randomness is drawn with numpy in a fixed order per generation
and handed to the kernels, so a seed reproduces a run on either backend.
"""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..evaluate import PackingPlan, Tour, evaluate_arrays, objective
from ..instance import TtpInstance
from ..oracle import Solution
from .config import RunResult, SolverConfig
from .construct import nearest_neighbor_order


def init_tours(inst: TtpInstance, rng: np.random.Generator, size: int) -> np.ndarray:
    """Random tours plus the 2-opt polished nearest-neighbour tour in both directions.

    Direction matters once items are carried, so the reversed seed is not redundant.
    """
    n = inst.n
    tours = np.zeros((size, n), dtype=np.int64)
    for k in range(size):
        tours[k, 1:] = rng.permutation(np.arange(1, n))
    tours[0] = kernels.two_opt(inst.dist, nearest_neighbor_order(inst.dist))
    if size > 1:
        tours[1, 1:] = tours[0, 1:][::-1]
    return tours


def init_plans(inst: TtpInstance, rng: np.random.Generator, size: int) -> np.ndarray:
    # each plan gets its own packing density so the population spans light to full loads
    density = rng.random(size)
    plans = rng.random((size, inst.m)) < density[:, None]
    return repair(inst, plans)


def repair(inst: TtpInstance, plans: np.ndarray) -> np.ndarray:
    if inst.m == 0:
        return plans
    return kernels.repair(
        np.ascontiguousarray(plans), inst.item_weights, inst.removal_order, float(inst.capacity)
    )


def tournament(rng: np.random.Generator, fitness: np.ndarray, count: int, k: int) -> np.ndarray:
    entrants = rng.integers(0, fitness.shape[0], size=(count, k))
    return entrants[np.arange(count), np.argmax(fitness[entrants], axis=1)]


def vary_tours(
    rng: np.random.Generator,
    p1: np.ndarray,
    p2: np.ndarray,
    crossover_rate: float,
    mutation_rate: float,
    do_cx: np.ndarray | None = None,
) -> np.ndarray:
    """Order crossover then segment-reversal mutation on the part after the depot."""
    count, n = p1.shape
    if do_cx is None:
        do_cx = rng.random(count) < crossover_rate
    cuts = np.sort(rng.integers(1, n + 1, size=(count, 2)), axis=1)
    cut_a = np.where(do_cx, cuts[:, 0], 0)
    cut_b = np.where(do_cx, cuts[:, 1], 0)
    children = kernels.order_crossover(p1, p2, cut_a, cut_b)
    do_mut = rng.random(count) < mutation_rate
    seg = np.sort(rng.integers(1, max(n, 2), size=(count, 2)), axis=1)
    return kernels.reverse_segments(children, seg[:, 0], seg[:, 1], do_mut)


def vary_plans(
    inst: TtpInstance,
    rng: np.random.Generator,
    p1: np.ndarray,
    p2: np.ndarray,
    do_cx: np.ndarray,
    flip_rate: float,
) -> np.ndarray:
    """Uniform crossover, per-position flips, then capacity repair."""
    count, m = p1.shape
    take = rng.random((count, m)) < 0.5
    children = np.where(do_cx[:, None] & take, p2, p1)
    children ^= rng.random((count, m)) < flip_rate
    return repair(inst, children)


def elite_indices(fitness: np.ndarray, count: int) -> np.ndarray:
    return np.argsort(-fitness, kind="stable")[:count]


def make_solution(inst: TtpInstance, tour: np.ndarray, plan: np.ndarray) -> Solution:
    t, p = Tour.from_array(tour), PackingPlan(plan)
    return Solution(t, p, objective(inst, t, p))


def joint_ea(inst: TtpInstance, cfg: SolverConfig = SolverConfig()) -> RunResult:
    """Generational EA evolving tour and packing plan together."""
    cfg.check()
    rng = np.random.default_rng(cfg.rng_seed)
    size = cfg.population_size
    flip = cfg.item_flip_rate(inst.m)

    tours = init_tours(inst, rng, size)
    plans = init_plans(inst, rng, size)
    fitness = np.full(size, -np.inf)
    first = min(size, cfg.eval_budget)
    fitness[:first] = evaluate_arrays(inst, tours[:first], plans[:first])[3]
    evals = first

    best = int(np.argmax(fitness))
    best_val = float(fitness[best])
    best_tour, best_plan = tours[best].copy(), plans[best].copy()
    history = [(int(best + 1), best_val)]

    while evals < cfg.eval_budget:
        count = min(size - cfg.elitism, cfg.eval_budget - evals)
        a = tournament(rng, fitness, count, cfg.tournament_size)
        b = tournament(rng, fitness, count, cfg.tournament_size)
        do_cx = rng.random(count) < cfg.crossover_rate
        kid_tours = vary_tours(rng, tours[a], tours[b], cfg.crossover_rate, cfg.mutation_rate_tour, do_cx)
        kid_plans = vary_plans(inst, rng, plans[a], plans[b], do_cx, flip)
        kid_fit = evaluate_arrays(inst, kid_tours, kid_plans)[3]

        k = int(np.argmax(kid_fit))
        if kid_fit[k] > best_val:
            best_val = float(kid_fit[k])
            best_tour, best_plan = kid_tours[k].copy(), kid_plans[k].copy()
            history.append((evals + k + 1, best_val))
        evals += count

        keep = elite_indices(fitness, cfg.elitism)
        fill = size - cfg.elitism - count
        if fill:
            # only on a budget-truncated final generation
            keep = elite_indices(fitness, cfg.elitism + fill)
        tours = np.concatenate((tours[keep], kid_tours))
        plans = np.concatenate((plans[keep], kid_plans))
        fitness = np.concatenate((fitness[keep], kid_fit))

    return RunResult(make_solution(inst, best_tour, best_plan), evals, history)
