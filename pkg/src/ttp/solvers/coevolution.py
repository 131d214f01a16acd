"""Two-species cooperative coevolution: a tour population and a plan population.

Species take turns.  A new individual is scored by pairing it with the
other species' current representative (its fittest member) and with
``collaborators_random`` random members, keeping the best objective found.
"""

from __future__ import annotations

import numpy as np

from ..evaluate import evaluate_arrays
from ..instance import TtpInstance
from .config import RunResult, SolverConfig
from .evolution import (
    elite_indices,
    init_plans,
    init_tours,
    make_solution,
    tournament,
    vary_plans,
    vary_tours,
)


def cooperative_coevolution(inst: TtpInstance, cfg: SolverConfig = SolverConfig()) -> RunResult:
    cfg.check()
    rng = np.random.default_rng(cfg.rng_seed)
    size = cfg.population_size
    flip = cfg.item_flip_rate(inst.m)

    pops = [init_tours(inst, rng, size), init_plans(inst, rng, size)]
    first = min(size, cfg.eval_budget)
    fit0 = np.full(size, -np.inf)
    fit0[:first] = evaluate_arrays(inst, pops[0][:first], pops[1][:first])[3]
    fits = [fit0, fit0.copy()]
    evals = first

    k = int(np.argmax(fit0))
    best_val = float(fit0[k])
    best_pair = (pops[0][k].copy(), pops[1][k].copy())
    history = [(k + 1, best_val)]

    species = 0
    while evals < cfg.eval_budget:
        other = 1 - species
        pop, fit = pops[species], fits[species]
        partners = pops[other]
        rep = int(np.argmax(fits[other]))

        count = size - cfg.elitism
        a = tournament(rng, fit, count, cfg.tournament_size)
        b = tournament(rng, fit, count, cfg.tournament_size)
        if species == 0:
            kids = vary_tours(rng, pop[a], pop[b], cfg.crossover_rate, cfg.mutation_rate_tour)
        else:
            do_cx = rng.random(count) < cfg.crossover_rate
            kids = vary_plans(inst, rng, pop[a], pop[b], do_cx, flip)

        # collaborator table: column 0 is the representative, then random picks
        collab = np.empty((count, 1 + cfg.collaborators_random), dtype=np.int64)
        collab[:, 0] = rep
        collab[:, 1:] = rng.integers(0, size, size=(count, cfg.collaborators_random))
        n_pairs = min(collab.size, cfg.eval_budget - evals)
        kid_idx = np.repeat(np.arange(count), collab.shape[1])[:n_pairs]
        mates = collab.ravel()[:n_pairs]
        if species == 0:
            vals = evaluate_arrays(inst, kids[kid_idx], partners[mates])[3]
        else:
            vals = evaluate_arrays(inst, partners[mates], kids[kid_idx])[3]

        kid_fit = np.full(count, -np.inf)
        np.maximum.at(kid_fit, kid_idx, vals)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val = float(vals[j])
            kid, mate = kids[kid_idx[j]].copy(), partners[mates[j]].copy()
            best_pair = (kid, mate) if species == 0 else (mate, kid)
            history.append((evals + j + 1, best_val))
        evals += n_pairs

        keep = elite_indices(fit, cfg.elitism)
        pops[species] = np.concatenate((pop[keep], kids))
        fits[species] = np.concatenate((fit[keep], kid_fit))
        species = other

    return RunResult(make_solution(inst, *best_pair), evals, history)
