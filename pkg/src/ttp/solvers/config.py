from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from ..oracle import Solution


@dataclass(frozen=True)
class SolverConfig:
    seed: int = 0
    eval_budget: int = 100_000
    population_size: int = 50
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_rate_tour: float = 0.3
    # per-position flip probability; None means 2/m
    mutation_rate_item: float | None = None
    elitism: int = 1
    collaborators_random: int = 2

    def check(self) -> None:
        bad = []
        if self.eval_budget <= 0:
            bad.append("eval_budget must be positive")
        if self.population_size < 2:
            bad.append("population_size must be at least 2")
        if self.tournament_size < 1:
            bad.append("tournament_size must be at least 1")
        if not 0 <= self.elitism < self.population_size:
            bad.append("elitism must lie in [0, population_size)")
        for name in ("crossover_rate", "mutation_rate_tour"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                bad.append(f"{name} must lie in [0, 1]")
        if self.mutation_rate_item is not None and not 0.0 <= self.mutation_rate_item <= 1.0:
            bad.append("mutation_rate_item must lie in [0, 1]")
        if self.collaborators_random < 0:
            bad.append("collaborators_random must be non-negative")
        if bad:
            raise ConfigError("; ".join(bad))

    def item_flip_rate(self, m: int) -> float:
        if self.mutation_rate_item is not None:
            return self.mutation_rate_item
        return min(1.0, 2.0 / m) if m else 0.0

    @property
    def rng_seed(self) -> int:
        return self.seed % 2**64


@dataclass(frozen=True)
class RunResult:
    best: Solution
    evals_used: int
    history: list[tuple[int, float]] = field(default_factory=list)
