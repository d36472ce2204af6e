"""Budget-constrained granularity allocation by particle swarm search.

Every candidate is repaired onto the budget simplex
``{alpha >= 0, sum(alpha) = m * base_alpha}`` by clip-then-rescale before it
is scored, so infeasible allocations are never evaluated.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, InvalidInputError, OptimizerError
from .granulation import (
    GranularityAllocation,
    ObjectiveConfig,
    Scores,
    evaluate,
)
from .mlp import NetworkModel

log = logging.getLogger(__name__)

Fitness = Callable[[GranularityAllocation], float]
Callback = Callable[[int, int, GranularityAllocation, float], None]


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 30
    iterations: int = 200
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    seed: int = 0
    patience: Optional[int] = 50

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ConfigurationError("swarm_size must be at least 2")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be at least 1")
        if self.patience is not None and self.patience < 1:
            raise ConfigurationError("patience must be positive or None")


@dataclass
class AllocationResult:
    best_allocation: GranularityAllocation
    best_q1: float
    q1_history: list[float]
    component_scores: Optional[Scores] = None
    evaluations: int = 0
    stopped_early: bool = False

    def to_dict(self) -> dict:
        doc = {
            "alphas": self.best_allocation.alphas.tolist(),
            "base_alpha": self.best_allocation.base_alpha,
            "best_q1": self.best_q1,
            "q1_history": list(self.q1_history),
            "evaluations": self.evaluations,
            "stopped_early": self.stopped_early,
            "importance_ranking": self.best_allocation.importance_ranking(),
        }
        if self.component_scores is not None:
            doc["scores"] = self.component_scores._asdict()
        return doc


def project_to_budget(raw, base_alpha: float) -> GranularityAllocation:
    """Clip negatives to zero and rescale onto ``sum = m * base_alpha``.

    An all-zero vector after clipping maps to the uniform allocation.
    """
    raw = np.asarray(raw, dtype=float).ravel()
    if raw.size == 0:
        raise InvalidInputError("empty allocation vector")
    if not (np.all(np.isfinite(raw)) and math.isfinite(base_alpha)):
        raise InvalidInputError("non-finite allocation vector or base granularity")
    if not base_alpha > 0:
        raise InvalidInputError("base granularity must be positive")
    m = raw.size
    clipped = np.clip(raw, 0.0, None)
    total = clipped.sum()
    if total == 0.0:
        return GranularityAllocation.uniform(m, base_alpha)
    return GranularityAllocation(clipped * (m * base_alpha / total), base_alpha)


def particle_swarm(
    fitness: Fitness,
    m: int,
    base_alpha: float,
    cfg: PsoConfig,
    callback: Optional[Callback] = None,
) -> tuple[GranularityAllocation, float, list[float], int, bool]:
    """Global-best PSO maximizing ``fitness`` over the budget simplex.

    Particle 0 starts at the uniform allocation. Positions are replaced by
    their projection after every move, and velocities are clamped to
    ``+-m * base_alpha`` per component.
    """
    rng = np.random.default_rng(cfg.seed)
    budget = m * base_alpha
    vmax = budget

    pos = rng.uniform(0.0, budget, size=(cfg.swarm_size, m))
    pos[0] = base_alpha
    vel = rng.uniform(-vmax, vmax, size=(cfg.swarm_size, m))

    current: list[GranularityAllocation] = [None] * cfg.swarm_size

    def score(i: int, it: int) -> float:
        alloc = project_to_budget(pos[i], base_alpha)
        pos[i] = alloc.alphas
        current[i] = alloc
        value = float(fitness(alloc))
        if not math.isfinite(value):
            raise OptimizerError(i, it, value)
        if callback is not None:
            callback(it, i, alloc, value)
        return value

    fit = np.array([score(i, 0) for i in range(cfg.swarm_size)])
    evaluations = cfg.swarm_size
    pbest, pbest_fit = pos.copy(), fit.copy()
    g = int(np.argmax(pbest_fit))  # first maximum wins ties
    gbest, gbest_fit, gbest_alloc = pbest[g].copy(), float(pbest_fit[g]), current[g]
    history = [gbest_fit]
    stale = 0
    stopped_early = False

    for it in range(1, cfg.iterations):
        r1 = rng.random((cfg.swarm_size, m))
        r2 = rng.random((cfg.swarm_size, m))
        vel = (cfg.inertia * vel
               + cfg.cognitive * r1 * (pbest - pos)
               + cfg.social * r2 * (gbest - pos))
        np.clip(vel, -vmax, vmax, out=vel)
        pos = pos + vel
        fit = np.array([score(i, it) for i in range(cfg.swarm_size)])
        evaluations += cfg.swarm_size

        improved = fit > pbest_fit
        pbest[improved] = pos[improved]
        pbest_fit[improved] = fit[improved]
        g = int(np.argmax(pbest_fit))
        if pbest_fit[g] > gbest_fit:
            # a fresh global best can only come from this iteration's moves
            gbest, gbest_fit, gbest_alloc = pbest[g].copy(), float(pbest_fit[g]), current[g]
            stale = 0
        else:
            stale += 1
        history.append(gbest_fit)
        if cfg.patience is not None and stale >= cfg.patience:
            stopped_early = True
            log.debug("PSO stopped at iteration %d after %d stale iterations", it, stale)
            break

    return gbest_alloc, gbest_fit, history, evaluations, stopped_early


def optimize(
    model: NetworkModel,
    X,
    y,
    base_alpha: float = 0.5,
    obj_cfg: Optional[ObjectiveConfig] = None,
    pso_cfg: Optional[PsoConfig] = None,
    callback: Optional[Callback] = None,
    strategy=particle_swarm,
) -> AllocationResult:
    """Search for the Q1-maximizing allocation of ``base_alpha`` over the model inputs.

    ``strategy`` is any callable with the signature of :func:`particle_swarm`.
    """
    obj_cfg = obj_cfg or ObjectiveConfig()
    pso_cfg = pso_cfg or PsoConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise InvalidInputError("empty dataset")

    def fitness(alloc: GranularityAllocation) -> float:
        return evaluate(model, X, y, alloc, obj_cfg).q1

    best, best_q1, history, n_eval, early = strategy(
        fitness, model.n_inputs, base_alpha, pso_cfg, callback
    )
    scores = evaluate(model, X, y, best, obj_cfg)
    return AllocationResult(best, best_q1, history, scores, n_eval, early)
