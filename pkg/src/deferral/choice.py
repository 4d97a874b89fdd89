"""Second-stage decision: choosing inside the consideration set.

Once the consideration interval is fixed, the agent maximizes the
comprehensive utility (personal utility minus both distance costs) over it.
This module also locates the unconstrained optimum over the whole grid,
detects the indecisiveness trap (the unconstrained optimum falling outside
the interval), and certifies that the two-stage procedure equals a sequential
maximization by two asymmetric relations: first strict one-many dominance,
then strict comprehensive-utility comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .consideration import (
    ClosedInterval,
    consideration_interval,
    interval_grid_indices,
    maximal_indices_grid,
)
from .errors import DomainError
from .model import (
    EXACT_TOL,
    AgentSpec,
    Grid,
    belief_mean,
    cost_values_at,
    eval_cost,
    eval_utility,
    utility_values,
)


@dataclass(frozen=True)
class ChoiceResult:
    """Argmax set of the comprehensive utility over the consideration set.

    ``chosen`` lists every grid point attaining ``value`` within 1e-12,
    ascending; the canonical representative is the smallest.
    """

    chosen: tuple[float, ...]
    value: float
    constrained: bool

    @property
    def canonical(self) -> float:
        return self.chosen[0]


@dataclass(frozen=True)
class TrapReport:
    """Whether the unconstrained optimum escaped the consideration interval.

    ``trapped`` means the optimum sits strictly more than one grid step
    outside the interval (the one-step slack absorbs discretization at the
    endpoints).  ``utility_gap`` is the comprehensive-utility shortfall of
    the constrained choice, zero whenever not trapped.
    """

    x_hat: float
    interval: ClosedInterval
    trapped: bool
    utility_gap: float
    x_hat_tie_count: int = 1


@dataclass(frozen=True)
class SequentialCriteriaCertificate:
    """Witness that the two-stage choice is rational by two sequential criteria.

    ``stage1_survivors`` is the grid's undominated set, ``gamma`` the result
    of then keeping only alternatives undominated under strict
    comprehensive-utility comparison.  ``holds`` records whether ``gamma``
    equals the constrained argmax set.
    """

    holds: bool
    gamma: tuple[float, ...]
    stage1_survivors: tuple[float, ...]


def comprehensive_value(
    agent: AgentSpec,
    x: float,
    x_social: float,
    future_mean: float | None = None,
) -> float:
    """Comprehensive utility of choosing ``x`` given the current social choice.

    ``future_mean`` defaults to the mean of the agent's own beliefs (their
    uniform mixture when there are several); game code passes the aggregated
    value explicitly.
    """
    if x < 0 or x_social < 0:
        raise DomainError(f"comprehensive_value needs nonnegative inputs, got ({x}, {x_social})")
    if future_mean is None:
        future_mean = belief_mean(agent)
    w = agent.form
    return (
        w.w_u * eval_utility(agent.utility, x)
        - w.w_1 * eval_cost(agent.c1, abs(x - x_social))
        - w.w_2 * eval_cost(agent.c2, abs(x - future_mean))
    )


def comprehensive_values(
    agent: AgentSpec,
    grid: Grid,
    x_social: float,
    future_mean: float | None = None,
) -> np.ndarray:
    """Comprehensive utility over every grid point (vectorized)."""
    if x_social < 0:
        raise DomainError(f"social choice must be nonnegative, got {x_social}")
    if future_mean is None:
        future_mean = belief_mean(agent)
    w = agent.form
    vals = w.w_u * utility_values(agent.utility, grid)
    if w.w_1 != 0.0:
        vals = vals - w.w_1 * cost_values_at(agent.c1, grid, x_social)
    if w.w_2 != 0.0:
        vals = vals - w.w_2 * cost_values_at(agent.c2, grid, future_mean)
    return vals


def second_stage_choice(agent: AgentSpec, x_social: float, grid: Grid) -> ChoiceResult:
    """Maximize the comprehensive utility over the consideration interval."""
    interval = consideration_interval(agent.utility, agent.c1, x_social)
    idx = interval_grid_indices(interval, grid)
    vals = comprehensive_values(agent, grid, x_social)[idx]
    best = float(vals.max())
    sel = idx[vals >= best - EXACT_TOL]
    return ChoiceResult(chosen=tuple(float(x) for x in grid.points[sel]), value=best, constrained=True)


def unconstrained_optimum(agent: AgentSpec, x_social: float, grid: Grid) -> float:
    """Smallest grid maximizer of the comprehensive utility over the whole grid."""
    vals = comprehensive_values(agent, grid, x_social)
    return float(grid.points[int(np.argmax(vals))])


def detect_trap(agent: AgentSpec, x_social: float, grid: Grid) -> TrapReport:
    """Check whether unconstrained maximization would leave the interval."""
    interval = consideration_interval(agent.utility, agent.c1, x_social)
    vals = comprehensive_values(agent, grid, x_social)
    best_idx = int(np.argmax(vals))
    x_hat = float(grid.points[best_idx])
    ties = int(np.count_nonzero(vals >= vals[best_idx] - EXACT_TOL))
    step = grid.step
    trapped = x_hat < interval.lo - step or x_hat > interval.hi + step
    if trapped:
        constrained = second_stage_choice(agent, x_social, grid)
        gap = max(0.0, float(vals[best_idx]) - constrained.value)
    else:
        gap = 0.0
    return TrapReport(
        x_hat=x_hat,
        interval=interval,
        trapped=trapped,
        utility_gap=gap,
        x_hat_tie_count=ties,
    )


def two_criteria_certificate(
    agent: AgentSpec,
    x_social: float,
    grid: Grid,
) -> SequentialCriteriaCertificate:
    """Rebuild the choice as two sequential maximizations and compare.

    Stage one keeps the grid points undominated under strict one-many
    dominance; stage two keeps those undominated under strict comprehensive
    comparison (strict meaning a gap above the same 1e-12 tie tolerance the
    argmax set uses, so the two routes agree exactly on plateaus).  A false
    certificate signals an implementation bug, not a model state.
    """
    survivors = maximal_indices_grid(agent.utility, agent.c1, x_social, grid)
    vals = comprehensive_values(agent, grid, x_social)[survivors]
    gamma = survivors[vals >= float(vals.max()) - EXACT_TOL]
    chosen = second_stage_choice(agent, x_social, grid)
    gamma_points = tuple(float(x) for x in grid.points[gamma])
    holds = gamma_points == chosen.chosen
    return SequentialCriteriaCertificate(
        holds=holds,
        gamma=gamma_points,
        stage1_survivors=tuple(float(x) for x in grid.points[survivors]),
    )
