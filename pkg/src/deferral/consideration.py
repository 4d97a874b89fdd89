"""First-stage consideration sets.

An indecisive agent keeps exactly the alternatives that are undominated under
the one-many ordering: ``x`` beats ``y`` when it gives weakly higher personal
utility *and* weakly lower cost of distance to the current social choice.
With a strictly quasiconcave utility, a strictly increasing current-distance
cost and the Euclidean metric, the undominated set is the closed interval
between the social choice and the personal optimum; without those conditions
only the exhaustive grid oracle defines it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormUnavailable, DomainError
from .model import (
    EXACT_TOL,
    CostFunction,
    Grid,
    UtilityFunction,
    cost_is_strictly_increasing,
    cost_values_at,
    eval_cost,
    eval_utility,
    require_valid,
    utility_values,
)


@dataclass(frozen=True)
class ClosedInterval:
    """Closed interval ``[lo, hi]`` on the half-line; ``lo == hi`` is a singleton."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    @property
    def is_singleton(self) -> bool:
        return self.hi - self.lo <= EXACT_TOL

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass(frozen=True)
class DominanceVerdict:
    """Outcome of one pairwise comparison under the one-many ordering."""

    weak: bool
    strict: bool


def one_many_compare(
    x_i: float,
    x_j: float,
    u: UtilityFunction,
    c1: CostFunction,
    x_social: float,
) -> DominanceVerdict:
    """Compare ``x_i`` against ``x_j`` given the current social choice.

    Weak dominance requires ``u(x_i) >= u(x_j)`` together with a weakly lower
    current-distance cost; strict dominance additionally requires that the
    reverse weak comparison fails.  Ties in both coordinates therefore yield
    mutual weak dominance and no strict dominance.
    """
    if x_i < 0 or x_j < 0 or x_social < 0:
        raise DomainError(f"one_many_compare needs nonnegative inputs, got ({x_i}, {x_j}, {x_social})")
    u_i, u_j = eval_utility(u, x_i), eval_utility(u, x_j)
    c_i, c_j = eval_cost(c1, abs(x_i - x_social)), eval_cost(c1, abs(x_j - x_social))
    weak = u_i >= u_j and c_i <= c_j
    reverse = u_j >= u_i and c_j <= c_i
    return DominanceVerdict(weak=weak, strict=weak and not reverse)


def consideration_interval(
    u: UtilityFunction,
    c1: CostFunction,
    x_social: float,
) -> ClosedInterval:
    """Closed form of the consideration set.

    Returns the interval between the social choice and the personal optimum,
    degenerating to the optimum itself when the two coincide (within
    ``EXACT_TOL``).  Requires a strictly increasing current-distance cost;
    otherwise raises ``ClosedFormUnavailable`` and the caller must fall back
    to ``maximal_set_grid``.
    """
    if x_social < 0:
        raise DomainError(f"social choice must be nonnegative, got {x_social}")
    require_valid(u)
    if not cost_is_strictly_increasing(c1):
        raise ClosedFormUnavailable(
            "the interval form needs a strictly increasing current-distance cost"
        )
    peak = u.peak
    if abs(x_social - peak) <= EXACT_TOL:
        return ClosedInterval(peak, peak)
    return ClosedInterval(min(x_social, peak), max(x_social, peak))


def interval_grid_indices(interval: ClosedInterval, grid: Grid) -> np.ndarray:
    """Indices of the grid points identified with ``interval``.

    Endpoints snap to the nearest grid point, with exact half-step ties
    rounding inward; this is precisely the boundary behaviour of the pairwise
    dominance oracle on the grid, so the returned set equals
    ``maximal_set_grid`` under the closed-form preconditions.  A degenerate
    interval maps to the nearest grid point (two points if exactly halfway
    between neighbours, matching the mutual-weak-dominance tie).
    """
    pts = grid.points
    if interval.hi - interval.lo <= 0.0:
        dist = np.abs(pts - interval.lo)
        return np.flatnonzero(dist == dist.min())
    i_lo = grid.nearest_index(interval.lo, tie_up=True)
    i_hi = grid.nearest_index(interval.hi, tie_up=False)
    if i_lo > i_hi:
        # Sub-cell interval whose endpoints both snapped across the midpoint;
        # collapse to the point nearest the interval's centre.
        mid = 0.5 * (interval.lo + interval.hi)
        return np.array([grid.nearest_index(mid, tie_up=True)])
    return np.arange(i_lo, i_hi + 1)


def interval_grid_points(interval: ClosedInterval, grid: Grid) -> np.ndarray:
    """Grid-point values identified with ``interval`` (see ``interval_grid_indices``)."""
    return grid.points[interval_grid_indices(interval, grid)]


def maximal_indices_grid(
    u: UtilityFunction,
    c1: CostFunction,
    x_social: float,
    grid: Grid,
) -> np.ndarray:
    """Indices of grid points not strictly dominated under the one-many ordering.

    Exhaustive pairwise scan; this is the defined semantics of the
    consideration set on the grid and makes no quasiconcavity assumption.
    """
    if x_social < 0:
        raise DomainError(f"social choice must be nonnegative, got {x_social}")
    uv = utility_values(u, grid)
    cv = cost_values_at(c1, grid, x_social)
    weak = (uv[:, None] >= uv[None, :]) & (cv[:, None] <= cv[None, :])
    strict = weak & ~weak.T
    return np.flatnonzero(~strict.any(axis=0))


def maximal_set_grid(
    u: UtilityFunction,
    c1: CostFunction,
    x_social: float,
    grid: Grid,
) -> np.ndarray:
    """Grid-point values of the undominated set (ascending)."""
    return grid.points[maximal_indices_grid(u, c1, x_social, grid)]
