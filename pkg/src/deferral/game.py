"""Strategic layer: payoffs, best responses, and equilibrium search.

Each agent's payoff is the comprehensive utility evaluated at their own
choice, with the current social reference point aggregated from the other
agents' choices and the future reference point taken from the mean of the
aggregated beliefs.  Two equilibrium notions are supported:

* standard: every agent's choice maximizes their payoff over the whole
  strategy interval ``[0, x_max]``;
* after deferral: every agent's choice lies in, and maximizes their payoff
  over, the consideration set induced by the others' choices.

For two agents the search is exhaustive on the grid (every profile tested);
for more agents a best-response iteration from a start lattice finds fixed
points without any completeness claim.
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .choice import comprehensive_value, comprehensive_values
from .consideration import ClosedInterval, consideration_interval, interval_grid_indices
from .errors import (
    ClosedFormUnavailable,
    DomainError,
    MethodUnsupported,
    SpecValidationError,
)
from .model import (
    EXACT_TOL,
    FiniteRandomVariable,
    GameSpec,
    Grid,
    LinearCost,
    MeanChoice,
    Quadratic,
    Violation,
    ZeroCost,
    eval_cost,
    utility_values,
)

Profile = tuple[float, ...]

#: Resolution of the default start lattice for the n-agent iterative search.
START_LATTICE_POINTS = 11
#: The default lattice has START_LATTICE_POINTS**n starts; cap n to keep it sane.
MAX_LATTICE_AGENTS = 4
_MAX_ITERATIONS = 500


def worker_count() -> int:
    """Worker count for parallel scans (env ``DEFERRAL_WORKERS``, default cores)."""
    raw = os.environ.get("DEFERRAL_WORKERS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


class EquilibriumKind(enum.Enum):
    STANDARD = "standard"
    AFTER_DEFERRAL = "after_deferral"
    BOTH = "both"


@dataclass(frozen=True)
class EquilibriumCertificate:
    """A profile together with the equilibrium tests it passed.

    ``max_regret`` is the largest payoff improvement any agent could obtain
    by a grid deviation admissible for the certified kind (full grid for
    standard, consideration set for after-deferral, both for ``BOTH``).
    ``per_agent_consideration`` is ``None`` when the closed-form interval is
    unavailable (non-increasing current-distance cost).
    """

    profile: Profile
    kind: EquilibriumKind
    max_regret: float
    per_agent_consideration: tuple[ClosedInterval, ...] | None


@dataclass(frozen=True)
class BestResponseCurve:
    """Best-response argmax sets sampled over a sweep of opponent values."""

    agent: int
    opponent_values: tuple[float, ...]
    argmax_sets: tuple[tuple[float, ...], ...]

    def canonical(self) -> tuple[float, ...]:
        return tuple(s[0] for s in self.argmax_sets)


# ---------------------------------------------------------------------------
# aggregation


def _reference_point(game: GameSpec, i: int, others: Sequence[float]) -> float:
    agg = game.choice_aggregator
    if isinstance(agg, MeanChoice):
        return float(np.mean(others))
    weights = list(agg.weights)
    del weights[i]
    total = sum(weights)
    if total <= 0:
        raise SpecValidationError([Violation(
            "AggregatorWeightsInvalid",
            f"choice weights over agents other than {i} sum to {total}")])
    return float(np.dot(weights, others) / total)


def aggregate_choices(game: GameSpec, i: int, profile: Sequence[float]) -> float:
    """Social reference point seen by agent ``i`` under ``profile``.

    Mean aggregation averages the other agents' choices (for two agents this
    is exactly the opponent's choice); weighted aggregation renormalizes the
    per-agent weights over everyone but ``i``.
    """
    if game.n < 2:
        raise SpecValidationError([Violation("TooFewAgents", f"game has n={game.n}")])
    _check_profile(game, profile)
    others = [x for j, x in enumerate(profile) if j != i]
    return _reference_point(game, i, others)


def aggregate_beliefs(game: GameSpec, i: int) -> FiniteRandomVariable:
    """Mixture of agent ``i``'s per-opponent beliefs with the configured weights."""
    beliefs = game.agents[i].beliefs
    weights = game.belief_aggregator.weights
    if weights is None:
        weights = tuple(1.0 / len(beliefs) for _ in beliefs)
    if len(weights) != len(beliefs):
        raise SpecValidationError([Violation(
            "AggregatorWeightsInvalid",
            f"{len(weights)} mixture weights for {len(beliefs)} beliefs")])
    mixed: dict[float, float] = {}
    for w, rv in zip(weights, beliefs):
        if w == 0.0:
            continue
        for value, prob in rv.atoms:
            mixed[value] = mixed.get(value, 0.0) + w * prob
    atoms = tuple(sorted(mixed.items()))
    return FiniteRandomVariable(atoms=atoms)


def _check_profile(game: GameSpec, profile: Sequence[float]) -> None:
    if len(profile) != game.n:
        raise DomainError(f"profile has {len(profile)} entries for {game.n} agents")
    for x in profile:
        if x < 0 or x > game.x_max:
            raise DomainError(f"choice {x} outside [0, {game.x_max}]")


def payoff(game: GameSpec, i: int, profile: Sequence[float]) -> float:
    """Agent ``i``'s comprehensive utility at ``profile``."""
    x_social = aggregate_choices(game, i, profile)
    future = aggregate_beliefs(game, i).mean()
    return comprehensive_value(game.agents[i], profile[i], x_social, future)


def _payoff_vector(game: GameSpec, i: int, x_social: float, grid: Grid) -> np.ndarray:
    future = aggregate_beliefs(game, i).mean()
    return comprehensive_values(game.agents[i], grid, x_social, future)


def _payoff_matrix(game: GameSpec, i: int, grid: Grid) -> np.ndarray:
    """Two-agent payoff table ``P[own_index, opponent_index]``."""
    agent = game.agents[i]
    future = aggregate_beliefs(game, i).mean()
    pts = grid.points
    w = agent.form
    vals = (w.w_u * utility_values(agent.utility, grid))[:, None]
    if w.w_2 != 0.0:
        vals = vals - w.w_2 * np.asarray(eval_cost(agent.c2, np.abs(pts - future)))[:, None]
    if w.w_1 != 0.0:
        vals = vals - w.w_1 * np.asarray(eval_cost(agent.c1, np.abs(pts[:, None] - pts[None, :])))
    else:
        vals = vals + np.zeros((1, len(pts)))
    return vals


# ---------------------------------------------------------------------------
# best responses


def kinked_concave_argmax(
    a: float,
    b: float,
    k: float,
    kinks: Sequence[tuple[float, float]],
    lo: float = 0.0,
    hi: float | None = None,
) -> tuple[float, ...]:
    """Exact argmax of ``-a x^2 + b x + k - sum w |x - t|`` on ``[lo, hi]``.

    The objective is strictly concave for ``a > 0``, so the maximizer is the
    stationary point of one linear-slope segment, a kink, or a boundary;
    enumerating those finitely many candidates is exact.
    """
    if a <= 0:
        raise MethodUnsupported(f"quadratic part must be strictly concave, got a={a}")
    if any(w < 0 for _, w in kinks):
        raise MethodUnsupported("kink weights must be nonnegative")
    merged: dict[float, float] = {}
    for t, w in kinks:
        if w > 0:
            merged[t] = merged.get(t, 0.0) + w
    locs = sorted(merged)
    weights = [merged[t] for t in locs]

    def f(x: float) -> float:
        return -a * x * x + b * x + k - sum(w * abs(x - t) for t, w in merged.items())

    top = np.inf if hi is None else hi
    candidates = {lo}
    if hi is not None:
        candidates.add(hi)
    candidates.update(t for t in locs if lo <= t <= top)
    above = sum(weights)
    below = 0.0
    for seg in range(len(locs) + 1):
        seg_lo = locs[seg - 1] if seg > 0 else -np.inf
        seg_hi = locs[seg] if seg < len(locs) else np.inf
        stationary = (b + above - below) / (2.0 * a)
        if max(seg_lo, lo) <= stationary <= min(seg_hi, top):
            candidates.add(stationary)
        if seg < len(locs):
            above -= weights[seg]
            below += weights[seg]
    scored = [(f(x), x) for x in candidates]
    best = max(v for v, _ in scored)
    return tuple(sorted(x for v, x in scored if v == best))


def _exact_best_response(game: GameSpec, i: int, x_social: float, grid: Grid) -> tuple[float, ...]:
    agent = game.agents[i]
    u = agent.utility
    if not isinstance(u, Quadratic):
        raise MethodUnsupported("exact best response needs a quadratic utility")
    for c in (agent.c1, agent.c2):
        if not isinstance(c, (ZeroCost, LinearCost)):
            raise MethodUnsupported("exact best response needs zero or linear costs")
    w = agent.form
    if w.w_u * u.a <= 0:
        raise MethodUnsupported("exact best response needs w_u > 0")
    kinks = []
    if isinstance(agent.c1, LinearCost):
        kinks.append((x_social, w.w_1 * agent.c1.d))
    if isinstance(agent.c2, LinearCost):
        kinks.append((aggregate_beliefs(game, i).mean(), w.w_2 * agent.c2.d))
    return kinked_concave_argmax(
        w.w_u * u.a, w.w_u * u.b, w.w_u * u.k, kinks, lo=0.0, hi=grid.x_max
    )


def best_response(
    game: GameSpec,
    i: int,
    opponents: Sequence[float],
    grid: Grid,
    method: str = "grid",
) -> tuple[float, ...]:
    """Argmax set of agent ``i``'s payoff against the others' choices.

    ``method="grid"`` scans the grid and reports the tie set (within 1e-12);
    ``method="exact"`` solves the kinked concave program in closed form and
    is only available for quadratic utilities with zero/linear costs.
    """
    x_social = _reference_point(game, i, opponents)
    if method == "exact":
        return _exact_best_response(game, i, x_social, grid)
    if method != "grid":
        raise MethodUnsupported(f"unknown best-response method {method!r}")
    vals = _payoff_vector(game, i, x_social, grid)
    best = float(vals.max())
    return tuple(float(x) for x in grid.points[vals >= best - EXACT_TOL])


def deferral_best_response(
    game: GameSpec,
    i: int,
    opponents: Sequence[float],
    grid: Grid,
) -> tuple[float, ...]:
    """Argmax set of agent ``i``'s payoff restricted to their consideration set."""
    x_social = _reference_point(game, i, opponents)
    agent = game.agents[i]
    interval = consideration_interval(agent.utility, agent.c1, x_social)
    idx = interval_grid_indices(interval, grid)
    vals = _payoff_vector(game, i, x_social, grid)[idx]
    best = float(vals.max())
    return tuple(float(x) for x in grid.points[idx[vals >= best - EXACT_TOL]])


def best_response_curve(
    game: GameSpec,
    i: int,
    opponent_values: Sequence[float],
    grid: Grid,
    method: str = "grid",
) -> BestResponseCurve:
    """Sample the best response of agent ``i`` over a sweep of opponent values.

    Only defined for two-agent games (the sweep is one-dimensional).
    """
    if game.n != 2:
        raise MethodUnsupported("best-response sweeps need a two-agent game")
    sets = tuple(best_response(game, i, (x,), grid, method=method) for x in opponent_values)
    return BestResponseCurve(agent=i, opponent_values=tuple(opponent_values), argmax_sets=sets)


# ---------------------------------------------------------------------------
# tolerances


def is_exact_family(game: GameSpec) -> bool:
    """Whether every agent has quadratic utility and zero/linear costs."""
    return all(
        isinstance(a.utility, Quadratic)
        and isinstance(a.c1, (ZeroCost, LinearCost))
        and isinstance(a.c2, (ZeroCost, LinearCost))
        for a in game.agents
    )


def default_tolerance(game: GameSpec, payoff_scale: float, lipschitz_step: float) -> float:
    """Default regret tolerance.

    For the exact (quadratic + linear) family the equilibria are exact and
    only float noise must be absorbed; otherwise use a one-grid-step payoff
    Lipschitz bound.
    """
    if is_exact_family(game):
        return 1e-9 * (1.0 + abs(payoff_scale))
    return lipschitz_step


def _matrix_tolerance(game: GameSpec, matrices: Sequence[np.ndarray], tolerance: float | None) -> float:
    if tolerance is not None:
        return tolerance
    scale = max(float(np.abs(m).max()) for m in matrices)
    lipschitz = max(float(np.abs(np.diff(m, axis=0)).max()) for m in matrices)
    return default_tolerance(game, scale, lipschitz)


# ---------------------------------------------------------------------------
# classification


def _slice_bounds(peak: float, grid: Grid, j: int) -> tuple[int, int]:
    """Index bounds of the consideration slice against opponent grid index ``j``.

    Fast path equivalent to ``interval_grid_indices(consideration_interval(...))``
    when the opponent's value is itself a grid point.
    """
    xj = grid.points[j]
    if abs(xj - peak) <= EXACT_TOL:
        return j, j
    if xj > peak:
        return grid.nearest_index(peak, tie_up=True), j
    return j, grid.nearest_index(peak, tie_up=False)


def _deferral_data(game: GameSpec, i: int, x_social: float, grid: Grid):
    """Interval, slice indices and relaxed membership bounds for agent ``i``."""
    agent = game.agents[i]
    interval = consideration_interval(agent.utility, agent.c1, x_social)
    idx = interval_grid_indices(interval, grid)
    pts = grid.points
    lo_eff = min(interval.lo, pts[idx[0]]) - EXACT_TOL
    hi_eff = max(interval.hi, pts[idx[-1]]) + EXACT_TOL
    return interval, idx, lo_eff, hi_eff


def classify_profile(
    game: GameSpec,
    profile: Sequence[float],
    grid: Grid,
    tolerance: float | None = None,
) -> EquilibriumCertificate | None:
    """Run both equilibrium tests on one profile.

    Returns a certificate of the strongest applicable kind, or ``None`` when
    the profile is no equilibrium of either sort.  Deviations are grid
    points; the profile itself may be off-grid.  When the closed-form
    consideration interval is unavailable the after-deferral test is skipped
    and only standard classification is possible.
    """
    _check_profile(game, profile)
    n = game.n
    values = []
    vectors = []
    socials = []
    for i in range(n):
        x_social = aggregate_choices(game, i, profile)
        future = aggregate_beliefs(game, i).mean()
        socials.append(x_social)
        vectors.append(_payoff_vector(game, i, x_social, grid))
        values.append(comprehensive_value(game.agents[i], profile[i], x_social, future))
    if tolerance is None:
        scale = max(float(np.abs(v).max()) for v in vectors)
        lipschitz = max(float(np.abs(np.diff(v)).max()) for v in vectors)
        tolerance = default_tolerance(game, scale, lipschitz)

    standard_regrets = [max(0.0, float(vec.max()) - val) for vec, val in zip(vectors, values)]
    standard_ok = max(standard_regrets) <= tolerance

    deferral_ok = False
    deferral_regrets: list[float] = []
    intervals: tuple[ClosedInterval, ...] | None = None
    try:
        data = [_deferral_data(game, i, socials[i], grid) for i in range(n)]
    except ClosedFormUnavailable:
        data = None
    if data is not None:
        intervals = tuple(d[0] for d in data)
        member = all(d[2] <= profile[i] <= d[3] for i, d in enumerate(data))
        if member:
            deferral_regrets = [
                max(0.0, float(vectors[i][d[1]].max()) - values[i]) for i, d in enumerate(data)
            ]
            deferral_ok = max(deferral_regrets) <= tolerance

    if standard_ok and deferral_ok:
        kind = EquilibriumKind.BOTH
        regret = max(standard_regrets + deferral_regrets)
    elif standard_ok:
        kind = EquilibriumKind.STANDARD
        regret = max(standard_regrets)
    elif deferral_ok:
        kind = EquilibriumKind.AFTER_DEFERRAL
        regret = max(deferral_regrets)
    else:
        return None
    return EquilibriumCertificate(
        profile=tuple(float(x) for x in profile),
        kind=kind,
        max_regret=regret,
        per_agent_consideration=intervals,
    )


# ---------------------------------------------------------------------------
# exhaustive two-agent search


class _TwoPlayerTables:
    """Shared payoff tables and per-column statistics for a two-agent grid game."""

    def __init__(self, game: GameSpec, grid: Grid, tolerance: float | None):
        self.game = game
        self.grid = grid
        # P[a][own, opp]
        self.P = [_payoff_matrix(game, 0, grid), _payoff_matrix(game, 1, grid)]
        self.best = [m.max(axis=0) for m in self.P]
        self.tol = _matrix_tolerance(game, self.P, tolerance)
        self._deferral_ready = False

    def prepare_deferral(self) -> None:
        if self._deferral_ready:
            return
        m = self.grid.steps + 1
        self.lo = [np.empty(m, dtype=int), np.empty(m, dtype=int)]
        self.hi = [np.empty(m, dtype=int), np.empty(m, dtype=int)]
        self.rbest = [np.empty(m), np.empty(m)]
        for a in (0, 1):
            agent = self.game.agents[a]
            peak = agent.utility.peak
            consideration_interval(agent.utility, agent.c1, peak)  # precondition check
            for j in range(m):
                lo, hi = _slice_bounds(peak, self.grid, j)
                self.lo[a][j] = lo
                self.hi[a][j] = hi
                self.rbest[a][j] = self.P[a][lo : hi + 1, j].max()
        self._deferral_ready = True

    def standard_mask(self) -> np.ndarray:
        ok0 = self.P[0] >= self.best[0][None, :] - self.tol
        ok1 = self.P[1].T >= self.best[1][:, None] - self.tol
        return ok0 & ok1

    def deferral_mask(self) -> np.ndarray:
        self.prepare_deferral()
        m = self.grid.steps + 1
        own = np.arange(m)[:, None]
        opp = np.arange(m)[None, :]
        member0 = (own >= self.lo[0][None, :]) & (own <= self.hi[0][None, :])
        member1 = (opp >= self.lo[1][:, None]) & (opp <= self.hi[1][:, None])
        ok0 = self.P[0] >= self.rbest[0][None, :] - self.tol
        ok1 = self.P[1].T >= self.rbest[1][:, None] - self.tol
        return member0 & member1 & ok0 & ok1

    def intervals(self, i1: int, i2: int) -> tuple[ClosedInterval, ...]:
        pts = self.grid.points
        return (
            consideration_interval(self.game.agents[0].utility, self.game.agents[0].c1, pts[i2]),
            consideration_interval(self.game.agents[1].utility, self.game.agents[1].c1, pts[i1]),
        )

    def certificate(self, i1: int, i2: int, standard: bool, deferral: bool) -> EquilibriumCertificate:
        pts = self.grid.points
        regrets = []
        intervals = None
        if standard:
            regrets += [
                max(0.0, float(self.best[0][i2] - self.P[0][i1, i2])),
                max(0.0, float(self.best[1][i1] - self.P[1][i2, i1])),
            ]
        if deferral:
            regrets += [
                max(0.0, float(self.rbest[0][i2] - self.P[0][i1, i2])),
                max(0.0, float(self.rbest[1][i1] - self.P[1][i2, i1])),
            ]
        try:
            intervals = self.intervals(i1, i2)
        except ClosedFormUnavailable:
            intervals = None
        if standard and deferral:
            kind = EquilibriumKind.BOTH
        elif standard:
            kind = EquilibriumKind.STANDARD
        else:
            kind = EquilibriumKind.AFTER_DEFERRAL
        return EquilibriumCertificate(
            profile=(float(pts[i1]), float(pts[i2])),
            kind=kind,
            max_regret=max(regrets),
            per_agent_consideration=intervals,
        )


def _two_player_find(game, grid, tolerance, want):
    tables = _TwoPlayerTables(game, grid, tolerance)
    standard = tables.standard_mask()
    if want == "standard":
        primary = standard
        try:
            deferral = tables.deferral_mask()
        except ClosedFormUnavailable:
            deferral = np.zeros_like(standard)
    else:
        deferral = tables.deferral_mask()  # propagate precondition failures
        primary = deferral
    certificates = []
    for i1, i2 in np.argwhere(primary):
        certificates.append(
            tables.certificate(int(i1), int(i2), bool(standard[i1, i2]), bool(deferral[i1, i2]))
        )
    return certificates


# ---------------------------------------------------------------------------
# n-agent iterative search


def _default_lattice(game: GameSpec) -> list[Profile]:
    if game.n > MAX_LATTICE_AGENTS:
        raise MethodUnsupported(
            f"default start lattice supports up to {MAX_LATTICE_AGENTS} agents; "
            "pass explicit starts for larger games"
        )
    axis = np.linspace(0.0, game.x_max, START_LATTICE_POINTS)
    return [tuple(p) for p in itertools.product(axis, repeat=game.n)]


def _iterate_from(game, grid, start, restricted) -> Profile | None:
    n = game.n
    current = tuple(grid.points[grid.nearest_index(x)] for x in start)
    for _ in range(_MAX_ITERATIONS):
        responses = []
        for i in range(n):
            others = [x for j, x in enumerate(current) if j != i]
            if restricted:
                responses.append(deferral_best_response(game, i, others, grid)[0])
            else:
                responses.append(best_response(game, i, others, grid)[0])
        updated = tuple(responses)
        if updated == current:
            return current
        current = updated
    return None


def _lattice_find(game, grid, tolerance, restricted, starts):
    if starts is None:
        starts = _default_lattice(game)
    workers = min(worker_count(), len(starts)) or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fixed = list(pool.map(lambda s: _iterate_from(game, grid, s, restricted), starts))
    else:
        fixed = [_iterate_from(game, grid, s, restricted) for s in starts]
    seen: set[Profile] = set()
    certificates = []
    wanted = (
        (EquilibriumKind.AFTER_DEFERRAL, EquilibriumKind.BOTH)
        if restricted
        else (EquilibriumKind.STANDARD, EquilibriumKind.BOTH)
    )
    for profile in fixed:
        if profile is None or profile in seen:
            continue
        seen.add(profile)
        cert = classify_profile(game, profile, grid, tolerance)
        if cert is not None and cert.kind in wanted:
            certificates.append(cert)
    certificates.sort(key=lambda c: c.profile)
    return certificates


# ---------------------------------------------------------------------------
# public finders


def find_equilibria(
    game: GameSpec,
    grid: Grid,
    tolerance: float | None = None,
    starts: Sequence[Profile] | None = None,
) -> list[EquilibriumCertificate]:
    """All standard equilibria on the grid.

    Exhaustive (hence complete on the grid) for two agents; best-response
    iteration from a start lattice otherwise.  An empty list is a legal
    outcome on coarse grids.  Certificates are sorted by profile and carry
    the stronger ``BOTH`` kind when the profile also survives the
    after-deferral test.
    """
    if game.n == 2:
        return _two_player_find(game, grid, tolerance, "standard")
    return _lattice_find(game, grid, tolerance, False, starts)


def find_equilibria_after_deferral(
    game: GameSpec,
    grid: Grid,
    tolerance: float | None = None,
    starts: Sequence[Profile] | None = None,
) -> list[EquilibriumCertificate]:
    """All equilibria after deferral on the grid (two-agent case exhaustive).

    Requires the closed-form consideration interval for every agent
    (strictly increasing current-distance costs).
    """
    if game.n == 2:
        return _two_player_find(game, grid, tolerance, "deferral")
    return _lattice_find(game, grid, tolerance, True, starts)
