"""Core model primitives.

Everything an agent is made of lives here: the personal utility families,
the distance-cost families, finite-support beliefs, the additive
comprehensive-utility form, the discretization grid shared by every numeric
oracle, and structural validation for all of it.

All types are immutable after construction and every operation is pure, so
they are safe to evaluate concurrently without synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import DomainError, GridLookupError, SpecValidationError

#: Absolute tolerance used for exact-equality style checks (probability mass,
#: degenerate intervals, argmax ties).  All shipped scenarios use exact
#: rationals, so this only has to absorb float arithmetic noise.
EXACT_TOL = 1e-12


def distance(x: float, y: float) -> float:
    """Euclidean distance on the nonnegative half-line.

    The model fixes the metric to ``|x - y|``; other metrics are out of scope.
    """
    if x < 0 or y < 0:
        raise DomainError(f"distance arguments must be nonnegative, got ({x}, {y})")
    return abs(x - y)


@dataclass(frozen=True)
class Grid:
    """Uniform grid over ``[0, x_max]`` with points ``j * x_max / steps``.

    ``x_max`` doubles as the upper bound on every agent's choice; the step
    size is the spatial tolerance attached to any grid-based answer.
    """

    x_max: float
    steps: int

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.arange(self.steps + 1, dtype=float) * self.x_max / self.steps
        pts.setflags(write=False)
        return pts

    @property
    def step(self) -> float:
        return self.x_max / self.steps

    def nearest_index(self, x: float, *, tie_up: bool = True) -> int:
        """Index of the grid point nearest to ``x``.

        Points outside ``[0, x_max]`` clamp to the boundary.  An exact
        half-step tie resolves upward when ``tie_up`` and downward otherwise;
        the two conventions together make interval snapping round inward.
        """
        pts = self.points
        if x <= pts[0]:
            return 0
        if x >= pts[-1]:
            return self.steps
        j = int(np.searchsorted(pts, x))
        if pts[j] == x:
            return j
        below, above = x - pts[j - 1], pts[j] - x
        if below < above:
            return j - 1
        if above < below:
            return j
        return j if tie_up else j - 1

    def index_of(self, x: float) -> int:
        """Index of ``x`` as an exact grid point, else ``GridLookupError``."""
        j = self.nearest_index(x)
        if abs(self.points[j] - x) > EXACT_TOL:
            raise GridLookupError(f"{x} is not a point of grid(x_max={self.x_max}, steps={self.steps})")
        return j


@dataclass(frozen=True)
class Quadratic:
    """Personal utility ``u(x) = -a x^2 + b x + k`` with curvature ``a > 0``.

    Strictly quasiconcave on the nonnegative half-line; ``peak`` is its
    unique maximizer there (the parabola vertex ``b / (2a)``, clamped to 0
    when the vertex falls below the domain).
    """

    a: float
    b: float
    k: float = 0.0

    @property
    def peak(self) -> float:
        return max(0.0, self.b / (2.0 * self.a))


@dataclass(frozen=True)
class Tabulated:
    """Personal utility given by values on a grid.

    Must rise strictly to a unique peak and fall strictly after it
    (strict quasiconcavity checked point by point).
    """

    values: tuple[float, ...]
    grid: Grid

    @property
    def peak(self) -> float:
        return self.grid.points[int(np.argmax(self.values))]


UtilityFunction = Union[Quadratic, Tabulated]


@dataclass(frozen=True)
class ZeroCost:
    """Identically zero distance cost (no social concern on this channel)."""


@dataclass(frozen=True)
class LinearCost:
    """Cost ``c(delta) = d * delta`` with slope ``d >= 0``."""

    d: float


@dataclass(frozen=True)
class PowerCost:
    """Cost ``c(delta) = d * delta**p`` with ``d >= 0`` and exponent ``p >= 1``."""

    d: float
    p: float


CostFunction = Union[ZeroCost, LinearCost, PowerCost]


@dataclass(frozen=True)
class FiniteRandomVariable:
    """Finite-support belief over a future social choice.

    Atoms are ``(value, probability)`` pairs with distinct nonnegative values
    and total mass one.
    """

    atoms: tuple[tuple[float, float], ...]

    def mean(self) -> float:
        return float(sum(v * p for v, p in self.atoms))

    def support(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.atoms)


@dataclass(frozen=True)
class ComprehensiveUtilityForm:
    """Weighted additive comprehensive utility.

    ``U = w_u * u(x) - w_1 * c1(|x - x_s|) - w_2 * c2(|x - mean(x_f)|)``.
    Nonnegative weights keep U nondecreasing in utility and nonincreasing in
    both costs; the default (1, 1, 1) is the plain additive form.
    """

    w_u: float = 1.0
    w_1: float = 1.0
    w_2: float = 1.0


@dataclass(frozen=True)
class AgentSpec:
    """One agent's primitives.

    ``beliefs`` holds one finite random variable per other agent (a single
    entry standing for the whole society in single-agent problems).
    """

    utility: UtilityFunction
    c1: CostFunction
    c2: CostFunction
    beliefs: tuple[FiniteRandomVariable, ...]
    form: ComprehensiveUtilityForm = field(default_factory=ComprehensiveUtilityForm)


@dataclass(frozen=True)
class MeanChoice:
    """Reference point = arithmetic mean of the other agents' choices."""


@dataclass(frozen=True)
class WeightedChoice:
    """Reference point = weighted mean of the others' choices.

    ``weights`` has one entry per agent (self included); for agent ``i`` the
    entries over ``j != i`` are renormalized to sum to one.
    """

    weights: tuple[float, ...]


ChoiceAggregator = Union[MeanChoice, WeightedChoice]


@dataclass(frozen=True)
class BeliefMixture:
    """Reference belief = mixture of the agent's per-opponent beliefs.

    ``weights`` aligns positionally with each agent's belief list (length
    ``n - 1``); ``None`` means the uniform mixture.
    """

    weights: tuple[float, ...] | None = None


@dataclass(frozen=True)
class GameSpec:
    """An n-agent game: agents plus the choice/belief aggregators and the
    common strategy bound ``x_max``."""

    agents: tuple[AgentSpec, ...]
    x_max: float
    choice_aggregator: ChoiceAggregator = field(default_factory=MeanChoice)
    belief_aggregator: BeliefMixture = field(default_factory=BeliefMixture)

    @property
    def n(self) -> int:
        return len(self.agents)


# ---------------------------------------------------------------------------
# evaluation


def eval_utility(u: UtilityFunction, x: float) -> float:
    """Personal utility at ``x >= 0``.

    Tabulated utilities are defined only on their grid points.
    """
    if x < 0:
        raise DomainError(f"utility argument must be nonnegative, got {x}")
    if isinstance(u, Quadratic):
        return -u.a * x * x + u.b * x + u.k
    return u.values[u.grid.index_of(x)]


def utility_values(u: UtilityFunction, grid: Grid) -> np.ndarray:
    """Vector of utility values on every grid point."""
    if isinstance(u, Quadratic):
        pts = grid.points
        return -u.a * pts * pts + u.b * pts + u.k
    if u.grid != grid:
        raise GridLookupError("tabulated utility is bound to a different grid")
    return np.asarray(u.values, dtype=float)


def eval_cost(c: CostFunction, delta) -> float | np.ndarray:
    """Distance cost at ``delta >= 0``; accepts scalars or arrays."""
    if isinstance(c, ZeroCost):
        return np.zeros_like(delta, dtype=float) if isinstance(delta, np.ndarray) else 0.0
    if isinstance(c, LinearCost):
        return c.d * delta
    return c.d * delta**c.p


def cost_values_at(c: CostFunction, grid: Grid, reference: float) -> np.ndarray:
    """Vector of ``c(|x - reference|)`` over every grid point."""
    return np.asarray(eval_cost(c, np.abs(grid.points - reference)), dtype=float)


def cost_is_strictly_increasing(c: CostFunction) -> bool:
    if isinstance(c, ZeroCost):
        return False
    return c.d > 0


def personal_optimum(u: UtilityFunction, grid: Grid) -> float:
    """Maximizer of the personal utility alone, clamped to ``[0, x_max]``."""
    if isinstance(u, Quadratic):
        return min(max(u.peak, 0.0), grid.x_max)
    return u.peak


def rv_mean(v: FiniteRandomVariable) -> float:
    """Probability-weighted mean of a finite-support belief."""
    return v.mean()


def belief_mean(agent: AgentSpec) -> float:
    """Mean of the uniform mixture of the agent's own beliefs."""
    return float(np.mean([b.mean() for b in agent.beliefs]))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    """One violated invariant, with a stable machine-readable code."""

    code: str
    message: str


def _check(violations: list[Violation], ok: bool, code: str, message: str) -> None:
    if not ok:
        violations.append(Violation(code, message))


def _validate_utility(u: UtilityFunction, out: list[Violation], where: str) -> None:
    if isinstance(u, Quadratic):
        _check(out, u.a > 0, "NonPositiveCurvature", f"{where}: quadratic needs a > 0, got a={u.a}")
        _check(out, math.isfinite(u.a) and math.isfinite(u.b) and math.isfinite(u.k),
               "NonFiniteParameter", f"{where}: quadratic coefficients must be finite")
        return
    vals = u.values
    if len(vals) != u.grid.steps + 1:
        out.append(Violation("TabulationLengthMismatch",
                             f"{where}: {len(vals)} values on a grid of {u.grid.steps + 1} points"))
        return
    if len(vals) == 0:
        out.append(Violation("EmptyTabulation", f"{where}: no values"))
        return
    peak = int(np.argmax(vals))
    increasing = all(vals[j] < vals[j + 1] for j in range(peak))
    decreasing = all(vals[j] > vals[j + 1] for j in range(peak, len(vals) - 1))
    _check(out, increasing and decreasing, "NotQuasiconcave",
           f"{where}: values must rise strictly to a unique peak then fall strictly")


def _validate_cost(c: CostFunction, out: list[Violation], where: str) -> None:
    if isinstance(c, ZeroCost):
        return
    _check(out, c.d >= 0, "NegativeCostSlope", f"{where}: d must be >= 0, got {c.d}")
    if isinstance(c, PowerCost):
        _check(out, c.p >= 1, "SubunitPowerExponent", f"{where}: p must be >= 1, got {c.p}")


def _validate_rv(v: FiniteRandomVariable, out: list[Violation], where: str) -> None:
    if not v.atoms:
        out.append(Violation("EmptyAtoms", f"{where}: belief has no atoms"))
        return
    values = [a[0] for a in v.atoms]
    _check(out, all(x >= 0 for x in values), "NegativeAtomValue", f"{where}: atom values must be nonnegative")
    _check(out, len(set(values)) == len(values), "DuplicateAtomValue", f"{where}: atom values must be distinct")
    _check(out, all(0 < p <= 1 for _, p in v.atoms), "AtomProbabilityOutOfRange",
           f"{where}: atom probabilities must lie in (0, 1]")
    mass = sum(p for _, p in v.atoms)
    _check(out, abs(mass - 1.0) <= EXACT_TOL, "ProbabilityMassNotOne",
           f"{where}: probabilities sum to {mass!r}")
    _check(out, math.isfinite(v.mean()), "NonFiniteMean", f"{where}: mean is not finite")


def _validate_form(f: ComprehensiveUtilityForm, out: list[Violation], where: str) -> None:
    _check(out, f.w_u >= 0 and f.w_1 >= 0 and f.w_2 >= 0, "NegativeWeight",
           f"{where}: weights must be nonnegative, got ({f.w_u}, {f.w_1}, {f.w_2})")


def _validate_grid(g: Grid, out: list[Violation], where: str) -> None:
    _check(out, g.x_max > 0, "NonPositiveBound", f"{where}: x_max must be > 0, got {g.x_max}")
    _check(out, g.steps >= 1, "NonPositiveSteps", f"{where}: steps must be >= 1, got {g.steps}")


def _validate_agent(a: AgentSpec, out: list[Violation], where: str) -> None:
    _validate_utility(a.utility, out, f"{where}.utility")
    _validate_cost(a.c1, out, f"{where}.c1")
    _validate_cost(a.c2, out, f"{where}.c2")
    _validate_form(a.form, out, f"{where}.form")
    _check(out, len(a.beliefs) > 0, "MissingBeliefs", f"{where}: beliefs must be nonempty")
    for bi, b in enumerate(a.beliefs):
        _validate_rv(b, out, f"{where}.beliefs[{bi}]")


def _validate_game(g: GameSpec, out: list[Violation]) -> None:
    _check(out, g.n >= 2, "TooFewAgents", f"game needs n >= 2 agents, got {g.n}")
    _check(out, g.x_max > 0, "NonPositiveBound", f"game: x_max must be > 0, got {g.x_max}")
    for i, a in enumerate(g.agents):
        _validate_agent(a, out, f"agents[{i}]")
        if g.n >= 2:
            _check(out, len(a.beliefs) == g.n - 1, "BeliefCountMismatch",
                   f"agents[{i}]: {len(a.beliefs)} beliefs for {g.n - 1} opponents")
    if isinstance(g.choice_aggregator, WeightedChoice):
        w = g.choice_aggregator.weights
        ok = len(w) == g.n and all(x >= 0 for x in w) and abs(sum(w) - 1.0) <= EXACT_TOL
        _check(out, ok, "AggregatorWeightsInvalid",
               f"choice weights must be {g.n} nonnegative values summing to 1")
    bw = g.belief_aggregator.weights
    if bw is not None:
        ok = len(bw) == g.n - 1 and all(x >= 0 for x in bw) and abs(sum(bw) - 1.0) <= EXACT_TOL
        _check(out, ok, "AggregatorWeightsInvalid",
               f"belief mixture weights must be {g.n - 1} nonnegative values summing to 1")


def validate(spec) -> list[Violation]:
    """Collect every violated invariant of a model object.

    Accepts any of the model types (utility, cost, belief, form, grid, agent,
    game).  An empty list means the object is well-formed; violations are
    returned rather than raised so callers can report all of them.
    """
    out: list[Violation] = []
    if isinstance(spec, GameSpec):
        _validate_game(spec, out)
    elif isinstance(spec, AgentSpec):
        _validate_agent(spec, out, "agent")
    elif isinstance(spec, (Quadratic, Tabulated)):
        _validate_utility(spec, out, "utility")
    elif isinstance(spec, (ZeroCost, LinearCost, PowerCost)):
        _validate_cost(spec, out, "cost")
    elif isinstance(spec, FiniteRandomVariable):
        _validate_rv(spec, out, "belief")
    elif isinstance(spec, ComprehensiveUtilityForm):
        _validate_form(spec, out, "form")
    elif isinstance(spec, Grid):
        _validate_grid(spec, out, "grid")
    else:
        raise TypeError(f"cannot validate object of type {type(spec).__name__}")
    return out


def require_valid(spec) -> None:
    """Raise ``SpecValidationError`` if ``validate`` finds anything."""
    violations = validate(spec)
    if violations:
        raise SpecValidationError(violations)
