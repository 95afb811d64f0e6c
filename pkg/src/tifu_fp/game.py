"""Static 2x2 game with entropy-smoothed payoffs.

Strategy types, payoff validation, smoothed utility, the logit (soft-max)
best response and the bisection solver for the unique equilibrium.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

SIMPLEX_ATOL = 1e-12


class GameError(ValueError):
    """Invalid game parameters (non-finite payoffs, non-positive smoothing)."""


class AssumptionError(ValueError):
    """The game violates the attacker/defender sign structure."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("payoff sign structure violated: " + ", ".join(self.violations))


def logistic(z: float) -> float:
    # overflow-safe for either sign of z
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@dataclass(frozen=True, slots=True)
class MixedStrategy:
    """A point of the probability simplex over two actions."""

    first: float
    second: float

    def __post_init__(self):
        if not (math.isfinite(self.first) and math.isfinite(self.second)):
            raise ValueError(f"non-finite strategy ({self.first}, {self.second})")
        if self.first < 0.0 or self.second < 0.0:
            raise ValueError(f"negative probability in ({self.first}, {self.second})")
        if abs(self.first + self.second - 1.0) > SIMPLEX_ATOL:
            raise ValueError(f"({self.first}, {self.second}) does not sum to 1")

    @classmethod
    def from_first(cls, first: float) -> MixedStrategy:
        return cls(float(first), 1.0 - float(first))

    @classmethod
    def uniform(cls) -> MixedStrategy:
        return cls(0.5, 0.5)

    def as_array(self) -> np.ndarray:
        return np.array([self.first, self.second])

    def __iter__(self):
        yield self.first
        yield self.second


class PureAction(enum.IntEnum):
    ACTION1 = 1
    ACTION2 = 2

    def as_strategy(self) -> MixedStrategy:
        return MixedStrategy(1.0, 0.0) if self is PureAction.ACTION1 else MixedStrategy(0.0, 1.0)

    @property
    def indicator(self) -> float:
        """Weight this action puts on the first action (1.0 or 0.0)."""
        return 1.0 if self is PureAction.ACTION1 else 0.0


@dataclass(frozen=True, slots=True)
class PayoffMatrix:
    """2x2 payoffs; rows index the owner's action, columns the opponent's.

    Entries are stored by position: ``[[a, b], [c, d]]``.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.a, self.b, self.c, self.d)):
            raise GameError(f"non-finite payoff in {self}")

    @classmethod
    def from_rows(cls, rows) -> PayoffMatrix:
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True, slots=True)
class PlayerView:
    """Everything one player knows: its own payoffs and smoothing weight.

    The first-action probability of the smoothed best response to an opponent
    playing action 1 with probability ``x`` is ``logistic((slope * x + offset) / tau)``.
    """

    matrix: PayoffMatrix
    tau: float
    slope: float = field(init=False)
    offset: float = field(init=False)

    def __post_init__(self):
        m = self.matrix
        # payoff advantage of action 1: (a - c) x + (b - d)(1 - x)
        object.__setattr__(self, "offset", m.b - m.d)
        object.__setattr__(self, "slope", (m.a - m.c) - (m.b - m.d))

    def respond(self, x: float) -> float:
        return logistic((self.slope * x + self.offset) / self.tau)


@dataclass(frozen=True, slots=True)
class GameSpec:
    """Attacker (player 1) and defender (player 2) payoffs plus entropy weights."""

    m1: PayoffMatrix
    m2: PayoffMatrix
    tau1: float
    tau2: float

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            tau = getattr(self, name)
            if not (math.isfinite(tau) and tau > 0.0):
                raise GameError(f"{name} must be a positive finite number, got {tau}")

    @classmethod
    def from_rows(cls, m1, m2, tau1: float, tau2: float) -> GameSpec:
        return cls(PayoffMatrix.from_rows(m1), PayoffMatrix.from_rows(m2), float(tau1), float(tau2))

    def matrix(self, player: int) -> PayoffMatrix:
        return {1: self.m1, 2: self.m2}[_check_player(player)]

    def tau(self, player: int) -> float:
        return {1: self.tau1, 2: self.tau2}[_check_player(player)]

    def player(self, player: int) -> PlayerView:
        return PlayerView(self.matrix(player), self.tau(player))

    def with_taus(self, tau1: float, tau2: float) -> GameSpec:
        return GameSpec(self.m1, self.m2, tau1, tau2)


def _check_player(player: int) -> int:
    if player not in (1, 2):
        raise ValueError(f"player must be 1 or 2, got {player!r}")
    return player


@dataclass(frozen=True)
class AssumptionCheck:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def check_assumption(spec: GameSpec) -> AssumptionCheck:
    """Check the attacker/defender sign structure a<c, b>d, e>f, g<h.

    The defender matrix is written ``[[e, g], [f, h]]``, so ``e > f`` and
    ``g < h`` compare entries within a column.
    """
    m1, m2 = spec.m1, spec.m2
    conditions = (
        ("a<c", m1.a < m1.c),
        ("b>d", m1.b > m1.d),
        ("e>f", m2.a > m2.c),
        ("g<h", m2.b < m2.d),
    )
    return AssumptionCheck(tuple(name for name, holds in conditions if not holds))


def require_assumption(spec: GameSpec) -> None:
    result = check_assumption(spec)
    if not result.ok:
        raise AssumptionError(result.violations)


def entropy(p: MixedStrategy) -> float:
    """Shannon entropy in nats, with 0 log 0 taken as 0."""
    return -sum(x * math.log(x) for x in p if x > 0.0)


def utility(spec: GameSpec, player: int, p_own: MixedStrategy, p_opp: MixedStrategy) -> float:
    """Expected bilinear payoff plus the entropy bonus ``tau * H(p_own)``."""
    m = spec.matrix(player)
    bilinear = (
        p_own.first * (m.a * p_opp.first + m.b * p_opp.second)
        + p_own.second * (m.c * p_opp.first + m.d * p_opp.second)
    )
    return bilinear + spec.tau(player) * entropy(p_own)


def soft_max(x) -> MixedStrategy:
    """Two-component soft-max.

    Evaluated as a logistic of the difference, which equals the max-shifted
    form. For a gap beyond roughly 745 the smaller component underflows to 0.
    """
    x1, x2 = (float(v) for v in x)
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise ValueError(f"soft_max needs finite input, got ({x1}, {x2})")
    gap = x1 - x2
    return MixedStrategy(logistic(gap), logistic(-gap))


def best_response(spec: GameSpec, player: int, r_opp: MixedStrategy) -> MixedStrategy:
    """Smoothed best response ``softmax(M r_opp / tau)``."""
    m = spec.matrix(player)
    tau = spec.tau(player)
    return soft_max(((m.a * r_opp.first + m.b * r_opp.second) / tau,
                     (m.c * r_opp.first + m.d * r_opp.second) / tau))


def best_response_gap(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy) -> float:
    """Max-norm of ``r - beta(r)`` over both players."""
    b1 = best_response(spec, 1, r2)
    b2 = best_response(spec, 2, r1)
    return max(abs(r1.first - b1.first), abs(r1.second - b1.second),
               abs(r2.first - b2.first), abs(r2.second - b2.second))


def verify_equilibrium(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy,
                       grid: int = 1000, atol: float = 1e-9) -> bool:
    """Check the equilibrium inequalities on a uniform simplex grid.

    A pair passes when no grid deviation improves either player's smoothed
    utility by more than ``atol`` and the best-response residual is within
    ``atol``.
    """
    p = np.linspace(0.0, 1.0, grid + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p > 0, p * np.log(p), 0.0) + np.where(p < 1, (1 - p) * np.log1p(-p), 0.0))
    for player, own, opp in ((1, r1, r2), (2, r2, r1)):
        m = spec.matrix(player)
        row1 = m.a * opp.first + m.b * opp.second
        row2 = m.c * opp.first + m.d * opp.second
        deviations = p * row1 + (1 - p) * row2 + spec.tau(player) * h
        if deviations.max() > utility(spec, player, own, opp) + atol:
            return False
    return best_response_gap(spec, r1, r2) <= atol


@dataclass(frozen=True)
class EquilibriumReport:
    rbar1: MixedStrategy
    rbar2: MixedStrategy
    residual: float
    eta0: float
    spectral_radius_at_eta0: float


def solve_equilibrium(spec: GameSpec, tol: float = 1e-12) -> EquilibriumReport:
    """Find the unique smoothed equilibrium by bisection.

    Under the sign structure the attacker's response falls and the defender's
    rises in the opponent's first-action weight, so
    ``x -> beta1(beta2(x)) - x`` is strictly decreasing with a single root in
    [0, 1].
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    require_assumption(spec)
    att, dfd = spec.player(1), spec.player(2)

    def excess(x):
        return att.respond(dfd.respond(x)) - x

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    # secant step inside the final bracket; the composite map's slope would
    # otherwise amplify the bracket width into the residual
    h_lo, h_hi = excess(lo), excess(hi)
    x = 0.5 * (lo + hi)
    if h_lo > 0.0 > h_hi:
        x = min(max(lo - h_lo * (hi - lo) / (h_hi - h_lo), lo), hi)
    rbar2 = soft_max(((spec.m2.a * x + spec.m2.b * (1 - x)) / spec.tau2,
                      (spec.m2.c * x + spec.m2.d * (1 - x)) / spec.tau2))
    rbar1 = best_response(spec, 1, rbar2)
    residual = best_response_gap(spec, rbar1, rbar2)

    from .dynamics import closed_form_threshold, spectral_radius

    eta0 = closed_form_threshold(spec, rbar1, rbar2)
    return EquilibriumReport(rbar1, rbar2, residual, eta0,
                             spectral_radius(spec, rbar1, rbar2, eta0))
