"""Deterministic mean dynamics and their local stability.

The state of the mean dynamic is the pair of first-action weights
``(r1, r2)``; the second components follow from the simplex constraint.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .game import (
    EquilibriumReport,
    GameSpec,
    MixedStrategy,
    best_response,
    solve_equilibrium,
)


class StabilityConsistencyError(RuntimeError):
    """Closed-form threshold and eigenvalue crossing disagree."""


def _check_eta(eta: float) -> float:
    if not 0.0 < eta < 1.0:
        raise ValueError(f"step size must lie in (0, 1), got {eta}")
    return float(eta)


@dataclass(frozen=True)
class MeanState:
    r1: MixedStrategy
    r2: MixedStrategy
    q1: Optional[MixedStrategy] = None
    q2: Optional[MixedStrategy] = None
    k: int = 0

    @classmethod
    def uniform(cls, track_empirical: bool = True) -> MeanState:
        u = MixedStrategy.uniform()
        return cls(u, u, u if track_empirical else None, u if track_empirical else None, 0)


def tifu_mean_step(spec: GameSpec, state: MeanState, eta: float) -> MeanState:
    """One simultaneous step ``r_i <- (1 - eta) r_i + eta beta_i(r_-i)``.

    Empirical means, when tracked, absorb the best responses with weight
    ``1/(k+1)``.
    """
    eta = _check_eta(eta)
    b1 = best_response(spec, 1, state.r2)
    b2 = best_response(spec, 2, state.r1)
    r1 = MixedStrategy.from_first((1 - eta) * state.r1.first + eta * b1.first)
    r2 = MixedStrategy.from_first((1 - eta) * state.r2.first + eta * b2.first)
    q1 = q2 = None
    if state.q1 is not None and state.q2 is not None:
        k = state.k
        q1 = MixedStrategy.from_first(k / (k + 1) * state.q1.first + b1.first / (k + 1))
        q2 = MixedStrategy.from_first(k / (k + 1) * state.q2.first + b2.first / (k + 1))
    return MeanState(r1, r2, q1, q2, state.k + 1)


@dataclass
class MeanTrajectory:
    """Recorded first components of a mean-dynamic run.

    ``beta1``/``beta2`` hold the best responses computed from the state at
    each recorded step, ``eta`` the constant step size.
    """

    k: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    eta: float
    stride: int = 1

    def __len__(self):
        return len(self.k)

    def states(self):
        for i in range(len(self.k)):
            q1 = None if np.isnan(self.q1[i]) else MixedStrategy.from_first(self.q1[i])
            q2 = None if np.isnan(self.q2[i]) else MixedStrategy.from_first(self.q2[i])
            yield MeanState(MixedStrategy.from_first(self.r1[i]),
                            MixedStrategy.from_first(self.r2[i]), q1, q2, int(self.k[i]))

    def as_columns(self) -> dict:
        n = len(self.k)
        empty = np.full(n, np.nan)
        return {
            "k": self.k, "action1": empty, "action2": empty,
            "r1_1": self.r1, "r2_1": self.r2, "q1_1": self.q1, "q2_1": self.q2,
            "beta1_1": self.beta1, "beta2_1": self.beta2, "eta": np.full(n, self.eta),
        }


@dataclass
class MeanRun:
    trajectory: MeanTrajectory
    final: MeanState
    converged: bool
    steps_used: int
    oscillating: bool
    fixed_point: tuple[MixedStrategy, MixedStrategy]


def iterate_mean(spec: GameSpec, initial: MeanState, eta: float, max_steps: int = 100_000,
                 tol: float = 1e-8, stride: int = 1,
                 fixed_point: Optional[tuple[MixedStrategy, MixedStrategy]] = None,
                 oscillation_window: int = 100, oscillation_gap: float = 0.01) -> MeanRun:
    """Iterate the mean dynamic until it is within ``tol`` of the equilibrium.

    Distance is the max-norm on ``(r1, r2)`` first components. ``oscillating``
    is set for a non-converged run whose distance exceeded
    ``oscillation_gap`` at least once in the last ``oscillation_window`` steps.
    """
    eta = _check_eta(eta)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if fixed_point is None:
        rep = solve_equilibrium(spec)
        fixed_point = (rep.rbar1, rep.rbar2)
    x_bar, y_bar = fixed_point[0].first, fixed_point[1].first
    att, dfd = spec.player(1), spec.player(2)

    x, y = initial.r1.first, initial.r2.first
    track = initial.q1 is not None and initial.q2 is not None
    qx = initial.q1.first if track else float("nan")
    qy = initial.q2.first if track else float("nan")
    k = initial.k
    rows = []
    recent = deque(maxlen=oscillation_window)
    keep = 1.0 - eta

    dist = max(abs(x - x_bar), abs(y - y_bar))
    recent.append(dist)
    steps = 0
    converged = dist < tol
    while not converged and steps < max_steps:
        bx = att.respond(y)
        by = dfd.respond(x)
        if steps % stride == 0:
            rows.append((k, x, y, qx, qy, bx, by))
        x, y = keep * x + eta * bx, keep * y + eta * by
        if track:
            qx = k / (k + 1) * qx + bx / (k + 1)
            qy = k / (k + 1) * qy + by / (k + 1)
        k += 1
        steps += 1
        dist = max(abs(x - x_bar), abs(y - y_bar))
        recent.append(dist)
        converged = dist < tol
    rows.append((k, x, y, qx, qy, att.respond(y), dfd.respond(x)))

    cols = np.array(rows, dtype=float).T
    traj = MeanTrajectory(cols[0].astype(np.int64), cols[1], cols[2], cols[3], cols[4],
                          cols[5], cols[6], eta, stride)
    final = MeanState(MixedStrategy.from_first(x), MixedStrategy.from_first(y),
                      MixedStrategy.from_first(qx) if track else None,
                      MixedStrategy.from_first(qy) if track else None, k)
    oscillating = (not converged) and max(recent) > oscillation_gap
    return MeanRun(traj, final, converged, steps, oscillating, fixed_point)


@dataclass
class FlowTrajectory:
    t: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    dt: float

    def __len__(self):
        return len(self.t)

    def as_columns(self) -> dict:
        n = len(self.t)
        empty = np.full(n, np.nan)
        return {
            "k": np.arange(n), "action1": empty, "action2": empty,
            "r1_1": self.p1, "r2_1": self.p2, "q1_1": empty, "q2_1": empty,
            "beta1_1": empty, "beta2_1": empty, "eta": np.full(n, self.dt),
        }


def continuous_flow(spec: GameSpec, initial: tuple[MixedStrategy, MixedStrategy],
                    t_end: float, dt: float, method: str = "rk4",
                    stride: int = 1) -> FlowTrajectory:
    """Integrate ``dp_i/dt = beta_i(p_-i) - p_i`` with a fixed step.

    ``method="euler"`` reproduces the mean dynamic with ``eta = dt`` step for
    step. The step count is ``round(t_end / dt)``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end >= 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    if method not in ("euler", "rk4"):
        raise ValueError(f"unknown method {method!r}")
    att, dfd = spec.player(1), spec.player(2)

    def field(x, y):
        return att.respond(y) - x, dfd.respond(x) - y

    n = int(round(t_end / dt))
    x, y = initial[0].first, initial[1].first
    ts, xs, ys = [0.0], [x], [y]
    keep = 1.0 - dt
    for i in range(1, n + 1):
        if method == "euler":
            # same affine form as the mean dynamic
            x, y = keep * x + dt * att.respond(y), keep * y + dt * dfd.respond(x)
        else:
            k1x, k1y = field(x, y)
            k2x, k2y = field(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y)
            k3x, k3y = field(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y)
            k4x, k4y = field(x + dt * k3x, y + dt * k3y)
            x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            y += dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        if i % stride == 0 or i == n:
            ts.append(i * dt)
            xs.append(x)
            ys.append(y)
    return FlowTrajectory(np.array(ts), np.array(xs), np.array(ys), dt)


def jacobian_at(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy, eta: float) -> np.ndarray:
    """Jacobian of the mean map with respect to ``(r1[0], r2[0])``.

    Off-diagonals are ``eta * d beta_i / d r_-i`` with the logistic derivative
    ``(slope / tau) * beta (1 - beta)``; at the equilibrium ``beta_i = r_i``.
    """
    att, dfd = spec.player(1), spec.player(2)
    b1 = best_response(spec, 1, r2)
    b2 = best_response(spec, 2, r1)
    return np.array([
        [1.0 - eta, eta * att.slope / att.tau * b1.first * b1.second],
        [eta * dfd.slope / dfd.tau * b2.first * b2.second, 1.0 - eta],
    ])


def spectral_radius(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy, eta: float) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(jacobian_at(spec, r1, r2, eta)))))


def coupling_strength(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy) -> float:
    """``[(c-a)+(b-d)][(e-f)+(h-g)] / (tau1 tau2)`` times all four weights."""
    m1, m2 = spec.m1, spec.m2
    gain = ((m1.c - m1.a) + (m1.b - m1.d)) * ((m2.a - m2.c) + (m2.d - m2.b))
    return gain / (spec.tau1 * spec.tau2) * r1.first * r1.second * r2.first * r2.second


def closed_form_threshold(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy) -> float:
    """Largest stable constant step size, ``2 / (1 + coupling)``."""
    return 2.0 / (coupling_strength(spec, r1, r2) + 1.0)


def eigenvalue_crossing(spec: GameSpec, r1: MixedStrategy, r2: MixedStrategy,
                        tol: float = 1e-13, upper: float = 4.0) -> float:
    """Step size where the Jacobian's spectral radius reaches 1, by bisection.

    Uses numerical eigenvalues only. The radius is below 1 for small positive
    steps and above 1 at ``upper`` for any game with the sign structure.
    """
    lo, hi = 1e-9, upper
    if spectral_radius(spec, r1, r2, lo) >= 1.0 or spectral_radius(spec, r1, r2, hi) <= 1.0:
        raise StabilityConsistencyError("spectral radius does not bracket 1 on the search interval")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if spectral_radius(spec, r1, r2, mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class StabilityReport:
    eta0: float
    eta0_crossing: float
    eta: float
    jacobian: np.ndarray
    eigenvalue_moduli: tuple[float, float]
    stable: bool


def stability_threshold(spec: GameSpec, fixed_point=None, eta: Optional[float] = None,
                        consistency_tol: float = 1e-4) -> StabilityReport:
    """Local stability of the mean dynamic at the equilibrium.

    ``fixed_point`` may be an :class:`EquilibriumReport`, a ``(r1, r2)`` pair
    or ``None`` (solved here). The Jacobian is evaluated at ``eta`` when given,
    otherwise at the threshold itself, where the linearisation is not
    asymptotically stable.
    """
    if fixed_point is None:
        fixed_point = solve_equilibrium(spec)
    if isinstance(fixed_point, EquilibriumReport):
        r1, r2 = fixed_point.rbar1, fixed_point.rbar2
    else:
        r1, r2 = fixed_point
    eta0 = closed_form_threshold(spec, r1, r2)
    crossing = eigenvalue_crossing(spec, r1, r2)
    if abs(eta0 - crossing) > consistency_tol:
        raise StabilityConsistencyError(
            f"closed-form threshold {eta0:.8g} vs eigenvalue crossing {crossing:.8g}")
    at = eta0 if eta is None else float(eta)
    jac = jacobian_at(spec, r1, r2, at)
    moduli = np.sort(np.abs(np.linalg.eigvals(jac)))[::-1]
    stable = eta is not None and bool(moduli[0] < 1.0)
    return StabilityReport(eta0, crossing, at, jac, (float(moduli[0]), float(moduli[1])), stable)
