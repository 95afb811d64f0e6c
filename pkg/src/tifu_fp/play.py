"""Stochastic fictitious play: sampled actions, frequency bookkeeping and runs.

Each player only ever sees its own :class:`~tifu_fp.game.PlayerView` and the
opponent's observed actions. Runs draw all uniforms up front from
``numpy.random.default_rng(seed)``, two per step (attacker first), which is the
same stream as calling :func:`sample_action` once per player per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .game import (
    GameSpec,
    MixedStrategy,
    PureAction,
    require_assumption,
)


def sample_action(p: MixedStrategy, rng: np.random.Generator) -> PureAction:
    """Draw an action; consumes exactly one uniform from ``rng``."""
    return PureAction.ACTION1 if rng.random() < p.first else PureAction.ACTION2


def empirical_update(q: MixedStrategy, k: int, v: PureAction) -> MixedStrategy:
    """Running mean of actions ``0..k`` from the mean of ``0..k-1``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return v.as_strategy()
    return MixedStrategy.from_first(k / (k + 1) * q.first + v.indicator / (k + 1))


def estimate_update(r: MixedStrategy, v: PureAction, eta: float, k: int) -> MixedStrategy:
    """Exponentially smoothed estimate; the first observation replaces the prior."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if k == 0:
        return v.as_strategy()
    return MixedStrategy.from_first((1 - eta) * r.first + eta * v.indicator)


def expand_estimate(actions: Sequence[PureAction], eta: float) -> MixedStrategy:
    """Closed-form smoothed estimate after observing ``actions``.

    The oldest action carries weight ``(1-eta)**(k-1)``, action ``j >= 1``
    carries ``eta (1-eta)**(k-1-j)``.
    """
    k = len(actions)
    if k == 0:
        raise ValueError("need at least one action")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    weights = estimate_weights(k, eta)
    x = np.array([a.indicator for a in actions])
    return MixedStrategy.from_first(float(weights @ x))


def estimate_weights(k: int, eta: float) -> np.ndarray:
    """Weight of each past action ``v(0..k-1)`` in the estimate ``r(k)``."""
    j = np.arange(k)
    w = eta * (1 - eta) ** (k - 1 - j)
    w[0] = (1 - eta) ** (k - 1)
    return w


def reconstruct_empirical(estimates: Sequence[MixedStrategy], eta: float) -> MixedStrategy:
    """Empirical mean of actions ``0..k`` recovered from estimates ``r(1..k+1)``."""
    n = len(estimates)
    if n < 2:
        raise ValueError("need estimates r(1) .. r(k+1) with k >= 1")
    x = np.array([r.first for r in estimates])
    total = (2 * eta - 1) / eta * x[0] + x[1:-1].sum() + x[-1] / eta
    return MixedStrategy.from_first(total / n)


def window_stddev(values) -> float:
    """Unbiased sample standard deviation."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two values")
    return float(np.std(x, ddof=1))


@dataclass(frozen=True)
class AfpConfig:
    eta_initial: float = 0.1
    eta_min: float = 0.0005
    window: int = 50

    def __post_init__(self):
        if not 0.0 < self.eta_min <= self.eta_initial < 1.0:
            raise ValueError("need 0 < eta_min <= eta_initial < 1")
        if self.window < 2:
            raise ValueError("window must be >= 2")


@dataclass(frozen=True)
class TraceRecord:
    k: int
    action1: PureAction
    action2: PureAction
    r1: Optional[MixedStrategy]
    r2: Optional[MixedStrategy]
    q1: MixedStrategy
    q2: MixedStrategy
    beta1: MixedStrategy
    beta2: MixedStrategy
    eta: float
    eta2: float


def _opt(x):
    return None if math.isnan(x) else MixedStrategy.from_first(x)


@dataclass
class RunResult:
    """Columnar trace of a stochastic run (first components only).

    Row ``i`` describes step ``k[i]``: the actions played, the best responses
    they were drawn from, and the estimates ``r`` and empirical means ``q``
    after absorbing those actions. ``r1`` is the defender's estimate of the
    attacker and ``r2`` the attacker's estimate of the defender. ``eta`` is the
    step size the attacker applies to ``r2`` and ``eta2`` the defender's for
    ``r1``; under the 1/k schedule both are ``1/(k+1)``.
    """

    mode: str
    seed: int
    steps: int
    stride: int
    k: np.ndarray
    action1: np.ndarray
    action2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    eta: np.ndarray
    eta2: np.ndarray
    final_q: tuple[MixedStrategy, MixedStrategy]
    final_r: Optional[tuple[MixedStrategy, MixedStrategy]]

    def __len__(self):
        return len(self.k)

    def record(self, i: int) -> TraceRecord:
        return TraceRecord(
            int(self.k[i]), PureAction(int(self.action1[i])), PureAction(int(self.action2[i])),
            _opt(self.r1[i]), _opt(self.r2[i]),
            MixedStrategy.from_first(self.q1[i]), MixedStrategy.from_first(self.q2[i]),
            MixedStrategy.from_first(self.beta1[i]), MixedStrategy.from_first(self.beta2[i]),
            float(self.eta[i]), float(self.eta2[i]),
        )

    def records(self):
        return [self.record(i) for i in range(len(self.k))]

    def as_columns(self) -> dict:
        return {
            "k": self.k, "action1": self.action1, "action2": self.action2,
            "r1_1": self.r1, "r2_1": self.r2, "q1_1": self.q1, "q2_1": self.q2,
            "beta1_1": self.beta1, "beta2_1": self.beta2, "eta": self.eta,
        }


def _play(spec, steps, seed, mode, *, eta=None, cfg=None, initial_actions=None,
          fixed=(None, None), stride=1, check=True):
    if check:
        require_assumption(spec)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if mode == "tifu" and not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    att, dfd = spec.player(1), spec.player(2)
    fix1 = None if fixed[0] is None else fixed[0].first
    fix2 = None if fixed[1] is None else fixed[1].first

    u = np.random.default_rng(seed).random((steps, 2)).tolist()
    smoothed = mode in ("tifu", "afp")
    # est_x: defender's estimate of the attacker, est_y: attacker's estimate of the defender
    est_x = est_y = 0.5
    qx = qy = 0.0
    if mode == "afp":
        eta_att = eta_dfd = cfg.eta_initial
        window = cfg.window
        hist_x, hist_y = [], []
        prev_sd_x = prev_sd_y = None
    elif mode == "tifu":
        eta_att = eta_dfd = eta

    rows = []
    nan = float("nan")
    for k in range(steps):
        bx = fix1 if fix1 is not None else att.respond(est_y)
        by = fix2 if fix2 is not None else dfd.respond(est_x)
        u1, u2 = u[k]
        if k == 0 and initial_actions is not None:
            x = initial_actions[0].indicator
            y = initial_actions[1].indicator
        else:
            x = 1.0 if u1 < bx else 0.0
            y = 1.0 if u2 < by else 0.0

        if mode == "afp":
            hist_x.append(est_x)
            hist_y.append(est_y)
            if k >= window and k % window == 0:
                # attacker watches its estimate of the defender and vice versa
                sd_y = float(np.std(hist_y[-window:], ddof=1))
                sd_x = float(np.std(hist_x[-window:], ddof=1))
                if prev_sd_y is not None and sd_y < prev_sd_y:
                    eta_att = max(0.5 * eta_att, cfg.eta_min)
                if prev_sd_x is not None and sd_x < prev_sd_x:
                    eta_dfd = max(0.5 * eta_dfd, cfg.eta_min)
                prev_sd_x, prev_sd_y = sd_x, sd_y
                del hist_x[:-window], hist_y[:-window]

        qx = k / (k + 1) * qx + x / (k + 1)
        qy = k / (k + 1) * qy + y / (k + 1)
        if smoothed:
            if k == 0:
                est_x, est_y = x, y
            else:
                est_x = (1 - eta_dfd) * est_x + eta_dfd * x
                est_y = (1 - eta_att) * est_y + eta_att * y
            ea, ed = eta_att, eta_dfd
        else:
            est_x, est_y = qx, qy
            ea = ed = 1.0 / (k + 1)

        if k % stride == 0 or k == steps - 1:
            rows.append((k, 2.0 - x, 2.0 - y,
                         est_x if smoothed else nan, est_y if smoothed else nan,
                         qx, qy, bx, by, ea, ed))

    c = np.array(rows, dtype=float).T
    final_q = (MixedStrategy.from_first(qx), MixedStrategy.from_first(qy))
    final_r = (MixedStrategy.from_first(est_x), MixedStrategy.from_first(est_y)) if smoothed else None
    return RunResult(mode, seed, steps, stride, c[0].astype(np.int64), c[1].astype(np.int64),
                     c[2].astype(np.int64), c[3], c[4], c[5], c[6], c[7], c[8], c[9], c[10],
                     final_q, final_r)


def run_tifu(spec: GameSpec, eta: float, steps: int, seed: int = 0,
             initial_actions: Optional[tuple[PureAction, PureAction]] = None,
             fixed1: Optional[MixedStrategy] = None, fixed2: Optional[MixedStrategy] = None,
             stride: int = 1, check_assumption: bool = True) -> RunResult:
    """Stochastic play with constant-weight exponential smoothing of estimates.

    Both players move simultaneously from pre-step estimates. Without
    ``initial_actions`` the first actions are drawn from the best responses
    to a uniform prior. ``fixed1``/``fixed2`` replace a player by a constant
    mixed strategy.
    """
    return _play(spec, steps, seed, "tifu", eta=eta, initial_actions=initial_actions,
                 fixed=(fixed1, fixed2), stride=stride, check=check_assumption)


def run_tvfu(spec: GameSpec, steps: int, seed: int = 0,
             initial_actions: Optional[tuple[PureAction, PureAction]] = None,
             stride: int = 1, check_assumption: bool = True) -> RunResult:
    """Classical stochastic play: best respond to the opponent's empirical mean."""
    return _play(spec, steps, seed, "tvfu", initial_actions=initial_actions,
                 stride=stride, check=check_assumption)


def run_afp(spec: GameSpec, cfg: AfpConfig, steps: int, seed: int = 0,
            initial_actions: Optional[tuple[PureAction, PureAction]] = None,
            stride: int = 1, check_assumption: bool = True) -> RunResult:
    """Adaptive play: each player halves its own step size (down to
    ``cfg.eta_min``) whenever the windowed standard deviation of its estimate
    of the opponent dropped relative to the previous window.

    Windows close at ``k = T, 2T, ...`` and cover the estimates used at steps
    ``k-T+1..k``; the first closed window only sets the baseline.
    """
    return _play(spec, steps, seed, "afp", cfg=cfg, initial_actions=initial_actions,
                 stride=stride, check=check_assumption)


def run_tifu_ensemble(spec: GameSpec, eta: float, steps: int, seeds: Sequence[int],
                      check_assumption: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`run_tifu` over many seeds.

    Returns the estimate paths ``(r1, r2)``, each of shape
    ``(len(seeds), steps)``; column ``k`` holds ``r(k+1)``. Uses the same
    per-seed random streams as :func:`run_tifu`.
    """
    if check_assumption:
        require_assumption(spec)
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    att, dfd = spec.player(1), spec.player(2)
    u = np.stack([np.random.default_rng(s).random((steps, 2)) for s in seeds])
    n = len(seeds)
    est_x = np.full(n, 0.5)
    est_y = np.full(n, 0.5)
    out_x = np.empty((n, steps))
    out_y = np.empty((n, steps))
    for k in range(steps):
        bx = _logistic_array((att.slope * est_y + att.offset) / att.tau)
        by = _logistic_array((dfd.slope * est_x + dfd.offset) / dfd.tau)
        x = (u[:, k, 0] < bx).astype(float)
        y = (u[:, k, 1] < by).astype(float)
        if k == 0:
            est_x, est_y = x, y
        else:
            est_x = (1 - eta) * est_x + eta * x
            est_y = (1 - eta) * est_y + eta * y
        out_x[:, k] = est_x
        out_y[:, k] = est_y
    return out_x, out_y


def _logistic_array(z: np.ndarray) -> np.ndarray:
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


def settling_step(series: np.ndarray, target: float, band: float) -> int:
    """First index after which ``series`` stays within ``band`` of ``target``.

    Returns ``len(series)`` when the series ends outside the band.
    """
    outside = np.flatnonzero(np.abs(np.asarray(series) - target) > band)
    return 0 if outside.size == 0 else int(outside[-1]) + 1
