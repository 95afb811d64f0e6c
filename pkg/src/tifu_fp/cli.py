"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 malformed payoff matrix, 4 payoff
sign structure violated, 5 step size outside (0, 1), 6 file I/O error,
7 any other invalid value.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from typing import Optional

from .dynamics import MeanState, continuous_flow, iterate_mean, stability_threshold
from .game import AssumptionError, GameError, GameSpec, MixedStrategy, PayoffMatrix, check_assumption, solve_equilibrium
from .play import AfpConfig, run_afp, run_tifu, run_tvfu
from .reproduce import PRESETS, reproduce
from .traces import TraceIOError, emit_trace, render_svg

EXIT_USAGE = 2
EXIT_MATRIX = 3
EXIT_ASSUMPTION = 4
EXIT_ETA = 5
EXIT_IO = 6
EXIT_INVALID = 7

MODES = ("ne", "threshold", "mean", "flow", "tifu", "tvfu", "afp", "reproduce")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, f"{self.prog}: {message}")


@dataclass
class ExperimentConfig:
    mode: str
    game: Optional[GameSpec] = None
    eta: Optional[float] = None
    steps: int = 10_000
    max_steps: int = 100_000
    tol: float = 1e-8
    seed: int = 0
    afp: Optional[AfpConfig] = None
    out: Optional[str] = None
    svg: Optional[str] = None
    stride: int = 1
    dt: float = 0.01
    t_end: float = 200.0
    method: str = "rk4"
    start: tuple[float, float] = (0.5, 0.5)
    preset: Optional[str] = None
    out_dir: str = "."
    allow_any_game: bool = False


MATRIX_HELP = """\
Payoff matrices are entered row-major as four comma-separated numbers:
  --m1 a,b,c,d  for the attacker matrix [[a, b], [c, d]]
  --m2 e,g,f,h  for the defender matrix [[e, g], [f, h]]
Rows are the owner's actions, columns the opponent's. The games must satisfy
a<c, b>d, e>f, g<h unless --allow-any-game is given. Use --m1=-1,2,3,4 for
values starting with a minus sign.
"""


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tifu-fp",
                     description="Smoothed fictitious play for 2x2 attacker/defender games.",
                     epilog=MATRIX_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="mode", metavar="MODE", parser_class=_Parser)
    sub.required = True

    def game_parser(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=MATRIX_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--m1", required=True, help="attacker payoffs a,b,c,d")
        p.add_argument("--m2", required=True, help="defender payoffs e,g,f,h")
        p.add_argument("--tau1", type=float, required=True, help="attacker entropy weight (> 0)")
        p.add_argument("--tau2", type=float, required=True, help="defender entropy weight (> 0)")
        p.add_argument("--allow-any-game", action="store_true",
                       help="skip the payoff sign-structure check where the method allows it")
        return p

    def outputs(p):
        p.add_argument("--out", help="write the trace as CSV to this path")
        p.add_argument("--svg", help="render first components to this SVG path")
        p.add_argument("--stride", type=int, default=1, help="record every n-th step (default 1)")

    p = game_parser("ne", "solve for the unique smoothed equilibrium and its stability threshold")
    p.add_argument("--tol", type=float, default=1e-12, help="bisection tolerance")

    p = game_parser("threshold", "local stability of the mean dynamic at the equilibrium")
    p.add_argument("--eta", type=float, help="step size to classify (in (0, 1))")

    p = game_parser("mean", "iterate the deterministic mean dynamic")
    p.add_argument("--eta", type=float, required=True, help="constant step size in (0, 1)")
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-8, help="convergence tolerance (max norm)")
    p.add_argument("--start", default="0.5,0.5", help="initial first components r1,r2")
    outputs(p)

    p = game_parser("flow", "integrate the continuous-time best-response flow")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=200.0)
    p.add_argument("--method", choices=("euler", "rk4"), default="rk4")
    p.add_argument("--start", default="0.5,0.5", help="initial first components p1,p2")
    outputs(p)

    for name, help_text in (("tifu", "stochastic play with constant-weight estimates"),
                            ("tvfu", "stochastic play with 1/k-weighted empirical estimates"),
                            ("afp", "adaptive stochastic play with halving step sizes")):
        p = game_parser(name, help_text)
        if name == "tifu":
            p.add_argument("--eta", type=float, required=True, help="step size in (0, 1)")
        elif name == "afp":
            p.add_argument("--eta", type=float, default=0.1, help="initial step size (default 0.1)")
            p.add_argument("--eta-min", type=float, default=0.0005)
            p.add_argument("--window", type=int, default=50)
        p.add_argument("--steps", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        outputs(p)

    p = sub.add_parser("reproduce", help="run a preset on the benchmark game",
                       description="Run a preset on the benchmark game.")
    p.add_argument("preset", choices=PRESETS)
    p.add_argument("--out-dir", default=".", help="directory for CSV and SVG outputs")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _parse_matrix(text: str, flag: str) -> PayoffMatrix:
    parts = text.split(",")
    try:
        values = [float(x) for x in parts]
    except ValueError:
        values = []
    if len(values) != 4 or not all(math.isfinite(v) for v in values):
        raise CliError(EXIT_MATRIX, f"malformed {flag} {text!r}: expected four finite numbers")
    return PayoffMatrix(*values)


def _parse_pair(text: str, flag: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise CliError(EXIT_INVALID, f"malformed {flag} {text!r}: expected two numbers") from None
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise CliError(EXIT_INVALID, f"{flag} values must lie in [0, 1]")
    return a, b


def _check_eta(eta, flag="--eta"):
    if eta is not None and not 0.0 < eta < 1.0:
        raise CliError(EXIT_ETA, f"{flag} must lie in (0, 1), got {eta}")


def parse_args(argv) -> ExperimentConfig:
    """Parse and validate ``argv`` (without the program name)."""
    ns = _build_parser().parse_args(list(argv))
    cfg = ExperimentConfig(mode=ns.mode)
    if ns.mode == "reproduce":
        cfg.preset, cfg.out_dir, cfg.seed = ns.preset, ns.out_dir, ns.seed
        return cfg

    m1 = _parse_matrix(ns.m1, "--m1")
    m2 = _parse_matrix(ns.m2, "--m2")
    try:
        cfg.game = GameSpec(m1, m2, ns.tau1, ns.tau2)
    except GameError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    cfg.allow_any_game = ns.allow_any_game
    # the equilibrium solver and threshold rely on the sign structure
    needs_structure = ns.mode in ("ne", "threshold", "mean") or not ns.allow_any_game
    check = check_assumption(cfg.game)
    if needs_structure and not check.ok:
        raise CliError(EXIT_ASSUMPTION,
                       "payoff sign structure violated: " + ", ".join(check.violations))

    cfg.eta = getattr(ns, "eta", None)
    _check_eta(cfg.eta)
    for name in ("steps", "max_steps", "seed", "stride", "out", "svg", "dt", "t_end",
                 "method", "tol"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if hasattr(ns, "start"):
        cfg.start = _parse_pair(ns.start, "--start")
    if cfg.stride < 1 or cfg.steps < 1 or cfg.max_steps < 1:
        raise CliError(EXIT_INVALID, "--steps, --max-steps and --stride must be >= 1")
    if not cfg.tol > 0:
        raise CliError(EXIT_INVALID, "--tol must be positive")
    if ns.mode == "flow" and not (cfg.dt > 0 and cfg.t_end >= 0):
        raise CliError(EXIT_INVALID, "--dt must be positive and --t-end non-negative")
    if ns.mode == "afp":
        _check_eta(ns.eta_min, "--eta-min")
        try:
            cfg.afp = AfpConfig(ns.eta, ns.eta_min, ns.window)
        except ValueError as exc:
            raise CliError(EXIT_INVALID, str(exc)) from None
    return cfg


def _fmt(p: MixedStrategy) -> str:
    return f"({p.first:.6f}, {p.second:.6f})"


def _write_outputs(cfg: ExperimentConfig, trace, references=None, columns=("r1_1", "r2_1")):
    if cfg.out:
        n = emit_trace(trace, cfg.out)
        print(f"wrote {n} rows to {cfg.out}")
    if cfg.svg:
        render_svg(trace, cfg.svg, columns=columns, references=references,
                   title=f"{cfg.mode} trace")
        print(f"wrote {cfg.svg}")


def _references(game):
    try:
        rep = solve_equilibrium(game)
    except AssumptionError:
        return None
    return {"NE r1": rep.rbar1.first, "NE r2": rep.rbar2.first}


def run(cfg: ExperimentConfig) -> int:
    game = cfg.game
    if cfg.mode == "reproduce":
        result = reproduce(cfg.preset, cfg.out_dir, seed=cfg.seed)
        print(result.text())
        for path in result.files:
            print(f"wrote {path}")
        return 0
    if cfg.mode == "ne":
        rep = solve_equilibrium(game, tol=cfg.tol)
        print(f"rbar1 = {_fmt(rep.rbar1)}")
        print(f"rbar2 = {_fmt(rep.rbar2)}")
        print(f"residual = {rep.residual:.3e}")
        print(f"eta0 = {rep.eta0:.6f}")
        return 0
    if cfg.mode == "threshold":
        st = stability_threshold(game, eta=cfg.eta)
        print(f"eta0 = {st.eta0:.10f}")
        print(f"eta0 (eigenvalue crossing) = {st.eta0_crossing:.10f}")
        if cfg.eta is not None:
            mods = ", ".join(f"{m:.6f}" for m in st.eigenvalue_moduli)
            print(f"eta = {cfg.eta}: eigenvalue moduli {mods}, "
                  f"{'stable' if st.stable else 'not stable'}")
        return 0
    if cfg.mode == "mean":
        start = MeanState(MixedStrategy.from_first(cfg.start[0]),
                          MixedStrategy.from_first(cfg.start[1]),
                          MixedStrategy.uniform(), MixedStrategy.uniform(), 0)
        res = iterate_mean(game, start, cfg.eta, max_steps=cfg.max_steps, tol=cfg.tol,
                           stride=cfg.stride)
        print(f"converged = {res.converged} after {res.steps_used} steps"
              + ("" if res.converged else f" (oscillating = {res.oscillating})"))
        print(f"r1 = {_fmt(res.final.r1)}, r2 = {_fmt(res.final.r2)}")
        _write_outputs(cfg, res.trajectory, _references(game))
        return 0
    if cfg.mode == "flow":
        start = (MixedStrategy.from_first(cfg.start[0]), MixedStrategy.from_first(cfg.start[1]))
        traj = continuous_flow(game, start, cfg.t_end, cfg.dt, cfg.method, stride=cfg.stride)
        print(f"p1 = {traj.p1[-1]:.6f}, p2 = {traj.p2[-1]:.6f} at t = {traj.t[-1]:.6g}")
        _write_outputs(cfg, traj, _references(game))
        return 0

    check = not cfg.allow_any_game
    if cfg.mode == "tifu":
        res = run_tifu(game, cfg.eta, cfg.steps, seed=cfg.seed, stride=cfg.stride,
                       check_assumption=check)
    elif cfg.mode == "tvfu":
        res = run_tvfu(game, cfg.steps, seed=cfg.seed, stride=cfg.stride, check_assumption=check)
    else:
        res = run_afp(game, cfg.afp, cfg.steps, seed=cfg.seed, stride=cfg.stride,
                      check_assumption=check)
    q1, q2 = res.final_q
    print(f"final empirical q1 = {_fmt(q1)}, q2 = {_fmt(q2)}")
    if res.final_r is not None:
        print(f"final estimates r1 = {_fmt(res.final_r[0])}, r2 = {_fmt(res.final_r[1])}")
    columns = ("q1_1", "q2_1") if cfg.mode == "tvfu" else ("r1_1", "r2_1", "q1_1", "q2_1")
    _write_outputs(cfg, res, _references(game), columns)
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(parse_args(argv))
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (TraceIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
