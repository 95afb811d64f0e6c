"""Preset experiments on the benchmark attacker/defender game.

Every preset starts from uniform estimates and seed 0 unless told otherwise;
initial conditions of the published figures are unknown, so only the
qualitative shape of the stochastic traces is expected to match.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import MeanState, closed_form_threshold, iterate_mean, stability_threshold
from .game import GameSpec, MixedStrategy, solve_equilibrium
from .play import AfpConfig, run_afp, run_tifu, run_tvfu, settling_step
from .traces import emit_trace, render_svg

BENCHMARK_GAME = GameSpec.from_rows([[1, 5], [3, 2]], [[4, 1], [3, 5]], 0.5, 0.3)
REPORTED_EQUILIBRIUM = ((0.79, 0.21), (0.47, 0.53))
REPORTED_THRESHOLD = 0.2536
EQUILIBRIUM_TOL = 0.005
THRESHOLD_TOL = 0.0005

PRESETS = ("table-values", "fig2", "fig3", "fig4", "fig6", "fig5-7")


@dataclass
class PresetResult:
    preset: str
    lines: list[str] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def text(self) -> str:
        return "\n".join(self.lines)


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _ne_references(rep):
    return {f"NE r1 = {rep.rbar1.first:.4f}": rep.rbar1.first,
            f"NE r2 = {rep.rbar2.first:.4f}": rep.rbar2.first}


def table_values(game: GameSpec = BENCHMARK_GAME) -> PresetResult:
    res = PresetResult("table-values")
    rep = solve_equilibrium(game)
    stab = stability_threshold(game, rep)
    (p1, p2), (p3, p4) = REPORTED_EQUILIBRIUM
    computed = (rep.rbar1.first, rep.rbar1.second, rep.rbar2.first, rep.rbar2.second)
    ne_ok = all(abs(c - r) <= EQUILIBRIUM_TOL for c, r in zip(computed, (p1, p2, p3, p4)))
    eta_ok = abs(stab.eta0 - REPORTED_THRESHOLD) <= THRESHOLD_TOL
    res.checks = {"equilibrium": ne_ok, "threshold": eta_ok}
    res.lines.append(
        f"NE: ({computed[0]:.4f},{computed[1]:.4f})/({computed[2]:.4f},{computed[3]:.4f}) "
        f"vs reported ({p1},{p2})/({p3},{p4}) tol {EQUILIBRIUM_TOL} {_verdict(ne_ok)}")
    res.lines.append(
        f"eta0: {stab.eta0:.4f} vs reported {REPORTED_THRESHOLD} tol {THRESHOLD_TOL} "
        f"{_verdict(eta_ok)}")
    rounded = closed_form_threshold(game, MixedStrategy(p1, p2), MixedStrategy(p3, p4))
    res.lines.append(f"  eigenvalue crossing: {stab.eta0_crossing:.10f} "
                     f"(closed form {stab.eta0:.10f})")
    res.lines.append(f"  closed form evaluated at the 2-decimal equilibrium: {rounded:.4f}")
    return res


def _mean_preset(name, eta, max_steps, out_dir, game, title):
    res = PresetResult(name)
    rep = solve_equilibrium(game)
    run = iterate_mean(game, MeanState.uniform(), eta, max_steps=max_steps,
                       fixed_point=(rep.rbar1, rep.rbar2))
    csv_path, svg_path = out_dir / f"{name}.csv", out_dir / f"{name}.svg"
    emit_trace(run.trajectory, csv_path)
    render_svg(run.trajectory, svg_path, references=_ne_references(rep), title=title,
               labels={"r1_1": "r1 (attacker)", "r2_1": "r2 (defender)"})
    res.files += [csv_path, svg_path]
    if run.converged:
        res.lines.append(f"{name}: mean dynamic eta={eta} converged in {run.steps_used} steps")
    else:
        res.lines.append(f"{name}: mean dynamic eta={eta} did not converge in {run.steps_used} "
                         f"steps (oscillating={run.oscillating})")
    return res, run


def fig2(out_dir: Path, game: GameSpec = BENCHMARK_GAME) -> PresetResult:
    res, run = _mean_preset("fig2", 0.25, 100_000, out_dir, game,
                            "Mean dynamic, estimated frequencies, eta = 0.25")
    res.checks["converged"] = run.converged
    return res


def fig3(out_dir: Path, game: GameSpec = BENCHMARK_GAME) -> PresetResult:
    res, run = _mean_preset("fig3", 0.26, 1_000, out_dir, game,
                            "Mean dynamic, estimated frequencies, eta = 0.26")
    res.checks["non-convergent"] = (not run.converged) and run.oscillating
    return res


def fig4(out_dir: Path, game: GameSpec = BENCHMARK_GAME, seed: int = 0) -> PresetResult:
    res = PresetResult("fig4")
    rep = solve_equilibrium(game)
    run = run_tifu(game, 0.01, 20_000, seed=seed)
    csv_path, svg_path = out_dir / "fig4.csv", out_dir / "fig4.svg"
    emit_trace(run, csv_path)
    render_svg(run, svg_path, references=_ne_references(rep),
               title="Stochastic play, estimated frequencies, eta = 0.01",
               labels={"r1_1": "r1 (attacker)", "r2_1": "r2 (defender)"})
    res.files += [csv_path, svg_path]
    q1, q2 = run.final_q
    res.lines.append(f"fig4: eta=0.01, {run.steps} steps, seed {seed}: final empirical "
                     f"q1={q1.first:.4f} q2={q2.first:.4f}")
    return res


def fig6(out_dir: Path, game: GameSpec = BENCHMARK_GAME, seed: int = 0) -> PresetResult:
    res = PresetResult("fig6")
    rep = solve_equilibrium(game)
    run = run_tvfu(game, 10_000, seed=seed)
    csv_path, svg_path = out_dir / "fig6.csv", out_dir / "fig6.svg"
    emit_trace(run, csv_path)
    render_svg(run, svg_path, columns=("q1_1", "q2_1"), references=_ne_references(rep),
               title="Stochastic play with 1/k weights, empirical frequencies",
               labels={"q1_1": "q1 (attacker)", "q2_1": "q2 (defender)"})
    res.files += [csv_path, svg_path]
    q1, q2 = run.final_q
    res.lines.append(f"fig6: 1/k weights, {run.steps} steps, seed {seed}: final empirical "
                     f"q1={q1.first:.4f} q2={q2.first:.4f}")
    return res


def fig5_7(out_dir: Path, game: GameSpec = BENCHMARK_GAME, seed: int = 0,
           band: float = 0.02) -> PresetResult:
    res = PresetResult("fig5-7")
    rep = solve_equilibrium(game)
    cfg = AfpConfig(eta_initial=0.1, eta_min=0.0005, window=50)
    run = run_afp(game, cfg, 10_000, seed=seed)
    base = run_tvfu(game, 10_000, seed=seed)
    csv_path = out_dir / "fig5-7.csv"
    emit_trace(run, csv_path)
    fig5_path, fig7_path = out_dir / "fig5.svg", out_dir / "fig7.svg"
    render_svg(run, fig5_path, columns=("q1_1", "q2_1"), references=_ne_references(rep),
               title="Adaptive play, empirical frequencies",
               labels={"q1_1": "q1 (attacker)", "q2_1": "q2 (defender)"})
    render_svg(run, fig7_path, columns=("eta",), ylim=(0.0, cfg.eta_initial),
               title="Adaptive play, attacker step size", labels={"eta": "step size"})
    res.files += [csv_path, fig5_path, fig7_path]
    q1, q2 = run.final_q
    afp_settle = settling_step(run.q1, rep.rbar1.first, band)
    tvfu_settle = settling_step(base.q1, rep.rbar1.first, band)
    res.lines.append(f"fig5-7: adaptive, {run.steps} steps, seed {seed}: final empirical "
                     f"q1={q1.first:.4f} q2={q2.first:.4f}, final step sizes "
                     f"{run.eta[-1]:.4g}/{run.eta2[-1]:.4g}")
    res.lines.append(f"  steps until q1 stays within {band} of equilibrium: adaptive "
                     f"{afp_settle}, 1/k weights {tvfu_settle}")
    return res


def reproduce(preset: str, out_dir=".", seed: int = 0) -> PresetResult:
    """Run one preset, writing its CSV and SVG files into ``out_dir``."""
    out = Path(out_dir)
    if preset == "table-values":
        return table_values()
    out.mkdir(parents=True, exist_ok=True)
    if preset == "fig2":
        return fig2(out)
    if preset == "fig3":
        return fig3(out)
    if preset == "fig4":
        return fig4(out, seed=seed)
    if preset == "fig6":
        return fig6(out, seed=seed)
    if preset == "fig5-7":
        return fig5_7(out, seed=seed)
    raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
