"""Smoothed fictitious play with exponentially smoothed frequency estimates
for 2x2 attacker/defender games."""
from .dynamics import (
    MeanState,
    StabilityConsistencyError,
    StabilityReport,
    closed_form_threshold,
    continuous_flow,
    eigenvalue_crossing,
    iterate_mean,
    jacobian_at,
    spectral_radius,
    stability_threshold,
    tifu_mean_step,
)
from .game import (
    AssumptionError,
    EquilibriumReport,
    GameError,
    GameSpec,
    MixedStrategy,
    PayoffMatrix,
    PureAction,
    best_response,
    check_assumption,
    entropy,
    soft_max,
    solve_equilibrium,
    utility,
    verify_equilibrium,
)
from .play import (
    AfpConfig,
    RunResult,
    TraceRecord,
    empirical_update,
    estimate_update,
    expand_estimate,
    reconstruct_empirical,
    run_afp,
    run_tifu,
    run_tifu_ensemble,
    run_tvfu,
    sample_action,
    window_stddev,
)
from .reproduce import BENCHMARK_GAME, reproduce
from .traces import emit_trace, read_trace, render_svg

__version__ = "0.1.0"
