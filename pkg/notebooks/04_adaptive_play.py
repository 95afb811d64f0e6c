# %% [markdown]
# # Adaptive step sizes
#
# Each player halves its smoothing step whenever the spread of its estimate
# of the opponent over the last window is smaller than over the window
# before, never going below a floor.

# %%
from pathlib import Path

import numpy as np

from tifu_fp import BENCHMARK_GAME as game, AfpConfig, render_svg, run_afp, run_tvfu, solve_equilibrium
from tifu_fp.play import settling_step

out = Path("notebook_output")
out.mkdir(exist_ok=True)
rbar = solve_equilibrium(game).rbar1.first
cfg = AfpConfig(eta_initial=0.1, eta_min=0.0005, window=50)

# %%
res = run_afp(game, cfg, 10_000, seed=0)
render_svg(res, out / "afp_q.svg", columns=("q1_1", "q2_1"), references={"NE r1": rbar})
render_svg(res, out / "afp_eta.svg", columns=("eta",), ylim=(0, cfg.eta_initial))
changes = np.flatnonzero(np.diff(res.eta)) + 1
print("attacker step size changes at steps:", changes[:12], "...")
print("final step sizes:", res.eta[-1], res.eta2[-1])

# %% [markdown]
# How long until the attacker's empirical frequency stays within 0.02 of
# equilibrium, compared with plain 1/k weighting on the same seeds:

# %%
afp = [settling_step(run_afp(game, cfg, 10_000, seed=s).q1, rbar, 0.02) for s in range(20)]
tvfu = [settling_step(run_tvfu(game, 10_000, seed=s).q1, rbar, 0.02) for s in range(20)]
print("median settling step, adaptive:", np.median(afp), " 1/k weights:", np.median(tvfu))
