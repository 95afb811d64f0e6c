# %% [markdown]
# # Stochastic play
#
# Each player samples from its smoothed best response to an exponentially
# smoothed estimate of the other's play. A small step size keeps the
# estimates noisy but the empirical frequencies still approach the
# equilibrium.

# %%
from pathlib import Path

import numpy as np

from tifu_fp import BENCHMARK_GAME as game, emit_trace, render_svg, run_tifu, run_tvfu, solve_equilibrium

out = Path("notebook_output")
out.mkdir(exist_ok=True)
rep = solve_equilibrium(game)

# %%
res = run_tifu(game, 0.01, 20_000, seed=0)
emit_trace(res, out / "tifu.csv")
render_svg(res, out / "tifu.svg", columns=("r1_1", "r2_1", "q1_1", "q2_1"),
           references={"NE r1": rep.rbar1.first, "NE r2": rep.rbar2.first})
print("final empirical:", res.final_q[0].first, res.final_q[1].first)
print("estimate spread over the last 5000 steps:", np.std(res.r1[-5000:]), np.std(res.r2[-5000:]))

# %% [markdown]
# With 1/k weights the estimates are the empirical frequencies themselves.

# %%
base = run_tvfu(game, 20_000, seed=0)
print("final empirical (1/k weights):", base.final_q[0].first, base.final_q[1].first)
