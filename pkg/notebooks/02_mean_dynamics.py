# %% [markdown]
# # Mean dynamics on either side of the threshold
#
# Replacing sampled actions by their expectation gives a deterministic map.
# Just below the threshold it spirals into the equilibrium; just above it
# settles on a small oscillation instead.

# %%
from pathlib import Path

from tifu_fp import BENCHMARK_GAME as game, MeanState, MixedStrategy, continuous_flow, iterate_mean, render_svg, solve_equilibrium

out = Path("notebook_output")
out.mkdir(exist_ok=True)
rep = solve_equilibrium(game)
refs = {"NE r1": rep.rbar1.first, "NE r2": rep.rbar2.first}

# %%
for eta in (0.25, 0.26):
    run = iterate_mean(game, MeanState.uniform(), eta, max_steps=3000)
    print(f"eta={eta}: converged={run.converged} after {run.steps_used} steps,"
          f" oscillating={run.oscillating}")
    render_svg(run.trajectory, out / f"mean_eta_{eta}.svg", references=refs,
               title=f"mean dynamic, eta = {eta}")

# %% [markdown]
# The empirical means of the mean dynamic still approach the equilibrium
# above the threshold, since they average the oscillation out.

# %%
run = iterate_mean(game, MeanState.uniform(), 0.26, max_steps=20_000)
print("final empirical means:", run.final.q1.first, run.final.q2.first)

# %% [markdown]
# An Euler step of the continuous-time flow is the same affine update as the
# mean dynamic; RK4 follows the flow itself into the equilibrium.

# %%
u = MixedStrategy.uniform()
euler = continuous_flow(game, (u, u), 25.0, 0.25, "euler")
rk4 = continuous_flow(game, (u, u), 200.0, 0.01, "rk4")
print("euler end:", euler.p1[-1], euler.p2[-1])
print("rk4 end:", rk4.p1[-1], rk4.p2[-1], "equilibrium:", rep.rbar1.first, rep.rbar2.first)
