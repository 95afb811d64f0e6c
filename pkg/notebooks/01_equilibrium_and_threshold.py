# %% [markdown]
# # Equilibrium and stability threshold
#
# The benchmark attacker/defender game: the attacker prefers to attack an
# undefended node and to hold back from a defended one, the defender prefers
# to defend when attacked and to stay idle otherwise. Both players randomise
# through an entropy bonus.

# %%
from tifu_fp import (
    BENCHMARK_GAME as game,
    MixedStrategy,
    check_assumption,
    solve_equilibrium,
    stability_threshold,
    verify_equilibrium,
)
from tifu_fp.dynamics import closed_form_threshold

print(game.m1.as_array(), game.m2.as_array(), game.tau1, game.tau2, sep="\n")
print("sign structure ok:", check_assumption(game).ok)

# %% [markdown]
# The equilibrium is the unique crossing of the two smoothed best-response
# curves; bisection on the composed map finds it to float precision.

# %%
rep = solve_equilibrium(game)
print("attacker:", tuple(rep.rbar1))
print("defender:", tuple(rep.rbar2))
print("residual:", rep.residual)
print("grid check:", verify_equilibrium(game, rep.rbar1, rep.rbar2))

# %% [markdown]
# The closed-form threshold is cross-checked by locating, with numerical
# eigenvalues only, the step size at which the Jacobian's spectral radius
# reaches one.

# %%
st = stability_threshold(game, rep)
print(f"closed form {st.eta0:.10f}, eigenvalue crossing {st.eta0_crossing:.10f}")
for eta in (0.25, 0.26):
    s = stability_threshold(game, rep, eta=eta)
    print(eta, [round(m, 6) for m in s.eigenvalue_moduli], "stable" if s.stable else "unstable")

# %% [markdown]
# Rounding the equilibrium to two decimals before evaluating the closed form
# moves the threshold noticeably:

# %%
print(closed_form_threshold(game, MixedStrategy(0.79, 0.21), MixedStrategy(0.47, 0.53)))
