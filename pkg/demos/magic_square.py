"""
The magic square, classically and with matrices
===============================================

Nine +-1 variables on a 3x3 grid. Each row must multiply to +1 and each
column to -1. Multiplying all six equations gives +1 = -1, so no
assignment works. With 4x4 Pauli matrices it does.
"""

import numpy as np

from bcsalg import (
    FORMS,
    Strategy,
    brute_force_sat,
    build_algebra,
    build_game,
    gen_magic_square,
    joint_spectrum,
    pauli_search,
    strategy_value,
    verify_rep,
)
from bcsalg.lang import classify_bcs, solve_schaefer

b = gen_magic_square()
for ctx in b.contexts:
    c = ctx.constraints[0]
    print(" ".join(ctx.vars), "->", len(c.relation.members), "allowed rows")

# 512 assignments, none satisfying
print("brute force:", brute_force_sat(b))
print("classes:", classify_bcs(b).names(), "| Gaussian elimination:", solve_schaefer(b))

#%%
# Search two-qubit Pauli operators for a representation
r = pauli_search(b, 2)
np.set_printoptions(precision=0, suppress=True)
print("rho(x1) =\n", r["x1"].real + 0.0)
for form in FORMS:
    rep = verify_rep(build_algebra(b, form), r)
    print(f"{form:>11}: {'ok' if rep.passed else 'FAIL'}")

#%%
# Each row's operators commute; their joint eigenvalues are allowed rows
for ctx in b.contexts[:3]:
    js = joint_spectrum(r, ctx.vars)
    print(ctx.vars, sorted(js.ranks.items()))

#%%
# The nonlocal game: a context for each player, consistent answers win
g = build_game(b)
print("quantum value:", round(strategy_value(g, Strategy.quantum(r)), 12))
