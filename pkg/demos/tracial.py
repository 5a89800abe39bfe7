"""
A system with a C*-solution but no tracial one
==============================================

Two magic squares share nothing but a link x21 = x11 AND x12. Any
tracial state must give tau(x21) = 1/2 from the link, yet x21
anticommutes with another square entry, which forces tau(x21) = 0.

The search takes about half a minute.
"""

import time

from bcsalg import gen_magic_square, gen_nontracial, trace_feasibility
from bcsalg.reps import magic_square_paulis

b = gen_nontracial()
print(len(b.vars), "variables,", len(b.contexts), "contexts")

t = time.perf_counter()
res = trace_feasibility(b)
print(res.status, f"after {time.perf_counter() - t:.0f}s")
for line in res.log[-8:]:
    print(" ", line)

#%%
# The single square stays open, and its Pauli trace satisfies every derived equation
sq = trace_feasibility(gen_magic_square())
r = magic_square_paulis()
print(sq.status, len(sq.equations), "equations, worst residual", sq.residuals(r.images, r.dim))
