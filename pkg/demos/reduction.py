"""
From parity equations to 3SAT, keeping the quantum solution
===========================================================

Each 3-variable parity constraint is rewritten as four 3-clauses. The
rewriting comes with a pair of maps between the two algebras, so the
Pauli representation of the magic square carries over to the 3SAT
instance even though the instance has no classical solution.
"""

from bcsalg import (
    LANG_3SAT,
    Relation,
    Strategy,
    apply_gadgets,
    brute_force_sat,
    build_algebra,
    build_game,
    gen_magic_square,
    language_gadgets,
    pp_define_search,
    strategy_value,
    transport_rep,
    verify_hom_pair,
    verify_rep,
)
from bcsalg.reps import magic_square_paulis
from bcsalg.zalgebra import dump_element

# a gadget for odd parity, no auxiliary variables needed
g = pp_define_search(LANG_3SAT, Relation.parity(3, 1), max_y=0)
for c in g.system.constraints:
    print(c.scope, sorted(c.relation.members))

#%%
b = gen_magic_square()
b2, h = apply_gadgets(b, language_gadgets(b, LANG_3SAT, max_y=0))
print(len(b.constraints), "parity constraints ->", len(b2.constraints), "clauses")
print("pi(x5) =", dump_element(h.pi["x5"]))
print("\n".join(verify_hom_pair(b, b2, h).lines()))

#%%
print("3SAT instance classically:", "UNSAT" if brute_force_sat(b2) is None else "SAT")
r2 = transport_rep(magic_square_paulis(), h.pi, b, b2)
print("transported rep verifies:", verify_rep(build_algebra(b2), r2).passed)
print("game value:", round(strategy_value(build_game(b2), Strategy.quantum(r2)), 12))
