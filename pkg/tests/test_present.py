import itertools
import random
import warnings

import numpy as np
import pytest

from bcsalg.model import Bcs, Constraint, Context, DomainError, Relation, default_contexts, gen_magic_square, is_satisfying
from bcsalg.present import (
    FORMS,
    build_acon,
    build_algebra,
    force_commute,
    linear_system_of,
    parse_group_text,
    solution_group,
    synchronous_presentation,
    vanishing_set,
)
from bcsalg.games import SynchronousGame, pad, to_synchronous

from oracles import SIGNS, assignments, random_system, satisfies


def nonsat_oracle(ctx_vars, plain):
    """Context assignments violating some constraint, by direct enumeration."""
    out = set()
    for v in itertools.product(SIGNS, repeat=len(ctx_vars)):
        phi = dict(zip(ctx_vars, v))
        if not satisfies(plain, phi):
            out.add(v)
    return out


def test_acon_magic_square():
    p = build_acon(gen_magic_square())
    assert len(p.generators) == 9
    triples = [set(range(1, 4)), set(range(4, 7)), set(range(7, 10)), {1, 4, 7}, {2, 5, 8}, {3, 6, 9}]
    expected = set()
    for t in triples:
        for a, b in itertools.combinations(sorted(t), 2):
            expected.add((f"x{a}", f"x{b}"))
    assert {tuple(sorted(pq)) for pq in p.commutations} == expected


def test_acon_two_clause_example():
    c1 = Constraint(("x1", "x2", "x3"), Relation.clause((1, 1, 1)))
    c2 = Constraint(("x2", "x3", "x4"), Relation.clause((1, 1, 1)))
    p = build_acon(default_contexts(["x1", "x2", "x3", "x4"], [c1, c2]))
    assert ("x1", "x4") not in p.commutations and ("x4", "x1") not in p.commutations
    one = Bcs(("a", "b", "c"), (Context(("a", "b", "c"), ()),))
    assert len(build_acon(one).commutations) == 3


def test_polynomial_form_and():
    b = default_contexts(["z1", "z2"], [Constraint(("z1", "z2"), Relation.and_())])
    p = build_algebra(b, "polynomial")
    assert len(p.vanishing) == 1
    from bcsalg.zalgebra import dump_element
    assert dump_element(p.vanishing[0][1]) == "3/2 + 1/2*z1 + 1/2*z2 - 1/2*z1*z2"


def test_full_relation_has_no_vanishing():
    b = default_contexts(["x", "y"], [Constraint(("x", "y"), Relation.full(2))])
    assert build_algebra(b, "constraints").vanishing == ()
    for form in FORMS:
        assert vanishing_set(b, form).sets == (frozenset(),)


def test_magic_square_vanishing():
    b = gen_magic_square()
    p = build_algebra(b, "contexts")
    per = [sum(1 for i, _ in p.vanishing if i == j) for j in range(6)]
    assert per == [4] * 6
    sets = [vanishing_set(b, f) for f in FORMS]
    assert sets[0] == sets[1] == sets[2]
    for ctx, s in zip(b.contexts, sets[0].sets):
        plain = [(c.scope, set(c.relation.members)) for c in ctx.constraints]
        assert s == nonsat_oracle(ctx.vars, plain)
        assert len(s) == 4


def test_contradictory_context():
    b = Bcs(("x",), (Context(("x",), (Constraint(("x",), Relation.constant(1)), Constraint(("x",), Relation.constant(-1)))),))
    for form in FORMS:
        assert vanishing_set(b, form).sets == (frozenset({(1,), (-1,)}),)


def test_form_equivalence_random():
    rng = random.Random(17)
    for _ in range(60):
        b, plain = random_system(rng, n_vars=6, n_cons=rng.randint(1, 4), max_arity=4)
        sets = [vanishing_set(b, f) for f in FORMS]
        assert sets[0] == sets[1] == sets[2]
        for ctx, s, pc in zip(b.contexts, sets[0].sets, plain):
            assert s == nonsat_oracle(ctx.vars, [pc])


def test_one_dimensional_reps_match_satisfaction():
    rng = random.Random(23)
    for _ in range(30):
        b, _ = random_system(rng, n_vars=5, n_cons=3)
        pres = build_algebra(b, "polynomial")
        for phi in assignments(b.vars):
            kills = all(e.evaluate_signs(phi) == 0 for _, e in pres.vanishing)
            assert kills == is_satisfying(b, phi)


def test_linear_polynomial_relations_are_monomials():
    b = gen_magic_square()
    for _, e in build_algebra(b, "polynomial").vanishing:
        assert len(e.nonconstant_monomials()) == 1
    A, rhs = linear_system_of(b)
    assert A.shape == (6, 9) and list(rhs) == [0, 0, 0, 1, 1, 1]


def test_synchronous_presentation():
    lam = np.zeros((1, 1, 2, 2), dtype=bool)
    lam[0, 0, 0, 0] = lam[0, 0, 1, 1] = True
    p = synchronous_presentation(SynchronousGame(lam))
    assert p.generators == ("e[0][0]", "e[0][1]")
    assert p.sums == (("e[0][0]", "e[0][1]"),)
    conv = to_synchronous(pad(gen_magic_square()))
    assert len(synchronous_presentation(conv.game).generators) == 6 * 8
    free = np.ones((2, 2, 2, 2), dtype=bool)
    free[0, 0] = free[1, 1] = np.eye(2, dtype=bool)
    p = synchronous_presentation(SynchronousGame(free))
    # only the diagonal (synchronicity) pairs are orthogonal
    assert all(x[:4] == y[:4] for x, y in p.orthogonal)
    bad = np.ones((1, 1, 2, 2), dtype=bool)
    with pytest.raises(DomainError, match="synchronous condition"):
        synchronous_presentation(SynchronousGame(bad))


def test_solution_group():
    g = solution_group(*linear_system_of(gen_magic_square()))
    assert len(g.generators) == 10
    # J^2, 9 centrality, 9 involution, 18 commutation, 6 constraint relators
    assert len(g.relators) == 1 + 9 + 9 + 18 + 6
    assert parse_group_text(g.text()).relators == g.relators
    empty = solution_group(np.zeros((0, 2), dtype=int), [])
    assert len(empty.relators) == 1 + 2 + 2
    assert solution_group([[1]], [1]).relators[-1] == ("x1", "J")


def test_force_commute():
    c1 = Constraint(("x1", "x2", "x3"), Relation.clause((1, 1, 1)))
    c2 = Constraint(("x2", "x3", "x4"), Relation.clause((1, 1, 1)))
    b = default_contexts(["x1", "x2", "x3", "x4"], [c1, c2])
    b2 = force_commute(b, "x1", "x4")
    new = b2.contexts[-1]
    assert set(new.vars) == {"x1", "x4"} | {b2.vars[-1]}
    odd = {v for v in itertools.product(SIGNS, repeat=3) if v[0] * v[1] * v[2] == -1}
    assert vanishing_set(b2).sets[-1] == odd
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert force_commute(b, "x2", "x3") is b
        assert w
