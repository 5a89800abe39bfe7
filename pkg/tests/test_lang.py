import random

import pytest

from bcsalg.model import (
    Bcs,
    Constraint,
    DomainError,
    Relation,
    brute_force_sat,
    complete_graph,
    default_contexts,
    gen_graph_hom,
    gen_magic_square,
    merge_contexts,
)
from bcsalg.lang import (
    ClassFlags,
    bijunctive_cnf,
    certificate,
    classify_bcs,
    classify_relation,
    cnf_table,
    horn_cnf,
    is_majority_closed,
    is_affine_closed,
    solve_schaefer,
)
from bcsalg.present import vanishing_set

from oracles import all_relations, class_pool, first_solution, oracle_flags

CLASSES = ("bijunctive", "horn", "dual_horn", "linear")


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exhaustive_classification(k):
    for members in all_relations(k):
        R = Relation.from_members(k, members)
        f = classify_relation(R)
        want = oracle_flags(members, k)
        assert {c: getattr(f, c) for c in CLASSES} == want, members
        assert f.zero_valid == ((1,) * k in members)
        assert f.one_valid == ((-1,) * k in members)
        # closure cross-checks
        assert is_majority_closed(R) == f.bijunctive
        assert is_affine_closed(R) == f.linear
        # reconstructed formulas define R exactly
        if f.bijunctive:
            assert set(Relation.from_table(cnf_table(bijunctive_cnf(R), k)).members) == members
        if f.horn:
            assert set(Relation.from_table(cnf_table(horn_cnf(R), k)).members) == members


def test_classify_examples():
    f = classify_relation(Relation.and_())
    assert f.names() == ["bijunctive", "horn", "dual_horn", "linear", "one_valid"]
    f = classify_relation(Relation.clause((1, 1, 1)))
    assert (f.bijunctive, f.horn, f.dual_horn, f.linear) == (False, False, True, False)
    f = classify_relation(Relation.parity(3, 1))
    assert (f.bijunctive, f.horn, f.dual_horn, f.linear) == (False, False, False, True)
    assert certificate(Relation.parity(3, 1))["linear"]


def test_classify_systems():
    assert classify_bcs(gen_magic_square()).names() == ["linear"]
    assert not classify_bcs(gen_graph_hom(complete_graph(3), complete_graph(3))).tractable
    assert classify_bcs(Bcs((), ())) == ClassFlags()


def random_instance(rng, pool, n):
    names = [f"v{i}" for i in range(n)]
    cons, plain = [], []
    for _ in range(rng.randint(1, 2 * n)):
        k, members = rng.choice(pool)
        scope = tuple(rng.sample(names, k)) if k <= n else tuple(rng.choice(names) for _ in range(k))
        cons.append(Constraint(scope, Relation.from_members(k, members)))
        plain.append((scope, members))
    return default_contexts(names, cons), plain


@pytest.mark.parametrize("cls", CLASSES)
def test_solvers_match_brute_force(cls):
    rng = random.Random(CLASSES.index(cls))
    pool = class_pool(cls)
    for _ in range(120):
        n = rng.randint(1, 9)
        b, plain = random_instance(rng, pool, n)
        assert getattr(classify_bcs(b), cls)
        got = solve_schaefer(b)
        assert got == first_solution(b.vars, plain)
        if got is None and n <= 8:
            # 1 = 0 in the algebra: every assignment of the merged context vanishes
            vs = vanishing_set(merge_contexts(b))
            assert len(vs.sets[0]) == 2 ** n


def test_solver_examples():
    assert solve_schaefer(gen_magic_square()) is None
    imp = Relation.clause((-1, 1))
    chain = default_contexts(["a", "b", "c", "d"], [
        Constraint(("a", "b"), imp), Constraint(("b", "c"), imp), Constraint(("c", "d"), imp),
        Constraint(("a",), Relation.constant(-1)),
    ])
    sol = solve_schaefer(chain)
    assert sol == {"a": -1, "b": -1, "c": -1, "d": -1} == brute_force_sat(chain)
    with pytest.raises(DomainError, match="not a Schaefer instance"):
        solve_schaefer(gen_graph_hom(complete_graph(3), complete_graph(3)))
