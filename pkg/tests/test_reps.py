import itertools
import random

import numpy as np
import pytest

from bcsalg.model import DomainError, ResourceError, Constraint, Relation, default_contexts, gen_linear, gen_magic_square, is_satisfying
from bcsalg.present import FORMS, build_algebra, force_commute
from bcsalg.reps import (
    MatrixRep,
    joint_spectrum,
    magic_square_paulis,
    pauli_matrix,
    pauli_search,
    verify_rep,
)

from oracles import I2, X, Y, Z, assignments, kron, magic_square_operators, random_system


@pytest.fixture(scope="module")
def square():
    return gen_magic_square()


def test_textbook_square_verifies(square):
    r = MatrixRep(4, magic_square_operators())
    for form in FORMS:
        rep = verify_rep(build_algebra(square, form), r, 1e-9)
        assert rep.passed, rep.lines()
    lib = magic_square_paulis()
    for k, m in r.images.items():
        assert np.allclose(lib[k], m)


def test_flipped_sign_fails(square):
    ops = magic_square_operators()
    ops["x9"] = -ops["x9"]
    rep = verify_rep(build_algebra(square, "polynomial"), MatrixRep(4, ops))
    assert not rep.passed
    assert rep.deviations["vanishing"] > 1
    assert rep.deviations["involution"] < 1e-12


def test_missing_generator(square):
    with pytest.raises(DomainError):
        verify_rep(build_algebra(square), MatrixRep(4, {"x1": np.eye(4)}))


def test_one_dimensional_reps():
    rng = random.Random(31)
    for _ in range(25):
        b, _ = random_system(rng, n_vars=4, n_cons=3)
        for phi in assignments(b.vars):
            r = MatrixRep.from_assignment(phi)
            for form in FORMS:
                assert verify_rep(build_algebra(b, form), r).passed == is_satisfying(b, phi)


def test_joint_spectrum_examples(square):
    r = MatrixRep(4, {"a": kron(Z, I2), "b": kron(I2, Z)})
    js = joint_spectrum(r, ("a", "b"))
    assert js.points == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert set(js.ranks.values()) == {1}
    js = joint_spectrum(MatrixRep(2, {"x": X}), ("x",))
    assert js.points == {(1,), (-1,)}
    with pytest.raises(DomainError, match="do not commute"):
        joint_spectrum(MatrixRep(2, {"x": X, "z": Z}), ("x", "z"))
    r = magic_square_paulis()
    for ctx in square.contexts:
        c = ctx.constraints[0]
        js = joint_spectrum(r, ctx.vars)
        assert js.points <= set(c.relation.members)
        assert sum(js.ranks.values()) == r.dim


def test_pauli_matrix_conventions():
    # qubit 0 is the leftmost tensor factor; X part in the low bits, Z part in the high bits
    assert np.allclose(pauli_matrix(0b0001, 2), kron(X, I2))
    assert np.allclose(pauli_matrix(0b0100, 2), kron(Z, I2))
    assert np.allclose(pauli_matrix(0b0101, 2), kron(Y, I2))
    assert np.allclose(pauli_matrix(0b1010, 2, -1), -kron(I2, Y))


def test_pauli_search_square(square):
    r = pauli_search(square, 2)
    assert r is not None and r.dim == 4
    for form in FORMS:
        assert verify_rep(build_algebra(square, form), r).passed
    assert pauli_search(square, 1) is None


def _one_qubit_oracle(b):
    """Backtracking over unsigned single-qubit Paulis with a sign solve at the leaves."""
    paulis = [I2.astype(complex), X, Y, Z]
    names = b.vars
    ctxs = [(c.vars, c.constraints[0].relation) for c in b.contexts]
    A = [[names.index(v) for v in vs] for vs, _ in ctxs]
    targets = [1 if R.members[0].count(-1) % 2 == 0 else -1 for _, R in ctxs]

    def rec(choice):
        j = len(choice)
        for idx, row in enumerate(A):
            if max(row) == j - 1:
                ms = [paulis[choice[t]] for t in row]
                if any(not np.allclose(p @ q, q @ p) for p, q in itertools.combinations(ms, 2)):
                    return False
        if j == len(names):
            phases = []
            for row in A:
                M = np.eye(2, dtype=complex)
                for t in row:
                    M = M @ paulis[choice[t]]
                c = M[0, 0] if abs(M[0, 0]) > 0.5 else M[0, 1]
                if not np.allclose(M, c * np.eye(2)) or abs(c.imag) > 1e-9:
                    return False
                phases.append(round(c.real))
            for signs in itertools.product((1, -1), repeat=len(names)):
                if all(np.prod([signs[t] for t in row]) * ph == tg for row, ph, tg in zip(A, phases, targets)):
                    return True
            return False
        return any(rec(choice + [p]) for p in range(4))

    return rec([])


def test_pauli_search_q1_matches_oracle(square):
    assert _one_qubit_oracle(square) is False
    chain = gen_linear([[1, 1, 0], [0, 1, 1]], [1, 0])
    assert _one_qubit_oracle(chain) is True
    assert pauli_search(chain, 1) is not None


def test_pauli_search_classical():
    b = gen_linear([[1, 1, 1], [0, 1, 1], [1, 1, 0]], [1, 0, 0])
    r = pauli_search(b, 0)
    assert r.dim == 1
    phi = {k: int(round(m[0, 0].real)) for k, m in r.images.items()}
    assert is_satisfying(b, phi)
    assert pauli_search(gen_magic_square(), 0) is None


def test_pauli_search_errors(square):
    nonlinear = default_contexts(["x", "y"], [Constraint(("x", "y"), Relation.and_())])
    with pytest.raises(DomainError):
        pauli_search(nonlinear, 1)
    with pytest.raises(DomainError):
        pauli_search(square, 5)
    with pytest.raises(ResourceError):
        pauli_search(square, 4)


def test_force_commute_rep_identity():
    b = gen_linear([[1, 1, 0, 0], [0, 0, 1, 1]], [1, 0])
    b2 = force_commute(b, "x1", "x3", ancilla="z")
    r = pauli_search(b2, 1)
    assert r is not None
    assert np.allclose(r["z"], r["x1"] @ r["x3"])
