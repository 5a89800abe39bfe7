from fractions import Fraction

import numpy as np
import pytest

from bcsalg.model import Constraint, Relation, default_contexts, gen_linear, gen_magic_square, gen_nontracial
from bcsalg.trace import (
    Certificate,
    Word,
    anticommute_certificate,
    canonical_monomial,
    check_certificate,
    commutator_search,
    normal_form,
    racg_normal_form,
    trace_feasibility,
    word_presentation,
)

from oracles import magic_square_operators


@pytest.fixture(scope="module")
def pres():
    return word_presentation(gen_magic_square())


def word_matrix(w: Word, ops):
    M = np.eye(4, dtype=complex) * w.sign
    for x in w.letters:
        M = M @ ops[x]
    return M


def test_involution_cancels(pres):
    assert racg_normal_form(Word.of("x1", "x1"), pres) == Word(1, ())
    nf = normal_form(Word.of("x5", "x1", "x1", "x5"), pres)
    assert nf.word == Word(1, ())


def test_row_relation(pres):
    nf = normal_form(Word.of("x1", "x2", "x3"), pres)
    assert nf.word == Word(1, ())
    assert check_certificate(nf.certificate, pres)
    nf = normal_form(Word.of("x1", "x4", "x7"), pres)
    assert nf.word == Word(-1, ())


def test_commuting_swap(pres):
    assert racg_normal_form(Word.of("x2", "x1"), pres) == Word.of("x1", "x2")
    # x1 and x5 share no context, so the order is kept
    assert racg_normal_form(Word.of("x5", "x1"), pres) == Word.of("x5", "x1")


@pytest.mark.parametrize("u,w", [("x1", "x5"), ("x2", "x4")])
def test_anticommutation_certificates(pres, u, w):
    cert = anticommute_certificate(Word.of(u), Word.of(w), pres)
    assert cert is not None
    assert cert.end == Word(-1, ())
    assert check_certificate(cert, pres)
    # every rewrite rule holds for the operator square, so start and end agree as matrices
    ops = magic_square_operators()
    assert np.allclose(word_matrix(cert.start, ops), word_matrix(cert.end, ops))
    assert cert.substitutions == 6
    assert anticommute_certificate(Word.of(u), Word.of(w), pres, depth=5) is None


def test_commuting_pair_has_no_certificate(pres):
    res = commutator_search(Word.of("x1"), Word.of("x2"), pres)
    assert res.found == Word(1, ())
    assert anticommute_certificate(Word.of("x1"), Word.of("x2"), pres, depth=4) is None


def test_tampered_certificate_rejected(pres):
    cert = anticommute_certificate(Word.of("x1"), Word.of("x5"), pres)
    steps = list(cert.steps)
    for k, s in enumerate(steps):
        if s[0] == "swap":
            steps[k] = ("swap", s[1] + 1)
            break
    assert not check_certificate(Certificate(cert.start, tuple(steps), cert.end), pres)
    assert not check_certificate(Certificate(cert.start, cert.steps, Word(1, ())), pres)


def test_canonical_monomial_rotation(pres):
    a = canonical_monomial(Word.of("x5", "x1"), pres)
    b = canonical_monomial(Word.of("x1", "x5"), pres)
    assert a == b


def test_square_unknown_and_sound(square_trace, square_rep):
    assert square_trace.status == "UNKNOWN"
    assert square_trace.residuals(square_rep.images, square_rep.dim) <= 1e-9
    # rule (i) equations are backed by certificates
    zeroed = [e for e in square_trace.equations if e.certificate is not None]
    assert zeroed
    p = word_presentation(gen_magic_square())
    assert all(check_certificate(e.certificate, p) for e in zeroed)


def test_nontracial_infeasible(nontracial_trace):
    r = nontracial_trace
    assert r.infeasible
    m, derived, zero = r.clash
    assert m == ("x21",) and derived == Fraction(1, 2) and zero == 0
    text = "\n".join(r.log)
    assert "τ(x21) = 1/2 from:" in text
    assert "x21 anticommutes with" in text
    p = word_presentation(gen_nontracial())
    assert all(check_certificate(e.certificate, p) for e in r.equations if e.certificate is not None)


def test_satisfiable_system_unknown():
    b = gen_linear([[1, 1, 0], [0, 1, 1]], [1, 0])
    assert trace_feasibility(b).status == "UNKNOWN"
    b = default_contexts(["x", "y", "z"], [Constraint(("x", "y", "z"), Relation.z_and())])
    assert trace_feasibility(b).status == "UNKNOWN"
