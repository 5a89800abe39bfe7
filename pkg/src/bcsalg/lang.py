"""Schaefer classes of relations and polynomial-time solvers for each class.

Bit ``i`` of a tuple index is set when coordinate ``i`` is TRUE (``-1``).
In that encoding the closure operations are plain bitwise ones: Horn is
closure under ``&`` (coordinatewise max of signs), dual Horn under ``|``,
bijunctive under majority and affine under ``a ^ b ^ c``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import gf2
from .model import (
    ARITY_CAP,
    Bcs,
    Constraint,
    DomainError,
    Relation,
    ResourceError,
    is_satisfying,
    satisfying_mask,
)
from .zalgebra import slot_names


@dataclass(frozen=True)
class ClassFlags:
    bijunctive: bool = True
    horn: bool = True
    dual_horn: bool = True
    linear: bool = True
    zero_valid: bool = True
    one_valid: bool = True

    def __and__(self, other: "ClassFlags") -> "ClassFlags":
        return ClassFlags(*(getattr(self, f) and getattr(other, f) for f in _FLAG_NAMES))

    @property
    def tractable(self) -> bool:
        return self.bijunctive or self.horn or self.dual_horn or self.linear

    def names(self) -> list[str]:
        return [f for f in _FLAG_NAMES if getattr(self, f)]


_FLAG_NAMES = ("bijunctive", "horn", "dual_horn", "linear", "zero_valid", "one_valid")


@dataclass(frozen=True)
class Clause:
    """Disjunction over slot indices: ``pos`` literals mean TRUE, ``neg`` mean FALSE."""

    pos: frozenset
    neg: frozenset

    def mask(self, k: int) -> np.ndarray:
        idx = np.arange(1 << k, dtype=np.int64)
        pm = sum(1 << i for i in self.pos)
        nm = sum(1 << i for i in self.neg)
        return ((idx & pm) != 0) | ((~idx & nm) != 0)

    def __len__(self) -> int:
        return len(self.pos) + len(self.neg)

    def text(self, names: Sequence[str]) -> str:
        lits = sorted([(i, names[i]) for i in self.pos] + [(i, "¬" + names[i]) for i in self.neg])
        return " ∨ ".join(s for _, s in lits) if lits else "⊥"


@dataclass(frozen=True)
class Equation:
    """``sum of t_i over support = rhs`` over GF(2), with ``t_i = 1`` for TRUE."""

    support: frozenset
    rhs: int

    def text(self, names: Sequence[str]) -> str:
        lhs = " ⊕ ".join(names[i] for i in sorted(self.support)) or "0"
        return f"{lhs} = {self.rhs}"


# --------------------------------------------------------------------------
# closure checks


def _members(R: Relation) -> np.ndarray:
    return np.flatnonzero(R.table()).astype(np.int64)


def is_closed(R: Relation, op: Callable, arity: int) -> bool:
    """Closure of the member set under a bitwise operation of the given arity."""
    tab = R.table()
    M = _members(R)
    if arity == 2:
        for a in M:
            if not tab[op(a, M)].all():
                return False
        return True
    if arity == 3:
        for a in M:
            for b in M:
                if not tab[op(a, b, M)].all():
                    return False
        return True
    raise ValueError("only binary and ternary operations are supported")


def _maj(a, b, c):
    return (a & b) | (b & c) | (a & c)


def _xor3(a, b, c):
    return a ^ b ^ c


def is_horn_closed(R: Relation) -> bool:
    return is_closed(R, lambda a, b: a & b, 2)


def is_dual_horn_closed(R: Relation) -> bool:
    return is_closed(R, lambda a, b: a | b, 2)


def is_majority_closed(R: Relation) -> bool:
    return is_closed(R, _maj, 3)


def is_affine_closed(R: Relation) -> bool:
    return is_closed(R, _xor3, 3)


def _affine_parts(R: Relation):
    """``(r0, basis of {r0 ^ r})`` or ``None`` if the member set is not a coset."""
    M = _members(R)
    if M.size == 0:
        return None
    r0 = int(M[0])
    diffs = [int(m) ^ r0 for m in M]
    sys_ = gf2.Gf2System(R.arity)
    for d in diffs:
        sys_.add(d, 0)
    if len(M) != 1 << sys_.rank:
        return None
    return r0, [row for row, _ in sys_.pivots.values()]


def is_affine(R: Relation) -> bool:
    return len(R) == 0 or _affine_parts(R) is not None


# --------------------------------------------------------------------------
# defining formulas (certificates)


def entailed_clauses(R: Relation, max_len: int | None = None, shape: str = "any") -> list[Clause]:
    """All clauses over distinct slots (of bounded length / given shape) satisfied by every member."""
    k = R.arity
    tab = R.table()
    out = []
    top = k if max_len is None else min(k, max_len)
    for size in range(0, top + 1):
        for slots in itertools.combinations(range(k), size):
            for signs in itertools.product((0, 1), repeat=size):
                pos = frozenset(s for s, p in zip(slots, signs) if p)
                neg = frozenset(s for s, p in zip(slots, signs) if not p)
                if shape == "horn" and len(pos) > 1:
                    continue
                if shape == "dual_horn" and len(neg) > 1:
                    continue
                cl = Clause(pos, neg)
                if not (tab & ~cl.mask(k)).any():
                    out.append(cl)
    return out


def _prime(clauses: list[Clause]) -> list[Clause]:
    out = []
    for c in clauses:
        if not any(d is not c and d.pos <= c.pos and d.neg <= c.neg and len(d) < len(c) for d in clauses):
            out.append(c)
    return out


def cnf_table(clauses: Sequence[Clause], k: int) -> np.ndarray:
    t = np.ones(1 << k, dtype=bool)
    for c in clauses:
        t &= c.mask(k)
    return t


def bijunctive_cnf(R: Relation) -> list[Clause] | None:
    """Prime entailed clauses of length ≤ 2, if their conjunction is ``R``."""
    k = R.arity
    cls = entailed_clauses(R, 2)
    if not np.array_equal(cnf_table(cls, k), R.table()):
        return None
    return _prime(cls)


def horn_cnf(R: Relation, dual: bool = False) -> list[Clause] | None:
    """One entailed Horn clause per non-member, if ``R`` is closed under ``&`` (``|`` when dual)."""
    k = R.arity
    full = (1 << k) - 1
    if dual:
        flipped = Relation.from_table(R.table()[::-1])
        cnf = horn_cnf(flipped)
        if cnf is None:
            return None
        return _dedupe([Clause(c.neg, c.pos) for c in cnf])
    if not is_horn_closed(R):
        return None
    M = _members(R)
    out = []
    for t in np.flatnonzero(~R.table()):
        t = int(t)
        T = frozenset(i for i in range(k) if (t >> i) & 1)
        above = M[(M & t) == t]
        if above.size == 0:
            out.append(Clause(frozenset(), T))
            continue
        c = full
        for m in above:
            c &= int(m)
        extra = c & ~t
        i = (extra & -extra).bit_length() - 1
        out.append(Clause(frozenset([i]), T))
    return _dedupe(out)


def _dedupe(clauses: list[Clause]) -> list[Clause]:
    return list(dict.fromkeys(clauses))


def linear_equations(R: Relation) -> list[Equation] | None:
    """Defining GF(2) equations if ``R`` is affine (``0 = 1`` for the empty relation)."""
    k = R.arity
    if len(R) == 0:
        return [Equation(frozenset(), 1)]
    parts = _affine_parts(R)
    if parts is None:
        return None
    r0, basis = parts
    out = []
    for w in gf2.nullspace(basis, k):
        rhs = bin(w & r0).count("1") & 1
        out.append(Equation(frozenset(i for i in range(k) if (w >> i) & 1), rhs))
    return out


def equations_table(eqs: Sequence[Equation], k: int) -> np.ndarray:
    idx = np.arange(1 << k, dtype=np.int64)
    t = np.ones(1 << k, dtype=bool)
    for e in eqs:
        w = sum(1 << i for i in e.support)
        t &= (np.bitwise_count(idx & w) & 1) == e.rhs
    return t


# --------------------------------------------------------------------------
# classification


def classify_relation(R: Relation) -> ClassFlags:
    if R.arity > ARITY_CAP:
        raise ResourceError(f"arity {R.arity} exceeds cap {ARITY_CAP}")
    tab = R.table()
    return ClassFlags(
        bijunctive=bijunctive_cnf(R) is not None,
        horn=is_horn_closed(R),
        dual_horn=is_dual_horn_closed(R),
        linear=is_affine(R),
        zero_valid=bool(tab[0]),
        one_valid=bool(tab[-1]),
    )


def certificate(R: Relation, flags: ClassFlags | None = None, names: Sequence[str] | None = None) -> dict:
    """Reconstructed defining formulas, one per class that holds, as text lines."""
    flags = flags or classify_relation(R)
    names = tuple(names) if names is not None else slot_names(R.arity)
    out = {}
    if flags.bijunctive:
        out["bijunctive"] = [c.text(names) for c in bijunctive_cnf(R)]
    if flags.horn:
        out["horn"] = [c.text(names) for c in horn_cnf(R)]
    if flags.dual_horn:
        out["dual_horn"] = [c.text(names) for c in horn_cnf(R, dual=True)]
    if flags.linear:
        out["linear"] = [e.text(names) for e in linear_equations(R)]
    return out


def specialize(c: Constraint) -> Constraint:
    """Plug constants and merge repeated variables: a constraint on distinct variables."""
    vs = c.variables
    return Constraint(vs, Relation.from_table(satisfying_mask(vs, [c])))


def classify_bcs(b: Bcs) -> ClassFlags:
    flags = ClassFlags()
    for c in b.constraints:
        flags = flags & classify_relation(specialize(c).relation)
    return flags


# --------------------------------------------------------------------------
# solvers: each takes compiled formulas over variable indices and decides satisfiability


def _two_sat(n: int, clauses: list[tuple[tuple[int, bool], ...]]) -> bool:
    """Literals are ``(var, True-literal?)``; node ``2v`` is TRUE, ``2v+1`` is FALSE."""
    src, dst = [], []
    for cl in clauses:
        if len(cl) == 0:
            return False
        if len(cl) == 1:
            cl = (cl[0], cl[0])
        (u, pu), (v, pv) = cl
        a, b = 2 * u + (0 if pu else 1), 2 * v + (0 if pv else 1)
        src += [a ^ 1, b ^ 1]
        dst += [b, a]
    if n == 0:
        return True
    g = csr_matrix((np.ones(len(src)), (src, dst)), shape=(2 * n, 2 * n))
    _, labels = connected_components(g, directed=True, connection="strong")
    return not np.any(labels[0::2] == labels[1::2])


def _horn_sat(n: int, clauses: list[tuple[frozenset, frozenset]]) -> bool:
    """Minimal-model unit propagation; clauses are ``(pos vars, neg vars)`` with ``|pos| ≤ 1``."""
    true = set()
    changed = True
    while changed:
        changed = False
        for pos, neg in clauses:
            if neg <= true and not (pos & true):
                if not pos:
                    return False
                true |= pos
                changed = True
    return True


def _lex_first(n: int, sat: Callable[[dict], bool]) -> list[int] | None:
    """Self-reduction: fix variables in order, preferring FALSE (+1)."""
    fixed: dict[int, int] = {}
    if not sat(fixed):
        return None
    for v in range(n):
        fixed[v] = 1
        if not sat(fixed):
            fixed[v] = -1
    return [fixed[v] for v in range(n)]


def _compile(b: Bcs, flags: ClassFlags):
    index = {v: i for i, v in enumerate(b.vars)}
    specs = [specialize(c) for c in b.constraints]
    if flags.bijunctive:
        kind = "bijunctive"
        items = []
        for c in specs:
            for cl in bijunctive_cnf(c.relation):
                items.append(tuple([(index[c.scope[i]], True) for i in cl.pos] + [(index[c.scope[i]], False) for i in cl.neg]))
    elif flags.horn or flags.dual_horn:
        kind = "horn" if flags.horn else "dual_horn"
        items = []
        for c in specs:
            for cl in horn_cnf(c.relation, dual=not flags.horn):
                pos = frozenset(index[c.scope[i]] for i in cl.pos)
                neg = frozenset(index[c.scope[i]] for i in cl.neg)
                items.append((neg, pos) if kind == "dual_horn" else (pos, neg))
    elif flags.linear:
        kind = "linear"
        items = []
        for c in specs:
            for e in linear_equations(c.relation):
                items.append((sum(1 << index[c.scope[i]] for i in e.support), e.rhs))
    else:
        raise DomainError("not a Schaefer instance: no tractable class covers every relation")
    return kind, items


def solve_schaefer(b: Bcs) -> dict | None:
    """Lexicographically first satisfying assignment (``+1`` preferred), or ``None``."""
    flags = classify_bcs(b)
    kind, items = _compile(b, flags)
    n = len(b.vars)
    if kind == "linear":
        sol = gf2.solve([r for r, _ in items], [h for _, h in items], n)
        signs = None if sol is None else [1 - 2 * t for t in sol]
    elif kind == "bijunctive":
        def sat(fixed):
            units = [((v, s == -1),) for v, s in fixed.items()]
            return _two_sat(n, items + units)
        signs = _lex_first(n, sat)
    else:
        # dual Horn is Horn after swapping TRUE and FALSE
        flip = kind == "dual_horn"

        def sat(fixed):
            units = []
            for v, s in fixed.items():
                is_true = (s == -1) != flip
                units.append((frozenset([v]), frozenset()) if is_true else (frozenset(), frozenset([v])))
            return _horn_sat(n, items + units)
        signs = _lex_first(n, sat)
    if signs is None:
        return None
    phi = dict(zip(b.vars, signs))
    if not is_satisfying(b, phi):
        raise AssertionError("solver produced a non-satisfying witness")
    return phi
