"""Relations, constraints, contexts and boolean constraint systems.

Booleans are encoded multiplicatively: ``-1`` is TRUE and ``+1`` is FALSE.

Two index conventions are used throughout the package:

* A sign tuple ``(s_0, ..., s_{k-1})`` is stored at index ``sum(b_i << i)``
  where ``b_i = 1`` iff ``s_i == -1`` (little-endian over the given order).
  Relation tables, answer encodings and projection-basis coefficients all
  use this.
* ``brute_force_sat`` reports the lexicographically first witness, ordering
  assignments with ``+1`` before ``-1`` and earlier variables more
  significant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

TRUE = -1
FALSE = 1

#: largest relation arity (membership tables have ``2**arity`` entries)
ARITY_CAP = 16
#: largest variable count accepted by ``brute_force_sat``
BRUTE_FORCE_CAP = 24

Term = Union[str, int]
Assignment = Mapping[str, int]


class DomainError(ValueError):
    """An argument is outside the domain of an operation."""


class ResourceError(RuntimeError):
    """A configured size cap would be exceeded."""


def check_sign(v) -> int:
    if v not in (1, -1) or isinstance(v, bool):
        raise DomainError(f"expected a sign (+1 or -1), got {v!r}")
    return int(v)


def signs_to_index(signs: Sequence[int]) -> int:
    idx = 0
    for i, s in enumerate(signs):
        if s == -1:
            idx |= 1 << i
    return idx


def index_to_signs(idx: int, k: int) -> tuple[int, ...]:
    return tuple(-1 if (idx >> i) & 1 else 1 for i in range(k))


def all_sign_vectors(k: int) -> list[tuple[int, ...]]:
    """All of {±1}^k in index order."""
    return [index_to_signs(i, k) for i in range(1 << k)]


# --------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class Relation:
    """A boolean relation of arity ``k``, stored as a ``2**k``-bit membership mask."""

    arity: int
    bits: int

    def __post_init__(self):
        if not isinstance(self.arity, int) or self.arity < 1:
            raise DomainError(f"relation arity must be >= 1, got {self.arity!r}")
        if self.arity > ARITY_CAP:
            raise ResourceError(f"relation arity {self.arity} exceeds cap {ARITY_CAP}")
        if self.bits < 0 or self.bits >> (1 << self.arity):
            raise DomainError("membership mask has bits outside the table")

    @classmethod
    def from_members(cls, arity: int, members: Iterable[Sequence[int]]) -> "Relation":
        bits = 0
        for m in members:
            if len(m) != arity:
                raise DomainError(f"member {tuple(m)} does not have arity {arity}")
            for s in m:
                check_sign(s)
            bits |= 1 << signs_to_index(m)
        return cls(arity, bits)

    @classmethod
    def from_table(cls, table: Sequence[bool]) -> "Relation":
        n = len(table)
        k = n.bit_length() - 1
        if n != 1 << k or k < 1:
            raise DomainError(f"table length {n} is not 2**k with k >= 1")
        bits = 0
        for i, t in enumerate(table):
            if t:
                bits |= 1 << i
        return cls(k, bits)

    @classmethod
    def from_predicate(cls, arity: int, pred) -> "Relation":
        return cls.from_members(arity, (v for v in all_sign_vectors(arity) if pred(v)))

    @classmethod
    def full(cls, arity: int) -> "Relation":
        return cls(arity, (1 << (1 << arity)) - 1)

    @classmethod
    def empty(cls, arity: int) -> "Relation":
        return cls(arity, 0)

    @classmethod
    def parity(cls, arity: int, rhs: int) -> "Relation":
        """Tuples whose product is ``rhs``."""
        check_sign(rhs)
        return cls.from_predicate(arity, lambda v: int(np.prod(v)) == rhs)

    @classmethod
    def clause(cls, polarities: Sequence[int]) -> "Relation":
        """Disjunction of literals; polarity ``+1`` is ``x_i``, ``-1`` is ``¬x_i``."""
        pol = [check_sign(p) for p in polarities]
        # the unique falsifying tuple sets every literal FALSE
        falsifier = tuple(FALSE if p == 1 else TRUE for p in pol)
        return cls(len(pol), ((1 << (1 << len(pol))) - 1) & ~(1 << signs_to_index(falsifier)))

    @classmethod
    def exactly_one(cls, arity: int) -> "Relation":
        return cls.from_predicate(arity, lambda v: v.count(TRUE) == 1)

    @classmethod
    def and_(cls) -> "Relation":
        """``x ∧ y = TRUE``."""
        return cls.from_members(2, [(TRUE, TRUE)])

    @classmethod
    def nand(cls) -> "Relation":
        """``x ∧ y = FALSE``."""
        return cls.from_predicate(2, lambda v: v != (TRUE, TRUE))

    @classmethod
    def z_and(cls) -> "Relation":
        """``z = x ∧ y`` on slots ``(x, y, z)``."""
        return cls.from_predicate(
            3, lambda v: v[2] == (TRUE if v[0] == TRUE and v[1] == TRUE else FALSE)
        )

    @classmethod
    def constant(cls, value: int) -> "Relation":
        """Unary relation ``{(value,)}``."""
        return cls.from_members(1, [(check_sign(value),)])

    def __contains__(self, t) -> bool:
        if len(t) != self.arity:
            return False
        return bool((self.bits >> signs_to_index(t)) & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    @property
    def size(self) -> int:
        return 1 << self.arity

    def member_indices(self) -> list[int]:
        return [i for i in range(self.size) if (self.bits >> i) & 1]

    @property
    def members(self) -> tuple[tuple[int, ...], ...]:
        return tuple(index_to_signs(i, self.arity) for i in self.member_indices())

    def table(self) -> np.ndarray:
        """Boolean membership array of length ``2**arity`` in index order."""
        nbytes = max(1, self.size // 8)
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.size].astype(bool)

    def indicator(self, t: Sequence[int]) -> int:
        """``f_R``: -1 on members, +1 otherwise."""
        return TRUE if t in self else FALSE

    def __repr__(self) -> str:
        return f"Relation(arity={self.arity}, members={len(self)})"


# --------------------------------------------------------------------------
# constraints and systems


def is_variable(term: Term) -> bool:
    return isinstance(term, str)


def _check_term(term) -> Term:
    if isinstance(term, str):
        if not term:
            raise DomainError("empty variable name")
        return term
    return check_sign(term)


def scope_variables(scope: Sequence[Term]) -> tuple[str, ...]:
    """Variables of a scope in order of first occurrence (``X ∩ S``)."""
    seen: dict[str, None] = {}
    for t in scope:
        if is_variable(t):
            seen.setdefault(t, None)
    return tuple(seen)


@dataclass(frozen=True)
class Constraint:
    scope: tuple
    relation: Relation

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(_check_term(t) for t in self.scope))
        if len(self.scope) != self.relation.arity:
            raise DomainError(
                f"scope length {len(self.scope)} != relation arity {self.relation.arity}"
            )

    @property
    def variables(self) -> tuple[str, ...]:
        return scope_variables(self.scope)


@dataclass(frozen=True)
class Context:
    vars: tuple
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(set(self.vars)) != len(self.vars):
            raise DomainError(f"duplicate variable in context {self.vars}")
        vs = set(self.vars)
        for c in self.constraints:
            missing = [v for v in c.variables if v not in vs]
            if missing:
                raise DomainError(f"constraint uses {missing} outside its context {self.vars}")


@dataclass(frozen=True)
class Bcs:
    """A boolean constraint system with contexts."""

    vars: tuple
    contexts: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        if len(set(self.vars)) != len(self.vars):
            raise DomainError("variable names must be unique")
        vs = set(self.vars)
        for i, ctx in enumerate(self.contexts):
            extra = [v for v in ctx.vars if v not in vs]
            if extra:
                raise DomainError(f"context {i} uses undeclared variables {extra}")

    @property
    def constraints(self) -> list[Constraint]:
        return [c for ctx in self.contexts for c in ctx.constraints]

    @property
    def relations(self) -> list[Relation]:
        return [c.relation for c in self.constraints]


# --------------------------------------------------------------------------
# evaluation


def eval_scope(phi: Assignment, scope: Sequence[Term]) -> tuple[int, ...]:
    """``phi(S)``; constants are fixed points."""
    out = []
    for t in scope:
        if is_variable(t):
            if t not in phi:
                raise DomainError(f"variable {t!r} is not assigned")
            out.append(check_sign(phi[t]))
        else:
            out.append(t)
    return tuple(out)


def constraint_holds(c: Constraint, phi: Assignment) -> bool:
    return eval_scope(phi, c.scope) in c.relation


def is_satisfying(b: Bcs, phi: Assignment) -> bool:
    missing = [v for v in b.vars if v not in phi]
    if missing:
        raise DomainError(f"assignment is not total: missing {missing}")
    return all(constraint_holds(c, phi) for c in b.constraints)


def satisfying_mask(
    variables: Sequence[str], constraints: Iterable[Constraint], start: int = 0, stop: int | None = None
) -> np.ndarray:
    """Boolean array over assignments ``start..stop`` of ``variables`` (little-endian index)."""
    n = len(variables)
    if stop is None:
        stop = 1 << n
    pos = {v: i for i, v in enumerate(variables)}
    idx = np.arange(start, stop, dtype=np.int64)
    ok = np.ones(idx.shape, dtype=bool)
    for c in constraints:
        rel_idx = np.zeros(idx.shape, dtype=np.int64)
        for i, t in enumerate(c.scope):
            if is_variable(t):
                if t not in pos:
                    raise DomainError(f"variable {t!r} not among {tuple(variables)}")
                rel_idx |= ((idx >> pos[t]) & 1) << i
            elif t == TRUE:
                rel_idx |= 1 << i
        ok &= c.relation.table()[rel_idx]
    return ok


def satisfying_assignments(variables: Sequence[str], constraints: Iterable[Constraint]) -> list[tuple[int, ...]]:
    mask = satisfying_mask(variables, list(constraints))
    return [index_to_signs(int(i), len(variables)) for i in np.flatnonzero(mask)]


def context_satisfying(ctx: Context) -> np.ndarray:
    """Satisfying mask of ``(U_i, V_i)`` over assignments to ``ctx.vars``."""
    return satisfying_mask(ctx.vars, ctx.constraints)


def brute_force_sat(b: Bcs, max_vars: int = BRUTE_FORCE_CAP, chunk: int = 1 << 20) -> dict | None:
    """Lexicographically first satisfying assignment, or ``None``.

    The assignment space is scanned in chunks; the result does not depend on
    the chunk size.
    """
    n = len(b.vars)
    if n > max_vars:
        raise ResourceError(f"{n} variables exceeds brute-force cap {max_vars}")
    # reversed order makes increasing index equal to lexicographic order
    rev = tuple(reversed(b.vars))
    cons = b.constraints
    total = 1 << n
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        ok = satisfying_mask(rev, cons, start, stop)
        hits = np.flatnonzero(ok)
        if hits.size:
            signs = index_to_signs(start + int(hits[0]), n)
            return dict(zip(rev, signs))
    return None


# --------------------------------------------------------------------------
# context construction


def default_contexts(variables: Sequence[str], constraints: Iterable[Constraint]) -> Bcs:
    """One context per constraint, holding exactly that constraint's variables."""
    variables = tuple(variables)
    declared = set(variables)
    contexts = []
    for c in constraints:
        bad = [v for v in c.variables if v not in declared]
        if bad:
            raise DomainError(f"constraint references undeclared variables {bad}")
        contexts.append(Context(c.variables, (c,)))
    return Bcs(variables, contexts)


def contexts_to_constraints(b: Bcs) -> Bcs:
    """Replace each context by one constraint whose relation is its satisfying set."""
    contexts = []
    for ctx in b.contexts:
        if len(ctx.vars) > ARITY_CAP:
            raise ResourceError(f"context of size {len(ctx.vars)} exceeds arity cap {ARITY_CAP}")
        mask = context_satisfying(ctx)
        if ctx.vars:
            rel = Relation.from_table(mask)
            contexts.append(Context(ctx.vars, (Constraint(ctx.vars, rel),)))
        elif mask[0]:
            contexts.append(Context((), ()))
        else:
            contexts.append(Context((), (Constraint((FALSE,), Relation.empty(1)),)))
    return Bcs(b.vars, contexts)


def merge_contexts(b: Bcs) -> Bcs:
    """All constraints in a single context over all variables."""
    return Bcs(b.vars, (Context(b.vars, tuple(b.constraints)),))


# --------------------------------------------------------------------------
# generators


def gen_linear(A, rhs, names: Sequence[str] | None = None) -> Bcs:
    """Linear system ``A x = rhs`` over GF(2), written multiplicatively.

    Row ``i`` becomes ``prod_{A_ij = 1} x_j = (-1)^{rhs_i}`` in its own
    context over the row's support.
    """
    A = np.asarray(A, dtype=np.int64) % 2
    if A.ndim != 2:
        raise DomainError("A must be a matrix")
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1) % 2
    m, n = A.shape
    if rhs.shape[0] != m:
        raise DomainError("rhs length must equal the number of rows of A")
    if names is None:
        names = [f"x{j + 1}" for j in range(n)]
    names = tuple(names)
    if len(names) != n:
        raise DomainError("need one name per column")
    contexts = []
    for i in range(m):
        support = tuple(names[j] for j in range(n) if A[i, j])
        target = -1 if rhs[i] else 1
        if support:
            c = Constraint(support, Relation.parity(len(support), target))
            contexts.append(Context(support, (c,)))
        elif target == 1:
            contexts.append(Context((), ()))
        else:
            contexts.append(Context((), (Constraint((FALSE,), Relation.empty(1)),)))
    return Bcs(names, contexts)


MAGIC_SQUARE_A = [
    [1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 1, 1],
    [1, 0, 0, 1, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 1, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 1],
]
MAGIC_SQUARE_B = [0, 0, 0, 1, 1, 1]


def gen_magic_square(prefix: str = "x") -> Bcs:
    """Mermin-Peres square: row products +1, column products -1."""
    names = [f"{prefix}{j}" for j in range(1, 10)]
    cons = []
    for r in range(3):
        row = tuple(names[3 * r: 3 * r + 3])
        cons.append(Constraint(row, Relation.parity(3, 1)))
    for c in range(3):
        col = tuple(names[c::3])
        cons.append(Constraint(col, Relation.parity(3, -1)))
    return default_contexts(names, cons)


def gen_nontracial() -> Bcs:
    """Two magic squares ``x11..x19``, ``x21..x29`` tied by ``x21 = x11 ∧ x12``."""
    a = gen_magic_square("x1")
    b = gen_magic_square("x2")
    link = Constraint(("x11", "x12", "x21"), Relation.z_and())
    return default_contexts(a.vars + b.vars, a.constraints + b.constraints + [link])


def _graph_parts(G):
    if hasattr(G, "nodes") and hasattr(G, "edges"):
        nodes, edges = list(G.nodes), list(G.edges)
    else:
        nodes, edges = G
        nodes = list(nodes)
    adj = {u: set() for u in nodes}
    for u, v in edges:
        if u == v:
            raise DomainError("graphs must be simple (no loops)")
        adj[u].add(v)
        adj[v].add(u)
    return nodes, adj


def complete_graph(n: int):
    """``K_n`` as ``(vertices, edges)`` with vertices ``1..n``."""
    vs = list(range(1, n + 1))
    return vs, list(itertools.combinations(vs, 2))


def hom_var(u, a) -> str:
    return f"x_{u}_{a}"


def gen_graph_hom(G, H) -> Bcs:
    """Constraint system whose solutions are graph homomorphisms ``G -> H``.

    Graphs are ``(vertices, edges)`` pairs or objects exposing ``nodes`` and
    ``edges``.
    """
    gv, gadj = _graph_parts(G)
    hv, hadj = _graph_parts(H)
    if not gv or not hv:
        raise DomainError("graphs must be nonempty")
    if len(hv) > ARITY_CAP:
        raise ResourceError(f"|V(H)| = {len(hv)} exceeds arity cap {ARITY_CAP}")
    names = [hom_var(u, a) for u in gv for a in hv]
    nand = Relation.nand()
    cons = []
    for u in gv:
        for a, b in itertools.combinations(hv, 2):
            cons.append(Constraint((hom_var(u, a), hom_var(u, b)), nand))
    for iu, u in enumerate(gv):
        for v in gv[iu + 1:]:
            if v not in gadj[u]:
                continue
            for a in hv:
                for b in hv:
                    if b not in hadj[a]:
                        cons.append(Constraint((hom_var(u, a), hom_var(v, b)), nand))
    one = Relation.exactly_one(len(hv))
    for u in gv:
        cons.append(Constraint(tuple(hom_var(u, a) for a in hv), one))
    return default_contexts(names, cons)
