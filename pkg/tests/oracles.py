"""Independent reference computations used by the tests.

Nothing here goes through the package's table encodings or transforms:
relations are plain Python sets of sign tuples and polynomials are dicts
from sorted variable tuples to Fractions.
"""
import itertools
import random
from fractions import Fraction

import numpy as np

from bcsalg.model import Bcs, Constraint, Context, Relation

SIGNS = (1, -1)


def assignments(names):
    """All assignments, +1 first, earlier names more significant."""
    for vals in itertools.product(SIGNS, repeat=len(names)):
        yield dict(zip(names, vals))


def term_value(phi, t):
    return phi[t] if isinstance(t, str) else t


def satisfies(constraints, phi):
    """``constraints`` is a list of ``(scope, member_set)``."""
    return all(tuple(term_value(phi, t) for t in s) in m for s, m in constraints)


def first_solution(names, constraints):
    for phi in assignments(names):
        if satisfies(constraints, phi):
            return phi
    return None


def random_relation(rng: random.Random, k: int, density=None) -> set:
    pts = list(itertools.product(SIGNS, repeat=k))
    p = rng.random() if density is None else density
    return {t for t in pts if rng.random() < p}


def random_system(rng: random.Random, n_vars=6, n_cons=4, max_arity=3, constants=True, repeats=True, ctx_cap=4):
    """Returns ``(Bcs, [(scope, member_set)])`` with default contexts."""
    names = [f"v{i}" for i in range(n_vars)]
    cons, plain = [], []
    for _ in range(n_cons):
        while True:
            k = rng.randint(1, max_arity)
            pool = names + ([1, -1] if constants else [])
            scope = [rng.choice(pool) for _ in range(k)]
            if not repeats and len({t for t in scope if isinstance(t, str)}) < sum(isinstance(t, str) for t in scope):
                continue
            if not any(isinstance(t, str) for t in scope):
                continue
            if len({t for t in scope if isinstance(t, str)}) <= ctx_cap:
                break
        mem = random_relation(rng, k)
        cons.append(Constraint(tuple(scope), Relation.from_members(k, mem)))
        plain.append((tuple(scope), mem))
    ctxs = tuple(Context(c.variables, (c,)) for c in cons)
    return Bcs(tuple(names), ctxs), plain


def poly_value(coeffs: dict, phi) -> Fraction:
    """Evaluate ``sum c_m prod_{x in m} phi(x)`` with ``coeffs`` keyed by variable collections."""
    total = Fraction(0)
    for m, c in coeffs.items():
        v = 1
        for x in m:
            v *= phi[x]
        total += Fraction(c) * v
    return total


def poly_mul(a: dict, b: dict) -> dict:
    """Product in the commutative algebra where every variable squares to 1."""
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = frozenset(ma) ^ frozenset(mb)
            out[m] = out.get(m, 0) + Fraction(ca) * Fraction(cb)
    return {m: c for m, c in out.items() if c != 0}


def projection_poly(phi) -> dict:
    """``prod_x (1 + phi(x) x)/2`` expanded by repeated multiplication."""
    p = {frozenset(): Fraction(1)}
    for x, s in phi.items():
        p = poly_mul(p, {frozenset(): Fraction(1, 2), frozenset([x]): Fraction(s, 2)})
    return p


def kron(*ms):
    out = np.eye(1)
    for m in ms:
        out = np.kron(out, m)
    return out


I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
Y = 1j * X @ Z


def magic_square_operators(prefix="x"):
    """The textbook two-qubit assignment, rows multiplying to I and columns to -I."""
    ops = [
        kron(I2, Z), kron(Z, I2), kron(Z, Z),
        kron(X, I2), kron(I2, X), kron(X, X),
        -kron(X, Z), -kron(Z, X), kron(Y, Y),
    ]
    return {f"{prefix}{j + 1}": ops[j] for j in range(9)}


# --------------------------------------------------------------------------
# Schaefer classes by definability


def _clauses(k, shape):
    """All clauses over k positions as lists of (position, wants_true) literals."""
    out = []
    for size in range(0, k + 1):
        for pos in itertools.combinations(range(k), size):
            for pol in itertools.product((True, False), repeat=size):
                npos = sum(pol)
                if shape == "bijunctive" and size > 2:
                    continue
                if shape == "horn" and npos > 1:
                    continue
                if shape == "dual_horn" and size - npos > 1:
                    continue
                out.append(list(zip(pos, pol)))
    return out


def _clause_holds(cl, t):
    return any((t[p] == -1) == want for p, want in cl)


def definable_by_clauses(members: set, k: int, shape: str) -> bool:
    """Is the relation the conjunction of all clauses of the shape it satisfies?"""
    allowed = [cl for cl in _clauses(k, shape) if all(_clause_holds(cl, t) for t in members)]
    closure = {t for t in itertools.product(SIGNS, repeat=k) if all(_clause_holds(cl, t) for cl in allowed)}
    return closure == members


def definable_by_equations(members: set, k: int) -> bool:
    """Is the relation the solution set of all GF(2) equations it satisfies?"""
    eqs = []
    for mask in range(1 << k):
        for rhs in (0, 1):
            if all(sum(t[i] == -1 for i in range(k) if (mask >> i) & 1) % 2 == rhs for t in members):
                eqs.append((mask, rhs))
    closure = {t for t in itertools.product(SIGNS, repeat=k)
               if all(sum(t[i] == -1 for i in range(k) if (m >> i) & 1) % 2 == r for m, r in eqs)}
    return closure == members


def oracle_flags(members, k):
    return {
        "bijunctive": definable_by_clauses(members, k, "bijunctive"),
        "horn": definable_by_clauses(members, k, "horn"),
        "dual_horn": definable_by_clauses(members, k, "dual_horn"),
        "linear": definable_by_equations(members, k),
    }


def all_relations(k):
    pts = list(itertools.product(SIGNS, repeat=k))
    for bits in range(1 << len(pts)):
        yield {pts[i] for i in range(len(pts)) if (bits >> i) & 1}


def class_pool(cls):
    """Nonempty relations of arity 1..3 in the class, as ``(k, member_set)``."""
    pool = []
    for k in (1, 2, 3):
        for members in all_relations(k):
            if members and oracle_flags(members, k)[cls]:
                pool.append((k, members))
    return pool


def first_solution_np(names, constraints):
    """Vectorised ``first_solution`` for up to ~20 variables."""
    n = len(names)
    rows = np.arange(1 << n)
    # row r, variable j: -1 iff bit n-1-j of r is set, so row order is lexicographic
    vals = {v: 1 - 2 * ((rows >> (n - 1 - j)) & 1) for j, v in enumerate(names)}
    ok = np.ones(1 << n, dtype=bool)
    for scope, members in constraints:
        k = len(scope)
        table = np.zeros(1 << k, dtype=bool)
        for t in members:
            table[sum(1 << i for i in range(k) if t[i] == -1)] = True
        idx = np.zeros(1 << n, dtype=np.int64)
        for i, term in enumerate(scope):
            col = vals[term] if isinstance(term, str) else np.full(1 << n, term)
            idx |= (col == -1).astype(np.int64) << i
        ok &= table[idx]
    hits = np.flatnonzero(ok)
    if not hits.size:
        return None
    return {v: int(vals[v][hits[0]]) for v in names}
