"""BCS nonlocal games, padding and the synchronous-game correspondence."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .model import (
    Bcs,
    Constraint,
    Context,
    DomainError,
    Relation,
    ResourceError,
    context_satisfying,
    default_contexts,
    hom_var,
    index_to_signs,
    signs_to_index,
    _graph_parts,
    all_sign_vectors,
)
from .present import build_algebra, fresh_name, sync_generator
from .reps import DEFAULT_TOL, MatrixRep, verify_rep
from .zalgebra import AlgebraElement, evaluate_on_rep, projection_of_assignment

CONTEXT_CAP = 12


@dataclass(frozen=True)
class NonlocalGame:
    """Questions are contexts; answers to question ``i`` are little-endian indices over ``contexts[i]``.

    ``lam[i][j]`` is a boolean array of shape ``(2^|U_i|, 2^|U_j|)``.
    """

    bcs: Bcs
    contexts: tuple
    lam: tuple

    @property
    def n_questions(self) -> int:
        return len(self.contexts)

    def answers(self, i: int) -> int:
        return 1 << len(self.contexts[i])

    def wins(self, i: int, j: int, a: int, b: int) -> bool:
        return bool(self.lam[i][j][a, b])

    def winning_tuples(self):
        for i in range(self.n_questions):
            for j in range(self.n_questions):
                for a, b in np.argwhere(self.lam[i][j]):
                    yield i, j, int(a), int(b)


def _restriction_keys(order, shared) -> np.ndarray:
    """For each answer index over ``order``, the bits on ``shared`` packed as an int."""
    idx = np.arange(1 << len(order), dtype=np.int64)
    key = np.zeros_like(idx)
    for t, v in enumerate(shared):
        key |= ((idx >> order.index(v)) & 1) << t
    return key


def build_game(b: Bcs) -> NonlocalGame:
    for ctx in b.contexts:
        if len(ctx.vars) > CONTEXT_CAP:
            raise ResourceError(f"context of size {len(ctx.vars)} exceeds cap {CONTEXT_CAP}")
    orders = [ctx.vars for ctx in b.contexts]
    sat = [context_satisfying(ctx) for ctx in b.contexts]
    lam = []
    for i, Ui in enumerate(orders):
        row = []
        for j, Uj in enumerate(orders):
            shared = [v for v in Ui if v in Uj]
            ki, kj = _restriction_keys(Ui, shared), _restriction_keys(Uj, shared)
            row.append(np.outer(sat[i], sat[j]) & (ki[:, None] == kj[None, :]))
        lam.append(tuple(row))
    return NonlocalGame(b, tuple(orders), tuple(lam))


def pad(b: Bcs, stem: str = "y") -> Bcs:
    """Add ancillas ``y1..`` (constrained to +1) so that every context has the maximum size."""
    sizes = [len(ctx.vars) for ctx in b.contexts]
    beta = max(sizes, default=0)
    need = beta - min(sizes, default=0)
    taken = set(b.vars)
    ys = []
    for t in range(need):
        y = fresh_name(taken, f"{stem}{t + 1}")
        taken.add(y)
        ys.append(y)
    contexts = []
    for ctx in b.contexts:
        extra = ys[: beta - len(ctx.vars)]
        cons = ctx.constraints + tuple(Constraint((y,), Relation.constant(1)) for y in extra)
        contexts.append(Context(ctx.vars + tuple(extra), cons))
    return Bcs(b.vars + tuple(ys), tuple(contexts))


@dataclass(frozen=True)
class SynchronousGame:
    """``lam`` is a boolean array indexed ``[i, j, a, b]``."""

    lam: np.ndarray

    @property
    def n_questions(self) -> int:
        return self.lam.shape[0]

    @property
    def n_answers(self) -> int:
        return self.lam.shape[2]

    def is_synchronous(self) -> bool:
        off = ~np.eye(self.n_answers, dtype=bool)
        return not any((self.lam[i, i] & off).any() for i in range(self.n_questions))


def _require_synchronous(g: SynchronousGame):
    if not g.is_synchronous():
        raise DomainError("the synchronous condition fails: some λ(i,i,a,b) = 1 with a ≠ b")


@dataclass(frozen=True)
class SyncConversion:
    """Result of ``to_synchronous``: the game plus both generator maps.

    ``e_to_bcs[e[i][a]]`` is ``Π_{U_i,a}``; ``x_to_sync[x]`` is ``(i, {e[i][a]: a(x)})``
    for the first context ``i`` containing ``x``.
    """

    game: SynchronousGame
    orders: tuple
    e_to_bcs: dict = field(repr=False)
    x_to_sync: dict = field(repr=False)

    def sync_rep(self, r: MatrixRep) -> MatrixRep:
        """Images ``e^i_a = ρ(Π_{U_i,a})``."""
        return MatrixRep(r.dim, {g: evaluate_on_rep(e, r.images, r.dim) for g, e in self.e_to_bcs.items()})

    def bcs_rep(self, r: MatrixRep) -> MatrixRep:
        """Observables ``x = Σ_a a(x) e^i_a`` from projection images."""
        out = {}
        for x, (_, coeffs) in self.x_to_sync.items():
            out[x] = sum(c * r[g] for g, c in coeffs.items())
        return MatrixRep(r.dim, out)


def to_synchronous(b: Bcs) -> SyncConversion:
    sizes = {len(ctx.vars) for ctx in b.contexts}
    if len(sizes) > 1:
        raise DomainError(f"context sizes {sorted(sizes)} differ; pad the system first")
    covered = {v for ctx in b.contexts for v in ctx.vars}
    orphans = [v for v in b.vars if v not in covered]
    if orphans:
        raise DomainError(f"variables {orphans} lie in no context")
    game = build_game(b)
    lam = np.array([[game.lam[i][j] for j in range(game.n_questions)] for i in range(game.n_questions)], dtype=bool)
    if lam.ndim != 4:
        lam = lam.reshape(len(b.contexts), len(b.contexts), 1, 1)
    m = sizes.pop() if sizes else 0
    e_to_bcs = {}
    for i, U in enumerate(game.contexts):
        for a in range(1 << m):
            e_to_bcs[sync_generator(i, a)] = projection_of_assignment(U, dict(zip(U, index_to_signs(a, m))))
    x_to_sync = {}
    for x in b.vars:
        i = next(k for k, U in enumerate(game.contexts) if x in U)
        pos = game.contexts[i].index(x)
        x_to_sync[x] = (i, {sync_generator(i, a): index_to_signs(a, m)[pos] for a in range(1 << m)})
    return SyncConversion(SynchronousGame(lam), game.contexts, e_to_bcs, x_to_sync)


def from_synchronous(g: SynchronousGame) -> tuple[Bcs, dict]:
    """BCS on ``x_i_a`` with pairwise exclusions and exactly-one-true per question.

    Returns the system and the map ``e[i][a] ↦ ½(1 − x_i_a)``.
    """
    _require_synchronous(g)
    nI, nO = g.n_questions, g.n_answers
    names = [hom_var(i, a) for i in range(nI) for a in range(nO)]
    seen = set()
    cons = []
    for i, j, a, b in np.argwhere(~g.lam):
        p, q = (int(i), int(a)), (int(j), int(b))
        key = (min(p, q), max(p, q))
        if key in seen:
            continue
        seen.add(key)
        cons.append(Constraint((hom_var(*key[0]), hom_var(*key[1])), Relation.nand()))
    for i in range(nI):
        cons.append(Constraint(tuple(hom_var(i, a) for a in range(nO)), Relation.exactly_one(nO)))
    emap = {
        sync_generator(i, a): (AlgebraElement.one((hom_var(i, a),)) - AlgebraElement.generator(hom_var(i, a))) * Fraction(1, 2)
        for i in range(nI)
        for a in range(nO)
    }
    return default_contexts(names, cons), emap


def graph_hom_game(G, H) -> SynchronousGame:
    """λ(u,v,a,b) = 0 iff (u = v, a ≠ b) or (u ~ v, a ≁ b)."""
    gv, gadj = _graph_parts(G)
    hv, hadj = _graph_parts(H)
    lam = np.ones((len(gv), len(gv), len(hv), len(hv)), dtype=bool)
    for iu, u in enumerate(gv):
        for iv, v in enumerate(gv):
            for ia, a in enumerate(hv):
                for ib, bb in enumerate(hv):
                    if u == v and a != bb:
                        lam[iu, iv, ia, ib] = False
                    elif v in gadj[u] and bb not in hadj[a]:
                        lam[iu, iv, ia, ib] = False
    return SynchronousGame(lam)


# --------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class Strategy:
    """``deterministic``: ``data`` is an assignment, or a pair of per-question answer lists.
    ``quantum``: ``data`` is a MatrixRep of the BCS algebra (shared maximally entangled state).
    """

    kind: str
    data: object

    @classmethod
    def deterministic(cls, phi: Mapping[str, int]) -> "Strategy":
        return cls("deterministic", dict(phi))

    @classmethod
    def answer_tables(cls, alice, bob) -> "Strategy":
        return cls("deterministic", (tuple(alice), tuple(bob)))

    @classmethod
    def quantum(cls, r: MatrixRep) -> "Strategy":
        return cls("quantum", r)


def question_projections(g: NonlocalGame, r: MatrixRep) -> list[np.ndarray]:
    """Per question, the stack of ``ρ(Π_{U_i,a})`` over answers ``a``."""
    out = []
    for U in g.contexts:
        k = len(U)
        mats = [
            evaluate_on_rep(projection_of_assignment(U, dict(zip(U, index_to_signs(a, k)))), r.images, r.dim)
            for a in range(1 << k)
        ]
        out.append(np.array(mats))
    return out


def strategy_value(g: NonlocalGame, s: Strategy, tol: float = DEFAULT_TOL) -> float:
    """Winning probability under uniform question pairs."""
    n = g.n_questions
    if n == 0:
        return 1.0
    if s.kind == "deterministic":
        if isinstance(s.data, tuple):
            alice, bob = s.data
        else:
            alice = [signs_to_index([s.data[v] for v in U]) for U in g.contexts]
            bob = alice
        return _deterministic_wins(g, alice, bob) / (n * n)
    if s.kind != "quantum":
        raise DomainError(f"unknown strategy kind {s.kind!r}")
    r = s.data
    rep = verify_rep(build_algebra(g.bcs, "contexts"), r, tol)
    if not rep.passed:
        raise DomainError("quantum strategy rejected: representation does not verify")
    P = question_projections(g, r)
    eye = np.eye(r.dim)
    for i, Pi in enumerate(P):
        if np.linalg.norm(Pi.sum(axis=0) - eye, 2) > tol:
            raise DomainError(f"measurement for question {i} is not normalized")
    total = 0.0
    for i in range(n):
        for j in range(n):
            # Bob measures transposes; with the maximally entangled state this gives Tr(P Q)/d
            p = np.einsum("axy,byx->ab", P[i], P[j]).real / r.dim
            total += float(p[g.lam[i][j]].sum())
    return total / (n * n)


def _deterministic_wins(g: NonlocalGame, alice, bob) -> int:
    n = g.n_questions
    return sum(int(g.lam[i][j][alice[i], bob[j]]) for i in range(n) for j in range(n))


def deterministic_value_max(g: NonlocalGame) -> Fraction:
    """Best value over strategies derived from global assignments (exhaustive)."""
    vars_ = g.bcs.vars
    if len(vars_) > 20:
        raise ResourceError("too many variables for exhaustive strategy search")
    n = g.n_questions
    if n == 0:
        return Fraction(1)
    best = 0
    for v in all_sign_vectors(len(vars_)):
        phi = dict(zip(vars_, v))
        ans = [signs_to_index([phi[x] for x in U]) for U in g.contexts]
        best = max(best, _deterministic_wins(g, ans, ans))
    return Fraction(best, n * n)
