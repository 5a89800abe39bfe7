"""pp-definitions (gadgets), the reduction B ↦ B′ and its homomorphism pair."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .model import (
    ARITY_CAP,
    Bcs,
    Constraint,
    Context,
    DomainError,
    Relation,
    ResourceError,
    index_to_signs,
    is_variable,
    satisfying_mask,
)
from .zalgebra import PROJECTION, AlgebraElement, projection_of_assignment

ANCILLA_CAP = 20


class SearchBudgetExceeded(ResourceError):
    """The search stopped before exhausting its space: the answer is unknown."""


def gadget_slots(k: int, ny: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return tuple(f"x{i + 1}" for i in range(k)), tuple(f"y{i + 1}" for i in range(ny))


def projection_table(system: Bcs, k: int) -> np.ndarray:
    """Membership table over the first ``k`` variables of the existential projection."""
    n = len(system.vars)
    if n > ARITY_CAP + 8:
        raise ResourceError(f"gadget has {n} variables")
    mask = satisfying_mask(system.vars, system.constraints)
    return mask.reshape(1 << (n - k), 1 << k).any(axis=0)


@dataclass(frozen=True)
class GadgetDefinition:
    """``target`` is the projection onto ``x1..xk`` of the solutions of ``system``."""

    target: Relation
    system: Bcs

    def __post_init__(self):
        self.validate()

    @property
    def slots(self) -> tuple[str, ...]:
        return self.system.vars[: self.target.arity]

    @property
    def ancillas(self) -> tuple[str, ...]:
        return self.system.vars[self.target.arity:]

    def validate(self):
        k = self.target.arity
        if len(self.system.vars) < k:
            raise DomainError("gadget has fewer variables than the target arity")
        if not np.array_equal(projection_table(self.system, k), self.target.table()):
            raise DomainError("gadget projection does not equal its target relation")


def self_gadget(R: Relation) -> GadgetDefinition:
    xs, _ = gadget_slots(R.arity, 0)
    return GadgetDefinition(R, Bcs(xs, (Context(xs, (Constraint(xs, R),)),)))


def insert_constants(L: Sequence[Relation]) -> list[Relation]:
    """Relations obtained from ``L`` by fixing any subset of coordinates to constants."""
    out = []
    seen = set()
    for R in L:
        for pattern in itertools.product((0, 1, -1), repeat=R.arity):
            free = [i for i, p in enumerate(pattern) if p == 0]
            if not free:
                continue
            scope = tuple(f"z{free.index(i) + 1}" if p == 0 else p for i, p in enumerate(pattern))
            vs = tuple(f"z{j + 1}" for j in range(len(free)))
            rel = Relation.from_table(satisfying_mask(vs, [Constraint(scope, R)]))
            if rel not in seen:
                seen.add(rel)
                out.append(rel)
    return out


def pp_define_search(
    L: Sequence[Relation],
    target: Relation,
    max_y: int = 1,
    max_c: int = 4,
    budget: int = 2_000_000,
) -> GadgetDefinition | None:
    """First gadget in order (|Y|, #constraints, candidate order), or ``None`` if none exists within the bounds.

    Scopes range over variables and both constants, with repetition.
    Candidates with the same solution set are merged, keeping the first.
    """
    k = target.arity
    if k + max_y > ARITY_CAP:
        raise ResourceError("target arity plus ancillas exceeds the arity cap")
    tgt = target.table()
    spent = 0
    for ny in range(max_y + 1):
        xs, ys = gadget_slots(k, ny)
        names = xs + ys
        terms = names + (1, -1)
        cands: dict[bytes, Constraint] = {}
        masks = []
        for R in L:
            for scope in itertools.product(terms, repeat=R.arity):
                c = Constraint(scope, R)
                m = satisfying_mask(names, [c])
                # every target tuple needs an extension satisfying this constraint
                proj = m.reshape(1 << ny, 1 << k).any(axis=0)
                if (tgt & ~proj).any():
                    continue
                key = m.tobytes()
                if key not in cands:
                    cands[key] = c
                    masks.append(m)
        cons = list(cands.values())
        for size in range(1, max_c + 1):
            for combo in itertools.combinations(range(len(cons)), size):
                spent += 1
                if spent > budget:
                    raise SearchBudgetExceeded(f"gave up after {budget} candidate systems")
                m = masks[combo[0]].copy()
                for j in combo[1:]:
                    m &= masks[j]
                proj = m.reshape(1 << ny, 1 << k).any(axis=0)
                if np.array_equal(proj, tgt):
                    chosen = tuple(cons[j] for j in combo)
                    return GadgetDefinition(target, Bcs(names, (Context(names, chosen),)))
    return None


# --------------------------------------------------------------------------
# the reduction


@dataclass
class HomPair:
    """``iota`` on generators of B, ``pi`` on generators of B′.

    ``choice[i]`` has shape ``(2^|U_i|, |Y_i|)``: row ``φ`` is ``h_φ`` on the ancillas of context ``i``.
    """

    iota: dict
    pi: dict
    contexts: tuple
    ancillas: tuple
    choice: tuple = field(repr=False)


def build_pi(b: Bcs, ancillas: Sequence[Sequence[str]], choice: Sequence[np.ndarray]) -> dict:
    pi = {x: AlgebraElement.generator(x) for x in b.vars}
    for ctx, ys, h in zip(b.contexts, ancillas, choice):
        for t, y in enumerate(ys):
            pi[y] = AlgebraElement(ctx.vars, [int(v) for v in h[:, t]], 1, PROJECTION).to("monomial")
    return pi


def _substitute(c: Constraint, env: Mapping[str, object]) -> Constraint:
    return Constraint(tuple(env[t] if is_variable(t) else t for t in c.scope), c.relation)


def _lex_order(m: int) -> np.ndarray:
    """Little-endian indices listed in lexicographic order (+1 first, first variable most significant)."""
    r = np.arange(1 << m, dtype=np.int64)
    out = np.zeros_like(r)
    for i in range(m):
        out |= ((r >> (m - 1 - i)) & 1) << i
    return out


def apply_gadgets(b: Bcs, gadgets: Mapping[Relation, GadgetDefinition]) -> tuple[Bcs, HomPair]:
    new_vars = list(b.vars)
    contexts, ancillas, choice = [], [], []
    for i, ctx in enumerate(b.contexts):
        ys_i, cons_i = [], []
        for j, c in enumerate(ctx.constraints):
            g = gadgets.get(c.relation)
            if g is None:
                raise DomainError(f"no gadget for relation {c.relation!r} (context {i}, constraint {j})")
            g.validate()
            env = dict(zip(g.slots, c.scope))
            for t, y in enumerate(g.ancillas):
                env[y] = f"{i}.{j}.y{t + 1}"
                ys_i.append(env[y])
            cons_i += [_substitute(gc, env) for gc in g.system.constraints]
        if len(ys_i) > ANCILLA_CAP:
            raise ResourceError(f"context {i} needs {len(ys_i)} ancillas")
        U = ctx.vars
        u, m = len(U), len(ys_i)
        sat_b = satisfying_mask(U, ctx.constraints)
        sat_new = satisfying_mask(U + tuple(ys_i), cons_i).reshape(1 << m, 1 << u)
        order = _lex_order(m)
        ranked = sat_new[order, :]
        first_sat = order[np.argmax(ranked, axis=0)]
        h = np.ones((1 << u, m), dtype=np.int64)
        for phi in range(1 << u):
            if sat_b[phi]:
                if not sat_new[:, phi].any():
                    raise DomainError(f"gadget gives no extension of a satisfying assignment in context {i}")
                h[phi] = index_to_signs(int(first_sat[phi]), m)
            else:
                h[phi] = index_to_signs(int(order[0]), m)
        new_vars += ys_i
        contexts.append(Context(U + tuple(ys_i), tuple(cons_i)))
        ancillas.append(tuple(ys_i))
        choice.append(h)
    b2 = Bcs(tuple(new_vars), tuple(contexts))
    pair = HomPair(
        iota={x: x for x in b.vars},
        pi=build_pi(b, ancillas, choice),
        contexts=tuple(range(len(b.contexts))),
        ancillas=tuple(ancillas),
        choice=tuple(choice),
    )
    return b2, pair


@dataclass
class HomReport:
    checks: dict
    failures: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = []
        for name, ok in self.checks.items():
            out.append(f"{name}: {'ok' if ok else 'FAIL'}")
            out += [f"  {f}" for f in self.failures.get(name, [])[:10]]
        out.append("PASS" if self.passed else "FAIL")
        return out


def verify_hom_pair(b: Bcs, b2: Bcs, h: HomPair) -> HomReport:
    """Exact checks of the homomorphism pair inside the context subalgebras of B."""
    checks, fails = {}, {}

    def record(name, problems):
        checks[name] = not problems
        fails[name] = problems

    # (1) pi after iota is the identity
    probs = []
    for x in b.vars:
        if x not in h.iota:
            probs.append(f"iota undefined on {x}")
            continue
        img = h.pi.get(h.iota[x])
        if img is None or img != AlgebraElement.generator(x):
            probs.append(f"pi(iota({x})) = {img} != {x}")
    record("pi_iota_identity", probs)

    # (2) images are involutions living in the matching context subalgebra of B
    probs = []
    for j, ctx2 in enumerate(b2.contexts):
        U = b.contexts[h.contexts[j]].vars
        for g in ctx2.vars:
            img = h.pi.get(g)
            if img is None:
                probs.append(f"pi undefined on {g}")
                continue
            used = {img.varset[t] for mask in img.nonconstant_monomials() for t in range(img.k) if (mask >> t) & 1}
            if not used <= set(U):
                probs.append(f"pi({g}) uses {sorted(used - set(U))} outside context {h.contexts[j]}")
                continue
            e = img.embed(U)
            if e * e != AlgebraElement.one(U):
                probs.append(f"pi({g})^2 != 1")
    record("pi_well_defined", probs)
    if not checks["pi_well_defined"]:
        record("pi_kills_relations", ["skipped: images not well defined"])
    else:
        # (3) pi sends every non-satisfying projection of B′ to 0 or to a vanishing projection of B
        probs = []
        for j, ctx2 in enumerate(b2.contexts):
            ctx = b.contexts[h.contexts[j]]
            U, W = ctx.vars, ctx2.vars
            sat_b = satisfying_mask(U, ctx.constraints)
            sat2 = satisfying_mask(W, ctx2.constraints)
            images = {g: h.pi[g].embed(U) for g in W}
            one = AlgebraElement.one(U)
            for t in np.flatnonzero(~sat2):
                signs = index_to_signs(int(t), len(W))
                p = one
                for g, s in zip(W, signs):
                    p = p * ((one + images[g] * s) * Fraction(1, 2))
                if p.is_zero():
                    continue
                phi0 = {x: s for x, s in zip(W, signs) if x in U}
                phi0_idx = sum(1 << q for q, x in enumerate(U) if phi0[x] == -1)
                if p != projection_of_assignment(U, phi0) or sat_b[phi0_idx]:
                    probs.append(f"context {j}: pi(Pi_{signs}) = {p} is not a vanishing projection")
        record("pi_kills_relations", probs)

    # (4) iota: every extension of a non-satisfying assignment of B is non-satisfying in B′
    probs = []
    for j, ctx2 in enumerate(b2.contexts):
        ctx = b.contexts[h.contexts[j]]
        U, W = ctx.vars, ctx2.vars
        pos = [W.index(x) for x in U]
        sat_b = satisfying_mask(U, ctx.constraints)
        sat2 = satisfying_mask(W, ctx2.constraints)
        for t in np.flatnonzero(sat2):
            t = int(t)
            phi_idx = sum(((t >> p) & 1) << q for q, p in enumerate(pos))
            if not sat_b[phi_idx]:
                probs.append(f"context {j}: extension {index_to_signs(t, len(W))} of a non-satisfying assignment satisfies B′")
    record("iota_kills_relations", probs)
    return HomReport(checks, fails)


LANG_3SAT = tuple(Relation.clause(p) for p in itertools.product((1, -1), repeat=3))


def language_gadgets(
    b: Bcs, L: Sequence[Relation], max_y: int = 1, max_c: int = 4, budget: int = 2_000_000
) -> dict:
    """A gadget over ``L`` for every relation used in ``b``; relations already in ``L`` map to themselves."""
    out = {}
    for c in b.constraints:
        R = c.relation
        if R in out:
            continue
        if R in L:
            out[R] = self_gadget(R)
            continue
        g = pp_define_search(L, R, max_y=max_y, max_c=max_c, budget=budget)
        if g is None:
            raise DomainError(f"no gadget for {R!r} within |Y| <= {max_y}, {max_c} constraints")
        out[R] = g
    return out
