"""Presentations of BCS algebras, synchronous algebras and solution groups."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import (
    Bcs,
    Constraint,
    Context,
    DomainError,
    Relation,
    context_satisfying,
    index_to_signs,
)
from .zalgebra import (
    AlgebraElement,
    constraint_nonsat_projections,
    constraint_poly,
    projection_of_assignment,
)

FORMS = ("contexts", "constraints", "polynomial")


@dataclass(frozen=True)
class Presentation:
    """Generators and relations of a finitely presented *-algebra.

    ``vanishing`` holds ``(context id, element)`` pairs; every element lives
    in the commutative subalgebra of that context. Synchronous presentations
    use ``sums`` (each tuple of generators adds to 1) and ``orthogonal``
    (pairs whose product is 0) instead, and their generators are projections
    rather than involutions.
    """

    generators: tuple
    form: str
    contexts: tuple = ()
    involutions: tuple = ()
    commutations: frozenset = frozenset()
    vanishing: tuple = ()
    projections: tuple = ()
    sums: tuple = ()
    orthogonal: tuple = ()


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def context_commutations(b: Bcs) -> frozenset:
    pairs = set()
    for ctx in b.contexts:
        for x, y in itertools.combinations(ctx.vars, 2):
            pairs.add(_pair(x, y))
    return frozenset(pairs)


def build_acon(b: Bcs) -> Presentation:
    """Involution and in-context commutation relations only."""
    return Presentation(
        generators=b.vars,
        form="acon",
        contexts=tuple(ctx.vars for ctx in b.contexts),
        involutions=b.vars,
        commutations=context_commutations(b),
    )


def context_vanishing(ctx: Context, form: str) -> list[AlgebraElement]:
    """Vanishing elements of one context in the requested form, over ``ctx.vars``."""
    if form == "contexts":
        sat = context_satisfying(ctx)
        return [
            projection_of_assignment(ctx.vars, dict(zip(ctx.vars, index_to_signs(i, len(ctx.vars)))))
            for i in np.flatnonzero(~sat)
        ]
    if form == "constraints":
        return [p.embed(ctx.vars) for c in ctx.constraints for p in constraint_nonsat_projections(c)]
    if form == "polynomial":
        out = []
        for c in ctx.constraints:
            e = constraint_poly(c) + 1
            if not e.is_zero():
                out.append(e.embed(ctx.vars))
        return out
    raise DomainError(f"unknown form {form!r}; expected one of {FORMS}")


def build_algebra(b: Bcs, form: str = "contexts") -> Presentation:
    """Presentation of 𝒜(B) in one of the three equivalent forms."""
    if form not in FORMS:
        raise DomainError(f"unknown form {form!r}; expected one of {FORMS}")
    vanishing = []
    for i, ctx in enumerate(b.contexts):
        vanishing.extend((i, e) for e in context_vanishing(ctx, form))
    base = build_acon(b)
    return Presentation(
        generators=base.generators,
        form=form,
        contexts=base.contexts,
        involutions=base.involutions,
        commutations=base.commutations,
        vanishing=tuple(vanishing),
    )


@dataclass(frozen=True)
class VanishingSet:
    """Per context, the assignments (as sign tuples over the context order) forced to vanish."""

    contexts: tuple
    sets: tuple

    def __eq__(self, other):
        if not isinstance(other, VanishingSet):
            return NotImplemented
        return self.contexts == other.contexts and self.sets == other.sets

    def complement(self, i: int) -> set:
        k = len(self.contexts[i])
        return {index_to_signs(j, k) for j in range(1 << k)} - self.sets[i]


def vanishing_set(b: Bcs, form: str = "contexts") -> VanishingSet:
    """Assignments whose projections lie in the ideal generated by the form's relations.

    Inside the finite commutative algebra of a context, the ideal generated
    by a set of elements is spanned by the minimal projections on the union
    of their supports, so the computation is exact.
    """
    pres = build_algebra(b, form)
    supports: list[set] = [set() for _ in b.contexts]
    for i, e in pres.vanishing:
        supports[i] |= e.support()
    sets = tuple(
        frozenset(index_to_signs(j, len(ctx.vars)) for j in supports[i]) for i, ctx in enumerate(b.contexts)
    )
    return VanishingSet(tuple(ctx.vars for ctx in b.contexts), sets)


# --------------------------------------------------------------------------
# synchronous games


def sync_generator(i: int, a: int) -> str:
    return f"e[{i}][{a}]"


def synchronous_presentation(g) -> Presentation:
    """Generators ``e[i][a]``: projections summing to 1 per question, λ-orthogonality."""
    lam = np.asarray(g.lam, dtype=bool)
    nI, nO = lam.shape[0], lam.shape[2]
    for i in range(nI):
        off = lam[i, i] & ~np.eye(nO, dtype=bool)
        if off.any():
            a, b = map(int, np.argwhere(off)[0])
            raise DomainError(f"the synchronous condition fails: λ({i},{i},{a},{b}) = 1")
    gens = tuple(sync_generator(i, a) for i in range(nI) for a in range(nO))
    sums = tuple(tuple(sync_generator(i, a) for a in range(nO)) for i in range(nI))
    orth = set()
    for i, j, a, b in np.argwhere(~lam):
        x, y = sync_generator(int(i), int(a)), sync_generator(int(j), int(b))
        orth.add((x, y))
    return Presentation(
        generators=gens,
        form="synchronous",
        projections=gens,
        sums=sums,
        orthogonal=tuple(sorted(orth)),
    )


# --------------------------------------------------------------------------
# solution groups


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple
    relators: tuple
    note: str = field(default="")

    def text(self) -> str:
        rel = ", ".join(_word_text(r) for r in self.relators)
        out = f"< {', '.join(self.generators)} | {rel} >"
        if self.note:
            out += f"\n{self.note}"
        return out


def _word_text(word: Sequence[str]) -> str:
    if not word:
        return "1"
    parts = []
    for letter, run in itertools.groupby(word):
        n = len(list(run))
        parts.append(letter if n == 1 else f"{letter}^{n}")
    return "*".join(parts)


def parse_group_text(text: str) -> GroupPresentation:
    body, _, note = text.partition("\n")
    body = body.strip()
    if not (body.startswith("<") and body.endswith(">")):
        raise DomainError("group presentation must look like '< gens | relators >'")
    gens_s, _, rels_s = body[1:-1].partition("|")
    gens = tuple(g.strip() for g in gens_s.split(",") if g.strip())
    rels = []
    for r in rels_s.split(","):
        r = r.strip()
        if not r:
            continue
        word = []
        if r != "1":
            for f in r.split("*"):
                name, _, power = f.partition("^")
                word.extend([name] * (int(power) if power else 1))
        rels.append(tuple(word))
    return GroupPresentation(gens, tuple(rels), note.strip())


def solution_group(A, rhs, names: Sequence[str] | None = None) -> GroupPresentation:
    """Solution group Γ(A, b): generators ``x_j`` and a central involution ``J``."""
    A = np.asarray(A, dtype=np.int64) % 2
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1) % 2
    m = A.shape[0]
    n = A.shape[1] if A.ndim == 2 else 0
    names = tuple(f"x{j + 1}" for j in range(n)) if names is None else tuple(names)
    if "J" in names:
        raise DomainError("'J' is reserved for the central generator")
    rels: list[tuple] = [("J", "J")]
    rels += [(x, "J", x, "J") for x in names]
    rels += [(x, x) for x in names]
    seen = set()
    for i in range(m):
        support = [names[j] for j in range(n) if A[i, j]]
        for x, y in itertools.combinations(support, 2):
            if _pair(x, y) not in seen:
                seen.add(_pair(x, y))
                rels.append((x, y, x, y))
    for i in range(m):
        support = tuple(names[j] for j in range(n) if A[i, j])
        rels.append(support + (("J",) if rhs[i] else ()))
    note = "A(B) = CΓ(A,b) / <J = -1>"
    return GroupPresentation(names + ("J",), tuple(rels), note)


def linear_system_of(b: Bcs) -> tuple[np.ndarray, np.ndarray]:
    """Recover ``(A, rhs)`` from a BCS whose constraints are all monomial relations.

    Raises ``DomainError`` on a nonlinear constraint.
    """
    names = {v: j for j, v in enumerate(b.vars)}
    rows, rhs = [], []
    for c in b.constraints:
        mono = monomial_relation(c)
        if mono is None:
            raise DomainError(f"constraint on {c.scope} is not a monomial (linear) relation")
        variables, value = mono
        row = [0] * len(b.vars)
        for v in variables:
            row[names[v]] = 1
        rows.append(row)
        rhs.append(0 if value == 1 else 1)
    A = np.array(rows, dtype=np.int64).reshape(len(rows), len(b.vars))
    return A, np.array(rhs, dtype=np.int64)


def monomial_relation(c: Constraint):
    """``(variables, value)`` if the constraint says ``prod(variables) = value``, else ``None``.

    Uses ``P_R(S) = -value * prod(variables)`` for linear constraints.
    """
    p = constraint_poly(c)
    nz = [(mask, n) for mask, n in enumerate(p.num) if n]
    if len(nz) != 1:
        return None
    mask, n = nz[0]
    if p.den != 1 or abs(n) != 1:
        return None
    variables = tuple(v for i, v in enumerate(p.varset) if (mask >> i) & 1)
    return variables, -int(n)


# --------------------------------------------------------------------------
# ancilla commute trick


def fresh_name(taken, stem: str) -> str:
    taken = set(taken)
    if stem not in taken:
        return stem
    for n in itertools.count(1):
        cand = f"{stem}{n}"
        if cand not in taken:
            return cand


def force_commute(b: Bcs, x: str, y: str, ancilla: str | None = None) -> Bcs:
    """Add ancilla ``z`` with ``x y z = 1`` in a new context so that ``x`` and ``y`` commute."""
    for v in (x, y):
        if v not in b.vars:
            raise DomainError(f"unknown variable {v!r}")
    if any(x in ctx.vars and y in ctx.vars for ctx in b.contexts):
        warnings.warn(f"{x} and {y} already share a context; system unchanged", stacklevel=2)
        return b
    z = ancilla or fresh_name(b.vars, f"z_{x}_{y}")
    if z in b.vars:
        raise DomainError(f"ancilla name {z!r} already in use")
    c = Constraint((x, y, z), Relation.parity(3, 1))
    return Bcs(b.vars + (z,), b.contexts + (Context((x, y, z), (c,)),))
