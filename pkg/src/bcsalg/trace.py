"""Word rewriting over monomial relations and a linear relaxation for tracial states.

Words are products of self-adjoint involutions. Two rules are built in
(``x x -> 1`` and swapping letters that share a context); the remaining
rule substitutes a letter by the rest of a monomial relation it occurs in,
``x -> c * (m minus x)``. Rewriting is tracked at the level of individual
steps so that every certificate can be replayed without search.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import Bcs, DomainError
from .present import monomial_relation
from .zalgebra import AlgebraElement, constraint_poly

DEFAULT_DEPTH = 12
DEFAULT_MAXLEN = 4
DEFAULT_WORD_LEN = 8
DEFAULT_STATES = 200_000


@dataclass(frozen=True)
class Word:
    sign: int
    letters: tuple

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError("word sign must be +1 or -1")
        object.__setattr__(self, "letters", tuple(self.letters))

    @classmethod
    def of(cls, *letters: str, sign: int = 1) -> "Word":
        return cls(sign, letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.sign * other.sign, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.sign, self.letters[::-1])

    def __str__(self) -> str:
        body = "*".join(self.letters) if self.letters else "1"
        return body if self.sign == 1 else f"-{body}"


@dataclass(frozen=True)
class WordPresentation:
    """Generators, commuting pairs and monomial relators ``prod(vars) = value``."""

    generators: tuple
    commuting: frozenset
    relators: tuple
    _nf: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def commute(self, x: str, y: str) -> bool:
        return x == y or (min(x, y), max(x, y)) in self.commuting


def word_presentation(b: Bcs) -> WordPresentation:
    pairs = set()
    for ctx in b.contexts:
        for x, y in itertools.combinations(ctx.vars, 2):
            pairs.add((min(x, y), max(x, y)))
    rels = []
    for c in b.constraints:
        mono = monomial_relation(c)
        if mono is not None and mono[0]:
            rels.append(mono)
    return WordPresentation(tuple(b.vars), frozenset(pairs), tuple(dict.fromkeys(rels)))


# --------------------------------------------------------------------------
# step-level rewriting


class _Rewriter:
    """Applies steps to a signed letter list and optionally records them."""

    def __init__(self, p: WordPresentation, sign: int, letters, log: list | None):
        self.p = p
        self.sign = sign
        self.w = list(letters)
        self.log = log

    def swap(self, i: int):
        w = self.w
        if w[i] == w[i + 1] or not self.p.commute(w[i], w[i + 1]):
            raise DomainError(f"illegal swap at {i}: {w[i]}, {w[i + 1]}")
        w[i], w[i + 1] = w[i + 1], w[i]
        if self.log is not None:
            self.log.append(("swap", i))

    def cancel(self, i: int):
        w = self.w
        if w[i] != w[i + 1]:
            raise DomainError(f"illegal cancel at {i}: {w[i]}, {w[i + 1]}")
        del w[i:i + 2]
        if self.log is not None:
            self.log.append(("cancel", i))

    def subst(self, r: int, i: int):
        variables, value = self.p.relators[r]
        x = self.w[i]
        if x not in variables:
            raise DomainError(f"letter {x} does not occur in relator {r}")
        rest = [v for v in variables if v != x]
        self.w[i:i + 1] = rest
        self.sign *= value
        if self.log is not None:
            self.log.append(("subst", r, i))

    def normalize(self):
        """Free cancellation up to commutation, then the lexicographic normal form."""
        order = {g: k for k, g in enumerate(self.p.generators)}
        w = self.w
        changed = True
        while changed:
            changed = False
            for i in range(len(w)):
                x = w[i]
                for j in range(i + 1, len(w)):
                    if w[j] == x:
                        for k in range(j, i + 1, -1):
                            self.swap(k - 1)
                        self.cancel(i)
                        changed = True
                        break
                    if not self.p.commute(x, w[j]):
                        break
                if changed:
                    break
        start = 0
        while start < len(w):
            best = None
            for p in range(start, len(w)):
                if all(self.p.commute(w[q], w[p]) and w[q] != w[p] for q in range(start, p)):
                    if best is None or order[w[p]] < order[w[best]]:
                        best = p
            for k in range(best, start, -1):
                self.swap(k - 1)
            start += 1

    def word(self) -> Word:
        return Word(self.sign, tuple(self.w))


def racg_normal_form(w: Word, p: WordPresentation, log: list | None = None) -> Word:
    r = _Rewriter(p, w.sign, w.letters, log)
    r.normalize()
    return r.word()


@dataclass(frozen=True)
class Certificate:
    start: Word
    steps: tuple
    end: Word

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def substitutions(self) -> int:
        return sum(1 for s in self.steps if s[0] == "subst")


def check_certificate(cert: Certificate, p: WordPresentation) -> bool:
    """Replay every step; no search involved."""
    r = _Rewriter(p, cert.start.sign, cert.start.letters, None)
    try:
        for step in cert.steps:
            kind = step[0]
            if kind == "swap":
                r.swap(step[1])
            elif kind == "cancel":
                r.cancel(step[1])
            elif kind == "subst":
                r.subst(step[1], step[2])
            else:
                return False
    except (DomainError, IndexError):
        return False
    return r.word() == cert.end


# --------------------------------------------------------------------------
# bounded search


def _moves(state: Word, p: WordPresentation):
    for i, x in enumerate(state.letters):
        for ri, (variables, _) in enumerate(p.relators):
            if x in variables:
                yield ri, i


def _apply(state: Word, move, p: WordPresentation, log=None) -> Word:
    r = _Rewriter(p, state.sign, state.letters, log)
    r.subst(*move)
    if log is not None:
        r.normalize()
        return r.word()
    letters = tuple(r.w)
    nf = p._nf.get(letters)
    if nf is None:
        r.normalize()
        nf = p._nf[letters] = tuple(r.w)
    return Word(r.sign, nf)


@dataclass
class SearchResult:
    found: Word | None
    certificate: Certificate | None
    depth: int
    states: int
    exhausted: bool


def _bfs(start: Word, p: WordPresentation, depth: int, max_word: int, max_states: int, goal) -> SearchResult:
    log0: list = []
    s0 = racg_normal_form(start, p, log0)
    parent = {s0: None}
    frontier = deque([(s0, 0)])
    hit = s0 if goal(s0) else None
    exhausted = True
    while frontier and hit is None:
        s, d = frontier.popleft()
        if d >= depth:
            exhausted = False
            continue
        for mv in _moves(s, p):
            t = _apply(s, mv, p)
            if len(t.letters) > max_word or t in parent:
                continue
            parent[t] = (s, mv)
            if goal(t):
                hit = t
                break
            if len(parent) >= max_states:
                exhausted = False
                frontier.clear()
                break
            frontier.append((t, d + 1))
    if hit is None:
        return SearchResult(None, None, depth, len(parent), exhausted)
    chain = []
    t = hit
    while parent[t] is not None:
        s, mv = parent[t]
        chain.append((s, mv))
        t = s
    steps = list(log0)
    for s, mv in reversed(chain):
        _apply(s, mv, p, steps)
    cert = Certificate(start, tuple(steps), hit)
    return SearchResult(hit, cert, len(chain), len(parent), exhausted)


@dataclass(frozen=True)
class NormalForm:
    word: Word
    certificate: Certificate
    complete: bool


def normal_form(
    w: Word, p: WordPresentation, depth: int = DEFAULT_DEPTH, max_word: int = DEFAULT_WORD_LEN,
    max_states: int = DEFAULT_STATES,
) -> NormalForm | None:
    """Least word (length, then generator order) reachable within ``depth`` substitutions.

    ``None`` means the state budget ran out first. ``complete`` is set when the
    reachable set closed before the depth bound. The search stops early at
    the first empty word, which nothing can beat on length.
    """
    order = {g: k for k, g in enumerate(p.generators)}

    def key(s: Word):
        return (len(s.letters), [order[x] for x in s.letters], -s.sign)

    log0: list = []
    s0 = racg_normal_form(w, p, log0)
    parent = {s0: None}
    frontier = deque([(s0, 0)])
    complete = True
    done = not s0.letters
    while frontier and not done:
        s, d = frontier.popleft()
        if d >= depth:
            complete = False
            continue
        for mv in _moves(s, p):
            t = _apply(s, mv, p)
            if len(t.letters) > max_word or t in parent:
                continue
            parent[t] = (s, mv)
            if len(parent) > max_states:
                return None
            if not t.letters:
                done, complete = True, False
                break
            frontier.append((t, d + 1))
    best = min(parent, key=key)
    chain = []
    t = best
    while parent[t] is not None:
        s, mv = parent[t]
        chain.append((s, mv))
        t = s
    steps = list(log0)
    for s, mv in reversed(chain):
        _apply(s, mv, p, steps)
    return NormalForm(best, Certificate(w, tuple(steps), best), complete)


def commutator_word(u: Word, w: Word) -> Word:
    return u * w * u.inverse() * w.inverse()


def anticommute_certificate(
    u: Word, w: Word, p: WordPresentation, depth: int = DEFAULT_DEPTH, max_word: int = DEFAULT_WORD_LEN,
    max_states: int = DEFAULT_STATES,
) -> Certificate | None:
    """Certificate that ``u w u^-1 w^-1`` rewrites to ``-1``, if one is found within the bounds."""
    target = Word(-1, ())
    res = _bfs(commutator_word(u, w), p, depth, max_word, max_states, lambda s: s == target)
    return res.certificate


def commutator_search(
    u: Word, w: Word, p: WordPresentation, depth: int = DEFAULT_DEPTH, max_word: int = DEFAULT_WORD_LEN,
    max_states: int = DEFAULT_STATES,
) -> SearchResult:
    """Search the commutator until it reaches ``+1`` or ``-1``."""
    return _bfs(commutator_word(u, w), p, depth, max_word, max_states, lambda s: not s.letters)


# --------------------------------------------------------------------------
# trace relaxation


def canonical_monomial(w: Word, p: WordPresentation) -> Word:
    """Normal form, minimised over cyclic rotations (the trace is rotation invariant)."""
    order = {g: k for k, g in enumerate(p.generators)}
    base = racg_normal_form(w, p)
    best = base
    L = base.letters
    for k in range(1, len(L)):
        cand = racg_normal_form(Word(base.sign, L[k:] + L[:k]), p)
        if (len(cand.letters), [order[x] for x in cand.letters]) < (len(best.letters), [order[x] for x in best.letters]):
            best = cand
    return best


@dataclass
class TraceEquation:
    coeffs: dict
    rhs: Fraction
    source: str
    certificate: Certificate | None = None
    component: str | None = None

    def text(self) -> str:
        parts = []
        for m, c in self.coeffs.items():
            name = f"τ({'*'.join(m) if m else '1'})"
            parts.append(f"{_frac(c)}*{name}" if c != 1 else name)
        return f"{' + '.join(parts) or '0'} = {_frac(self.rhs)}"


def _frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass
class TraceResult:
    status: str
    equations: list
    log: list
    clash: tuple | None = None
    identifications: dict = field(default_factory=dict)

    @property
    def infeasible(self) -> bool:
        return self.status == "INFEASIBLE"

    def variables(self) -> list:
        return sorted({m for e in self.equations for m in e.coeffs}, key=lambda m: (len(m), m))

    def residuals(self, images, dim: int) -> float:
        """Largest violation by the normalized matrix trace of the given images."""
        worst = 0.0
        cache = {}
        for e in self.equations:
            total = 0.0
            for m, c in e.coeffs.items():
                if m not in cache:
                    M = np.eye(dim, dtype=complex)
                    for x in m:
                        M = M @ images[x]
                    cache[m] = np.trace(M) / dim
                total += float(c) * cache[m]
            worst = max(worst, abs(total - float(e.rhs)))
        return worst


def _context_monomials(U: Sequence[str], maxlen: int):
    for size in range(len(U) + 1):
        if size > maxlen:
            break
        for combo in itertools.combinations(U, size):
            yield combo


def _components(b: Bcs, p: WordPresentation) -> dict:
    """Connected components of generators linked by monomial relators."""
    parent = {g: g for g in b.vars}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for variables, _ in p.relators:
        for v in variables[1:]:
            parent[find(v)] = find(variables[0])
    return {g: find(g) for g in b.vars}


def _shadow_reps(b: Bcs, p: WordPresentation, comp: dict, max_qubits: int = 2) -> dict:
    """A Pauli rep of the monomial part of each relator component, when one is small enough to find.

    Every rewriting rule holds in such a rep, so a pair that commutes there
    can never be certified to anticommute; those searches are skipped.
    """
    from .model import Context
    from .reps import pauli_search
    from .model import ResourceError

    out = {}
    for root in dict.fromkeys(comp.values()):
        vs = tuple(v for v in b.vars if comp[v] == root)
        if len(vs) < 2:
            continue
        members = set(vs)
        contexts = []
        for ctx in b.contexts:
            U = tuple(v for v in ctx.vars if v in members)
            if not U:
                continue
            cons = tuple(
                c for c in ctx.constraints
                if set(c.variables) <= members and monomial_relation(c) is not None
            )
            contexts.append(Context(U, cons))
        sub = Bcs(vs, tuple(contexts))
        for q in range(1, max_qubits + 1):
            try:
                rep = pauli_search(sub, q)
            except ResourceError:
                break
            if rep is not None:
                out[root] = rep
                break
    return out


def _may_anticommute(rep, m, g) -> bool:
    if rep is None:
        return True
    M = np.eye(rep.dim, dtype=complex)
    for x in m:
        M = M @ rep[x]
    G = rep[g]
    return bool(np.allclose(M @ G, -G @ M, atol=1e-9))


def trace_feasibility(
    b: Bcs,
    depth: int = DEFAULT_DEPTH,
    maxlen: int = DEFAULT_MAXLEN,
    max_word: int = DEFAULT_WORD_LEN,
    max_states: int = 20_000,
) -> TraceResult:
    """Linear equations every tracial state must satisfy; inconsistency proves there is none.

    Sources: τ(1) = 1; τ(a (1 + P_R(S))) = 0 for each constraint and each
    monomial ``a`` of its context; τ(m) = 0 when ``m`` provably anticommutes
    with a generator. Monomials are identified up to normal form and
    rotation.
    """
    p = word_presentation(b)
    log: list[str] = []
    equations: list[TraceEquation] = []
    idents: dict = {}

    def key_of(letters) -> tuple[int, tuple]:
        w = canonical_monomial(Word(1, tuple(letters)), p)
        if tuple(letters) != w.letters:
            idents.setdefault(w.letters, set()).add(tuple(letters))
        return w.sign, w.letters

    equations.append(TraceEquation({(): Fraction(1)}, Fraction(1), "normalization"))
    for ci, ctx in enumerate(b.contexts):
        U = ctx.vars
        for c in ctx.constraints:
            rel = (constraint_poly(c) + 1).embed(U)
            if rel.is_zero():
                continue
            for a in _context_monomials(U, maxlen):
                e = AlgebraElement.monomial(U, a) * rel
                coeffs: dict = {}
                too_long = False
                for m, f in e.coeff_map().items():
                    letters = tuple(v for v in U if v in m)
                    if len(letters) > maxlen:
                        too_long = True
                        break
                    s, k = key_of(letters)
                    coeffs[k] = coeffs.get(k, Fraction(0)) + s * f
                if too_long:
                    continue
                coeffs = {k: v for k, v in coeffs.items() if v}
                if not coeffs:
                    continue
                rhs = -coeffs.pop((), Fraction(0))
                a_txt = "*".join(a) if a else "1"
                equations.append(TraceEquation(coeffs, rhs, f"context {ci}: τ({a_txt}·(1 + P_R(S))) = 0"))

    monomials = sorted({m for e in equations for m in e.coeffs if m}, key=lambda m: (len(m), [p.generators.index(x) for x in m]))
    comp = _components(b, p)
    shadows = _shadow_reps(b, p, comp)
    certified = 0
    for m in monomials:
        comps = {comp[x] for x in m}
        if len(comps) != 1:
            continue
        (c0,) = comps
        u = Word(1, m)
        for g in p.generators:
            if comp[g] != c0:
                continue
            if all(p.commute(g, x) for x in m):
                continue
            if not _may_anticommute(shadows.get(c0), m, g):
                continue
            res = commutator_search(u, Word.of(g), p, depth, max_word, max_states)
            if res.found is not None and res.found.sign == -1:
                certified += 1
                equations.append(
                    TraceEquation(
                        {m: Fraction(1)}, Fraction(0), f"{'*'.join(m)} anticommutes with {g}", res.certificate, c0
                    )
                )
                log.append(
                    f"τ({'*'.join(m)}) = 0: {'*'.join(m)} anticommutes with {g} "
                    f"({res.certificate.substitutions} substitutions, {len(res.certificate)} steps)"
                )
                break
    for k, ws in idents.items():
        for w in sorted(ws):
            if w != k:
                log.append(f"identify τ({'*'.join(w) or '1'}) with τ({'*'.join(k) or '1'})")

    log.append(f"{certified} monomials certified to anticommute with a generator")
    status, clash, extra = _solve(equations)
    log += extra
    return TraceResult(status, equations, log, clash, idents)


def _eliminate(equations: Sequence[TraceEquation], skip=frozenset(), last=None):
    """Row reduction with provenance; returns (pivot rows, contradiction row or None).

    Pivots follow a fixed column order (``last`` is ordered after everything
    else), so the result is a reduced echelon form: a variable fixed by the
    system and ordered last ends up alone in its row.
    """

    def col(m):
        return (m == last, len(m), m)

    rows = []
    for idx, e in enumerate(equations):
        if idx in skip:
            continue
        rows.append((dict(e.coeffs), e.rhs, {idx: Fraction(1)}))
    pivots: dict = {}
    for coeffs, rhs, prov in rows:
        coeffs, prov = dict(coeffs), dict(prov)
        for v, (pc, prhs, pprov) in pivots.items():
            f = coeffs.get(v)
            if f:
                for k, c in pc.items():
                    coeffs[k] = coeffs.get(k, Fraction(0)) - f * c
                rhs -= f * prhs
                for k, c in pprov.items():
                    prov[k] = prov.get(k, Fraction(0)) - f * c
        coeffs = {k: c for k, c in coeffs.items() if c}
        prov = {k: c for k, c in prov.items() if c}
        if not coeffs:
            if rhs != 0:
                return pivots, (rhs, prov)
            continue
        v = min(coeffs, key=col)
        c = coeffs[v]
        coeffs = {k: x / c for k, x in coeffs.items()}
        rhs = rhs / c
        prov = {k: x / c for k, x in prov.items()}
        for u, (uc, urhs, uprov) in list(pivots.items()):
            f = uc.get(v)
            if f:
                nc = {k: uc.get(k, Fraction(0)) - f * coeffs.get(k, Fraction(0)) for k in set(uc) | set(coeffs)}
                nprov = {k: uprov.get(k, Fraction(0)) - f * prov.get(k, Fraction(0)) for k in set(uprov) | set(prov)}
                pivots[u] = ({k: x for k, x in nc.items() if x}, urhs - f * rhs, {k: x for k, x in nprov.items() if x})
        pivots[v] = (coeffs, rhs, prov)
    return pivots, None


def _solve(equations: list[TraceEquation]):
    pivots, bad = _eliminate(equations)
    if bad is None:
        return "UNKNOWN", None, ["linear system consistent: no tracial obstruction found"]
    lines = []
    # name a clashing variable: drop the anticommutation facts of one component and
    # see whether the rest of the system pins one of its monomials to a nonzero value
    tried = set()
    for idx, e in enumerate(equations):
        if e.certificate is None:
            continue
        (m,) = e.coeffs
        skip = frozenset(k for k, f in enumerate(equations) if f.certificate is not None and f.component == e.component)
        if (skip, m) in tried:
            continue
        tried.add((skip, m))
        piv, bad2 = _eliminate(equations, skip=skip, last=m)
        if bad2 is not None or m not in piv:
            continue
        coeffs, rhs, prov = piv[m]
        if set(coeffs) == {m} and rhs != e.rhs:
            name = f"τ({'*'.join(m)})"
            used = [equations[k] for k in sorted(prov)]
            lines.append(f"{name} = {_frac(rhs)} from:")
            lines += [f"  [{u.source}] {u.text()}" for u in used]
            lines.append(f"{name} = {_frac(e.rhs)} from: [{e.source}]")
            lines.append(f"contradiction: {_frac(rhs)} != {_frac(e.rhs)}")
            return "INFEASIBLE", (m, rhs, e.rhs), lines
    rhs, prov = bad
    lines.append(f"contradiction 0 = {_frac(rhs)} from:")
    lines += [f"  [{equations[k].source}] {equations[k].text()}" for k in sorted(prov)]
    return "INFEASIBLE", None, lines
