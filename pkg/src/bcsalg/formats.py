"""JSON and text formats for systems, presentations, reps, games, gadgets and proofs.

Parsers report the JSON path of the offending value (``$.contexts[0].scope[2]``).
Emitters use a canonical key order so outputs diff cleanly.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .model import Bcs, Constraint, Context, Relation, default_contexts, index_to_signs
from .present import Presentation
from .reps import MatrixRep
from .zalgebra import AlgebraElement, dump_element, parse_element


class FormatError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno} column {e.colno}", e.msg) from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _expect(cond: bool, where: str, message: str):
    if not cond:
        raise FormatError(where, message)


# --------------------------------------------------------------------------
# systems


def _sign_value(v, where: str, zero_one: bool) -> int:
    if zero_one:
        _expect(v in (0, 1) and not isinstance(v, bool), where, f"expected 0 or 1, got {v!r}")
        return -1 if v == 1 else 1
    _expect(v in (1, -1) and not isinstance(v, bool), where, f"expected +1 or -1, got {v!r}")
    return int(v)


def _term(t, where: str):
    if isinstance(t, str):
        if t in ("+1", "1"):
            return 1
        if t == "-1":
            return -1
        _expect(bool(t), where, "empty variable name")
        return t
    if isinstance(t, int) and not isinstance(t, bool) and t in (1, -1):
        return t
    raise FormatError(where, f"scope entries are variable names or '+1'/'-1', got {t!r}")


def _literal(t, where: str):
    """``x`` (positive), ``-x``/``~x``/``¬x`` (negated) or a constant."""
    if isinstance(t, str) and t[:1] in ("-", "~", "¬") and t not in ("-1",):
        name = t[1:]
        _expect(bool(name), where, "empty literal")
        return name, -1
    term = _term(t, where)
    return term, 1


def relation_to_json(R: Relation) -> dict:
    return {"type": "table", "arity": R.arity, "members": [list(m) for m in R.members]}


def relation_from_json(d, where: str = "$", zero_one: bool | None = None) -> Relation:
    _expect(isinstance(d, dict), where, "relation must be an object")
    kind = d.get("type", "table")
    _expect(kind == "table", where, "only table relations can stand alone")
    arity = d.get("arity")
    _expect(isinstance(arity, int) and arity >= 0, f"{where}.arity", "arity must be a non-negative integer")
    members = d.get("members", [])
    _expect(isinstance(members, list), f"{where}.members", "members must be a list")
    if zero_one is None:
        zero_one = any(v == 0 for m in members if isinstance(m, list) for v in m)
    rows = []
    for i, m in enumerate(members):
        w = f"{where}.members[{i}]"
        _expect(isinstance(m, list) and len(m) == arity, w, f"expected a list of length {arity}")
        rows.append(tuple(_sign_value(v, f"{w}[{j}]", zero_one) for j, v in enumerate(m)))
    return Relation.from_members(arity, rows)


def _constraint_from_json(d, where: str, zero_one, allowed=None) -> Constraint:
    _expect(isinstance(d, dict), where, "constraint must be an object")

    def known(terms, path):
        for i, t in enumerate(terms):
            if allowed is not None and isinstance(t, str):
                _expect(t in allowed, f"{where}.{path}[{i}]", f"unknown variable {t!r}")
        return terms

    rel = d.get("relation")
    _expect(isinstance(rel, dict), f"{where}.relation", "missing relation object")
    kind = rel.get("type", "table")
    scope = d.get("scope")
    if scope is not None:
        _expect(isinstance(scope, list), f"{where}.scope", "scope must be a list")
        scope = [_term(t, f"{where}.scope[{i}]") for i, t in enumerate(scope)]
    if kind == "table":
        R = relation_from_json(rel, f"{where}.relation", zero_one)
        _expect(scope is not None, f"{where}.scope", "table relations need a scope")
        _expect(len(scope) == R.arity, f"{where}.scope", f"scope length {len(scope)} != arity {R.arity}")
        return Constraint(tuple(known(scope, "scope")), R)
    if kind == "clause":
        lits = rel.get("literals")
        _expect(isinstance(lits, list), f"{where}.relation.literals", "literals must be a list")
        parsed = [_literal(t, f"{where}.relation.literals[{i}]") for i, t in enumerate(lits)]
        terms = known([t for t, _ in parsed], "relation.literals")
        if scope is not None:
            _expect(scope == terms, f"{where}.scope", "scope must list the literals' variables in order")
        return Constraint(tuple(terms), Relation.clause([p for _, p in parsed]))
    if kind == "linear":
        support = rel.get("support")
        _expect(isinstance(support, list), f"{where}.relation.support", "support must be a list")
        terms = known([_term(t, f"{where}.relation.support[{i}]") for i, t in enumerate(support)], "relation.support")
        rhs = _sign_value(rel.get("rhs"), f"{where}.relation.rhs", False)
        if scope is not None:
            _expect(scope == terms, f"{where}.scope", "scope must equal the support")
        return Constraint(tuple(terms), Relation.parity(len(terms), rhs))
    raise FormatError(f"{where}.relation.type", f"unknown relation type {kind!r}")


def bcs_from_json(data, where: str = "$") -> Bcs:
    """Accepts the object form; ``"encoding": "01"`` reads 1 as TRUE and 0 as FALSE in tables."""
    _expect(isinstance(data, dict), where, "system must be an object")
    names = data.get("vars")
    _expect(isinstance(names, list) and all(isinstance(v, str) for v in names), f"{where}.vars", "vars must be a list of names")
    enc = data.get("encoding")
    _expect(enc in (None, "pm1", "01"), f"{where}.encoding", "encoding must be 'pm1' or '01'")
    zero_one = None if enc is None else enc == "01"
    try:
        if "contexts" in data:
            ctxs = data["contexts"]
            _expect(isinstance(ctxs, list), f"{where}.contexts", "contexts must be a list")
            out = []
            for i, c in enumerate(ctxs):
                w = f"{where}.contexts[{i}]"
                _expect(isinstance(c, dict), w, "context must be an object")
                cons = c.get("constraints", [])
                _expect(isinstance(cons, list), f"{w}.constraints", "constraints must be a list")
                vs = c.get("vars")
                _expect(vs is None or isinstance(vs, list), f"{w}.vars", "context vars must be a list")
                for k, v in enumerate(vs or []):
                    _expect(v in names, f"{w}.vars[{k}]", f"unknown variable {v!r}")
                allowed = set(names) if vs is None else set(vs)
                parsed = [_constraint_from_json(x, f"{w}.constraints[{j}]", zero_one, allowed) for j, x in enumerate(cons)]
                if vs is None:
                    vs = list(dict.fromkeys(v for x in parsed for v in x.variables))
                out.append(Context(tuple(vs), tuple(parsed)))
            return Bcs(tuple(names), tuple(out))
        cons = data.get("constraints", [])
        _expect(isinstance(cons, list), f"{where}.constraints", "constraints must be a list")
        parsed = [_constraint_from_json(x, f"{where}.constraints[{j}]", zero_one, set(names)) for j, x in enumerate(cons)]
        return default_contexts(tuple(names), parsed)
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(where, str(e)) from None


def bcs_to_json(b: Bcs) -> dict:
    return {
        "vars": list(b.vars),
        "contexts": [
            {
                "vars": list(ctx.vars),
                "constraints": [
                    {"scope": [t if isinstance(t, str) else ("+1" if t == 1 else "-1") for t in c.scope],
                     "relation": relation_to_json(c.relation)}
                    for c in ctx.constraints
                ],
            }
            for ctx in b.contexts
        ],
    }


def load_bcs(text: str) -> Bcs:
    return bcs_from_json(_load(text))


def dump_bcs(b: Bcs) -> str:
    return dumps(bcs_to_json(b))


# --------------------------------------------------------------------------
# algebra elements and presentations


def element_to_json(e: AlgebraElement) -> dict:
    return {"varset": list(e.varset), "element": dump_element(e)}


def element_from_json(d, where: str = "$") -> AlgebraElement:
    _expect(isinstance(d, dict) and "varset" in d and "element" in d, where, "expected {varset, element}")
    try:
        return parse_element(d["element"], d["varset"])
    except (ValueError, KeyError) as e:
        raise FormatError(f"{where}.element", str(e)) from None


def presentation_to_json(p: Presentation) -> dict:
    return {
        "form": p.form,
        "generators": list(p.generators),
        "contexts": [list(c) for c in p.contexts],
        "involutions": list(p.involutions),
        "commutations": sorted(list(pair) for pair in p.commutations),
        "vanishing": [{"context": i, **element_to_json(e)} for i, e in p.vanishing],
        "projections": list(p.projections),
        "sums": [list(s) for s in p.sums],
        "orthogonal": [list(o) for o in p.orthogonal],
    }


def presentation_from_json(d, where: str = "$") -> Presentation:
    _expect(isinstance(d, dict), where, "presentation must be an object")
    van = []
    for i, v in enumerate(d.get("vanishing", [])):
        van.append((int(v["context"]), element_from_json(v, f"{where}.vanishing[{i}]")))
    return Presentation(
        generators=tuple(d["generators"]),
        form=d["form"],
        contexts=tuple(tuple(c) for c in d.get("contexts", [])),
        involutions=tuple(d.get("involutions", [])),
        commutations=frozenset(tuple(p) for p in d.get("commutations", [])),
        vanishing=tuple(van),
        projections=tuple(d.get("projections", [])),
        sums=tuple(tuple(s) for s in d.get("sums", [])),
        orthogonal=tuple(tuple(o) for o in d.get("orthogonal", [])),
    )


def vanishing_to_json(vs) -> dict:
    return {
        "contexts": [
            {"vars": list(U), "vanishing": sorted(list(a) for a in s)}
            for U, s in zip(vs.contexts, vs.sets)
        ]
    }


# --------------------------------------------------------------------------
# matrix reps


def rep_to_json(r: MatrixRep) -> dict:
    return {
        "dim": r.dim,
        "images": {
            k: [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in m]
            for k, m in r.images.items()
        },
    }


def rep_from_json(d, where: str = "$") -> MatrixRep:
    _expect(isinstance(d, dict), where, "rep must be an object")
    dim = d.get("dim")
    _expect(isinstance(dim, int) and dim >= 1, f"{where}.dim", "dim must be a positive integer")
    imgs = d.get("images")
    _expect(isinstance(imgs, dict), f"{where}.images", "images must be an object")
    out = {}
    for k, m in imgs.items():
        w = f"{where}.images.{k}"
        try:
            a = np.asarray(m, dtype=float)
        except (TypeError, ValueError):
            raise FormatError(w, "matrix entries must be [re, im] pairs") from None
        _expect(a.shape == (dim, dim, 2), w, f"expected shape ({dim}, {dim}, 2), got {a.shape}")
        out[k] = a[..., 0] + 1j * a[..., 1]
    return MatrixRep(dim, out)


def load_rep(text: str) -> MatrixRep:
    return rep_from_json(_load(text))


def dump_rep(r: MatrixRep) -> str:
    return dumps(rep_to_json(r))


def assignment_from_json(d, where: str = "$") -> dict:
    _expect(isinstance(d, dict), where, "assignment must be an object of name -> ±1")
    return {k: _sign_value(v, f"{where}.{k}", False) for k, v in d.items()}


# --------------------------------------------------------------------------
# games


def game_to_json(g) -> dict:
    return {
        "questions": g.n_questions,
        "contexts": [list(U) for U in g.contexts],
        "answers": [g.answers(i) for i in range(g.n_questions)],
        "encoding": "little-endian over context order, bit set = -1",
        "winning": [list(t) for t in g.winning_tuples()],
    }


def sync_game_to_json(g, orders=None) -> dict:
    out = {
        "synchronous": True,
        "questions": g.n_questions,
        "answers": g.n_answers,
        "winning": [[int(x) for x in t] for t in np.argwhere(g.lam)],
    }
    if orders is not None:
        out["orders"] = [list(o) for o in orders]
    return out


def sync_game_from_json(d, where: str = "$"):
    from .games import SynchronousGame

    _expect(isinstance(d, dict), where, "game must be an object")
    nI, nO = d.get("questions"), d.get("answers")
    _expect(isinstance(nI, int) and nI >= 0, f"{where}.questions", "questions must be a count")
    _expect(isinstance(nO, int) and nO >= 1, f"{where}.answers", "answers must be a single positive count")
    lam = np.zeros((nI, nI, nO, nO), dtype=bool)
    for k, t in enumerate(d.get("winning", [])):
        w = f"{where}.winning[{k}]"
        _expect(isinstance(t, list) and len(t) == 4, w, "expected [i, j, a, b]")
        i, j, a, b = t
        _expect(0 <= i < nI and 0 <= j < nI and 0 <= a < nO and 0 <= b < nO, w, "index out of range")
        lam[i, j, a, b] = True
    return SynchronousGame(lam)


# --------------------------------------------------------------------------
# gadgets and homomorphism pairs


def gadget_to_json(g) -> dict:
    return {"target": relation_to_json(g.target), "system": bcs_to_json(g.system)}


def gadget_from_json(d, where: str = "$"):
    from .reduce import GadgetDefinition

    _expect(isinstance(d, dict), where, "gadget must be an object")
    target = relation_from_json(d.get("target"), f"{where}.target")
    system = bcs_from_json(d.get("system"), f"{where}.system")
    try:
        return GadgetDefinition(target, system)
    except ValueError as e:
        raise FormatError(where, str(e)) from None


def gadgets_from_json(d, where: str = "$") -> dict:
    items = d.get("gadgets", d) if isinstance(d, dict) else d
    _expect(isinstance(items, list), where, "expected a list of gadgets")
    out = {}
    for i, g in enumerate(items):
        gd = gadget_from_json(g, f"{where}[{i}]")
        out[gd.target] = gd
    return out


def hom_to_json(h) -> dict:
    return {
        "iota": dict(h.iota),
        "pi": {g: element_to_json(e) for g, e in h.pi.items()},
        "contexts": list(h.contexts),
        "ancillas": [list(a) for a in h.ancillas],
        "choice": [c.tolist() for c in h.choice],
    }


def hom_from_json(d, where: str = "$"):
    from .reduce import HomPair

    _expect(isinstance(d, dict), where, "hom pair must be an object")
    pi = {g: element_from_json(e, f"{where}.pi.{g}") for g, e in d.get("pi", {}).items()}
    choice = tuple(np.asarray(c, dtype=np.int64).reshape(len(c), -1) for c in d.get("choice", []))
    return HomPair(
        iota=dict(d.get("iota", {})),
        pi=pi,
        contexts=tuple(d.get("contexts", [])),
        ancillas=tuple(tuple(a) for a in d.get("ancillas", [])),
        choice=choice,
    )


# --------------------------------------------------------------------------
# trace proofs


def certificate_to_json(c) -> dict:
    return {
        "start": {"sign": c.start.sign, "letters": list(c.start.letters)},
        "steps": [list(s) for s in c.steps],
        "end": {"sign": c.end.sign, "letters": list(c.end.letters)},
    }


def certificate_from_json(d):
    from .trace import Certificate, Word

    return Certificate(
        Word(d["start"]["sign"], tuple(d["start"]["letters"])),
        tuple(tuple(s) for s in d["steps"]),
        Word(d["end"]["sign"], tuple(d["end"]["letters"])),
    )


def trace_result_to_json(r) -> dict:
    def frac(f: Fraction) -> str:
        return str(f)

    return {
        "status": r.status,
        "clash": None if r.clash is None else {
            "monomial": list(r.clash[0]), "derived": frac(r.clash[1]), "anticommutation": frac(r.clash[2])
        },
        "log": list(r.log),
        "equations": [
            {
                "source": e.source,
                "equation": e.text(),
                **({"certificate": certificate_to_json(e.certificate)} if e.certificate else {}),
            }
            for e in r.equations
        ],
    }


def signs_table(k: int) -> list:
    return [list(index_to_signs(i, k)) for i in range(1 << k)]
