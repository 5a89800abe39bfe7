"""Command-line front end.

Exit codes: 0 the property holds, 1 it fails, 2 usage or input error,
3 undecided within the configured budget.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import formats
from .games import Strategy, build_game, deterministic_value_max, from_synchronous, pad, strategy_value, to_synchronous
from .lang import certificate, classify_bcs, classify_relation, solve_schaefer, specialize
from .model import BRUTE_FORCE_CAP, Bcs, DomainError, ResourceError, brute_force_sat, gen_magic_square, gen_nontracial
from .present import FORMS, build_algebra, linear_system_of, solution_group, vanishing_set
from .reduce import LANG_3SAT, apply_gadgets, language_gadgets, verify_hom_pair
from .reps import DEFAULT_TOL, joint_spectrum, pauli_search, transport_rep, verify_rep
from .trace import DEFAULT_DEPTH, DEFAULT_MAXLEN, trace_feasibility

OK, FAILS, USAGE, UNKNOWN = 0, 1, 2, 3
WORKERS_ENV = "BCSALG_WORKERS"


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    form: str = "contexts"
    tol: float = DEFAULT_TOL
    depth: int = DEFAULT_DEPTH
    maxlen: int = DEFAULT_MAXLEN
    max_vars: int = BRUTE_FORCE_CAP
    qubits: int = 2
    seed: int = 0
    output: str | None = None
    workers: int = 1

    def header(self) -> str:
        d = asdict(self)
        return "# " + " ".join(f"{k}={d[k]}" for k in ("command", "form", "tol", "depth", "maxlen", "max_vars", "qubits", "workers"))


class _Out:
    """Structured results go to ``-o`` when given, else stdout."""

    def __init__(self, path: str | None):
        self.path = path

    def emit(self, text: str):
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise formats.FormatError(path, e.strerror or str(e)) from None


def _bcs(path: str) -> Bcs:
    text = _read(path)
    try:
        return formats.load_bcs(text)
    except formats.FormatError as e:
        raise formats.FormatError(f"{path}: {e.where}", e.message) from None


def _json(path: str):
    return formats._load(_read(path))


def _print_assignment(phi: dict):
    print(" ".join(f"{k}={'+1' if v == 1 else '-1'}" for k, v in phi.items()))


# --------------------------------------------------------------------------
# commands


def cmd_parse(cfg, a, out):
    b = _bcs(a.file)
    print(f"ok: {len(b.vars)} variables, {len(b.contexts)} contexts, {len(b.constraints)} constraints")
    if a.output:
        out.emit(formats.dump_bcs(b))
    return OK


def cmd_solve(cfg, a, out):
    b = _bcs(a.file)
    flags = classify_bcs(b)
    if flags.tractable:
        method = "schaefer:" + next(n for n in ("linear", "bijunctive", "horn", "dual_horn") if getattr(flags, n))
        phi = solve_schaefer(b)
    else:
        method = "brute-force"
        try:
            phi = brute_force_sat(b, max_vars=cfg.max_vars)
        except ResourceError as e:
            print(f"UNKNOWN ({e})")
            return UNKNOWN
    print(f"method: {method}")
    if phi is None:
        print("UNSAT")
        return FAILS
    print("SAT")
    _print_assignment(phi)
    if a.output:
        out.emit(formats.dumps(phi))
    return OK


def cmd_classify(cfg, a, out):
    b = _bcs(a.file)
    flags = classify_bcs(b)
    print("system:", ", ".join(flags.names()) or "none")
    seen = {}
    for c in b.constraints:
        R = specialize(c).relation
        if R in seen:
            continue
        seen[R] = True
        f = classify_relation(R)
        print(f"relation arity {R.arity} with {len(R)} members: {', '.join(f.names()) or 'none'}")
        for cls, lines in certificate(R, f).items():
            for line in lines:
                print(f"  {cls}: {line}")
    print("tractable" if flags.tractable else "not in a tractable class")
    return OK


def cmd_algebra(cfg, a, out):
    p = build_algebra(_bcs(a.file), cfg.form)
    out.emit(formats.dumps(formats.presentation_to_json(p)))
    return OK


def cmd_vanishing(cfg, a, out):
    vs = vanishing_set(_bcs(a.file), cfg.form)
    out.emit(formats.dumps(formats.vanishing_to_json(vs)))
    return OK


def cmd_game(cfg, a, out):
    out.emit(formats.dumps(formats.game_to_json(build_game(_bcs(a.file)))))
    return OK


def cmd_pad(cfg, a, out):
    out.emit(formats.dump_bcs(pad(_bcs(a.file))))
    return OK


def cmd_sync(cfg, a, out):
    if a.direction == "to":
        conv = to_synchronous(_bcs(a.file))
        out.emit(formats.dumps(formats.sync_game_to_json(conv.game, conv.orders)))
    else:
        g = formats.sync_game_from_json(_json(a.file))
        b, _ = from_synchronous(g)
        out.emit(formats.dump_bcs(b))
    return OK


def cmd_sgroup(cfg, a, out):
    b = _bcs(a.file)
    A, rhs = linear_system_of(b)
    out.emit(solution_group(A, rhs, b.vars).text() + "\n")
    return OK


def cmd_verify_rep(cfg, a, out):
    b = _bcs(a.file)
    r = formats.load_rep(_read(a.rep))
    rep = verify_rep(build_algebra(b, cfg.form), r, cfg.tol)
    for line in rep.lines():
        print(line)
    return OK if rep.passed else FAILS


def cmd_spectrum(cfg, a, out):
    b = _bcs(a.file)
    r = formats.load_rep(_read(a.rep))
    ok = True
    for i, ctx in enumerate(b.contexts):
        js = joint_spectrum(r, ctx.vars, cfg.tol)
        sat = {tuple(v) for v in _sat_vectors(ctx)}
        inside = js.points <= sat
        ok &= inside
        pts = ", ".join(f"{v}:{js.ranks[v]}" for v in sorted(js.points))
        print(f"context {i} {list(ctx.vars)}: {pts} {'(satisfying)' if inside else '(NOT all satisfying)'}")
    return OK if ok else FAILS


def _sat_vectors(ctx):
    from .model import index_to_signs, context_satisfying

    mask = context_satisfying(ctx)
    return [index_to_signs(int(t), len(ctx.vars)) for t in mask.nonzero()[0]]


def cmd_pauli_search(cfg, a, out):
    b = _bcs(a.file)
    try:
        r = pauli_search(b, cfg.qubits)
    except ResourceError as e:
        print(f"UNKNOWN ({e})")
        return UNKNOWN
    if r is None:
        print(f"no Pauli representation on {cfg.qubits} qubits")
        return FAILS
    print(f"found a Pauli representation of dimension {r.dim}", file=sys.stderr)
    out.emit(formats.dump_rep(r))
    return OK


def cmd_reduce(cfg, a, out):
    b = _bcs(a.file)
    if a.gadgets:
        gadgets = formats.gadgets_from_json(_json(a.gadgets))
    else:
        gadgets = language_gadgets(b, LANG_3SAT, max_y=a.max_y)
    b2, h = apply_gadgets(b, gadgets)
    out.emit(formats.dump_bcs(b2))
    if a.hom:
        Path(a.hom).write_text(formats.dumps(formats.hom_to_json(h)))
    print(f"B′ has {len(b2.vars)} variables and {len(b2.constraints)} constraints", file=sys.stderr)
    return OK


def cmd_verify_hom(cfg, a, out):
    b, b2 = _bcs(a.source), _bcs(a.target)
    h = formats.hom_from_json(_json(a.hom))
    rep = verify_hom_pair(b, b2, h)
    for line in rep.lines():
        print(line)
    return OK if rep.passed else FAILS


def cmd_transport(cfg, a, out):
    b, b2 = _bcs(a.source), _bcs(a.target)
    h = formats.hom_from_json(_json(a.hom))
    r = formats.load_rep(_read(a.rep))
    r2 = transport_rep(r, h.pi, b, b2, cfg.tol)
    rep = verify_rep(build_algebra(b2, "contexts"), r2, cfg.tol)
    print(f"transported rep: {'verified' if rep.passed else 'FAILED'}", file=sys.stderr)
    out.emit(formats.dump_rep(r2))
    return OK if rep.passed else FAILS


def cmd_strategy_value(cfg, a, out):
    b = _bcs(a.file)
    g = build_game(b)
    if a.rep:
        s = Strategy.quantum(formats.load_rep(_read(a.rep)))
    elif a.assignment:
        s = Strategy.deterministic(formats.assignment_from_json(_json(a.assignment)))
    else:
        v = deterministic_value_max(g)
        print(f"best deterministic value {v} = {float(v):.6f}")
        return OK
    v = strategy_value(g, s, cfg.tol)
    print(f"value {v:.12f}")
    return OK if abs(v - 1.0) <= cfg.tol else FAILS


def cmd_trace_check(cfg, a, out):
    b = _bcs(a.file)
    res = trace_feasibility(b, depth=cfg.depth, maxlen=cfg.maxlen)
    print(res.status)
    for line in res.log:
        print("  " + line)
    if a.output:
        out.emit(formats.dumps(formats.trace_result_to_json(res)))
    return OK if res.infeasible else UNKNOWN


# --------------------------------------------------------------------------
# demos


def demo_magic_square(cfg):
    b = gen_magic_square()
    print("Magic square: 9 variables, rows multiply to +1, columns to -1.")
    phi = brute_force_sat(b)
    print("classical:", "UNSAT" if phi is None else "SAT")
    r = pauli_search(b, 2)
    ok = all(verify_rep(build_algebra(b, f), r, cfg.tol).passed for f in FORMS)
    print(f"Pauli search on 2 qubits: dim-{r.dim} rep {'verified' if ok else 'FAILED'} in forms {', '.join(FORMS)}")
    g = build_game(b)
    v = strategy_value(g, Strategy.quantum(r), cfg.tol)
    print(f"game value {v:.1f} (best deterministic {deterministic_value_max(g)})")
    return OK if phi is None and ok and abs(v - 1) <= cfg.tol else FAILS


def demo_reduction(cfg):
    b = gen_magic_square()
    gadgets = language_gadgets(b, LANG_3SAT, max_y=0)
    b2, h = apply_gadgets(b, gadgets)
    print(f"3SAT image: {len(b2.vars)} variables, {len(b2.constraints)} clauses")
    rep = verify_hom_pair(b, b2, h)
    for line in rep.lines():
        print("  " + line)
    print("classical:", "UNSAT" if brute_force_sat(b2) is None else "SAT")
    r2 = transport_rep(pauli_search(b, 2), h.pi, b, b2, cfg.tol)
    v = strategy_value(build_game(b2), Strategy.quantum(r2), cfg.tol)
    print(f"transported dim-{r2.dim} rep, game value {v:.1f}")
    return OK if rep.passed and abs(v - 1) <= cfg.tol else FAILS


def demo_tracial(cfg):
    b = gen_nontracial()
    print("Two magic squares joined by x21 = x11 AND x12.")
    res = trace_feasibility(b, depth=cfg.depth, maxlen=cfg.maxlen)
    print(res.status)
    for line in res.log:
        print("  " + line)
    return OK if res.infeasible else UNKNOWN


DEMOS = {"magic-square": demo_magic_square, "reduction": demo_reduction, "tracial": demo_tracial}


def cmd_demo(cfg, a, out):
    return DEMOS[a.name](cfg)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the main artifact here")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    common.add_argument("--maxlen", type=int, default=DEFAULT_MAXLEN)
    common.add_argument("--max-vars", type=int, default=BRUTE_FORCE_CAP)
    common.add_argument("--qubits", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--form", choices=FORMS, default="contexts")
    common.add_argument("-v", "--verbose", action="store_true", help="echo the run configuration")

    ap = argparse.ArgumentParser(prog="bcsalg", description="Boolean constraint system algebras")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, *args, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        for a in args:
            p.add_argument(a)
        p.set_defaults(fn=fn)
        return p

    add("parse", cmd_parse, "file")
    add("solve", cmd_solve, "file")
    add("classify", cmd_classify, "file")
    add("algebra", cmd_algebra, "file")
    add("vanishing", cmd_vanishing, "file")
    add("game", cmd_game, "file")
    add("pad", cmd_pad, "file")
    p = sub.add_parser("sync", parents=[common])
    p.add_argument("direction", choices=("to", "from"))
    p.add_argument("file")
    p.set_defaults(fn=cmd_sync)
    add("sgroup", cmd_sgroup, "file")
    add("verify-rep", cmd_verify_rep, "file", "rep")
    add("spectrum", cmd_spectrum, "file", "rep")
    add("pauli-search", cmd_pauli_search, "file")
    p = add("reduce", cmd_reduce, "file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gadgets", help="gadget JSON file")
    g.add_argument("--language", choices=("3sat",), help="search gadgets over a built-in language")
    p.add_argument("--max-y", type=int, default=1)
    p.add_argument("--hom", help="write the homomorphism pair here")
    add("verify-hom", cmd_verify_hom, "source", "target", "hom")
    add("transport", cmd_transport, "source", "target", "hom", "rep")
    p = add("strategy-value", cmd_strategy_value, "file")
    p.add_argument("--rep")
    p.add_argument("--assignment")
    add("trace-check", cmd_trace_check, "file")
    p = sub.add_parser("demo", parents=[common])
    p.add_argument("name", choices=sorted(DEMOS))
    p.set_defaults(fn=cmd_demo)
    return ap


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    cfg = RunConfig(
        command=a.command,
        inputs=[getattr(a, k) for k in ("file", "source", "target", "hom", "rep") if getattr(a, k, None)],
        form=a.form,
        tol=a.tol,
        depth=a.depth,
        maxlen=a.maxlen,
        max_vars=a.max_vars,
        qubits=a.qubits,
        seed=a.seed,
        output=a.output,
        workers=_workers(),
    )
    if a.verbose:
        print(cfg.header(), file=sys.stderr)
    try:
        return a.fn(cfg, a, _Out(a.output))
    except formats.FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except (DomainError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except ResourceError as e:
        print(f"UNKNOWN: {e}", file=sys.stderr)
        return UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
