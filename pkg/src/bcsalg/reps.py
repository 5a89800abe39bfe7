"""Finite-dimensional matrix representations of BCS and synchronous algebras."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import gf2
from .model import Bcs, DomainError, ResourceError, all_sign_vectors
from .present import Presentation, build_algebra, linear_system_of
from .zalgebra import AlgebraElement, evaluate_on_rep

DEFAULT_TOL = 1e-9
RANK_TOL = 1e-7
PAULI_BUDGET_BITS = 24


@dataclass
class MatrixRep:
    dim: int
    images: dict

    def __post_init__(self):
        imgs = {}
        for name, m in self.images.items():
            m = np.asarray(m, dtype=complex)
            if m.shape != (self.dim, self.dim):
                raise DomainError(f"image of {name} has shape {m.shape}, expected ({self.dim}, {self.dim})")
            imgs[name] = m
        self.images = imgs

    @classmethod
    def from_assignment(cls, phi: Mapping[str, int]) -> "MatrixRep":
        return cls(1, {v: np.array([[complex(s)]]) for v, s in phi.items()})

    def __getitem__(self, name: str) -> np.ndarray:
        return self.images[name]


def _norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


@dataclass
class RepReport:
    passed: bool
    tol: float
    deviations: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = []
        for cat, dev in self.deviations.items():
            flag = "ok" if dev <= self.tol else "FAIL"
            where = f" at {self.worst[cat]}" if cat in self.worst and dev > 0 else ""
            out.append(f"{cat}: {dev:.3e} {flag}{where}")
        out.append("PASS" if self.passed else "FAIL")
        return out


class _Tracker:
    def __init__(self, categories):
        self.dev = {c: 0.0 for c in categories}
        self.where = {}

    def note(self, cat, value, where):
        if value > self.dev[cat]:
            self.dev[cat] = value
            self.where[cat] = where


def _check_images(p: Presentation, r: MatrixRep):
    missing = [g for g in p.generators if g not in r.images]
    if missing:
        raise DomainError(f"no image for generator(s) {missing}")


def verify_rep(p: Presentation, r: MatrixRep, tol: float = DEFAULT_TOL) -> RepReport:
    """Check every defining relation of ``p`` on the matrices of ``r`` (spectral norms)."""
    _check_images(p, r)
    I = np.eye(r.dim, dtype=complex)
    if p.form == "synchronous":
        t = _Tracker(["hermiticity", "idempotence", "sums", "orthogonality"])
        for g in p.projections:
            E = r[g]
            t.note("hermiticity", _norm(E - E.conj().T), g)
            t.note("idempotence", _norm(E @ E - E), g)
        for row in p.sums:
            t.note("sums", _norm(sum((r[g] for g in row), np.zeros_like(I)) - I), row[0].split("]")[0] + "]")
        for x, y in p.orthogonal:
            t.note("orthogonality", _norm(r[x] @ r[y]), f"{x}*{y}")
    else:
        t = _Tracker(["hermiticity", "involution", "commutation", "vanishing"])
        for g in p.involutions:
            X = r[g]
            t.note("hermiticity", _norm(X - X.conj().T), g)
            t.note("involution", _norm(X @ X - I), g)
        for x, y in sorted(p.commutations):
            t.note("commutation", _norm(r[x] @ r[y] - r[y] @ r[x]), f"[{x},{y}]")
        for i, e in p.vanishing:
            t.note("vanishing", _norm(evaluate_on_rep(e, r.images, r.dim)), f"context {i}: {e.__repr__()}")
    passed = all(v <= tol for v in t.dev.values())
    return RepReport(passed, tol, t.dev, t.where)


@dataclass(frozen=True)
class JointSpectrum:
    context: tuple
    ranks: dict

    @property
    def points(self) -> set:
        return set(self.ranks)


def joint_spectrum(
    r: MatrixRep, context, tol: float = DEFAULT_TOL, rank_tol: float = RANK_TOL
) -> JointSpectrum:
    """Sign vectors ``v`` with ``ψ(Π_v) ≠ 0`` and the rank of each spectral projection."""
    context = tuple(context)
    for v in context:
        if v not in r.images:
            raise DomainError(f"no image for {v!r}")
    for x, y in itertools.combinations(context, 2):
        if _norm(r[x] @ r[y] - r[y] @ r[x]) > tol:
            raise DomainError(f"images of {x} and {y} do not commute")
    I = np.eye(r.dim, dtype=complex)
    halves = {x: ((I + r[x]) / 2, (I - r[x]) / 2) for x in context}
    thresh = rank_tol * r.dim
    ranks = {}
    for v in all_sign_vectors(len(context)):
        P = I
        for x, s in zip(context, v):
            P = P @ halves[x][0 if s == 1 else 1]
        sv = np.linalg.svd(P, compute_uv=False) if r.dim else np.zeros(0)
        rk = int(np.sum(sv > thresh))
        if rk:
            ranks[v] = rk
    return JointSpectrum(context, ranks)


# --------------------------------------------------------------------------
# Pauli words


_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def pauli_matrix(vec: int, q: int, sign: int = 1) -> np.ndarray:
    """Hermitian word ``i^{a·b} X^a Z^b`` for ``vec = a | (b << q)``; qubit 0 is the leftmost factor."""
    a, b = vec & ((1 << q) - 1), vec >> q
    out = np.eye(1, dtype=complex)
    for j in range(q):
        f = _I2
        if (a >> j) & 1:
            f = _PX
        if (b >> j) & 1:
            f = f @ _PZ
        out = np.kron(out, f)
    phase = 1j ** (bin(a & b).count("1") % 4)
    return sign * phase * out


def _dot(u: int, v: int) -> int:
    return bin(u & v).count("1")


def _word_product(vecs: list[int], q: int) -> tuple[int, int]:
    """Product of Hermitian words as ``(vector, k)`` meaning ``i^k W(vector)``."""
    mask = (1 << q) - 1
    cur, k = 0, 0
    for v in vecs:
        a, b = cur & mask, cur >> q
        a2, b2 = v & mask, v >> q
        # W(a,b) W(a2,b2) = i^{a·b + a2·b2 + 2 b·a2 - (a^a2)·(b^b2)} W(a^a2, b^b2)
        k += _dot(a, b) + _dot(a2, b2) + 2 * _dot(b, a2) - _dot(a ^ a2, b ^ b2)
        cur ^= v
    return cur, k % 4


def _symplectic(u: np.ndarray, v: np.ndarray, q: int) -> np.ndarray:
    mask = (1 << q) - 1
    x = ((u & mask) & (v >> q)) ^ ((u >> q) & (v & mask))
    return np.bitwise_count(x) & 1


def pauli_search(b: Bcs, qubits: int, max_bits: int = PAULI_BUDGET_BITS, chunk: int = 1 << 16) -> MatrixRep | None:
    """First (in integer order of the nullspace parametrization) signed Pauli rep on ``qubits`` qubits.

    Variable vectors ``v_x`` in F₂^{2q} must multiply to 0 along every
    constraint, so they are ``K·C`` for a nullspace basis ``K``; each choice
    of ``C`` is checked for context commutativity, and the signs are then a
    GF(2) linear system.
    """
    if not 0 <= qubits <= 4:
        raise DomainError("qubits must be between 0 and 4")
    A, rhs = linear_system_of(b)
    n = len(b.vars)
    rows = [int(sum(1 << j for j in range(n) if A[i, j])) for i in range(A.shape[0])]
    basis = gf2.nullspace(rows, n)
    r, w = len(basis), 2 * qubits
    if r * w > max_bits:
        raise ResourceError(f"search space 2^{r * w} exceeds budget 2^{max_bits}")
    pairs = sorted(
        {tuple(sorted((b.vars.index(x), b.vars.index(y)))) for ctx in b.contexts for x, y in itertools.combinations(ctx.vars, 2)}
    )
    total = 1 << (r * w)
    wmask = (1 << w) - 1
    for start in range(0, total, chunk):
        cand = np.arange(start, min(total, start + chunk), dtype=np.int64)
        V = np.zeros((cand.size, n), dtype=np.int64)
        for l, kvec in enumerate(basis):
            block = (cand >> (w * l)) & wmask
            for x in range(n):
                if (kvec >> x) & 1:
                    V[:, x] ^= block
        ok = np.ones(cand.size, dtype=bool)
        for x, y in pairs:
            ok &= _symplectic(V[:, x], V[:, y], qubits) == 0
        for idx in np.flatnonzero(ok):
            vecs = [int(t) for t in V[idx]]
            signs = _solve_signs(rows, rhs, vecs, qubits, n)
            if signs is None:
                continue
            rep = MatrixRep(
                1 << qubits, {v: pauli_matrix(vecs[j], qubits, signs[j]) for j, v in enumerate(b.vars)}
            )
            if verify_rep(build_algebra(b, "polynomial"), rep).passed:
                return rep
    return None


def _solve_signs(rows, rhs, vecs, q, n):
    eq_rhs = []
    for row, bi in zip(rows, rhs):
        members = [vecs[j] for j in range(n) if (row >> j) & 1]
        vec, k = _word_product(members, q)
        if vec != 0 or k % 2:
            return None
        # prod s_j * i^k = (-1)^b
        eq_rhs.append((int(bi) + k // 2) & 1)
    sol = gf2.solve(rows, eq_rhs, n)
    if sol is None:
        return None
    return [1 - 2 * t for t in sol]


def magic_square_paulis(prefix: str = "x") -> MatrixRep:
    """The standard two-qubit operator square for ``gen_magic_square``."""
    I, X, Z = _I2, _PX, _PZ
    Y = np.array([[0, -1j], [1j, 0]])
    k = np.kron
    mats = [k(I, Z), k(Z, I), k(Z, Z), k(X, I), k(I, X), k(X, X), -k(X, Z), -k(Z, X), k(Y, Y)]
    return MatrixRep(4, {f"{prefix}{i + 1}": m for i, m in enumerate(mats)})


# --------------------------------------------------------------------------
# transport


def transport_rep(
    r: MatrixRep,
    pi: Mapping[str, AlgebraElement],
    source: Bcs,
    target: Bcs,
    tol: float = DEFAULT_TOL,
) -> MatrixRep:
    """Compose a verified rep of ``source`` with generator images ``pi`` of ``target``."""
    rep = verify_rep(build_algebra(source, "contexts"), r, tol)
    if not rep.passed:
        raise DomainError("input representation does not verify on the source system")
    missing = [g for g in target.vars if g not in pi]
    if missing:
        raise DomainError(f"no image for target generator(s) {missing}")
    return MatrixRep(r.dim, {g: evaluate_on_rep(pi[g], r.images, r.dim) for g in target.vars})
