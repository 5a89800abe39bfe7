"""Exact arithmetic in the group algebras ℂℤ₂^S of commuting involutions.

An element over an ordered variable set ``S`` (``|S| = k``) is a vector of
``2**k`` exact rationals in one of two bases:

``monomial``
    entry ``m`` is the coefficient of the square-free monomial
    ``prod_{i in m} z_i`` (bit ``i`` of ``m`` selects ``S[i]``);
``projection``
    entry ``v`` is the value of the element at the sign vector ``v`` (bit
    ``i`` set means ``v_i = -1``), i.e. the coefficient of the minimal
    projection ``Π_v``.

The two are related by the Walsh-Hadamard transform. Coefficients are kept
as Python integers over a common positive denominator so that the transform
and pointwise products stay exact and reasonably fast.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .model import (
    ARITY_CAP,
    Constraint,
    DomainError,
    Relation,
    ResourceError,
    check_sign,
    index_to_signs,
    is_variable,
    scope_variables,
    signs_to_index,
)

MONOMIAL = "monomial"
PROJECTION = "projection"
_BASES = (MONOMIAL, PROJECTION)


_SMALL = 64


def _walsh(a: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform, ``out[v] = sum_m (-1)^{|m & v|} a[m]``."""
    n = a.shape[0]
    if n <= _SMALL:
        # object arrays carry heavy per-call overhead; plain lists win for short vectors
        v = a.tolist()
        h = 1
        while h < n:
            for i in range(0, n, 2 * h):
                for j in range(i, i + h):
                    x, y = v[j], v[j + h]
                    v[j], v[j + h] = x + y, x - y
            h *= 2
        out = np.empty(n, dtype=object)
        out[:] = v
        return out
    h = 1
    while h < n:
        blocks = a.reshape(-1, 2, h)
        x = blocks[:, 0, :]
        y = blocks[:, 1, :]
        a = np.stack((x + y, x - y), axis=1).reshape(n)
        h *= 2
    return a


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise DomainError("coefficients must be exact (int or Fraction), not float")
    return Fraction(c)


class AlgebraElement:
    """Element of ℂℤ₂^S with exact rational coefficients."""

    __slots__ = ("varset", "num", "den", "basis")

    def __init__(self, varset: Sequence[str], num, den: int = 1, basis: str = MONOMIAL):
        varset = tuple(varset)
        if len(set(varset)) != len(varset):
            raise DomainError(f"repeated variable in varset {varset}")
        if len(varset) > ARITY_CAP:
            raise ResourceError(f"varset of size {len(varset)} exceeds cap {ARITY_CAP}")
        if basis not in _BASES:
            raise DomainError(f"unknown basis {basis!r}")
        ints = [int(x) for x in num]
        if len(ints) != 1 << len(varset):
            raise DomainError("coefficient vector must have length 2**|varset|")
        num = np.empty(len(ints), dtype=object)
        num[:] = ints
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(den, *num.tolist())
        if g > 1:
            num = num // g
            den //= g
        self.varset = varset
        self.num = num
        self.den = den
        self.basis = basis

    @classmethod
    def _make(cls, varset: tuple, num: np.ndarray, den: int, basis: str) -> "AlgebraElement":
        """Arithmetic results: ``varset`` already checked, ``num`` an object array of ints, ``den`` > 0."""
        g = math.gcd(den, *num.tolist())
        if g > 1:
            num = num // g
            den //= g
        e = object.__new__(cls)
        e.varset, e.num, e.den, e.basis = varset, num, den, basis
        return e

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_coeffs(cls, varset: Sequence[str], coeffs: Sequence, basis: str = MONOMIAL) -> "AlgebraElement":
        fr = [c if type(c) is int else _as_fraction(c) for c in coeffs]
        den = math.lcm(1, *(f.denominator for f in fr if type(f) is not int))
        return cls(varset, [f * den if type(f) is int else f.numerator * (den // f.denominator) for f in fr], den, basis)

    @classmethod
    def zero(cls, varset: Sequence[str] = ()) -> "AlgebraElement":
        return cls(varset, [0] * (1 << len(tuple(varset))))

    @classmethod
    def scalar(cls, value, varset: Sequence[str] = ()) -> "AlgebraElement":
        varset = tuple(varset)
        c = [0] * (1 << len(varset))
        c[0] = value
        return cls.from_coeffs(varset, c)

    @classmethod
    def one(cls, varset: Sequence[str] = ()) -> "AlgebraElement":
        return cls.scalar(1, varset)

    @classmethod
    def monomial(cls, varset: Sequence[str], variables: Sequence[str] = (), coeff=1) -> "AlgebraElement":
        """``coeff * prod(variables)`` with ``z² = 1`` applied to repeats."""
        varset = tuple(varset)
        pos = {v: i for i, v in enumerate(varset)}
        mask = 0
        for v in variables:
            if v not in pos:
                raise DomainError(f"{v!r} not in varset {varset}")
            mask ^= 1 << pos[v]
        c = [0] * (1 << len(varset))
        c[mask] = coeff
        return cls.from_coeffs(varset, c)

    @classmethod
    def generator(cls, name: str) -> "AlgebraElement":
        return cls.monomial((name,), (name,))

    # -- views -------------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.varset)

    def coefficients(self) -> list[Fraction]:
        return [Fraction(int(n), self.den) for n in self.num]

    def coeff_map(self) -> dict[frozenset, Fraction]:
        """Nonzero monomial coefficients keyed by variable subsets."""
        m = self.to(MONOMIAL)
        out = {}
        for mask, n in enumerate(m.num):
            if n:
                out[frozenset(v for i, v in enumerate(self.varset) if (mask >> i) & 1)] = Fraction(int(n), m.den)
        return out

    def to(self, basis: str) -> "AlgebraElement":
        if basis not in _BASES:
            raise DomainError(f"unknown basis {basis!r}")
        if basis == self.basis:
            return self
        t = _walsh(self.num.copy())
        if basis == MONOMIAL:
            return AlgebraElement._make(self.varset, t, self.den << self.k, MONOMIAL)
        return AlgebraElement._make(self.varset, t, self.den, PROJECTION)

    def values(self) -> list[Fraction]:
        """Value function ``v -> element(v)`` in index order."""
        return self.to(PROJECTION).coefficients()

    def support(self) -> set[int]:
        """Sign-vector indices where the value function is nonzero."""
        p = self.to(PROJECTION)
        return {i for i, n in enumerate(p.num) if n}

    def is_zero(self) -> bool:
        return not any(self.num)

    def nonconstant_monomials(self) -> list[int]:
        m = self.to(MONOMIAL)
        return [mask for mask, n in enumerate(m.num) if n and mask]

    # -- embedding ---------------------------------------------------------

    def embed(self, varset: Sequence[str]) -> "AlgebraElement":
        """Same element viewed in ℂℤ₂^T for ``T ⊇ S`` (missing variables act as identity)."""
        varset = tuple(varset)
        if varset == self.varset:
            return self
        pos = {v: i for i, v in enumerate(varset)}
        missing = [v for v in self.varset if v not in pos]
        if missing:
            raise DomainError(f"cannot embed: {missing} not in target varset {varset}")
        m = self.to(MONOMIAL)
        newmask = np.zeros(1 << self.k, dtype=np.int64)
        for i, v in enumerate(self.varset):
            bit = (np.arange(1 << self.k) >> i) & 1
            newmask |= bit << pos[v]
        out = np.zeros(1 << len(varset), dtype=object)
        out[newmask] = m.num
        e = AlgebraElement(varset, out, m.den, MONOMIAL)
        return e.to(self.basis)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.varset != self.varset:
            raise DomainError(
                f"varset mismatch {self.varset} vs {other.varset}; embed into a common varset first"
            )

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return self + AlgebraElement.scalar(other, self.varset).to(self.basis)
        self._check(other)
        o = other.to(self.basis)
        return AlgebraElement._make(self.varset, self.num * o.den + o.num * self.den, self.den * o.den, self.basis)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._make(self.varset, -self.num, self.den, self.basis)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            f = _as_fraction(other)
            return AlgebraElement(self.varset, self.num * f.numerator, self.den * f.denominator, self.basis)
        self._check(other)
        a = self.to(PROJECTION)
        b = other.to(PROJECTION)
        return AlgebraElement._make(self.varset, a.num * b.num, a.den * b.den, PROJECTION).to(self.basis)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n: int):
        out = AlgebraElement.one(self.varset).to(self.basis)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            if isinstance(other, (int, Fraction)):
                return self == AlgebraElement.scalar(other, self.varset)
            return NotImplemented
        if set(other.varset) != set(self.varset):
            return False
        a = self.to(MONOMIAL)
        b = other.embed(self.varset).to(MONOMIAL)
        return a.den == b.den and all(x == y for x, y in zip(a.num, b.num))

    __hash__ = None

    def __repr__(self):
        return f"AlgebraElement({dump_element(self)!r}, varset={self.varset})"

    # -- evaluation --------------------------------------------------------

    def evaluate_signs(self, phi: Mapping[str, int]) -> Fraction:
        """Value at a sign assignment (a one-dimensional representation)."""
        v = [check_sign(phi[x]) for x in self.varset]
        p = self.to(PROJECTION)
        return Fraction(int(p.num[signs_to_index(v)]), p.den)



def _eval_monomials(m: AlgebraElement, images, dim: int) -> np.ndarray:
    mats = {0: np.eye(dim, dtype=complex)}

    def mono(mask):
        if mask not in mats:
            low = mask & -mask
            i = low.bit_length() - 1
            mats[mask] = np.asarray(images[m.varset[i]], dtype=complex) @ mono(mask ^ low)
        return mats[mask]

    out = np.zeros((dim, dim), dtype=complex)
    for mask, n in enumerate(m.num):
        if n:
            out += (int(n) / m.den) * mono(mask)
    return out


def evaluate_on_rep(elem: AlgebraElement, images: Mapping[str, np.ndarray], dim: int) -> np.ndarray:
    """Substitute matrices for variables; monomials multiply in varset order."""
    m = elem.to(MONOMIAL)
    return _eval_monomials(m, images, dim)


# --------------------------------------------------------------------------
# module-level operations


def alg_add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return a + b


def alg_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return a * b


def basis_convert(a: AlgebraElement, target: str) -> AlgebraElement:
    return a.to(target)


def common_embed(*elems: AlgebraElement) -> list[AlgebraElement]:
    """Embed elements into the union of their varsets (first-seen order)."""
    vs: dict[str, None] = {}
    for e in elems:
        for v in e.varset:
            vs.setdefault(v, None)
    target = tuple(vs)
    return [e.embed(target) for e in elems]


def projection_of_assignment(varset: Sequence[str], phi: Mapping[str, int]) -> AlgebraElement:
    """``prod_{x assigned} ½(1 + phi(x) x)`` inside ℂℤ₂^varset."""
    varset = tuple(varset)
    pos = {v: i for i, v in enumerate(varset)}
    if len(pos) != len(varset):
        raise DomainError(f"repeated variable in varset {varset}")
    if len(varset) > ARITY_CAP:
        raise ResourceError(f"varset of size {len(varset)} exceeds cap {ARITY_CAP}")
    bad = [v for v in phi if v not in pos]
    if bad:
        raise DomainError(f"assignment uses {bad} outside varset {varset}")
    want_mask = 0
    want_bits = 0
    for v, s in phi.items():
        want_mask |= 1 << pos[v]
        if check_sign(s) == -1:
            want_bits |= 1 << pos[v]
    # coefficient of monomial m is prod_{x in m} phi(x) / 2^|phi|, zero off the assigned variables
    num = np.empty(1 << len(varset), dtype=object)
    num[:] = [0 if m & ~want_mask else (-1 if (m & want_bits).bit_count() & 1 else 1) for m in range(len(num))]
    return AlgebraElement._make(varset, num, 1 << want_mask.bit_count(), MONOMIAL)


def slot_names(k: int) -> tuple[str, ...]:
    return tuple(f"z{i + 1}" for i in range(k))


def indicator_poly(R: Relation, slots: Sequence[str] | None = None) -> AlgebraElement:
    """``P_R``: the element whose value function is ``f_R`` (-1 on R, +1 off R)."""
    slots = slot_names(R.arity) if slots is None else tuple(slots)
    if len(slots) != R.arity:
        raise DomainError("need one slot name per relation position")
    vals = [-1 if t else 1 for t in R.table()]
    return AlgebraElement(slots, vals, 1, PROJECTION).to(MONOMIAL)


def eval_scope_poly(p: AlgebraElement, scope: Sequence) -> AlgebraElement:
    """Substitute scope terms for the slots of ``p``; the result lives over ``X ∩ S``.

    Constants fold into signs and repeated variables cancel through ``z² = 1``.
    """
    scope = tuple(scope)
    if len(scope) != p.k:
        raise DomainError(f"{len(scope)} scope terms for {p.k} slots")
    target = scope_variables(scope)
    pos = {v: i for i, v in enumerate(target)}
    slot_mask = []
    slot_sign = []
    for t in scope:
        if is_variable(t):
            slot_mask.append(1 << pos[t])
            slot_sign.append(1)
        else:
            slot_mask.append(0)
            slot_sign.append(check_sign(t))
    m = p.to(MONOMIAL)
    out = [0] * (1 << len(target))
    for mask, n in enumerate(m.num):
        if not n:
            continue
        tm, sg = 0, 1
        for i in range(p.k):
            if (mask >> i) & 1:
                tm ^= slot_mask[i]
                sg *= slot_sign[i]
        out[tm] += sg * int(n)
    return AlgebraElement(target, out, m.den, MONOMIAL)


def constraint_poly(c: Constraint) -> AlgebraElement:
    """``P_R(S)`` for a constraint."""
    return eval_scope_poly(indicator_poly(c.relation), c.scope)


def nonsat_assignments(c: Constraint) -> list[dict]:
    """Assignments ``phi`` to ``X ∩ S`` with ``phi(S) ∉ R``."""
    vs = c.variables
    out = []
    for idx in range(1 << len(vs)):
        phi = dict(zip(vs, index_to_signs(idx, len(vs))))
        t = tuple(phi[s] if is_variable(s) else s for s in c.scope)
        if t not in c.relation:
            out.append(phi)
    return out


def constraint_nonsat_projections(c: Constraint) -> list[AlgebraElement]:
    """``{Π_{C,phi} : phi(S) ∉ R}`` over ``X ∩ S``."""
    vs = c.variables
    return [projection_of_assignment(vs, phi) for phi in nonsat_assignments(c)]


# --------------------------------------------------------------------------
# text dump


def _fmt_coeff(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def dump_element(e: AlgebraElement) -> str:
    """Canonical text form, e.g. ``1/2 + 1/2*x + 1/2*y - 1/2*x*y``.

    Terms are ordered by degree and then by variable positions in the varset.
    """
    m = e.to(MONOMIAL)
    terms = []
    for mask, n in enumerate(m.num):
        if not n:
            continue
        idx = tuple(i for i in range(m.k) if (mask >> i) & 1)
        terms.append((len(idx), idx, Fraction(int(n), m.den)))
    if not terms:
        return "0"
    terms.sort(key=lambda t: (t[0], t[1]))
    parts = []
    for deg, idx, c in terms:
        names = "*".join(m.varset[i] for i in idx)
        mag = abs(c)
        if deg == 0:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = names
        else:
            body = f"{_fmt_coeff(mag)}*{names}"
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


_COEFF = re.compile(r"^\d+(/\d+)?$")


def parse_element(text: str, varset: Sequence[str]) -> AlgebraElement:
    """Inverse of ``dump_element`` for a known varset."""
    varset = tuple(varset)
    pos = {v: i for i, v in enumerate(varset)}
    text = text.strip()
    coeffs = [Fraction(0)] * (1 << len(varset))
    if text == "0":
        return AlgebraElement.zero(varset)
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    pieces = re.split(r" ([+-]) ", text)
    terms = [(sign, pieces[0])]
    for op, body in zip(pieces[1::2], pieces[2::2]):
        terms.append((1 if op == "+" else -1, body))
    for sg, body in terms:
        factors = body.split("*")
        c = Fraction(1)
        if _COEFF.match(factors[0]):
            c = Fraction(factors[0])
            factors = factors[1:]
        mask = 0
        for f in factors:
            if f not in pos:
                raise DomainError(f"unknown variable {f!r} in element dump")
            mask ^= 1 << pos[f]
        coeffs[mask] += sg * c
    return AlgebraElement.from_coeffs(varset, coeffs)
