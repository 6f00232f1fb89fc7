"""Exact sparse multivariate jets over the rationals.

A :class:`Jet` is a polynomial in ``n`` variables truncated at total degree
``D``: every coefficient of degree ``<= D`` is known exactly and everything
above is discarded.  :class:`TPoly` is a polynomial in an extra parameter
``t`` (truncated at ``t``-order ``K``) whose coefficients are jets.

Monomials are iterated in graded lexicographic order (total degree first,
then lexicographic with ``x1 > x2 > ... > xn``), which fixes pivoting and
printing downstream.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, Sequence, Tuple

Exponent = Tuple[int, ...]

INFINITE = math.inf


class NotAUnit(ArithmeticError):
    """Raised when inverting a jet (or t-series) whose constant term vanishes."""


class StructureError(ValueError):
    """Operands live in different ambient dimensions or truncations."""


def grlex_key(e: Exponent):
    return (sum(e), e)


def monomials_of_degree(n: int, k: int) -> list[Exponent]:
    """All exponent vectors of total degree ``k`` in ``n`` variables, grlex ascending."""
    if k < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort()
    return out


def monomials_up_to(n: int, k: int) -> list[Exponent]:
    out: list[Exponent] = []
    for j in range(k + 1):
        out.extend(monomials_of_degree(n, j))
    return out


def unit_vector(n: int, i: int) -> Exponent:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class Jet:
    """Polynomial truncated at total degree ``D`` with exact rational coefficients.

    ``D == -1`` is allowed and denotes a jet about which nothing is known
    (for instance the derivative of a constant jet).
    """

    __slots__ = ("n", "D", "terms")

    def __init__(self, n: int, D: int, terms: Dict[Exponent, object] | None = None):
        if n < 1:
            raise StructureError("dimension must be positive")
        if D < -1:
            D = -1
        self.n = n
        self.D = D
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != n:
                    raise StructureError(f"exponent {e} does not have length {n}")
                if any(x < 0 for x in e):
                    raise StructureError(f"negative exponent in {e}")
                if sum(e) > D:
                    continue
                c = Fraction(c)
                if c:
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, n: int, D: int, terms: Dict[Exponent, Fraction]) -> "Jet":
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.n, obj.D, obj.terms = n, D, terms
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int, D: int) -> "Jet":
        return cls._raw(n, max(D, -1), {})

    @classmethod
    def const(cls, n: int, D: int, c) -> "Jet":
        return cls(n, D, {(0,) * n: c})

    @classmethod
    def one(cls, n: int, D: int) -> "Jet":
        return cls.const(n, D, 1)

    @classmethod
    def var(cls, n: int, D: int, i: int) -> "Jet":
        return cls(n, D, {unit_vector(n, i): 1})

    @classmethod
    def monomial(cls, n: int, D: int, e: Exponent, c=1) -> "Jet":
        return cls(n, D, {tuple(e): c})

    # -- basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((0,) * self.n, Fraction(0))

    def coeff(self, e: Exponent) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def order(self):
        """Lowest total degree of a nonzero term; ``INFINITE`` for the zero jet."""
        if not self.terms:
            return INFINITE
        return min(sum(e) for e in self.terms)

    def degree(self) -> int:
        """Highest total degree present (-1 for zero)."""
        return max((sum(e) for e in self.terms), default=-1)

    def items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in grlex ascending order."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def homogeneous_part(self, k: int) -> "Jet":
        return Jet._raw(self.n, self.D, {e: c for e, c in self.terms.items() if sum(e) == k})

    def truncate(self, D: int) -> "Jet":
        D = min(D, self.D)
        return Jet._raw(self.n, D, {e: c for e, c in self.terms.items() if sum(e) <= D})

    def with_degree(self, D: int) -> "Jet":
        """Relabel the truncation; only allowed to shrink or when no terms are lost."""
        return Jet._raw(self.n, max(D, -1), {e: c for e, c in self.terms.items() if sum(e) <= D})

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Jet") -> None:
        if self.n != other.n:
            raise StructureError(f"dimension mismatch: {self.n} vs {other.n}")
        if self.D != other.D:
            raise StructureError(f"truncation mismatch: {self.D} vs {other.D}")

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, Fraction)):
            return Jet.const(self.n, self.D, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Jet._raw(self.n, self.D, out)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet._raw(self.n, self.D, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Jet":
        c = Fraction(c)
        if not c:
            return Jet.zero(self.n, self.D)
        return Jet._raw(self.n, self.D, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Jet):
            return NotImplemented
        self._check(other)
        return self.mul_trunc(other, self.D)

    __rmul__ = __mul__

    def mul_trunc(self, other: "Jet", D: int) -> "Jet":
        """Product truncated at ``D``; the caller vouches for ``D`` being trusted."""
        if self.n != other.n:
            raise StructureError(f"dimension mismatch: {self.n} vs {other.n}")
        a = [(e, sum(e), c) for e, c in self.terms.items()]
        b = [(e, sum(e), c) for e, c in other.terms.items()]
        out: Dict[Exponent, Fraction] = {}
        for ea, da, ca in a:
            room = D - da
            if room < 0:
                continue
            for eb, db, cb in b:
                if db > room:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Jet._raw(self.n, D, {e: c for e, c in out.items() if c})

    def __pow__(self, k: int) -> "Jet":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Jet.one(self.n, self.D)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, i: int) -> "Jet":
        """Partial derivative in ``x_i``; the truncation drops by one."""
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Jet._raw(self.n, max(self.D - 1, -1), out)

    def weighted_parts(self, weights: Sequence[int]) -> Dict[int, "Jet"]:
        """Split into weighted-homogeneous pieces keyed by weighted degree."""
        out: Dict[int, Dict[Exponent, Fraction]] = {}
        for e, c in self.terms.items():
            w = sum(wi * ei for wi, ei in zip(weights, e))
            out.setdefault(w, {})[e] = c
        return {w: Jet._raw(self.n, self.D, t) for w, t in out.items()}

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Jet.const(self.n, self.D, other)
        if not isinstance(other, Jet):
            return NotImplemented
        return self.n == other.n and self.D == other.D and self.terms == other.terms

    def equal_within(self, other: "Jet", D: int) -> bool:
        """Equality of all coefficients of degree ``<= D``."""
        return (self.with_degree(D) - other.with_degree(D)).is_zero()

    def __hash__(self) -> int:
        return hash((self.n, self.D, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*x^{e}" for e, c in self.items()) or "0"
        return f"Jet(n={self.n}, D={self.D}: {body})"


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    """Add, subtract or multiply two jets of identical shape."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def order_at_origin(a: Jet):
    return a.order()


def jet_invert_unit(u: Jet) -> Jet:
    """Inverse of a unit jet by the geometric series on its maximal-ideal part."""
    c = u.constant()
    if not c:
        raise NotAUnit("constant term is zero")
    inv_c = 1 / c
    # u = c (1 + m)  =>  1/u = (1/c) sum (-m)^k
    m = (u.scale(inv_c) - 1)
    neg_m = -m
    result = Jet.one(u.n, u.D)
    power = Jet.one(u.n, u.D)
    for _ in range(max(u.D, 0)):
        power = power * neg_m
        if power.is_zero():
            break
        result = result + power
    return result.scale(inv_c)


class TPoly:
    """Polynomial in ``t`` up to order ``K`` whose coefficients are jets."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Jet]):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise StructureError("TPoly needs at least the t^0 coefficient")
        n, D = coeffs[0].n, coeffs[0].D
        for c in coeffs:
            if c.n != n or c.D != D:
                raise StructureError("TPoly coefficients must share dimension and truncation")
        self.coeffs = coeffs

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @property
    def n(self) -> int:
        return self.coeffs[0].n

    @property
    def D(self) -> int:
        return self.coeffs[0].D

    @classmethod
    def constant(cls, j: Jet, K: int) -> "TPoly":
        return cls([j] + [Jet.zero(j.n, j.D)] * K)

    @classmethod
    def one(cls, n: int, D: int, K: int) -> "TPoly":
        return cls.constant(Jet.one(n, D), K)

    @classmethod
    def monomial(cls, j: Jet, power: int, K: int) -> "TPoly":
        """``t^power * j`` (zero if ``power > K``)."""
        zero = Jet.zero(j.n, j.D)
        cs = [zero] * (K + 1)
        if power <= K:
            cs[power] = j
        return cls(cs)

    def coeff(self, j: int) -> Jet:
        if 0 <= j <= self.K:
            return self.coeffs[j]
        return Jet.zero(self.n, self.D)

    def __add__(self, other: "TPoly") -> "TPoly":
        K = min(self.K, other.K)
        return TPoly(self.coeffs[j] + other.coeffs[j] for j in range(K + 1))

    def __sub__(self, other: "TPoly") -> "TPoly":
        K = min(self.K, other.K)
        return TPoly(self.coeffs[j] - other.coeffs[j] for j in range(K + 1))

    def __neg__(self) -> "TPoly":
        return TPoly(-c for c in self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return TPoly(c * other for c in self.coeffs)
        if isinstance(other, (int, Fraction)):
            return TPoly(c.scale(other) for c in self.coeffs)
        if not isinstance(other, TPoly):
            return NotImplemented
        K = min(self.K, other.K)
        out = []
        for k in range(K + 1):
            acc = Jet.zero(self.n, self.D)
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return TPoly(out)

    __rmul__ = __mul__

    def truncate_t(self, K: int) -> "TPoly":
        return TPoly(self.coeffs[: K + 1])

    def truncate(self, D: int) -> "TPoly":
        return TPoly(c.truncate(D) for c in self.coeffs)

    def at_one(self) -> Jet:
        """Sum of the coefficients (evaluation at ``t = 1``)."""
        acc = Jet.zero(self.n, self.D)
        for c in self.coeffs:
            acc = acc + c
        return acc

    def t_derivative(self) -> "TPoly":
        if self.K == 0:
            return TPoly([Jet.zero(self.n, self.D)])
        return TPoly(self.coeffs[j].scale(j) for j in range(1, self.K + 1))

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and all(c.is_zero() for c in self.coeffs[1:])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TPoly(K={self.K}, {list(self.coeffs)})"


def tpoly_invert_unit(u: TPoly) -> TPoly:
    """Inverse modulo ``t^(K+1)``; the ``t^0`` coefficient must be a unit jet."""
    v0 = jet_invert_unit(u.coeffs[0])
    vs = [v0]
    for k in range(1, u.K + 1):
        acc = Jet.zero(u.n, u.D)
        for i in range(1, k + 1):
            ui = u.coeffs[i]
            if ui:
                acc = acc + ui * vs[k - i]
        vs.append(-(v0 * acc))
    return TPoly(vs)

