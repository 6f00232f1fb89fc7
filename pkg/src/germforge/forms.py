"""Differential forms of degree <= 3 with jet coefficients.

A p-form is stored as a map from strictly increasing index tuples to jets.
Differentiation consumes one degree of trust, so ``exterior_d`` lowers the
truncation by one; binary operations work at the smaller of the two
truncations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Sequence, Tuple

from .ring import INFINITE, Jet, StructureError, TPoly

Index = Tuple[int, ...]

MAX_FORM_DEGREE = 3


class FormDegreeError(ValueError):
    """An operation would produce a form of degree above the supported cap."""


def _merge_sign(a: Index, b: Index):
    """Sign and sorted index of ``dx_a ^ dx_b``; ``(0, None)`` on overlap."""
    if set(a) & set(b):
        return 0, None
    merged = list(a) + list(b)
    # count inversions: parity of the sorting permutation
    inv = sum(1 for i in a for j in b if i > j)
    return (-1 if inv % 2 else 1), tuple(sorted(merged))


class PForm:
    """A p-form on (C^n, 0) with jet coefficients truncated at ``D``."""

    __slots__ = ("p", "n", "D", "comps")

    def __init__(self, p: int, n: int, D: int, comps: Dict[Index, Jet] | None = None):
        if not 0 <= p <= MAX_FORM_DEGREE:
            raise FormDegreeError(f"form degree {p} outside 0..{MAX_FORM_DEGREE}")
        self.p, self.n, self.D = p, n, max(D, -1)
        clean: Dict[Index, Jet] = {}
        for idx, j in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != p or any(a >= b for a, b in zip(idx, idx[1:])):
                raise StructureError(f"index {idx} is not strictly increasing of length {p}")
            if any(not 0 <= i < n for i in idx):
                raise StructureError(f"index {idx} out of range for n={n}")
            if j.n != n:
                raise StructureError("component dimension mismatch")
            j = j.with_degree(self.D) if j.D >= self.D else j
            if j.D != self.D:
                raise StructureError(f"component truncated at {j.D} < {self.D}")
            if j:
                clean[idx] = j
        self.comps = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, p: int, n: int, D: int) -> "PForm":
        return cls(p, n, D)

    @classmethod
    def function(cls, f: Jet) -> "PForm":
        return cls(0, f.n, f.D, {(): f})

    @classmethod
    def one_form(cls, coeffs: Sequence[Jet]) -> "PForm":
        n, D = coeffs[0].n, coeffs[0].D
        return cls(1, n, D, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def basis(cls, n: int, D: int, idx: Index) -> "PForm":
        """``dx_{i1} ^ ... ^ dx_{ip}`` for a (possibly unsorted) index tuple."""
        sign, key = 1, ()
        for i in idx:
            s, key = _merge_sign(key, (i,))
            if not s:
                return cls(len(idx), n, D)
            sign *= s
        return cls(len(idx), n, D, {key: Jet.const(n, D, sign)})

    # -- queries ------------------------------------------------------------
    def component(self, idx: Index) -> Jet:
        return self.comps.get(tuple(idx), Jet.zero(self.n, self.D))

    def coefficients(self) -> list[Jet]:
        """Components in index order over *all* increasing tuples (1-forms: dx_1..dx_n)."""
        return [self.component(idx) for idx in combinations(range(self.n), self.p)]

    def function_part(self) -> Jet:
        if self.p != 0:
            raise FormDegreeError("not a 0-form")
        return self.component(())

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self) -> bool:
        return bool(self.comps)

    def order(self):
        """Algebraic multiplicity: minimum order of the coefficients."""
        return min((c.order() for c in self.comps.values()), default=INFINITE)

    def items(self):
        return sorted(self.comps.items())

    # -- arithmetic ---------------------------------------------------------
    def truncate(self, D: int) -> "PForm":
        D = min(D, self.D)
        return PForm(self.p, self.n, D, {k: v.truncate(D) for k, v in self.comps.items()})

    def _align(self, other: "PForm"):
        if self.n != other.n:
            raise StructureError(f"dimension mismatch: {self.n} vs {other.n}")
        D = min(self.D, other.D)
        return self.truncate(D), other.truncate(D), D

    def __add__(self, other: "PForm") -> "PForm":
        if self.p != other.p:
            raise FormDegreeError(f"cannot add a {self.p}-form and a {other.p}-form")
        a, b, D = self._align(other)
        out = dict(a.comps)
        for k, v in b.comps.items():
            out[k] = out[k] + v if k in out else v
        return PForm(self.p, self.n, D, out)

    def __neg__(self) -> "PForm":
        return PForm(self.p, self.n, self.D, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other: "PForm") -> "PForm":
        return self + (-other)

    def scale(self, c) -> "PForm":
        return PForm(self.p, self.n, self.D, {k: v.scale(c) for k, v in self.comps.items()})

    def times(self, g: Jet) -> "PForm":
        """Multiply every coefficient by the function ``g``."""
        D = min(self.D, g.D)
        g = g.truncate(D)
        return PForm(self.p, self.n, D, {k: v.truncate(D) * g for k, v in self.comps.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PForm):
            return NotImplemented
        return (self.p, self.n, self.D, self.comps) == (other.p, other.n, other.D, other.comps)

    def equal_within(self, other: "PForm", D: int) -> bool:
        return self.p == other.p and (self.truncate(D) - other.truncate(D)).is_zero()

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.D, tuple(self.items())))

    def __repr__(self) -> str:
        return f"PForm(p={self.p}, n={self.n}, D={self.D}, {dict(self.items())})"


def exterior_d(alpha: PForm) -> PForm:
    """Exterior derivative; the result is trusted one degree less."""
    if alpha.p >= MAX_FORM_DEGREE:
        raise FormDegreeError("exterior derivative of a 3-form is not supported")
    n, D = alpha.n, alpha.D - 1
    out: Dict[Index, Jet] = {}
    for idx, c in alpha.comps.items():
        for j in range(n):
            if j in idx:
                continue
            dc = c.diff(j)
            if not dc:
                continue
            sign, key = _merge_sign((j,), idx)
            term = dc if sign > 0 else -dc
            out[key] = out[key] + term if key in out else term
    return PForm(alpha.p + 1, n, D, out)


def wedge(alpha: PForm, beta: PForm) -> PForm:
    """Exterior product at the common truncation."""
    p = alpha.p + beta.p
    if p > MAX_FORM_DEGREE:
        raise FormDegreeError(f"wedge of degree {p} exceeds the cap {MAX_FORM_DEGREE}")
    a, b, D = alpha._align(beta)
    out: Dict[Index, Jet] = {}
    for ia, ca in a.comps.items():
        for ib, cb in b.comps.items():
            sign, key = _merge_sign(ia, ib)
            if not sign:
                continue
            prod = ca * cb
            if not prod:
                continue
            if sign < 0:
                prod = -prod
            out[key] = out[key] + prod if key in out else prod
    return PForm(p, a.n, D, out)


def d_function(f: Jet) -> PForm:
    return exterior_d(PForm.function(f))


def integrability_residual(omega: PForm) -> PForm:
    """``omega ^ d omega``; zero means integrable through degree ``D - 1``."""
    if omega.p != 1:
        raise FormDegreeError("integrability is defined for 1-forms")
    return wedge(omega, exterior_d(omega))


@dataclass(frozen=True)
class WeightVector:
    d: int
    weights: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if self.d <= 0 or any(w <= 0 for w in self.weights):
            raise ValueError("weights must be strictly positive")

    def level(self, e) -> int:
        return sum(w * x for w, x in zip(self.weights, e))


class TForm:
    """A p-form whose coefficients are polynomials in ``t`` up to order ``K``.

    ``coeffs[j]`` is the ``t^j`` coefficient; all share (p, n, D).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[PForm]):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise StructureError("TForm needs at least one coefficient")
        p, n = coeffs[0].p, coeffs[0].n
        D = min(c.D for c in coeffs)
        for c in coeffs:
            if c.p != p or c.n != n:
                raise StructureError("TForm coefficients must share degree and dimension")
        self.coeffs = tuple(c.truncate(D) for c in coeffs)

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    @property
    def p(self) -> int:
        return self.coeffs[0].p

    @property
    def n(self) -> int:
        return self.coeffs[0].n

    @property
    def D(self) -> int:
        return self.coeffs[0].D

    def coeff(self, j: int) -> PForm:
        if 0 <= j <= self.K:
            return self.coeffs[j]
        return PForm.zero(self.p, self.n, self.D)

    @classmethod
    def from_tpoly(cls, F: TPoly) -> "TForm":
        return cls(PForm.function(c) for c in F.coeffs)

    def to_tpoly(self) -> TPoly:
        return TPoly(c.function_part() for c in self.coeffs)

    def truncate_t(self, K: int) -> "TForm":
        cs = list(self.coeffs[: K + 1])
        while len(cs) < K + 1:
            cs.append(PForm.zero(self.p, self.n, self.D))
        return TForm(cs)

    def truncate(self, D: int) -> "TForm":
        return TForm(c.truncate(D) for c in self.coeffs)

    def __add__(self, other: "TForm") -> "TForm":
        K = min(self.K, other.K)
        return TForm(self.coeffs[j] + other.coeffs[j] for j in range(K + 1))

    def __sub__(self, other: "TForm") -> "TForm":
        K = min(self.K, other.K)
        return TForm(self.coeffs[j] - other.coeffs[j] for j in range(K + 1))

    def __neg__(self) -> "TForm":
        return TForm(-c for c in self.coeffs)

    def times(self, u: TPoly) -> "TForm":
        """Multiply by a t-series of functions, truncating at the smaller order."""
        K = min(self.K, u.K)
        out = []
        for k in range(K + 1):
            acc = PForm.zero(self.p, self.n, min(self.D, u.D))
            for i in range(k + 1):
                g = u.coeffs[k - i]
                if g and self.coeffs[i]:
                    acc = acc + self.coeffs[i].times(g)
            out.append(acc)
        return TForm(out)

    def d_x(self) -> "TForm":
        return TForm(exterior_d(c) for c in self.coeffs)

    def at_one(self) -> PForm:
        acc = PForm.zero(self.p, self.n, self.D)
        for c in self.coeffs:
            acc = acc + c
        return acc

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def first_nonzero(self):
        for j, c in enumerate(self.coeffs):
            if c:
                return j
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TForm):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TForm(K={self.K}, {list(self.coeffs)})"


def twedge(alpha: TForm, beta: TForm) -> TForm:
    """Wedge of t-series of forms, truncated at the smaller t-order."""
    K = min(alpha.K, beta.K)
    p = alpha.p + beta.p
    D = min(alpha.D, beta.D)
    out = []
    for k in range(K + 1):
        acc = PForm.zero(p, alpha.n, D)
        for i in range(k + 1):
            a, b = alpha.coeffs[i], beta.coeffs[k - i]
            if a and b:
                acc = acc + wedge(a, b)
        out.append(acc)
    return TForm(out)


def pullback_weighted(alpha: PForm, w: WeightVector) -> TForm:
    """Pull back along ``x_i -> t^{w_i} x_i`` keeping ``t`` formal.

    A monomial ``c x^e dx_I`` acquires ``t^(<w, e> + sum_{i in I} w_i)``.  The
    result carries every power that occurs, so it is exact (no t-truncation).
    """
    if len(w.weights) != alpha.n:
        raise StructureError("weight vector length does not match the dimension")
    buckets: Dict[int, Dict[Index, Dict]] = {}
    for idx, c in alpha.comps.items():
        shift = sum(w.weights[i] for i in idx)
        for e, v in c.terms.items():
            power = w.level(e) + shift
            buckets.setdefault(power, {}).setdefault(idx, {})[e] = v
    K = max(buckets, default=0)
    coeffs = []
    for j in range(K + 1):
        comps = {idx: Jet(alpha.n, alpha.D, terms) for idx, terms in buckets.get(j, {}).items()}
        coeffs.append(PForm(alpha.p, alpha.n, alpha.D, comps))
    return TForm(coeffs)


def pullback_curve(alpha: PForm, gamma: Sequence[Jet]) -> PForm:
    """Pull a 0- or 1-form back along a curve ``s -> gamma(s)`` (univariate jets).

    Returns a form on (C, 0): a 0-form, or the coefficient of ``ds``.
    """
    if len(gamma) != alpha.n:
        raise StructureError("curve has the wrong number of components")
    if any(g.constant() for g in gamma):
        raise ValueError("curve must pass through the origin")
    D = min(g.D for g in gamma)
    gamma = [g.truncate(D) for g in gamma]

    def compose(c: Jet) -> Jet:
        acc = Jet.zero(1, D)
        powers = [[Jet.one(1, D)] for _ in gamma]
        for e, v in c.terms.items():
            term = Jet.const(1, D, v)
            for i, k in enumerate(e):
                while len(powers[i]) <= k:
                    powers[i].append(powers[i][-1] * gamma[i])
                term = term * powers[i][k]
            acc = acc + term
        return acc

    if alpha.p == 0:
        return PForm.function(compose(alpha.function_part()))
    if alpha.p != 1:
        raise FormDegreeError("curve pullback supports 0- and 1-forms")
    acc = Jet.zero(1, D - 1)
    for (i,), c in alpha.comps.items():
        acc = acc + compose(c).truncate(D - 1) * gamma[i].diff(0)
    return PForm(1, 1, D - 1, {(0,): acc})

