"""Quasi-homogeneity, the weighted rescaling embedding, and singularity tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .forms import PForm, WeightVector, d_function, pullback_curve, pullback_weighted
from .linalg import Eliminator
from .normalizer import DeformationFamily
from .ring import INFINITE, Exponent, Jet, grlex_key, jet_invert_unit, monomials_of_degree, monomials_up_to
from .solver import Decomposition, ObstructionCertificate, solve_invariant_split

CERTIFIED = "CERTIFIED"
UNKNOWN = "UNKNOWN"


class NotQuasiHomogeneous(ValueError):
    pass


@dataclass
class QuasiHomogeneityReport:
    is_qh: bool
    weights: Optional[Tuple[int, ...]]
    d: Optional[int]
    strict: bool

    def weight_vector(self) -> WeightVector:
        if not (self.is_qh and self.strict):
            raise NotQuasiHomogeneous("no strictly positive weights available")
        return WeightVector(self.d, self.weights)


def _common_level(exps: Sequence[Exponent], w: Sequence[int]):
    level = None
    for e in exps:
        v = sum(a * b for a, b in zip(w, e))
        if level is None:
            level = v
        elif v != level:
            return None
    return level


def detect_quasihomogeneity(f: Jet, max_weight: int = 12) -> QuasiHomogeneityReport:
    """Exhaustive search for integer weights putting every monomial of ``f`` on one level.

    Strictly positive weights are tried first (lexicographically smallest
    wins); failing that, zero weights are allowed and the result is reported
    as non-strict.
    """
    exps = [e for e, _ in f.items()]
    if not exps:
        return QuasiHomogeneityReport(False, None, None, False)
    for lo, strict in ((1, True), (0, False)):
        for w in product(range(lo, max_weight + 1), repeat=f.n):
            level = _common_level(exps, w)
            if level is not None and level > 0:
                return QuasiHomogeneityReport(True, tuple(w), level, strict)
    return QuasiHomogeneityReport(False, None, None, False)


def is_quasihomogeneous_for(f: Jet, w: WeightVector) -> bool:
    return all(w.level(e) == w.d for e in f.terms)


def embed_as_deformation(omega: PForm, f: Jet, w: Optional[WeightVector] = None,
                         t_order: Optional[int] = None) -> DeformationFamily:
    """Turn ``omega = a df + f eta`` (``a`` a unit) into ``df + t f eta~ + ...``.

    ``omega`` is first divided by ``a`` so the family evaluates at ``t = 1``
    to ``omega / a`` (``omega`` itself when ``a = 1``).  The default t-order
    is large enough that every term surviving the x-truncation is kept.
    """
    if w is None:
        w = detect_quasihomogeneity(f).weight_vector()
    if not is_quasihomogeneous_for(f, w):
        raise NotQuasiHomogeneous(f"f is not quasi-homogeneous for weights {w.weights}, d={w.d}")
    split = solve_invariant_split(omega, f)
    if isinstance(split, ObstructionCertificate):
        raise ValueError("omega does not split as a df + f eta")
    a, eta = split["a"], split["eta"]
    if a.constant() == 0:
        raise ValueError("a is not a unit; omega is not a deformation of df")
    Dt = split.trusted_degree
    if a != 1:
        eta = eta.times(jet_invert_unit(a))
    pulled = pullback_weighted(eta, w)
    if pulled.coeff(0):
        raise ValueError("the t^0 part of the pulled-back eta must vanish")
    if t_order is None:
        t_order = max(1, max(w.weights) * (Dt + 1) - w.d, pulled.K)
    ft = f.truncate(Dt)
    omegas = [pulled.coeff(j).times(ft) for j in range(1, t_order + 1)]
    return DeformationFamily(f.truncate(Dt + 1), omegas)


@dataclass
class SingularityReport:
    status: str
    k_found: Optional[int]
    jacobian_generators: List[Jet]
    witnesses: Dict[Exponent, Tuple[Jet, ...]] = field(default_factory=dict)
    trusted_degree: int = 0

    @property
    def isolated_certified(self) -> bool:
        return self.status == CERTIFIED


def certify_isolated_singularity(f: Jet) -> SingularityReport:
    """Find the least ``k`` with every degree-``k`` monomial in the Jacobian ideal (mod higher terms).

    Partials are trusted through degree ``f.D - 1``; membership is decided
    modulo that degree plus one.  Failure for every ``k`` is ``UNKNOWN``.
    """
    if f.constant():
        raise ValueError("f must vanish at the origin")
    n = f.n
    partials = [f.diff(i) for i in range(n)]
    Dj = f.D - 1
    gens: List[Tuple[int, Exponent]] = []
    elim = Eliminator(grlex_key, track=True)
    for i, p in enumerate(partials):
        nu = p.order()
        if nu == INFINITE:
            continue
        for beta in monomials_up_to(n, Dj - nu):
            image = p.mul_trunc(Jet.monomial(n, Dj, beta), Dj)
            gens.append((i, beta))
            elim.add_row(image.terms)
    for k in range(1, Dj + 1):
        witnesses = {}
        for alpha in monomials_of_degree(n, k):
            ok, comb = elim.in_span({alpha: 1})
            if not ok:
                break
            terms: List[Dict] = [dict() for _ in range(n)]
            for r, c in comb.items():
                i, beta = gens[r]
                terms[i][beta] = c
            witnesses[alpha] = tuple(Jet(n, Dj, t) for t in terms)
        else:
            return SingularityReport(CERTIFIED, k, partials, witnesses, Dj)
    return SingularityReport(UNKNOWN, None, partials, {}, Dj)


def check_witnesses(report: SingularityReport) -> bool:
    """Re-multiply the stored witnesses against the partials."""
    Dj = report.trusted_degree
    for alpha, gs in report.witnesses.items():
        n = len(alpha)
        acc = Jet.zero(n, Dj)
        for g, p in zip(gs, report.jacobian_generators):
            acc = acc + g.mul_trunc(p, Dj)
        if acc != Jet.monomial(n, Dj, alpha):
            return False
    return True


@dataclass
class Theorem3Report:
    first_integral_expected: bool
    nu_omega: object
    nu_df: object
    isolated: bool
    a_is_unit: Optional[bool]
    singularity: SingularityReport
    split: object


def theorem3_criterion(omega: PForm, f: Jet) -> Theorem3Report:
    """Expected existence of a first integral: isolated singularity and ``nu(omega) = nu(df)``."""
    sing = certify_isolated_singularity(f)
    split = solve_invariant_split(omega, f)
    nu_omega = omega.order()
    nu_df = d_function(f).order()
    a_unit = None
    if isinstance(split, Decomposition):
        a_unit = split["a"].constant() != 0
    expected = sing.isolated_certified and a_unit is not None and nu_omega == nu_df
    return Theorem3Report(expected, nu_omega, nu_df, sing.isolated_certified, a_unit, sing, split)


@dataclass
class CurveCheck:
    lies_in_singular_set: bool
    f_order: object
    pullback_order: object
    contradiction: bool


def singular_curve_check(omega: PForm, f: Jet, gamma: Sequence[Jet]) -> CurveCheck:
    """Test a candidate curve through 0 against the singular set of ``omega``.

    With ``omega = a df + f eta``, ``a`` a unit, and ``f(gamma(s))`` of order
    ``p``, the pullback has order exactly ``p - 1``, so the curve cannot lie
    in ``sing(omega)``.
    """
    pulled = pullback_curve(omega, gamma).component((0,))
    fg = pullback_curve(PForm.function(f), gamma).function_part()
    p = fg.order()
    q = pulled.order()
    contradiction = p != INFINITE and p >= 1 and q == p - 1
    return CurveCheck(pulled.is_zero(), p, q, contradiction)
