"""Decompositions of 1-forms relative to a function, as exact graded linear systems.

Two problems are solved here:

* relative:  ``eta = dh + a df``
* invariant: ``omega = a df + f eta``

Both are linear in the unknown jet coefficients.  Equations are indexed by
(component, monomial) and fed to the eliminator in increasing total degree,
so the first inconsistency found is at the minimal degree.  On failure an
:class:`ObstructionCertificate` carries the exact combination of equations
that reads ``0 = c`` with ``c != 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Tuple

from .forms import PForm, d_function, exterior_d, wedge
from .linalg import Eliminator, Inconsistent, replay
from .ring import INFINITE, Exponent, Jet, grlex_key, monomials_up_to

RELATIVE = "RELATIVE"
INVARIANT = "INVARIANT"


class NotInvariant(ValueError):
    """``f`` does not divide some component of ``omega ^ df``."""

    def __init__(self, index, component: Jet):
        super().__init__(f"f does not divide the component {index} of omega ^ df")
        self.index = index
        self.component = component


class InternalConsistencyError(AssertionError):
    pass


@dataclass
class Equation:
    label: Tuple  # (component index, monomial exponent)
    row: Dict[Hashable, Fraction]
    rhs: Fraction


@dataclass
class ObstructionCertificate:
    """A finite witness that a graded linear system has no solution.

    ``degree`` is the obstruction degree reported to users; for the relative
    problem it is the degree of the failing relation after differentiating
    (one less than ``equation_degree``, the degree of the failing 1-form
    coefficients).  ``equations`` and ``multipliers`` replay to ``0 = rhs``.
    """

    problem: str
    degree: int
    equation_degree: int
    equations: List[Equation]
    multipliers: List[Fraction]
    rhs: Fraction
    t_order: Optional[int] = None
    human_note: str = ""
    target: Optional[PForm] = None  # the 1-form being decomposed, kept for re-verification

    def replay(self) -> Tuple[Dict, Fraction]:
        rows = [(e.row, e.rhs) for e in self.equations]
        return replay(rows, dict(enumerate(self.multipliers)))

    def is_valid(self) -> bool:
        row, rhs = self.replay()
        return not row and rhs != 0 and rhs == self.rhs


@dataclass
class Decomposition:
    kind: str
    parts: Dict[str, object]
    residual: PForm
    trusted_degree: int

    def __getitem__(self, key):
        return self.parts[key]


def _unknown_key(label):
    # block rank first, then grlex on the exponent, then component
    block, rest = label[0], label[1:]
    rank = {"a": 0, "q": 0, "g": 0, "eta": 1, "h": 1}[block]
    if block == "eta":
        i, e = rest
        return (rank, grlex_key(e), i)
    return (rank, grlex_key(rest[-1]), rest[0] if len(rest) == 2 else 0)


def _relative_key(label):
    # a-unknowns placed last: free a-coefficients are set to zero
    k = _unknown_key(label)
    return (1 - k[0],) + k[1:]


def _accumulate(rows, key, label, value):
    row = rows.get(key)
    if row is None:
        return
    row[label] = row.get(label, 0) + value


def _solve_graded(equations: Dict[int, List[Equation]], col_key, problem: str, degree_shift: int):
    """Feed equations by degree; return the solution dict or a certificate."""
    elim = Eliminator(col_key)
    for k in sorted(equations):
        try:
            for eq in equations[k]:
                elim.add_row(eq.row, eq.rhs)
        except Inconsistent:
            return _certificate(equations, k, col_key, problem, degree_shift)
    return elim.solve()


def _certificate(equations, k, col_key, problem, degree_shift):
    # rerun with provenance tracking up to the failing degree
    elim = Eliminator(col_key, track=True)
    flat: List[Equation] = []
    for j in sorted(equations):
        if j > k:
            break
        for eq in equations[j]:
            flat.append(eq)
            try:
                elim.add_row(eq.row, eq.rhs)
            except Inconsistent as exc:
                used = sorted(exc.combination)
                eqs = [flat[i] for i in used]
                mult = [exc.combination[i] for i in used]
                cert = ObstructionCertificate(
                    problem=problem,
                    degree=k - degree_shift,
                    equation_degree=k,
                    equations=eqs,
                    multipliers=mult,
                    rhs=exc.rhs,
                )
                cert.human_note = render_certificate(cert)
                if not cert.is_valid():
                    raise InternalConsistencyError("obstruction certificate does not replay")
                return cert
    raise InternalConsistencyError("inconsistency vanished on replay")


def _fmt_monomial(e: Exponent, names) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) or "1"


def format_unknown(label, names) -> str:
    block = label[0]
    if block == "eta":
        return f"eta{label[1] + 1}[{_fmt_monomial(label[2], names)}]"
    return f"{block}[{_fmt_monomial(label[-1], names)}]"


def format_equation(eq: Equation, names) -> str:
    i, m = eq.label
    terms = []
    for c, v in sorted(eq.row.items(), key=lambda cv: _unknown_key(cv[0])):
        u = format_unknown(c, names)
        terms.append(u if v == 1 else f"-{u}" if v == -1 else f"{v}*{u}")
    lhs = " + ".join(terms) or "0"
    return f"[d{names[i]} | {_fmt_monomial(m, names)}] {lhs} = {eq.rhs}"


def render_certificate(cert: ObstructionCertificate, names=None) -> str:
    n = len(cert.equations[0].label[1]) if cert.equations else 0
    names = names or [f"x{i + 1}" for i in range(n)]
    lines = [
        f"{cert.problem} system inconsistent at degree {cert.degree} "
        f"(1-form coefficients of degree {cert.equation_degree}):"
    ]
    for mult, eq in zip(cert.multipliers, cert.equations):
        lines.append(f"  ({mult}) x {format_equation(eq, names)}")
    lines.append(f"  sum: 0 = {cert.rhs}")
    return "\n".join(lines)


def _df(f: Jet) -> PForm:
    df = d_function(f)
    if df.is_zero():
        raise ValueError("df vanishes identically within the truncation")
    return df


def check_relative_closedness(eta: PForm, f: Jet):
    """Whether ``d eta ^ df = 0`` within the trusted degree, plus the residual."""
    if eta.p != 1:
        raise ValueError("eta must be a 1-form")
    res = wedge(exterior_d(eta), d_function(f))
    return res.is_zero(), res


def recompose_relative(h: Jet, a: Jet, f: Jet, D: int) -> PForm:
    return (d_function(h).truncate(D) + d_function(f).truncate(D).times(a.truncate(D))).truncate(D)


def recompose_invariant(a: Jet, eta: PForm, f: Jet, D: int) -> PForm:
    return (d_function(f).truncate(D).times(a.truncate(D)) + eta.truncate(D).times(f.truncate(D))).truncate(D)


def solve_relative(eta: PForm, f: Jet):
    """Write ``eta = dh + a df`` through the trusted degree, or certify that no such writing exists.

    Among the solutions the one with free ``a``-coefficients set to zero is
    returned, so an exact form comes back as ``(h, 0)``.
    """
    if eta.p != 1 or eta.n != f.n:
        raise ValueError("eta must be a 1-form in the ambient dimension of f")
    n = f.n
    df = _df(f)
    Dt = min(eta.D, f.D - 1)
    nu = df.order()
    rows: Dict[Tuple, Dict] = {}
    for m in monomials_up_to(n, Dt):
        for i in range(n):
            up = list(m)
            up[i] += 1
            rows[(i, m)] = {("h", tuple(up)): Fraction(m[i] + 1)}
    for i in range(n):
        dfi = [(g, sum(g), c) for g, c in df.component((i,)).terms.items()]
        for beta in monomials_up_to(n, Dt - nu):
            room = Dt - sum(beta)
            for g, dg, c in dfi:
                if dg <= room:
                    _accumulate(rows, (i, tuple(x + y for x, y in zip(beta, g))), ("a", beta), c)
    equations = _by_degree(rows, eta, Dt)
    sol = _solve_graded(equations, _relative_key, RELATIVE, degree_shift=1)
    if isinstance(sol, ObstructionCertificate):
        return sol
    h = Jet(n, Dt + 1, {lab[1]: v for lab, v in sol.items() if lab[0] == "h"})
    a = Jet(n, Dt, {lab[1]: v for lab, v in sol.items() if lab[0] == "a"})
    residual = recompose_relative(h, a, f, Dt) - eta.truncate(Dt)
    if residual:
        raise InternalConsistencyError("relative decomposition does not recompose")
    return Decomposition(RELATIVE, {"h": h, "a": a}, residual, Dt)


def _by_degree(rows, target: PForm, Dt: int) -> Dict[int, List[Equation]]:
    out: Dict[int, List[Equation]] = {}
    comps = [target.component((i,)) for i in range(target.n)]
    for (i, m), row in sorted(rows.items(), key=lambda kv: (grlex_key(kv[0][1]), kv[0][0])):
        out.setdefault(sum(m), []).append(Equation((i, m), row, comps[i].coeff(m)))
    return out


def divides(f: Jet, c: Jet, D: int):
    """Solve ``c = f q`` modulo degree ``D + 1``; returns ``q`` or ``None``."""
    n = f.n
    nu = f.order()
    if nu == INFINITE:
        return Jet.zero(n, D) if c.truncate(D).is_zero() else None
    rows: Dict[Tuple, Dict] = {(0, m): {} for m in monomials_up_to(n, D)}
    fterms = [(g, sum(g), v) for g, v in f.terms.items()]
    for beta in monomials_up_to(n, D - nu):
        for g, dg, v in fterms:
            if sum(beta) + dg <= D:
                _accumulate(rows, (0, tuple(x + y for x, y in zip(beta, g))), ("q", beta), v)
    elim = Eliminator(_unknown_key)
    try:
        for (_, m), row in sorted(rows.items(), key=lambda kv: grlex_key(kv[0][1])):
            elim.add_row(row, c.coeff(m))
    except Inconsistent:
        return None
    sol = elim.solve()
    return Jet(n, D, {lab[1]: v for lab, v in sol.items()})


def check_invariance(omega: PForm, f: Jet):
    """Raise :class:`NotInvariant` unless ``f`` divides every component of ``omega ^ df``."""
    theta = wedge(omega, d_function(f))
    quotients = {}
    for idx, comp in theta.items():
        q = divides(f, comp, theta.D)
        if q is None:
            raise NotInvariant(idx, comp)
        quotients[idx] = q
    return PForm(2, f.n, theta.D, quotients)


def solve_invariant_split(omega: PForm, f: Jet):
    """Write ``omega = a df + f eta`` through the trusted degree.

    ``f`` must vanish at the origin and the hypersurface ``f = 0`` must be
    invariant; free ``eta``-coefficients are set to zero.
    """
    if f.constant() or f.is_zero():
        raise ValueError("f must vanish at the origin and be nonzero")
    if omega.p != 1 or omega.n != f.n:
        raise ValueError("omega must be a 1-form in the ambient dimension of f")
    check_invariance(omega, f)
    n = f.n
    df = _df(f)
    Dt = min(omega.D, f.D - 1)
    nu_df, nu_f = df.order(), f.order()
    rows: Dict[Tuple, Dict] = {(i, m): {} for m in monomials_up_to(n, Dt) for i in range(n)}
    fterms = [(g, sum(g), v) for g, v in f.terms.items()]
    for i in range(n):
        dfi = [(g, sum(g), c) for g, c in df.component((i,)).terms.items()]
        for beta in monomials_up_to(n, Dt - nu_df):
            for g, dg, c in dfi:
                if sum(beta) + dg <= Dt:
                    _accumulate(rows, (i, tuple(x + y for x, y in zip(beta, g))), ("a", beta), c)
        for beta in monomials_up_to(n, Dt - nu_f):
            for g, dg, v in fterms:
                if sum(beta) + dg <= Dt:
                    _accumulate(rows, (i, tuple(x + y for x, y in zip(beta, g))), ("eta", i, beta), v)
    equations = _by_degree(rows, omega, Dt)
    sol = _solve_graded(equations, _unknown_key, INVARIANT, degree_shift=0)
    if isinstance(sol, ObstructionCertificate):
        return sol
    a = Jet(n, Dt, {lab[1]: v for lab, v in sol.items() if lab[0] == "a"})
    eta_terms: Dict[int, Dict] = {}
    for lab, v in sol.items():
        if lab[0] == "eta":
            eta_terms.setdefault(lab[1], {})[lab[2]] = v
    eta = PForm(1, n, Dt, {(i,): Jet(n, Dt, t) for i, t in eta_terms.items()})
    residual = recompose_invariant(a, eta, f, Dt) - omega.truncate(Dt)
    if residual:
        raise InternalConsistencyError("invariant split does not recompose")
    return Decomposition(INVARIANT, {"a": a, "eta": eta}, residual, Dt)


@dataclass
class UnitClaim:
    a_is_unit: bool
    nu_omega: object
    nu_df: object


def unit_test_claim(omega: PForm, f: Jet, split: Optional[Decomposition] = None) -> UnitClaim:
    """Report the multiplicities and whether the solved ``a`` is a unit.

    ``nu(omega) == nu(df)`` forces ``a(0) != 0`` since ``f eta`` has order
    at least ``nu(df) + 1``; a violation means a bookkeeping bug.
    """
    if split is None:
        split = solve_invariant_split(omega, f)
    if isinstance(split, ObstructionCertificate):
        raise ValueError("omega = a df + f eta has no solution; the claim does not apply")
    nu_omega = omega.order()
    nu_df = d_function(f).order()
    a_unit = split["a"].constant() != 0
    if nu_omega == nu_df and not a_unit:
        raise InternalConsistencyError("nu(omega) = nu(df) but a(0) = 0")
    return UnitClaim(a_unit, nu_omega, nu_df)
