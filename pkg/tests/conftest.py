"""Shared strategies and independent oracles.

The oracles go through sympy and a permutation-sign expansion of forms,
never through the package's own wedge or d.
"""

import sys
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from germforge.forms import PForm
from germforge.ring import Jet, monomials_up_to

X = sympy.symbols("x1:4")


def to_sympy(j: Jet, syms=X):
    return sum((sympy.Rational(c.numerator, c.denominator) * sympy.prod([s ** k for s, k in zip(syms, e)])
                for e, c in j.terms.items()), sympy.Integer(0))


def from_sympy(expr, n: int, D: int, syms=X) -> Jet:
    poly = sympy.Poly(sympy.expand(expr), *syms[:n])
    terms = {}
    for e, c in poly.terms():
        if sum(e) <= D:
            terms[tuple(e)] = Fraction(int(c.p), int(c.q))
    return Jet(n, D, terms)


def truncate_expr(expr, n: int, D: int, syms=X):
    return to_sympy(from_sympy(expr, n, D, syms), syms)


# -- brute-force exterior algebra over sympy ---------------------------------
def _sort_sign(idx):
    """Sign of the permutation sorting ``idx``, or 0 on a repeated index."""
    if len(set(idx)) < len(idx):
        return 0, None
    sign = 1
    lst = list(idx)
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                sign = -sign
    return sign, tuple(lst)


def form_to_sym(a: PForm) -> dict:
    return {idx: to_sympy(c) for idx, c in a.comps.items() if c}


def sym_wedge(A: dict, B: dict) -> dict:
    out = {}
    for I, f in A.items():
        for J, g in B.items():
            sign, K = _sort_sign(I + J)
            if sign:
                out[K] = out.get(K, 0) + sign * f * g
    return {k: sympy.expand(v) for k, v in out.items() if sympy.expand(v) != 0}


def sym_d(A: dict, n: int) -> dict:
    out = {}
    for I, f in A.items():
        for i in range(n):
            sign, K = _sort_sign((i,) + I)
            if sign:
                out[K] = out.get(K, 0) + sign * sympy.diff(f, X[i])
    return {k: sympy.expand(v) for k, v in out.items() if sympy.expand(v) != 0}


def sym_truncate(A: dict, n: int, D: int) -> dict:
    out = {k: truncate_expr(v, n, D) for k, v in A.items()}
    return {k: v for k, v in out.items() if v != 0}


# -- hypothesis strategies ---------------------------------------------------
small_fracs = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def jets(draw, n=3, D=5, max_terms=5, min_degree=0, nonzero=False):
    monos = [e for e in monomials_up_to(n, D) if sum(e) >= min_degree]
    picked = draw(st.lists(st.sampled_from(monos), min_size=1 if nonzero else 0, max_size=max_terms, unique=True))
    coeffs = draw(st.lists(small_fracs.filter(bool), min_size=len(picked), max_size=len(picked)))
    return Jet(n, D, dict(zip(picked, coeffs)))


@st.composite
def units(draw, n=3, D=5, max_terms=4):
    j = draw(jets(n, D, max_terms, min_degree=1))
    c = draw(small_fracs.filter(bool))
    return j + Jet.const(n, D, c)


@st.composite
def forms(draw, p=1, n=3, D=5, max_terms=3):
    from itertools import combinations

    comps = {}
    for idx in combinations(range(n), p):
        comps[idx] = draw(jets(n, D, max_terms))
    return PForm(p, n, D, comps)


def random_jet(rng, n, D, max_terms=5, min_degree=0, max_degree=None):
    monos = [e for e in monomials_up_to(n, max_degree if max_degree is not None else D) if sum(e) >= min_degree]
    k = rng.randint(0, max_terms)
    terms = {}
    for e in rng.sample(monos, min(k, len(monos))):
        terms[e] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))
    return Jet(n, D, terms)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
