import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import X, form_to_sym, forms, from_sympy, jets, sym_d, sym_truncate, sym_wedge
from germforge.forms import (
    FormDegreeError,
    PForm,
    TForm,
    WeightVector,
    d_function,
    exterior_d,
    integrability_residual,
    pullback_weighted,
    twedge,
    wedge,
)
from germforge.ring import Jet

x, y, z = X
D = 6


def P(expr, n=3, Dg=D):
    return from_sympy(sympy.sympify(expr), n, Dg)


def one_form(*cs, n=3, Dg=D):
    return PForm.one_form([P(c, n, Dg) for c in cs])


def dx(i, n=3, Dg=D):
    return PForm.basis(n, Dg, (i,))


def test_d_of_x_dy():
    assert exterior_d(PForm.basis(3, D, (1,)).times(P(x))) == PForm(2, 3, D - 1, {(0, 1): Jet.one(3, D - 1)})


def test_d_squared_on_exact_form():
    f = P(x**3 + y**2)
    assert exterior_d(d_function(f)).is_zero()


def test_d_of_cusp_deformation():
    w = one_form(-3 * x * y, 2 * x**2, 0)
    assert exterior_d(w) == PForm(2, 3, D - 1, {(0, 1): P(7 * x, Dg=D - 1)})


def test_d_of_three_form_is_refused():
    with pytest.raises(FormDegreeError):
        exterior_d(PForm.basis(3, D, (0, 1, 2)))


def test_wedge_examples():
    assert wedge(dx(0), dx(0)).is_zero()
    assert wedge(dx(0), dx(1)) == -wedge(dx(1), dx(0))
    f = P(x**3 + y**2)
    w = one_form(-3 * x * y, 2 * x**2, 0)
    assert wedge(d_function(f), exterior_d(w)).is_zero()


def test_wedge_degree_cap():
    with pytest.raises(FormDegreeError):
        wedge(PForm.basis(3, D, (0, 1)), PForm.basis(3, D, (0, 1)))


def test_integrability_examples():
    f = P(x**3 + y**3 + z**3)
    assert integrability_residual(d_function(f)).is_zero()
    omega = d_function(f).times(P(1 + x)) + dx(0).times(f)
    assert integrability_residual(omega).is_zero()
    # y dx + x dy + xy dz = d(xy) + xy dz is integrable (first integral xy e^z)
    w = one_form(y, x, x * y)
    oracle = sym_wedge(form_to_sym(w), sym_d(form_to_sym(w), 3))
    assert oracle == {}
    assert integrability_residual(w).is_zero()
    w = one_form(0, z, x)
    res = integrability_residual(w)
    oracle = sym_wedge(form_to_sym(w), sym_d(form_to_sym(w), 3))
    assert form_to_sym(res) == sym_truncate(oracle, 3, res.D) == {(0, 1, 2): -z}


def test_pullback_examples():
    f = P(x**3 + y**2 * z)
    pulled = pullback_weighted(PForm.function(f), WeightVector(3, (1, 1, 1)))
    assert [c.is_zero() for c in pulled.coeffs] == [True, True, True, False]
    assert pulled.coeff(3).function_part() == f
    cusp = P(x**3 + y**2, n=2)
    pulled = pullback_weighted(PForm.function(cusp), WeightVector(6, (2, 3)))
    assert pulled.K == 6 and pulled.coeff(6).function_part() == cusp
    fermat = P(x**3 + y**3 + z**3)
    pd = pullback_weighted(d_function(fermat), WeightVector(3, (1, 1, 1)))
    assert pd.K == 3 and pd.coeff(3) == d_function(fermat)


# -- randomized laws against the brute-force oracle ------------------------
@given(forms(p=1), forms(p=1))
def test_wedge_matches_oracle(a, b):
    got = wedge(a, b)
    assert form_to_sym(got) == sym_truncate(sym_wedge(form_to_sym(a), form_to_sym(b)), 3, got.D)


@given(st.integers(0, 2).flatmap(lambda p: forms(p=p)))
def test_d_matches_oracle(a):
    got = exterior_d(a)
    assert got.D == a.D - 1
    assert form_to_sym(got) == sym_truncate(sym_d(form_to_sym(a), 3), 3, got.D)


@given(jets(), forms(p=1))
def test_d_squared_vanishes(f, a):
    assert exterior_d(exterior_d(PForm.function(f))).is_zero()
    assert exterior_d(exterior_d(a)).is_zero()


@given(st.integers(0, 2), st.integers(0, 1), st.data())
def test_graded_anticommutativity(p, q, data):
    a = data.draw(forms(p=p))
    b = data.draw(forms(p=q))
    sign = -1 if (p * q) % 2 else 1
    assert wedge(a, b) == wedge(b, a).scale(sign)


@given(forms(p=1), forms(p=1))
def test_leibniz(a, b):
    lhs = exterior_d(wedge(a, b))
    rhs = wedge(exterior_d(a), b) - wedge(a, exterior_d(b))
    assert lhs.equal_within(rhs, min(lhs.D, rhs.D))


weights = st.lists(st.integers(1, 3), min_size=3, max_size=3).map(lambda w: WeightVector(1, tuple(w)))


@settings(max_examples=50)
@given(forms(p=1, D=4), forms(p=1, D=4), weights)
def test_pullback_is_a_morphism(a, b, w):
    pa, pb = pullback_weighted(a, w), pullback_weighted(b, w)
    K = pa.K + pb.K
    assert same_series(pullback_weighted(wedge(a, b), w), twedge(pad(pa, K), pad(pb, K)))
    assert same_series(pullback_weighted(exterior_d(a), w), pullback_weighted(a, w).d_x())


def pad(s, K):
    return TForm([s.coeff(j) for j in range(K + 1)])


def same_series(s, u):
    # pullbacks carry exactly the powers that occur; compare with zero padding
    K = max(s.K, u.K)
    return all(s.coeff(j).equal_within(u.coeff(j), min(s.D, u.D)) for j in range(K + 1))
