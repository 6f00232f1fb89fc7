import pytest
import sympy
from hypothesis import given, settings

from conftest import X, form_to_sym, from_sympy, jets, sym_d, sym_truncate, sym_wedge
from germforge.forms import PForm, TForm, d_function, twedge
from germforge.normalizer import (
    DeformationFamily,
    NotIntegrable,
    NormalizationResult,
    certify_first_integral,
    check_cascade,
    normalize,
)
from germforge.ring import Jet, TPoly, tpoly_invert_unit
from germforge.solver import ObstructionCertificate

x, y, z = X
D = 7


def P(expr, Dg=D):
    return from_sympy(sympy.sympify(expr), 3, Dg)


SPHERE = P(x**2 + y**2 + z**2)
CUSP = P(y**2 + x**3)
CUSP_FAMILY = DeformationFamily(CUSP, [PForm.one_form([P(-3 * x * y), P(2 * x**2), P(0)])])


def exact_family(fs, unit=None):
    """Coefficients of ``unit * d_x(sum t^j f_j)``."""
    F = TPoly(fs)
    om = TForm.from_tpoly(F).d_x()
    if unit is not None:
        om = om.times(unit)
    return DeformationFamily(fs[0], om.coeffs[1:]), F


def test_cascade_examples():
    fam, _ = exact_family([SPHERE, P(x * y)])
    assert check_cascade(fam).passed
    bad = DeformationFamily(SPHERE, [PForm.basis(3, D, (1,)).times(P(z))])
    rep = check_cascade(bad)
    assert not rep.passed and rep.failed_order == 1
    om0, om1 = form_to_sym(d_function(SPHERE)), {(1,): z}
    oracle = {}
    for k, v in list(sym_wedge(om0, sym_d(om1, 3)).items()) + list(sym_wedge(om1, sym_d(om0, 3)).items()):
        oracle[k] = oracle.get(k, 0) + v
    assert form_to_sym(rep.residual) == sym_truncate(oracle, 3, rep.residual.D) == {(0, 1, 2): -2 * x}
    assert check_cascade(CUSP_FAMILY).passed


def test_normalize_trivial_family():
    fam = DeformationFamily(SPHERE, [PForm.zero(1, 3, D)])
    res = normalize(fam)
    assert res.G.is_one()
    assert res.F.coeff(0) == SPHERE and res.F.coeff(1).is_zero()


def test_normalize_unit_times_exact():
    g = P(x * y)
    unit = TPoly([Jet.one(3, D - 1), P(x, D - 1), Jet.zero(3, D - 1)])
    fam, _ = exact_family([SPHERE, g, Jet.zero(3, D)], unit)
    res = normalize(fam)
    assert isinstance(res, NormalizationResult)
    # same foliation as d(f0 + t g), order by order
    target = TForm.from_tpoly(TPoly([SPHERE, g, Jet.zero(3, D)])).d_x()
    dF = TForm.from_tpoly(res.F).d_x()
    assert twedge(dF, target).truncate(res.trusted_degree).is_zero()
    assert res.F.coeff(0) == SPHERE.truncate(res.F.D)


def test_normalize_cusp_obstruction():
    out = normalize(CUSP_FAMILY)
    assert isinstance(out, ObstructionCertificate)
    assert (out.t_order, out.degree) == (1, 1)
    assert out.is_valid()
    assert out.human_note.startswith("t-order 1: ")


def test_non_integrable_family_is_refused():
    bad = DeformationFamily(SPHERE, [PForm.basis(3, D, (1,)).times(P(z))])
    with pytest.raises(NotIntegrable):
        normalize(bad)


def test_certify_first_integral_examples():
    fam = DeformationFamily(SPHERE, [PForm.zero(1, 3, D)])
    assert certify_first_integral(fam, TPoly([SPHERE, Jet.zero(3, D)])).valid
    assert certify_first_integral(fam, TPoly([SPHERE * SPHERE, Jet.zero(3, D)])).valid
    chk = certify_first_integral(CUSP_FAMILY, TPoly([CUSP, Jet.zero(3, D)]))
    assert not chk.valid and chk.failed_order == 1
    w1 = {(0,): -3 * x * y, (1,): 2 * x**2}
    oracle = sym_wedge(w1, form_to_sym(d_function(CUSP)))
    assert form_to_sym(chk.residual.coeff(1)) == sym_truncate(oracle, 3, chk.trusted_degree)


@settings(max_examples=15, deadline=None)
@given(jets(D=5, max_terms=3, min_degree=1), jets(D=5, max_terms=2, min_degree=1),
       jets(D=4, max_terms=2, min_degree=1), jets(D=4, max_terms=2))
def test_normalization_invariants(g1, g2, u1, u2):
    Dl = 5
    f0 = P(x**2 + y**2 + z**2, Dl)
    unit = TPoly([Jet.one(3, Dl - 1), u1, u2])
    fam, _ = exact_family([f0, g1, g2], unit)
    res = normalize(fam)
    assert isinstance(res, NormalizationResult)
    Dt = res.trusted_degree
    om = fam.as_tform()
    dF = TForm.from_tpoly(res.F).d_x()
    assert res.F.coeff(0) == f0.truncate(res.F.D)
    assert res.G.coeff(0).constant() != 0
    assert (om - dF.times(res.G)).truncate(Dt).is_zero()
    assert res.h_hat == res.G * res.F.t_derivative().truncate(Dt)
    for step in res.steps:
        assert step.order >= 1
    # idempotence: the divided family is already exact
    divided = om.times(tpoly_invert_unit(res.G))
    again = normalize(DeformationFamily.from_tform(f0, divided))
    assert again.G.is_one()
    assert all(again.F.coeff(j).equal_within(res.F.coeff(j), Dt + 1) for j in range(res.F.K + 1))


def test_family_must_start_at_df0():
    om = TForm([d_function(SPHERE).scale(2), PForm.zero(1, 3, D - 1)])
    with pytest.raises(ValueError):
        DeformationFamily.from_tform(SPHERE, om)
