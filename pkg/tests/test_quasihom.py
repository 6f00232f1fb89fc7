import itertools

import pytest
import sympy

from conftest import X, from_sympy
from germforge.forms import PForm, WeightVector, d_function
from germforge.normalizer import check_cascade, normalize, NormalizationResult
from germforge.quasihom import (
    CERTIFIED,
    UNKNOWN,
    NotQuasiHomogeneous,
    certify_isolated_singularity,
    check_witnesses,
    detect_quasihomogeneity,
    embed_as_deformation,
    singular_curve_check,
    theorem3_criterion,
)
from germforge.ring import INFINITE, Jet

x, y, z = X
D = 8


def P(expr, n=3, Dg=D):
    return from_sympy(sympy.sympify(expr), n, Dg)


def groebner_min_k(expr, kmax=8):
    """Least k with every degree-k monomial in the Jacobian ideal (sympy oracle)."""
    G = sympy.groebner([sympy.diff(expr, v) for v in X], *X, order="grevlex")
    for k in range(1, kmax + 1):
        monos = [x**a * y**b * z**(k - a - b) for a in range(k + 1) for b in range(k + 1 - a)]
        if all(G.reduce(m)[1] == 0 for m in monos):
            return k
    return None


def test_detect_examples():
    rep = detect_quasihomogeneity(P(x**3 + y**2, n=2))
    assert (rep.is_qh, rep.weights, rep.d, rep.strict) == (True, (2, 3), 6, True)
    rep = detect_quasihomogeneity(P(x**2 + y**2 + z**2))
    assert (rep.weights, rep.d, rep.strict) == ((1, 1, 1), 2, True)
    assert not detect_quasihomogeneity(P(x**2 + x**3, n=2)).is_qh


def test_detect_needs_large_enough_bound():
    f = P(x**2 + y**3 + z**5)
    assert not detect_quasihomogeneity(f).strict
    rep = detect_quasihomogeneity(f, max_weight=15)
    assert (rep.weights, rep.d, rep.strict) == ((15, 10, 6), 30, True)


def test_detect_then_pullback_scales_by_t_to_the_d():
    from germforge.forms import pullback_weighted

    for f in (P(x**3 + y**2, n=2), P(x**3 + y**3 + z**3), P(x**2 * y + y**4 + z**2)):
        w = detect_quasihomogeneity(f).weight_vector()
        pulled = pullback_weighted(PForm.function(f), w)
        assert pulled.K == w.d and pulled.coeff(w.d).function_part() == f
        assert all(pulled.coeff(j).is_zero() for j in range(w.d))


def test_embed_exact_form_gives_constant_family():
    f = P(x**3 + y**3 + z**3)
    fam = embed_as_deformation(d_function(f), f, WeightVector(3, (1, 1, 1)))
    assert all(w.is_zero() for w in fam.omegas)


def test_embed_fermat_plus_f_dx():
    f = P(x**3 + y**3 + z**3)
    omega = d_function(f) + PForm.basis(3, D, (0,)).times(f)
    fam = embed_as_deformation(omega, f, WeightVector(3, (1, 1, 1)))
    Dt = fam.trusted_degree
    assert fam.omegas[0] == PForm.basis(3, Dt, (0,)).times(f.truncate(Dt))
    assert all(w.is_zero() for w in fam.omegas[1:])
    assert fam.as_tform().at_one() == omega.truncate(Dt)
    assert check_cascade(fam).passed
    assert isinstance(normalize(fam), NormalizationResult)


def test_embed_rejects_wrong_weights():
    f = P(x**3 + y**3 + z**3)
    with pytest.raises(NotQuasiHomogeneous):
        embed_as_deformation(d_function(f), f, WeightVector(3, (1, 1, 2)))


@pytest.mark.parametrize("expr", [x**2 + y**2 + z**2, x**3 + y**3 + z**3, x**2 + y**3 + z**5])
def test_isolated_singularity_against_groebner(expr):
    rep = certify_isolated_singularity(P(expr, Dg=10))
    assert rep.status == CERTIFIED
    assert rep.k_found == groebner_min_k(expr)
    assert check_witnesses(rep)
    assert set(rep.witnesses) == set(
        e for e in itertools.product(range(rep.k_found + 1), repeat=3) if sum(e) == rep.k_found)


def test_frozen_minimal_k():
    # values obtained from the oracle above
    assert certify_isolated_singularity(P(x**2 + y**2 + z**2)).k_found == 1
    assert certify_isolated_singularity(P(x**3 + y**3 + z**3)).k_found == 4


def test_cusp_cylinder_is_unknown():
    rep = certify_isolated_singularity(P(y**2 + x**3))
    assert rep.status == UNKNOWN and not rep.isolated_certified and rep.k_found is None


def test_theorem3_examples():
    sphere = P(x**2 + y**2 + z**2)
    fermat = P(x**3 + y**3 + z**3)
    dx = PForm.basis(3, D, (0,))
    rep = theorem3_criterion(d_function(fermat).times(P(1 + x)) + dx.times(fermat), fermat)
    assert (rep.nu_omega, rep.nu_df, rep.isolated, rep.a_is_unit, rep.first_integral_expected) == (2, 2, True, True, True)
    rep = theorem3_criterion(d_function(sphere).times(P(1 + x)) + dx.times(sphere), sphere)
    assert rep.first_integral_expected and rep.nu_omega == rep.nu_df == 1
    rep = theorem3_criterion(dx.times(sphere) + d_function(sphere).times(P(x**3)), sphere)
    assert (rep.nu_omega, rep.nu_df, rep.first_integral_expected) == (2, 1, False)
    rep = theorem3_criterion(d_function(fermat), fermat)
    assert rep.first_integral_expected


def test_curve_check():
    fermat = P(x**3 + y**3 + z**3)
    omega = d_function(fermat) + PForm.basis(3, D, (0,)).times(fermat)
    s = Jet.var(1, D, 0)
    chk = singular_curve_check(omega, fermat, [s, Jet.zero(1, D), Jet.zero(1, D)])
    assert (chk.f_order, chk.pullback_order, chk.contradiction) == (3, 2, True)
    cusp = P(y**2 + x**3)
    chk = singular_curve_check(d_function(cusp), cusp, [Jet.zero(1, D), Jet.zero(1, D), s])
    assert chk.f_order == INFINITE and chk.lies_in_singular_set and not chk.contradiction
