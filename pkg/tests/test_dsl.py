import pytest
from hypothesis import given, strategies as st

from conftest import X, forms, from_sympy, jets
from germforge.certificates import Printer
from germforge.dsl import (
    DSLError,
    Elaborator,
    format_jet,
    parse_expression,
    parse_problem,
    value_to_jet,
    value_to_pform,
    value_to_tform,
)
from germforge.forms import PForm, TForm
from germforge.ring import Jet, TPoly

x, y, z = X
NAMES = ["x", "y", "z"]

CUSP_FILE = """
vars x y z;
degree D=8; torder K=3;
poly f = y^2 + x^3;
form w = 2*x^2*dy - 3*x*y*dx;
family Omega = d(f) + t^1 * w;
task normalize(Omega, f);
"""


def elaborate(pf, name, D=None, K=None):
    el = Elaborator(pf.variables, D or pf.D, K or pf.K, pf.definitions)
    return el.evaluate(pf.definitions[name].expr)


def test_poly_definition():
    pf = parse_problem("vars x y;\npoly f = x^3 + y^2;\ntask analyze-singularity(f);")
    f = value_to_jet(elaborate(pf, "f"), 2, pf.D)
    assert len(f.terms) == 2
    assert pf.D == 10 and pf.K == 4


def test_cusp_family_file():
    pf = parse_problem(CUSP_FILE)
    assert (pf.D, pf.K, pf.task, pf.task_args) == (8, 3, "normalize", ["Omega", "f"])
    om = value_to_tform(elaborate(pf, "Omega"), 1, 3, 8, 3)
    expected = PForm.one_form([from_sympy(-3 * x * y, 3, 8), from_sympy(2 * x**2, 3, 8), Jet.zero(3, 8)])
    assert om.coeff(1) == expected
    f = from_sympy(y**2 + x**3, 3, 8)
    assert om.coeff(0) == PForm.one_form([f.diff(i).with_degree(8) for i in range(3)])
    assert om.coeff(2).is_zero() and om.coeff(3).is_zero()


@pytest.mark.parametrize("text, message", [
    ("vars x y;\npoly f = x^(-1);\ntask analyze-singularity(f);", "negative exponent"),
    ("vars x y;\npoly f = x^-1;\ntask analyze-singularity(f);", "negative exponent"),
    ("vars x y;\npoly f = x^1001;\ntask analyze-singularity(f);", "exponent overflow"),
    ("vars x y;\ndegree 0;\npoly f = x;\ntask analyze-singularity(f);", "must be positive"),
    ("vars x y;\npoly f = x $ y;\ntask analyze-singularity(f);", "unexpected character"),
    ("vars x y;\npoly f = x +;\ntask analyze-singularity(f);", "expected an expression"),
    ("vars x y;\npoly f = x;\ntask frobnicate(f);", "unknown task"),
    ("vars x t;", "cannot be a variable"),
    ("vars x;\nfrob x;", "expected a declaration"),
])
def test_syntax_errors_carry_position(text, message):
    with pytest.raises(DSLError) as info:
        parse_problem(text)
    assert message in str(info.value)
    assert info.value.line >= 1


def test_missing_sections():
    with pytest.raises(DSLError, match="missing 'vars'"):
        parse_problem("poly f = x;\ntask analyze-singularity(f);")
    with pytest.raises(DSLError, match="missing 'task'"):
        parse_problem("vars x;\npoly f = x;")


def test_error_position():
    with pytest.raises(DSLError) as info:
        parse_problem("vars x y;\npoly f = x^(-1);\ntask analyze-singularity(f);")
    assert (info.value.line, info.value.col) == (2, 13)


def test_unknown_identifier_and_cycles():
    pf = parse_problem("vars x y;\npoly f = x + q;\ntask analyze-singularity(f);")
    with pytest.raises(DSLError, match="unknown identifier 'q'"):
        elaborate(pf, "f")
    pf = parse_problem("vars x y;\npoly f = g;\npoly g = f;\ntask analyze-singularity(f);")
    with pytest.raises(DSLError, match="circular"):
        elaborate(pf, "f")


def test_exponent_overflow_through_nesting():
    pf = parse_problem("vars x;\npoly f = ((x^1000)^1000)^1000;\ntask analyze-singularity(f);")
    with pytest.raises(DSLError, match="exponent overflow"):
        elaborate(pf, "f")


def test_precedence_and_rationals():
    pf = parse_problem("vars x y;\npoly f = -x^2 + 3/7*x*y - (x - y)*2;\ntask analyze-singularity(f);")
    f = value_to_jet(elaborate(pf, "f"), 2, pf.D)
    assert format_jet(f, ["x", "y"]) == "-2*x + 2*y - x^2 + 3/7*x*y"


def test_d_distributes_and_is_lossless_at_the_truncation():
    # d(x^11) needs the degree-11 term even though D = 10
    pf = parse_problem("vars x y;\npoly g = x^11 + y^3;\nform w = d(g);\ntask check-integrability(w);")
    w = value_to_pform(elaborate(pf, "w"), 1, 2, 10)
    assert w.component((0,)) == Jet.monomial(2, 10, (10, 0), 11)


def test_division_only_by_constants():
    pf = parse_problem("vars x y;\npoly f = x / y;\ntask analyze-singularity(f);")
    with pytest.raises(DSLError, match="division"):
        elaborate(pf, "f")


def test_form_degree_errors():
    pf = parse_problem("vars x y z;\nform w = dx + x;\ntask check-integrability(w);")
    with pytest.raises(DSLError, match="cannot add"):
        elaborate(pf, "w")


# -- round trips ---------------------------------------------------------------
pr = Printer(NAMES, 5, 3)


@given(jets(D=5))
def test_jet_round_trip(j):
    assert pr.parse_jet(pr.jet(j)) == j


@given(forms(p=1, D=5))
def test_form_round_trip(a):
    assert pr.parse_form(pr.form(a)) == a


@given(st.lists(forms(p=1, D=5, max_terms=2), min_size=1, max_size=4))
def test_tform_round_trip(cs):
    a = TForm(cs)
    back = Printer(NAMES, 5, a.K).parse_tform(pr.tform(a))
    assert back == a


@given(st.lists(jets(D=5, max_terms=3), min_size=1, max_size=4))
def test_tpoly_round_trip(cs):
    F = TPoly(cs)
    assert Printer(NAMES, 5, F.K).parse_tpoly(pr.tpoly(F)) == F


@given(jets(D=5))
def test_printing_is_canonical(j):
    text = pr.jet(j)
    assert pr.jet(pr.parse_jet(text)) == text
    # rationals print in lowest terms with a positive denominator
    for c in j.terms.values():
        assert c.denominator > 0


def test_parse_expression_trailing_input():
    with pytest.raises(DSLError, match="trailing"):
        parse_expression("x y")
