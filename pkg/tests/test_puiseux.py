from dataclasses import replace
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from branchlab.errors import NonSquarefreeAtPoint, PointNotOnCurve, ResourceCap
from branchlab.local import s_fold_order
from branchlab.poly import MultiPoly, PlaneCurve, parse_poly, to_form
from branchlab.puiseux import (
    VANISHES,
    branch_order,
    check_consistency,
    expand_branches,
    newton_polygon,
)
from branchlab.upoly import UPoly

XY = ("x", "y")
t = sympy.Symbol("t")


def P(text):
    return parse_poly(text, XY)


def branches(curve, point=(0, 0), N=None):
    return expand_branches(PlaneCurve.parse(curve), point, N)


def to_sympy_series(s: UPoly):
    return sum(sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * t ** k for k, c in enumerate(s.c) if c)


def sympy_order_on(curve_text, b):
    """ord_t C(x(t), y(t)) computed by sympy from the affine equation."""
    x, y = sympy.symbols("x y")
    C = sympy.Poly(sympy.sympify(curve_text.replace("^", "**")), x, y)
    a0, b0 = b.center_affine
    xt = sympy.Poly(a0 + to_sympy_series(b.x), t)
    yt = sympy.Poly(b0 + to_sympy_series(b.y), t)
    acc = sympy.Poly(0, t)
    for (i, j), c in C.terms():
        acc += xt ** i * yt ** j * c
    if acc.is_zero:
        return None
    return min(m[0] for m in acc.monoms())


# ---------------------------------------------------------------- Newton polygon

def test_newton_polygon_of_cusp():
    assert newton_polygon(P("y^2 - x^3")).segments == ((Fraction(3, 2), 2),)


def test_newton_polygon_of_parabola():
    assert newton_polygon(P("y - x^2")).segments == ((Fraction(2), 1),)


def test_newton_polygon_of_two_lines():
    assert newton_polygon(P("y^2 - 3*x*y + 2*x^2")).segments == ((Fraction(1), 2),)


def test_newton_polygon_two_slopes():
    # y (y - x^2): roots y = 0 (slope infinite, not on hull) and y ~ x^2
    g = P("(y - x)*(y - x^3)")
    assert newton_polygon(g).segments == ((Fraction(1), 1), (Fraction(3), 1))


def test_newton_polygon_rejects_zero():
    with pytest.raises(ValueError):
        newton_polygon(MultiPoly(XY))


# ---------------------------------------------------------------- expansions

def test_cusp_has_one_ramified_branch():
    (b,) = branches("y^2 - x^3", N=8)
    assert b.e == 2
    assert b.x == UPoly([0, 0, 1])
    assert b.y == UPoly([0, 0, 0, 1])
    assert b.exact


def test_parabola_branch_is_its_graph():
    (b,) = branches("y - x^2")
    assert (b.e, b.x, b.y) == (1, UPoly([0, 1]), UPoly([0, 0, 1]))


def test_node_branches_follow_the_binomial_series():
    bs = branches("y^2 - x^2 - x^3", N=5)
    assert len(bs) == 2
    half = [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16), Fraction(-5, 128)]
    ys = sorted(([b.y[k] for k in range(6)] for b in bs), reverse=True)
    assert ys == [half, [-c for c in half]]


def test_irrational_tangents_form_one_class():
    (b,) = branches("y^2 - 2*x^2 + x^3")
    assert b.class_size == 2
    assert b.tower.depth == 1
    assert check_consistency(b)


def test_vertical_branch_in_chart():
    bs = branches("x - y^2")
    assert len(bs) == 1
    assert branch_order(bs[0], P("x")) == 2


def test_branch_at_point_at_infinity():
    C = PlaneCurve.parse("Y^2*Z - X^3")
    (b,) = expand_branches(C, (0, 1, 0))
    assert b.chart != "z"
    assert branch_order(b, parse_poly("Z", ("X", "Y", "Z"))) == 3


def test_point_not_on_curve():
    with pytest.raises(PointNotOnCurve):
        branches("y - x^2", (1, 0))


def test_repeated_component_through_point():
    with pytest.raises(NonSquarefreeAtPoint):
        branches("y^2*(y - x)")


def test_repeated_component_elsewhere_is_fine():
    # (y - 1)^2 does not pass through the origin
    (b,) = branches("(y - 1)^2*(y - x^2)")
    assert branch_order(b, P("y")) == 2


CURVES = [
    "y^2 - x^3",
    "y^2 - x^2 - x^3",
    "y^3 - x^5",
    "y^2 - x^4 + y^4",
    "x^3 + y^3 - 3*x*y",
    "(y^2 - x^3)^2 - x^5*y",
    "y^5 - x^2",
    "x*y*(x - y)",
    "(x^2 + y^2)^2 - x^2 + y^2",
    "y^2 - 2*x^2 + x^3",
    "y^4 - x^7 + x^3*y^2",
]


@pytest.mark.parametrize("curve", CURVES)
def test_branches_satisfy_the_equation(curve):
    for b in branches(curve):
        assert check_consistency(b)
        if b.tower.depth == 0:
            o = sympy_order_on(curve, b)
            assert o is None or o > b.N


@pytest.mark.parametrize("curve", CURVES)
def test_branch_multiplicities_sum_to_s_fold_order(curve):
    C = PlaneCurve.parse(curve)
    bs = expand_branches(C, (0, 0))
    s = s_fold_order(C, (0, 0))
    assert sum(b.class_size for b in bs) <= s
    assert sum(b.class_size * b.tangent_order() for b in bs) == s


@pytest.mark.parametrize("curve", CURVES)
def test_expansions_are_primitive(curve):
    from math import gcd

    for b in branches(curve):
        if b.vertical:
            # the chart's y-axis itself: x = 0, y = t
            assert (b.x, b.y) == (UPoly(), UPoly([0, 1]))
            continue
        g = b.e
        for k, c in enumerate(b.y.c):
            if c:
                g = gcd(g, k)
        assert g == 1
        assert b.x.order() == b.e


def test_extending_truncation_keeps_prefix():
    (b,) = [b for b in branches("y^2 - x^2 - x^3", N=4) if b.y[1] == 1]
    longer = b.extended(12)
    assert longer.N == 12
    assert [longer.y[k] for k in range(5)] == [b.y[k] for k in range(5)]
    assert check_consistency(longer)


# ---------------------------------------------------------------- orders

def test_tangent_meets_cusp_three_times():
    (b,) = branches("y^2 - x^3")
    assert branch_order(b, P("y")) == 3


def test_tangent_meets_parabola_twice():
    (b,) = branches("y - x^2")
    assert branch_order(b, P("y")) == 2


def test_defining_polynomial_vanishes():
    (b,) = branches("y^2 - x^3")
    r = branch_order(b, P("y^2 - x^3"))
    assert r.vanishes and r == VANISHES and str(r) == VANISHES


def test_vanishing_on_inexact_branch_certified_by_divisibility():
    b = [b for b in branches("y^2 - x^2 - x^3", N=4) if b.y[1] == 1][0]
    assert not b.exact
    r = branch_order(b, P("(y^2 - x^2 - x^3)*(x + 3)"))
    assert r.vanishes and r.certified_by == "divisibility"


def test_truncation_is_extended_when_needed():
    # contact order 7 with a branch truncated at 3
    b = [b for b in branches("y^2 - x^2 - x^3", N=3) if b.y[1] == 1][0]
    line_like = P("y^2 - x^2 - x^3 + x^7")
    assert branch_order(b, line_like) == 7


def test_homogeneous_forms_are_dehomogenized():
    (b,) = branches("y^2 - x^3")
    assert branch_order(b, parse_poly("Y - 2*X + Z", ("X", "Y", "Z"))) == 0
    assert branch_order(b, parse_poly("Y^2 - X*Z", ("X", "Y", "Z"))) == 2


@settings(max_examples=30)
@given(st.sampled_from(CURVES[:6]), st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool),
       st.integers(-3, 3), st.integers(-3, 3))
def test_order_invariant_under_rescaling_t(curve, u, a, b2):
    F = P(f"y + {a}*x + {b2}*x^2 + x*y")
    for b in branches(curve):
        ut = UPoly([0, u])
        scaled = replace(b, x=b.x.compose(ut), y=b.y.compose(ut), _exp=None)
        assert branch_order(scaled, F) == branch_order(b, F)


coef = st.integers(-3, 3)


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), coef), min_size=2, max_size=6))
def test_random_curves_through_origin(terms):
    f = MultiPoly(XY, {(i, j): c for i, j, c in terms if c and (i, j) != (0, 0)})
    assume(2 <= f.total_degree <= 6)
    C = PlaneCurve(to_form(f))
    try:
        bs = expand_branches(C, (0, 0))
    except (NonSquarefreeAtPoint, ResourceCap):
        assume(False)
    s = s_fold_order(C, (0, 0))
    assert sum(b.class_size for b in bs) <= s
    assert sum(b.class_size * b.tangent_order() for b in bs) == s
    for b in bs:
        assert check_consistency(b)
