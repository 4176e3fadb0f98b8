import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from branchlab.errors import (
    DegenerateSystem,
    InputError,
    LedgerExceedsFixedContribution,
    MemberContainsCurve,
    OrderTooSmall,
)
from branchlab.linsys import (
    LinearSystem,
    adjoint_bound,
    base_locus_on_curve,
    coincident_mobile_scan,
    fixed_contribution,
    i_sigma,
    mobile_multiplicity,
    series_order_dim,
    weighted_set,
    weighted_set_dominates,
)
from branchlab.poly import PlaneCurve, parse_poly

CUSP = PlaneCurve.parse("Y^2*Z - X^3")
NODE = PlaneCurve.parse("y^2 - x^2 - x^3")
CONIC = PlaneCurve.parse("x^2 + y^2 - 1")
LINES = LinearSystem.parse("X, Y, Z")
PENCIL = LinearSystem.parse("X, Y")


def pt(*c):
    return tuple(Fraction(v) for v in c)


# ---------------------------------------------------------------- construction

def test_dependent_basis_rejected():
    with pytest.raises(DegenerateSystem):
        LinearSystem.parse("x, y, x + 2*y")


def test_affine_basis_is_homogenized():
    s = LinearSystem.parse("1, x, y")
    assert s.degree == 1 and s.dim == 2
    assert s.basis[0] == parse_poly("Z", ("X", "Y", "Z"))


def test_all_forms_dimension():
    for k in range(1, 5):
        assert LinearSystem.all_forms(k).dim == (k + 1) * (k + 2) // 2 - 1


def test_member_needs_a_nonzero_parameter():
    with pytest.raises(InputError):
        LINES.member([0, 0, 0])
    with pytest.raises(InputError):
        LINES.member([1, 0])


def test_coordinates_of_a_member():
    assert LINES.coordinates(parse_poly("x - 2*y + 3")) == [1, -2, 3]
    assert PENCIL.coordinates(parse_poly("x + 1")) is None


def test_system_containing_the_curve_rejected():
    with pytest.raises(DegenerateSystem):
        LinearSystem.all_forms(2).check_on(CONIC)


# ---------------------------------------------------------------- weighted sets

def test_weighted_set_tangent_at_cusp():
    ws = weighted_set(LINES, [0, 1, 0], CUSP)
    assert [(pc.point, m) for pc, m in ws.entries] == [(pt(0, 0, 1), 3)]
    assert ws.total == 3


def test_weighted_set_line_through_cusp_and_flex():
    ws = weighted_set(LINES, [1, 0, 0], CUSP)
    assert ws.total == 3
    assert ws.weight_at(pt(0, 0, 1)) == 2 and ws.weight_at(pt(0, 1, 0)) == 1


def test_weighted_set_member_containing_curve():
    with pytest.raises(MemberContainsCurve):
        weighted_set(LINES, [0, 1, 0], PlaneCurve.parse("y"))


@pytest.mark.parametrize("sigma,C", [
    (LINES, CUSP),
    (LINES, CONIC),
    (PENCIL, NODE),
    (LinearSystem.all_forms(2), CUSP),
    (LinearSystem.parse("X*Y, X*Z, Y*Z"), PlaneCurve.parse("x^3 + y^3 - 3*x*y")),
])
def test_weighted_set_totals(sigma, C):
    rng = random.Random(str(sigma.basis))
    for _ in range(12):
        lam = [rng.randint(-6, 6) for _ in sigma.basis]
        if not any(lam):
            continue
        assert weighted_set(sigma, lam, C).total == C.degree * sigma.degree


def test_dominance_of_weighted_sets():
    a = weighted_set(LINES, [0, 1, 0], CUSP)
    b = weighted_set(LINES, [1, 0, 0], CUSP)
    assert weighted_set_dominates(a, a)
    assert not weighted_set_dominates(a, b)


# ---------------------------------------------------------------- base locus

def test_all_lines_have_no_base_points():
    assert base_locus_on_curve(LINES, CUSP) == []


def test_pencil_base_point():
    assert [pc.point for pc in base_locus_on_curve(PENCIL, CUSP)] == [pt(0, 0, 1)]


def test_base_locus_with_common_factor():
    got = sorted(pc.point for pc in base_locus_on_curve(LinearSystem.parse("X*Y, X*Z"), CUSP))
    assert got == sorted([pt(0, 0, 1), pt(0, 1, 0)])


# ---------------------------------------------------------------- fixed and mobile parts

def test_fixed_contribution_at_cusp():
    fc = fixed_contribution(PENCIL, CUSP, (0, 0))
    assert (fc.total, fc.per_branch, fc.in_base) == (2, (2,), True)


def test_fixed_contribution_at_node():
    fc = fixed_contribution(PENCIL, NODE, (0, 0))
    assert (fc.total, fc.per_branch) == (2, (1, 1))


def test_fixed_contribution_off_base():
    fc = fixed_contribution(LINES, CUSP, (1, 1))
    assert (fc.total, fc.in_base) == (0, False)


def test_mobile_tangent_at_cusp():
    mm = mobile_multiplicity(PENCIL, CUSP, (0, 0), [0, 1], cross_check=True)
    assert (mm.I, mm.I_p, mm.mobile, mm.nearby_off_center) == (3, 2, 1, 1)


def test_mobile_generic_member_at_cusp():
    mm = mobile_multiplicity(PENCIL, CUSP, (0, 0), [1, 3], cross_check=True)
    assert (mm.I, mm.mobile) == (2, 0)


def test_mobile_without_base_point():
    mm = mobile_multiplicity(LINES, CUSP, (1, 1), [-1, 0, 1], cross_check=True)
    assert mm.mobile == mm.I == 1


@settings(max_examples=20)
@given(st.integers(-5, 5), st.integers(-5, 5))
def test_mobile_identity_on_the_node_pencil(a, b):
    if not (a or b):
        return
    mm = mobile_multiplicity(PENCIL, NODE, (0, 0), [a, b], cross_check=True)
    assert mm.I == mm.I_p + mm.mobile


# ---------------------------------------------------------------- I^Sigma

def test_i_sigma_tangent_at_cusp():
    r = i_sigma(PENCIL, CUSP, (0, 0), [0, 1])
    assert (r.value, r.I, r.I_p) == (2, 3, 2)
    assert r.I == r.I_p + r.value - 1


def test_i_sigma_transverse_line():
    r = i_sigma(LINES, PlaneCurve.parse("y"), (3, 0), [1, 0, -3])
    assert r.value == r.I == 1


@pytest.mark.parametrize("C,p,sigma,lam", [
    (CUSP, (0, 0), PENCIL, [1, 0]),
    (NODE, (0, 0), PENCIL, [1, -1]),
    (NODE, (0, 0), PENCIL, [2, 1]),
    (PlaneCurve.parse("y^2 - x^4 + y^4"), (0, 0), PENCIL, [0, 1]),
    (PlaneCurve.parse("y - x^3"), (0, 0), PENCIL, [0, 1]),
    (CONIC, (1, 0), LinearSystem.parse("x - 1, y"), [1, 0]),
])
def test_base_point_identity(C, p, sigma, lam):
    r = i_sigma(sigma, C, p, lam)
    assert r.I == r.I_p + r.value - 1


@pytest.mark.parametrize("C,p,lam", [
    (PlaneCurve.parse("y - x^2"), (0, 0), [0, 1, 0]),
    (PlaneCurve.parse("y - x^3"), (0, 0), [0, 1, 0]),
    (CONIC, (1, 0), [1, 0, -1]),
    (CUSP, (1, 1), [3, -2, -1]),
])
def test_smooth_non_base_points_have_no_coincident_points(C, p, lam):
    r = i_sigma(LINES, C, p, lam)
    assert r.value == r.I


# ---------------------------------------------------------------- coincident mobile scan

LINE_SAMPLES = [(t, 0) for t in (-2, 0, 1, 3, Fraction(1, 2))]
CONIC_SAMPLES = [(1, 0), (0, 1), (Fraction(3, 5), Fraction(4, 5)), (-1, 0), (Fraction(-5, 13), Fraction(12, 13))]


def test_scan_flags_the_squared_family_everywhere():
    res = coincident_mobile_scan(parse_poly("y - (x - s)^2"), PlaneCurve.parse("y"), LINE_SAMPLES)
    assert len(res.flagged) == len(LINE_SAMPLES)
    assert all(c.I == 2 and c.I_sigma == 1 for c in res.flagged)


@pytest.mark.parametrize("family,C,samples", [
    ("y - x^2 - s", PlaneCurve.parse("y"), LINE_SAMPLES),
    ("y - 2 - s*(x - 3)", CONIC, CONIC_SAMPLES),
    ("y - s*x", PlaneCurve.parse("y - x^2 - 1"), [(0, 1), (1, 2), (-1, 2), (2, 5)]),
    ("x - s", CONIC, CONIC_SAMPLES),
    ("x + s*y - 3*s", CONIC, CONIC_SAMPLES),
])
def test_scan_is_empty_for_linear_families(family, C, samples):
    res = coincident_mobile_scan(parse_poly(family), C, samples)
    assert res.flagged == ()
    assert res.checked


def test_scan_skips_singular_and_off_curve_points():
    res = coincident_mobile_scan(parse_poly("y - s*x"), PlaneCurve.parse("y^2 - x^3"), [(0, 0), (1, 2), (1, 1)])
    reasons = [why for _, why in res.skipped]
    assert reasons == ["singular point", "not on the curve"]


# ---------------------------------------------------------------- series

def test_series_of_lines_on_cubic():
    g = series_order_dim(LINES, CUSP)
    assert str(g) == "g_3^2" and g.r <= g.n


def test_series_after_removing_fixed_part():
    assert str(series_order_dim(PENCIL, CUSP, {(0, 0): 2})) == "g_1^1"


def test_partial_removal_allowed():
    assert series_order_dim(PENCIL, CUSP, {(0, 0): 1}).n == 2


def test_ledger_cannot_exceed_fixed_contribution():
    with pytest.raises(LedgerExceedsFixedContribution):
        series_order_dim(PENCIL, CUSP, {(0, 0): 3})
    with pytest.raises(LedgerExceedsFixedContribution):
        series_order_dim(LINES, CUSP, {(0, 0): 1})


def test_conics_on_a_conic_are_degenerate():
    with pytest.raises(DegenerateSystem):
        series_order_dim(LinearSystem.all_forms(2), CONIC)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("C", [CUSP, NODE, PlaneCurve.parse("x^4 + y^4 - 1")])
def test_dimension_at_most_order(k, C):
    if k >= C.degree:
        return
    g = series_order_dim(LinearSystem.all_forms(k), C)
    assert g.r <= g.n == C.degree * k


# ---------------------------------------------------------------- adjoint arithmetic

@pytest.mark.parametrize("n,expected", [(2, (2, 2, 1)), (3, (5, 6, 2)), (4, (9, 12, 4))])
def test_adjoint_examples(n, expected):
    b = adjoint_bound(n)
    assert (b.r1, b.n1, b.max_steps) == expected


def test_adjoint_needs_order_two():
    with pytest.raises(OrderTooSmall):
        adjoint_bound(1)


@pytest.mark.parametrize("n", range(2, 13))
def test_adjoint_step_bound_is_sharp(n):
    b = adjoint_bound(n)
    assert b.max_steps == (n - 1) * (n - 2) // 2 + 1
    assert all(b.step_ok(i) for i in range(1, b.max_steps + 1))
    assert not b.step_ok(b.max_steps + 1)
