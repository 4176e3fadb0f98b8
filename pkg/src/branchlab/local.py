"""Intersection multiplicities, Bezout tables and nearby-intersection counts."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    QQ,
    AlgebraicNumber,
    FieldTower,
    adjoin_root,
    common_tower,
    factor_rational,
    minimal_polynomial_rational,
    simplify,
)
from .errors import (
    CommonComponent,
    FamilyDegenerate,
    InfiniteIntersection,
    InvariantViolation,
    NonRationalPoint,
    PointNotOnCurve,
    ProbeExhausted,
    TowerDepthExceeded,
)
from .poly import (
    HOMOG,
    MultiPoly,
    PlaneCurve,
    point_text,
    affine_coords,
    apply_transform,
    as_projective,
    chart_of,
    dehomogenize_chart,
    mat_vec,
    normalize_point,
    poly_gcd,
    random_projective_transform,
    resultant,
    squarefree_decompose,
    to_form,
)
from .puiseux import (
    PuiseuxBranch,
    _rnp,
    _Stage,
    _substitute_series,
    branch_order,
    chart_poly,
    expand_branches,
)
from .upoly import UPoly, gcd as ugcd, squarefree_part

PARAM_NAMES = ("eps", "ε", "e", "s", "lam", "l")


# --------------------------------------------------------------------------
# points

def _resolve(p) -> tuple[tuple, str, tuple]:
    P = normalize_point(as_projective(tuple(p)))
    chart = chart_of(P)
    return P, chart, affine_coords(P, chart)


def _local_poly(F: MultiPoly, P: tuple, chart: str, center: tuple) -> MultiPoly:
    H = chart_poly(F, chart)
    xv, yv = H.vars
    return H.translate({xv: center[0], yv: center[1]})


def s_fold_order(C: PlaneCurve, p) -> int:
    """Minimal total degree of the local equation at ``p``."""
    P, chart, center = _resolve(p)
    if C.form(*P):
        raise PointNotOnCurve(f"point {point_text(P)} is not on the curve")
    return _local_poly(C.form, P, chart, center).min_total_degree()


# --------------------------------------------------------------------------
# the recursive oracle

def _rational_point(p) -> tuple:
    out = []
    for c in p:
        c = simplify(c)
        if isinstance(c, AlgebraicNumber):
            raise NonRationalPoint("the oracle only accepts rational points")
        out.append(Fraction(c))
    return tuple(out)


def fulton_intersection(F: MultiPoly, G: MultiPoly, p) -> int:
    """Intersection number at a rational point by the classical recursion."""
    P, chart, center = _resolve(_rational_point(p))
    rename = dict(zip(_chart_names(chart), ("x", "y")))
    f = _local_poly(F, P, chart, center).rename(rename)
    g = _local_poly(G, P, chart, center).rename(rename)
    h = poly_gcd(f, g)
    if not h.is_constant() and not h.constant_term():
        raise CommonComponent("the curves share a component through the point")
    return _fulton(f, g)


def _chart_names(chart: str) -> tuple:
    return {"z": ("x", "y"), "y": ("x", "z"), "x": ("y", "z")}[chart]


def _x_restriction(f: MultiPoly) -> UPoly:
    """f(x, 0) as a univariate polynomial."""
    out = {}
    for (i, j), c in f.terms.items():
        if j == 0:
            out[i] = c
    if not out:
        return UPoly()
    cs = [0] * (max(out) + 1)
    for i, c in out.items():
        cs[i] = c
    return UPoly(cs)


def _fulton(f: MultiPoly, g: MultiPoly) -> int:
    total = 0
    while True:
        if f.constant_term() or g.constant_term():
            return total
        fr, gr = _x_restriction(f), _x_restriction(g)
        if not fr and not gr:
            raise CommonComponent("both curves contain y = 0")
        if not fr:
            f, g, fr, gr = g, f, gr, fr
        if not gr:
            # g = y * h: I(f, y) + I(f, h)
            total += fr.order()
            g = MultiPoly(g.vars, {(i, j - 1): c for (i, j), c in g.terms.items()})
            continue
        if fr.degree > gr.degree:
            f, g, fr, gr = g, f, gr, fr
        # deg f(x,0) <= deg g(x,0): cancel the leading term of g(x,0)
        x = MultiPoly.var("x", f.vars)
        g = g * fr.lc - f * x ** (gr.degree - fr.degree) * gr.lc
        if not g:
            raise CommonComponent("the curves share a component through the point")


# --------------------------------------------------------------------------
# point multiplicities

@dataclass(frozen=True)
class BranchContact:
    branch: PuiseuxBranch
    order: int

    @property
    def weight(self) -> int:
        return self.branch.class_size * self.order


@dataclass(frozen=True)
class PointMultiplicity:
    total: int
    contacts: tuple

    @property
    def per_branch(self) -> list[int]:
        out = []
        for c in self.contacts:
            out.extend([c.order] * c.branch.class_size)
        return out


def point_multiplicity(C: PlaneCurve, F: MultiPoly, p, N: int | None = None) -> PointMultiplicity:
    """Sum of the branch orders of F over the branches of C at ``p``."""
    branches = expand_branches(C, p, N)
    contacts = []
    for b in branches:
        r = branch_order(b, F)
        if r.vanishes:
            raise InfiniteIntersection("the form contains a branch of the curve")
        contacts.append(BranchContact(b, r.order))
    return PointMultiplicity(sum(c.weight for c in contacts), tuple(contacts))


# --------------------------------------------------------------------------
# Bezout tables

@dataclass(frozen=True)
class PointClass:
    """A Galois class of points, represented by one member over ``tower``."""

    point: tuple
    tower: FieldTower
    size: int

    def minimal_polynomials(self) -> list[UPoly]:
        return [minimal_polynomial_rational(c) for c in self.point]

    def sort_key(self):
        inf = 0 if self.point[2] else 1
        mps = tuple(tuple(str(c) for c in m.c) for m in self.minimal_polynomials())
        return (inf, self.size, mps)


@dataclass(frozen=True)
class IntersectionEntry:
    point: PointClass
    class_size: int
    multiplicity: int
    per_branch: tuple
    resultant_multiplicity: int
    resolved: bool = True


@dataclass(frozen=True)
class IntersectionReport:
    d: int
    e: int
    entries: tuple
    seed: int = 0

    @property
    def total(self) -> int:
        return sum(en.class_size * en.multiplicity for en in self.entries)

    @property
    def bezout_ok(self) -> bool:
        return self.total == self.d * self.e

    def branch_sums_ok(self) -> bool:
        return all(not en.resolved or en.multiplicity == sum(en.per_branch) for en in self.entries)


def _univariate_at(f: MultiPoly, fixed: str, value, free: str) -> UPoly:
    return UPoly([_eval_one(c, fixed, value) for c in f.coeff_list(free)])


def _eval_one(c: MultiPoly, v: str, value):
    acc = 0
    i = c.vars.index(v)
    for e, coeff in c.terms.items():
        acc = acc + coeff * value ** e[i]
    return simplify(acc)


def _canonical_class(P: tuple, size: int, C: MultiPoly, F: MultiPoly) -> tuple[tuple, FieldTower]:
    """Re-express a point class using a coordinate as its field generator."""
    if size == 1:
        return tuple(Fraction(simplify(c)) for c in P), QQ
    chart = chart_of(P)
    u, w = affine_coords(P, chart)
    names = _chart_names(chart)
    cc, fc = dehomogenize_chart(C, chart), dehomogenize_chart(F, chart)
    for which in (0, 1):
        gen = (u, w)[which]
        mp = minimal_polynomial_rational(gen)
        if mp.degree != size:
            continue
        tower, alpha = adjoin_root(QQ, mp)
        fixed, free = names[which], names[1 - which]
        g = squarefree_part(ugcd(_univariate_at(cc, fixed, alpha, free), _univariate_at(fc, fixed, alpha, free)))
        if g.degree != 1:
            continue
        other = simplify(-g[0])
        coords = (alpha, other) if which == 0 else (other, alpha)
        Pn = _from_affine(coords, chart)
        return normalize_point(Pn), tower
    return P, common_tower(P)


def _from_affine(coords: tuple, chart: str) -> tuple:
    a, b = coords
    one = Fraction(1)
    if chart == "z":
        return (a, b, one)
    if chart == "y":
        return (a, one, b)
    return (one, a, b)


def intersection_points(C: PlaneCurve, F: MultiPoly, seed: int = 0, retries: int = 16):
    """Point classes of C ∩ F with their resultant multiplicities."""
    Ff = to_form(F)
    Cf = C.form
    g = poly_gcd(Cf, Ff)
    if not g.is_constant():
        raise InfiniteIntersection(f"common component {g}")
    rng = random.Random(seed)
    de = Cf.total_degree * Ff.total_degree
    for _ in range(retries):
        M = random_projective_transform(rng)
        Ct, Ft = apply_transform(Cf, M), apply_transform(Ff, M)
        if not Ct(0, 1, 0) or not Ft(0, 1, 0):
            continue
        ca, fa = dehomogenize_chart(Ct, "z"), dehomogenize_chart(Ft, "z")
        R = resultant(ca, fa, "y").to_upoly("x")
        if R.degree != de:
            continue
        found = []
        ok = True
        for q, mu in factor_rational(R):
            tower, xi = adjoin_root(QQ, q)
            gy = squarefree_part(ugcd(_univariate_at(ca, "x", xi, "y"), _univariate_at(fa, "x", xi, "y")))
            if gy.degree != 1:
                ok = False
                break
            eta = simplify(-gy[0])
            P = normalize_point(mat_vec(M, (xi, eta, Fraction(1))))
            P = tuple(simplify(c) for c in P)
            Pc, tw = _canonical_class(P, q.degree, Cf, Ff)
            found.append((PointClass(Pc, tw, q.degree), mu))
        if ok:
            found.sort(key=lambda pm: pm[0].sort_key())
            return found
    raise ProbeExhausted("no generic projection found for the intersection")


def bezout_table(C: PlaneCurve, F: MultiPoly, seed: int = 0, N: int | None = None) -> IntersectionReport:
    """All intersection points with per-branch multiplicities; total d*e."""
    Ff = to_form(F)
    entries = []
    for pc, mu in intersection_points(C, F, seed):
        try:
            pm = point_multiplicity(C, Ff, pc.point, N)
            per = tuple(pm.per_branch)
            mult, resolved = pm.total, True
        except TowerDepthExceeded:
            per, mult, resolved = (), mu, False
        if resolved and mult != mu:
            raise InvariantViolation(
                f"branch sum {mult} disagrees with resultant multiplicity {mu} at {point_text(pc.point)}")
        entries.append(IntersectionEntry(pc, pc.size, mult, per, mu, resolved))
    rep = IntersectionReport(C.degree, Ff.total_degree, tuple(entries), seed)
    if not rep.bezout_ok:
        raise InvariantViolation(f"Bezout total {rep.total} != {rep.d * rep.e}")
    return rep


# --------------------------------------------------------------------------
# nearby intersections

@dataclass(frozen=True)
class NearbySolution:
    """A Galois class of solutions t(eps) -> 0 (or the center itself)."""

    valuation: Fraction | None     # None: the center, a solution for every eps
    ramification: int
    class_size: int
    multiplicity: int

    @property
    def points(self) -> int:
        return self.ramification * self.class_size


@dataclass(frozen=True)
class NearbyCount:
    solutions: tuple
    distinct: int
    total: int
    center_multiplicity: int
    method: str

    @property
    def off_center_total(self) -> int:
        return self.total - self.center_multiplicity

    @property
    def off_center_distinct(self) -> int:
        return self.distinct - (1 if self.center_multiplicity else 0)


def split_family(g: MultiPoly, param: str | None = None) -> tuple[str, list[MultiPoly]]:
    """Coefficients of the family in powers of its parameter."""
    if param is None:
        extra = [v for v in g.used_vars() if v not in ("x", "y", "X", "Y", "Z")]
        if len(extra) > 1:
            raise FamilyDegenerate(f"family has several parameters {extra}")
        param = extra[0] if extra else next((n for n in PARAM_NAMES if n in g.vars), "eps")
    if param not in g.vars:
        g = g.with_vars(g.vars + (param,))
    coeffs = g.coeff_list(param)
    space = tuple(v for v in g.vars if v != param)
    if set(space) <= set(HOMOG):
        space = HOMOG
    elif set(space) <= {"x", "y"}:
        space = ("x", "y")
    return param, [c.with_vars(space) if c else MultiPoly(space) for c in coeffs]


def _family_chart(coeffs: list[MultiPoly], chart: str) -> list[MultiPoly]:
    """Chart polynomials for every coefficient, homogenised with one degree."""
    used = set()
    for c in coeffs:
        used.update(c.used_vars())
    if used <= set(HOMOG):
        return [dehomogenize_chart(c.with_vars(HOMOG), chart) if c else MultiPoly(("x", "y")) for c in coeffs]
    deg = max((c.total_degree for c in coeffs if c), default=0)
    out = []
    for c in coeffs:
        if not c:
            out.append(MultiPoly(("x", "y")))
            continue
        form = c.with_vars(("x", "y")).homogenize("z", deg).rename({"x": "X", "y": "Y", "z": "Z"})
        out.append(dehomogenize_chart(form.with_vars(HOMOG), chart))
    return out


def _count_small_roots(h: MultiPoly, out_solutions: list, weight: int, tower) -> tuple[int, int, int]:
    """Small roots in the second variable of h(eps, t): (distinct, total, center)."""
    distinct = total = center = 0
    for q, m in squarefree_decompose(h):
        terms = q.terms
        if all(j == 0 for _, j in terms):
            continue
        emin = min(i for i, _ in terms)
        if emin:
            q = MultiPoly(q.vars, {(i - emin, j): c for (i, j), c in terms.items()})
        if q.constant_term():
            continue
        jstar = min((j for i, j in q.terms if i == 0), default=None)
        if jstar is None:
            raise FamilyDegenerate("the unperturbed member contains the branch")
        raw: list = []
        _rnp(dict(q.terms), _Stage(Fraction(1), 1, UPoly(), Fraction(1), 0, 1), tower, raw, 0, 4)
        got = 0
        for st, tail, _tw in raw:
            is_center = tail is None and not st.D and st.k == 0
            if is_center:
                center += m * weight
                out_solutions.append(NearbySolution(None, 1, 1, m))
                got += 1
                continue
            n_pts = st.e * st.size
            got += n_pts
            yv = st.D.order() if st.D else st.k + tail.series(4 * jstar + 8).order()
            out_solutions.append(NearbySolution(Fraction(yv, st.e), st.e, st.size * weight, m))
            distinct += n_pts * weight
        if got != jstar:
            raise InvariantViolation(f"root count {got} != order {jstar}")
        total += m * jstar * weight
    return distinct, total, center


def nearby_intersections(C: PlaneCurve, p, family: MultiPoly, param: str | None = None,
                         seed: int = 0, method: str = "auto") -> NearbyCount:
    """Count the intersections of C with the family member at eps near ``p``."""
    P, chart, center = _resolve(p)
    if C.form(*P):
        raise PointNotOnCurve(f"point {point_text(P)} is not on the curve")
    param, coeffs = split_family(family, param)
    gch = _family_chart(coeffs, chart)
    branches = expand_branches(C, P)
    if method == "branch" or (method == "auto" and all(b.exact for b in branches)):
        return _nearby_by_branches(branches, gch, center)
    a = _nearby_by_resultant(C, P, chart, center, gch, seed)
    b = _nearby_by_resultant(C, P, chart, center, gch, seed + 7919)
    if (a.distinct, a.total, a.center_multiplicity) != (b.distinct, b.total, b.center_multiplicity):
        raise ProbeExhausted("nearby counts depend on the projection direction")
    return a


def _nearby_by_branches(branches, gch: list[MultiPoly], center: tuple) -> NearbyCount:
    sols: list = []
    distinct = total = 0
    center_mult = 0
    for b in branches:
        terms: dict = {}
        for k, gk in enumerate(gch):
            if not gk:
                continue
            xv, yv = gk.vars
            s = _substitute_series(gk.translate({xv: center[0], yv: center[1]}), b.x, b.y, None)
            for j, c in enumerate(s.c):
                if c:
                    terms[(k, j)] = c
        h = MultiPoly(("eps", "t"), terms)
        if not h:
            raise FamilyDegenerate("every member of the family contains the branch")
        dd, tt, cc = _count_small_roots(h, sols, b.class_size, b.tower)
        distinct += dd
        total += tt
        center_mult += cc
    if center_mult:
        distinct += 1
    return NearbyCount(tuple(sols), distinct, total, center_mult, "branch")


def _nearby_by_resultant(C: PlaneCurve, P, chart, center, gch, seed) -> NearbyCount:
    rng = random.Random(seed)
    cc = C.affine(chart)
    xv, yv = cc.vars
    vs = (xv, yv, "eps")
    X, Y, E = (MultiPoly.var(v, vs) for v in vs)
    g3 = MultiPoly(vs)
    for k, gk in enumerate(gch):
        if gk:
            g3 = g3 + gk.with_vars(vs) * E ** k
    c3 = cc.with_vars(vs)
    for _ in range(16):
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        # new coordinates x' = x + a*y, centred at the point
        sub = {xv: X - Y * a + center[0], yv: Y + center[1]}
        cs = c3.subs(sub, vs)
        gs = g3.subs(sub, vs)
        cl = cs.coeff_list(yv)
        if not cl[-1].is_constant() or len(cl) - 1 != cc.total_degree:
            continue
        # no other common point of C and the eps=0 member on the line x' = x0
        c0 = _univariate_at(cs.subs({"eps": 0}, vs), xv, 0, yv)
        g0 = _univariate_at(gs.subs({"eps": 0}, vs), xv, 0, yv)
        if not g0:
            raise FamilyDegenerate("the unperturbed member contains a line through the point")
        common = ugcd(c0, g0)
        if common.degree > 0 and common.degree != (common.order() or 0):
            continue
        R = resultant(cs, gs, yv)
        h = MultiPoly(("eps", "t"), {(e[2], e[0]): c for e, c in R.terms.items()})
        if not h:
            raise FamilyDegenerate("every member of the family contains the curve")
        sols: list = []
        tower = common_tower(list(center))
        distinct, total, center_mult = _count_small_roots(h, sols, 1, tower)
        if center_mult:
            distinct += 1
        return NearbyCount(tuple(sols), distinct, total, center_mult, "resultant")
    raise ProbeExhausted("no admissible projection direction")
