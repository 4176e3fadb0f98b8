"""Newton polygons, rational Newton-Puiseux expansion and branch orders.

Branches are computed with Duval's rational variant: each edge polynomial is
factored over the current coefficient field and one root per irreducible
factor is adjoined, so Galois-conjugate branches come out as a single
expansion with a recorded class size.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb

from .arith import FieldTower, adjoin_root, common_tower, factor_over_field, simplify
from .errors import (
    ComponentUnknown,
    InvariantViolation,
    NonSquarefreeAtPoint,
    PointNotOnCurve,
    TruncationCapReached,
)
from .poly import (
    MultiPoly,
    PlaneCurve,
    point_text,
    affine_coords,
    as_projective,
    chart_of,
    dehomogenize_chart,
    normalize_point,
    poly_gcd,
    divide_exact,
    squarefree_decompose,
    to_form,
)
from .upoly import UPoly, series_inverse

MAX_STAGES = 64


# --------------------------------------------------------------------------
# bivariate helpers: dicts {(i, j): c} with i the x-exponent, j the y-exponent

def _bivariate(f: MultiPoly) -> dict:
    assert len(f.vars) == 2
    return dict(f.terms)


def _bivar_from_multi(f: MultiPoly, xv: str, yv: str) -> dict:
    g = f.with_vars((xv, yv))
    return dict(g.terms)


# --------------------------------------------------------------------------
# Newton polygon

@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull of a support, oriented for roots y ~ c*x^q with q > 0.

    ``points`` are (i, j) = (x-exponent, y-exponent). ``segments`` are
    ``(slope, length)`` with slope = -(delta i)/(delta j) as a Fraction and
    length = delta j, sorted by slope.
    """

    points: tuple
    vertices: tuple
    segments: tuple

    def edge_points(self, slope: Fraction) -> list[tuple[int, int]]:
        for a, b in zip(self.vertices, self.vertices[1:]):
            s = Fraction(a[0] - b[0], b[1] - a[1])
            if s == slope:
                m, n = s.numerator, s.denominator
                level = a[0] * n + a[1] * m
                return sorted(p for p in self.points if p[0] * n + p[1] * m == level)
        raise KeyError(slope)


def newton_polygon(g) -> NewtonPolygon:
    """Newton polygon of a nonzero bivariate polynomial (MultiPoly or dict)."""
    terms = g.terms if isinstance(g, MultiPoly) else g
    if not terms:
        raise ValueError("zero polynomial has no Newton polygon")
    pts = sorted(terms)
    # for each y-exponent keep the smallest x-exponent
    best: dict[int, int] = {}
    for i, j in pts:
        if j not in best or i < best[j]:
            best[j] = i
    imin = min(i for i, _ in pts)
    jend = min(j for i, j in pts if i == imin)
    cand = sorted((j, best[j]) for j in best if j <= jend)
    hull: list[tuple[int, int]] = []
    for j, i in cand:
        while len(hull) >= 2:
            (j1, i1), (j2, i2) = hull[-2], hull[-1]
            # drop hull[-1] unless it lies strictly below segment hull[-2] -> (j, i)
            if (i2 - i1) * (j - j1) >= (i - i1) * (j2 - j1):
                hull.pop()
            else:
                break
        hull.append((j, i))
    # keep only the decreasing part (positive slopes)
    verts = [hull[0]]
    for p in hull[1:]:
        if p[1] < verts[-1][1]:
            verts.append(p)
    vertices = tuple((i, j) for j, i in verts)
    segs = []
    for a, b in zip(vertices, vertices[1:]):
        segs.append((Fraction(a[0] - b[0], b[1] - a[1]), b[1] - a[1]))
    segs.sort()
    return NewtonPolygon(tuple(pts), vertices, tuple(segs))


# --------------------------------------------------------------------------
# series solving for the regular case

def _bivar_to_ylist(G: dict) -> list[UPoly]:
    """Coefficients of G in Y, each a UPoly in X."""
    dy = max(j for _, j in G)
    rows: list[list] = [[] for _ in range(dy + 1)]
    for (i, j), c in G.items():
        row = rows[j]
        if len(row) <= i:
            row.extend([0] * (i + 1 - len(row)))
        row[i] = c
    return [UPoly(r) for r in rows]


def _eval_trunc(ylist: list[UPoly], Y: UPoly, n: int) -> UPoly:
    acc = UPoly()
    for coeff in reversed(ylist):
        acc = acc.mul_trunc(Y, n) + coeff.trunc(n)
    return acc.trunc(n)


def _deriv_ylist(ylist: list[UPoly]) -> list[UPoly]:
    return [ylist[j] * j for j in range(1, len(ylist))]


class _RegularTail:
    """Power series root Y(X) of G with G(0,0)=0 and G_Y(0,0) != 0."""

    def __init__(self, G: dict):
        self.G = G
        self.ylist = _bivar_to_ylist(G)
        self.dlist = _deriv_ylist(self.ylist)
        self.Y = UPoly()
        self.prec = 1            # Y correct modulo X^prec
        self.exact = None

    def series(self, n: int) -> UPoly:
        """Y modulo X^n."""
        if self.exact is not None:
            return self.exact.trunc(n)
        while self.prec < n:
            p = min(2 * self.prec, max(n, 2))
            r = _eval_trunc(self.ylist, self.Y, p)
            dg = _eval_trunc(self.dlist, self.Y, p)
            corr = r.mul_trunc(series_inverse(dg, p), p)
            self.Y = (self.Y - corr).trunc(p)
            self.prec = p
            self._check_exact()
            if self.exact is not None:
                return self.exact.trunc(n)
        return self.Y.trunc(n)

    def _check_exact(self):
        # a polynomial root shows up as trailing zeros; confirm exactly
        deg = self.Y.degree
        if deg < self.prec // 2:
            acc = UPoly()
            for coeff in reversed(self.ylist):
                acc = acc * self.Y + coeff
            if not acc:
                self.exact = self.Y


# --------------------------------------------------------------------------
# branches

@dataclass(frozen=True)
class _Stage:
    c: object           # x = c * t^e
    e: int
    D: UPoly            # y = D(t) + d * t^k * Y(t)
    d: object
    k: int
    size: int           # product of adjoined degrees


class _Expansion:
    """Lazily extendable description y(t) = D(t) + d t^k Y(t)."""

    def __init__(self, stage: _Stage, tail: _RegularTail | None):
        self.stage = stage
        self.tail = tail     # None: Y == 0 exactly

    def y_series(self, N: int) -> UPoly:
        st = self.stage
        base = st.D
        if self.tail is None:
            return base
        need = N + 1 - st.k
        if need <= 0:
            return base.trunc(N + 1)
        Y = self.tail.series(need)
        return (base + (Y * st.d).shift_up(st.k)).trunc(N + 1)

    @property
    def is_exact(self) -> bool:
        return self.tail is None or self.tail.exact is not None


@dataclass(frozen=True)
class PuiseuxBranch:
    """One branch (class of conjugate branches) of a plane curve at a point.

    ``x`` and ``y`` are the translated chart coordinates as polynomials in
    ``t``; ``x = c*t^e`` exactly, ``y`` is trusted modulo ``t^(N+1)`` unless
    ``exact`` is set. ``class_size`` counts the geometric branches the
    expansion stands for over the center's field.
    """

    center: tuple                # projective, normalised
    chart: str
    center_affine: tuple
    e: int
    x: UPoly
    y: UPoly
    N: int
    exact: bool
    class_size: int
    tower: FieldTower
    curve: PlaneCurve | None = field(default=None, compare=False, repr=False)
    vertical: bool = False
    _exp: _Expansion | None = field(default=None, compare=False, repr=False)

    @property
    def ramification(self) -> int:
        return self.e

    @property
    def series(self) -> tuple[UPoly, UPoly]:
        return self.x, self.y

    @property
    def trusted(self) -> bool:
        return self.tower.trusted

    def extended(self, N: int) -> "PuiseuxBranch":
        if N <= self.N or self._exp is None:
            return self
        y = self._exp.y_series(N)
        return replace(self, y=y, N=N, exact=self._exp.is_exact)

    def order_x(self) -> int | None:
        return self.x.order()

    def order_y(self) -> int | None:
        return self.y.order()

    def tangent_order(self) -> int:
        """min(ord x, ord y): the branch's multiplicity."""
        ox, oy = self.x.order(), self.y.order()
        vals = [v for v in (ox, oy) if v is not None]
        return min(vals)


def _translate_bivar(f: MultiPoly, a0, b0) -> dict:
    xv, yv = f.vars
    return dict(f.translate({xv: a0, yv: b0}).terms)


def _stage_substitute(G: dict, m: int, n: int, xi, u: int, v: int, L: int) -> dict:
    """G(xi^v X^n, X^m (xi^u + Y)) / X^L."""
    out: dict = {}
    xu = xi ** u
    pw_u: dict[int, object] = {0: 1}
    for (i, j), c in G.items():
        base = c * xi ** (v * i)
        xe = n * i + m * j - L
        for r in range(j + 1):
            k = j - r
            if k not in pw_u:
                pw_u[k] = xu ** k
            term = base * comb(j, r) * pw_u[k]
            key = (xe, r)
            out[key] = out[key] + term if key in out else term
    return {k: simplify(c) for k, c in out.items() if c}


def _bezout_uv(m: int, n: int) -> tuple[int, int]:
    """u, v >= 0 with u*n - v*m = 1."""
    if n == 1:
        return 1, 0
    for v in range(n):
        if (1 + v * m) % n == 0:
            return (1 + v * m) // n, v
    raise InvariantViolation("no Bezout pair")


def _compose(st: _Stage, n: int, m: int, xi, u: int, v: int, size: int) -> _Stage:
    c1 = st.c * xi ** (v * st.e)
    coeffs = [0] * (n * max(st.D.degree, 0) + 1) if st.D else []
    for a, ca in enumerate(st.D.c):
        if ca:
            coeffs[n * a] = ca * xi ** (v * a)
    D1 = UPoly(coeffs)
    k1 = n * st.k + m
    D1 = D1 + UPoly.monomial(st.d * xi ** (v * st.k + u), k1)
    d1 = st.d * xi ** (v * st.k)
    return _Stage(simplify(c1), n * st.e, D1.map(simplify), simplify(d1), k1, st.size * size)


def _rnp(G: dict, st: _Stage, tower: FieldTower, out: list, depth: int, cap: int):
    if depth > MAX_STAGES:
        raise NonSquarefreeAtPoint("expansion does not separate; curve is not squarefree at the point")
    if all(j >= 1 for _, j in G):
        out.append((st, None, tower))
        G = {(i, j - 1): c for (i, j), c in G.items()}
        if (0, 0) in G:
            return
    jstar = min(j for i, j in G if i == 0)
    if jstar == 1 and (0, 0) not in G:
        out.append((st, _RegularTail(G), tower))
        return
    poly = newton_polygon(G)
    for slope, _length in poly.segments:
        m, n = slope.numerator, slope.denominator
        pts = poly.edge_points(slope)
        j0 = min(j for _, j in pts)
        L = min(i * n + j * m for i, j in pts)
        phi_c = [0] * ((max(j for _, j in pts) - j0) // n + 1)
        for i, j in pts:
            phi_c[(j - j0) // n] = G[(i, j)]
        phi = UPoly(phi_c)
        for psi, _mult, _verified in factor_over_field(phi):
            new_tower, xi = adjoin_root(tower, psi, cap=cap)
            u, v = _bezout_uv(m, n)
            G1 = _stage_substitute(G, m, n, xi, u, v, L)
            size = psi.degree
            _rnp(G1, _compose(st, n, m, xi, u, v, size), new_tower, out, depth + 1, cap)


def default_truncation(d: int, e: int | None = None) -> int:
    return d * (e if e is not None else d) + 2


def truncation_cap(d: int, e: int = 1) -> int:
    return max(4 * d * d, d * e + 1)


def _resolve_point(C: PlaneCurve, p) -> tuple[tuple, str, tuple]:
    P = normalize_point(as_projective(tuple(p)))
    chart = chart_of(P)
    return P, chart, affine_coords(P, chart)


def check_squarefree_at(C: PlaneCurve, P: tuple) -> None:
    for q, mult in squarefree_decompose(C.form):
        if mult > 1 and not q(*P):
            raise NonSquarefreeAtPoint(f"repeated factor {q} passes through the point")


def expand_branches(C: PlaneCurve, p, N: int | None = None, cap: int = 4) -> list[PuiseuxBranch]:
    """All branches of ``C`` at ``p`` (affine pair or projective triple)."""
    P, chart, (a0, b0) = _resolve_point(C, p)
    if C.form(*P):
        raise PointNotOnCurve(f"point {point_text(P)} is not on the curve")
    check_squarefree_at(C, P)
    d = C.degree
    if N is None:
        N = default_truncation(d)
    f = C.affine(chart)
    g = _translate_bivar(f, a0, b0)
    tower = common_tower([a0, b0])
    one = Fraction(1)
    st0 = _Stage(one, 1, UPoly(), one, 0, 1)
    raw: list = []
    vertical = False
    if all(i >= 1 for i, _ in g):
        vertical = True
        g = {(i - 1, j): c for (i, j), c in g.items()}
    if g and (0, 0) not in g:
        _rnp(g, st0, tower, raw, 0, cap)
    branches = []
    if vertical:
        branches.append(PuiseuxBranch(
            P, chart, (a0, b0), 1, UPoly(), UPoly([0, one]), N, True, 1, tower, C, True, None))
    for st, tail, tw in raw:
        exp = _Expansion(st, tail)
        y = exp.y_series(N)
        x = UPoly.monomial(st.c, st.e)
        branches.append(PuiseuxBranch(
            P, chart, (a0, b0), st.e, x, y, N, exp.is_exact, st.size, tw, C, False, exp))
    return branches


# --------------------------------------------------------------------------
# orders

@dataclass(frozen=True)
class OrderResult:
    order: int | None           # None means the form vanishes on the branch
    certified_by: str = "truncation"

    @property
    def vanishes(self) -> bool:
        return self.order is None

    def __eq__(self, other):
        if isinstance(other, OrderResult):
            return self.order == other.order
        if other == VANISHES:
            return self.order is None
        return self.order == other

    def __hash__(self):
        return hash(self.order)

    def __str__(self) -> str:
        return VANISHES if self.order is None else str(self.order)


VANISHES = "VanishesOnCurve"


def chart_poly(F: MultiPoly, chart: str) -> MultiPoly:
    """Affine (x, y) or homogeneous (X, Y, Z) input as a chart polynomial."""
    return dehomogenize_chart(to_form(F), chart)


def _substitute_series(H: MultiPoly, x: UPoly, y: UPoly, n: int | None) -> UPoly:
    """H(x(t), y(t)), truncated mod t^n when n is given."""
    xv, yv = H.vars
    ylist = H.coeff_list(yv)
    xpow: dict[int, UPoly] = {0: UPoly([1])}

    def xp(k):
        if k not in xpow:
            xpow[k] = x ** k if n is None else _pow_trunc(x, k, n)
        return xpow[k]

    cols = []
    for cj in ylist:
        acc = UPoly()
        for e, c in cj.terms.items():
            acc = acc + xp(e[0]) * c
        cols.append(acc if n is None else acc.trunc(n))
    acc = UPoly()
    for cj in reversed(cols):
        acc = (acc * y if n is None else acc.mul_trunc(y, n)) + cj
    return acc if n is None else acc.trunc(n)


def _pow_trunc(p: UPoly, k: int, n: int) -> UPoly:
    out = UPoly([1])
    for _ in range(k):
        out = out.mul_trunc(p, n)
    return out


def series_on_branch(gamma: PuiseuxBranch, F: MultiPoly, n: int | None = None) -> UPoly:
    """F evaluated along the branch, in the branch's chart (mod t^n)."""
    H = chart_poly(F, gamma.chart)
    a0, b0 = gamma.center_affine
    xv, yv = H.vars
    Ht = H.translate({xv: a0, yv: b0})
    if not Ht:
        return UPoly()
    return _substitute_series(Ht, gamma.x, gamma.y, n)


def branch_order(gamma: PuiseuxBranch, F: MultiPoly, cap: int | None = None) -> OrderResult:
    """t-order of F along the branch, or the VanishesOnCurve marker."""
    fdeg = to_form(F).total_degree
    d = gamma.curve.degree if gamma.curve is not None else max(gamma.e, 1)
    if cap is None:
        cap = truncation_cap(d, fdeg)
    g = gamma
    if g.exact:
        s = series_on_branch(g, F)
        o = s.order()
        return OrderResult(o, "exact") if o is not None else OrderResult(None, "exact")
    while True:
        s = series_on_branch(g, F, g.N + 1)
        o = s.order()
        if o is not None:
            return OrderResult(o)
        if g.exact:
            return OrderResult(None, "exact")
        if g.N >= cap:
            break
        g = g.extended(min(2 * g.N + 1, cap))
    return _certify_vanishing(g, F)


def _certify_vanishing(gamma: PuiseuxBranch, F: MultiPoly) -> OrderResult:
    C = gamma.curve
    if C is None:
        raise ComponentUnknown("form vanishes to the truncation cap and no curve is attached")
    G = poly_gcd(C.form, to_form(F))
    if G.is_constant():
        raise TruncationCapReached("order exceeds the Bezout bound but the forms are coprime")
    H = divide_exact(C.form, G)
    if H.is_constant():
        return OrderResult(None, "divisibility")
    cap = truncation_cap(C.degree, H.total_degree)
    g = gamma.extended(cap) if gamma.N < cap else gamma
    if series_on_branch(g, H, g.N + 1).order() is not None:
        return OrderResult(None, "divisibility")
    raise ComponentUnknown("could not decide which component carries the branch")


def check_consistency(gamma: PuiseuxBranch) -> bool:
    """ord_t C(x(t), y(t)) > N."""
    s = series_on_branch(gamma, gamma.curve.form, gamma.N + 1)
    return not s
