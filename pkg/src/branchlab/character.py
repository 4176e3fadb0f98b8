"""Cayley characters, osculating flags, projections and point taxonomy."""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .arith import PerturbationScalar, common_tower, simplify
from .errors import (
    DegenerateBranch,
    HyperplaneContainsBranch,
    InputError,
    ProjectionCollapsesBranch,
    SystemVanishesOnBranch,
    TruncationTooShort,
)
from .linalg import Echelon, dot, kernel
from .poly import MultiPoly, PlaneCurve, common_forms, parse_list
from .puiseux import PuiseuxBranch, expand_branches, series_on_branch
from .upoly import UPoly

DEFAULT_CAP = 64


# --------------------------------------------------------------------------
# space branches

@dataclass(frozen=True)
class SpaceBranch:
    """Parametrised branch (x_1(t), ..., x_w(t)) centred at the origin.

    Coefficients of ``t^n`` are trusted for ``n <= N``; an ``exact`` branch
    is a polynomial parametrisation known completely.
    """

    series: tuple
    N: int
    exact: bool = True
    names: tuple = ()
    plane: PuiseuxBranch | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if any(s[0] for s in self.series):
            raise InputError("branch series must vanish at t = 0")
        if not any(self.series):
            raise DegenerateBranch("all coordinate series are zero")

    @property
    def w(self) -> int:
        return len(self.series)

    @classmethod
    def parse(cls, text: str) -> "SpaceBranch":
        """From text such as ``"t^2, t^3"`` (polynomials in t)."""
        polys = parse_list(text, ("t",))
        series = tuple(p.to_upoly("t") for p in polys)
        n = max((s.degree for s in series), default=0)
        names = ("x", "y") if len(series) == 2 else tuple(f"x{k + 1}" for k in range(len(series)))
        return cls(series, n, True, names)

    @classmethod
    def from_plane(cls, b: PuiseuxBranch) -> "SpaceBranch":
        return cls((b.x, b.y), b.N, b.exact, ("x", "y"), b)

    @property
    def cap(self) -> int:
        if self.exact:
            return max(s.degree for s in self.series)
        if self.plane is not None and self.plane.curve is not None:
            return max(4 * self.plane.curve.degree ** 2, self.N)
        return self.N

    def extended(self, n: int) -> "SpaceBranch":
        if self.exact or n <= self.N:
            return self
        if self.plane is None:
            raise TruncationTooShort(f"series known only to t^{self.N}")
        b = self.plane.extended(n)
        return replace(self, series=(b.x, b.y), N=b.N, exact=b.exact, plane=b)

    def coefficient(self, n: int) -> tuple:
        return tuple(s[n] for s in self.series)


def coefficient_vectors(gamma: SpaceBranch, up_to: int) -> list[tuple]:
    """The vectors a_1, ..., a_n of coefficients of t^n."""
    if not gamma.exact and up_to > gamma.N:
        gamma = gamma.extended(up_to)
        if up_to > gamma.N:
            raise TruncationTooShort(f"need t^{up_to}, series known to t^{gamma.N}")
    return [gamma.coefficient(n) for n in range(1, up_to + 1)]


def reparametrize(gamma: SpaceBranch, u, higher: Sequence = ()) -> SpaceBranch:
    """Substitute t -> u*t + higher[0]*t^2 + ... (truncated at N)."""
    sub = UPoly([0, u] + list(higher))
    n = gamma.N + 1
    out = []
    for s in gamma.series:
        acc = UPoly()
        for c in reversed(s.c):
            acc = acc.mul_trunc(sub, n) + c
        out.append(acc.trunc(n) if not gamma.exact or higher else acc)
    exact = gamma.exact and not higher
    N = max(s.degree for s in out) if exact else gamma.N
    return SpaceBranch(tuple(out), N, exact, gamma.names)


# --------------------------------------------------------------------------
# characters

@dataclass(frozen=True)
class Character:
    alphas: tuple
    pivots: tuple

    def __post_init__(self):
        prev = 0
        for a, m in zip(self.alphas, self.pivots):
            if a != m - prev or a < 1:
                raise ValueError("pivots and alphas disagree")
            prev = m

    @classmethod
    def from_pivots(cls, pivots: Sequence[int]) -> "Character":
        pivots = tuple(pivots)
        alphas = tuple(m - p for p, m in zip((0,) + pivots, pivots))
        return cls(alphas, pivots)

    def levels(self) -> list[int]:
        """Attainable contact orders alpha_0 + ... + alpha_i."""
        return list(self.pivots)

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.alphas) + ")"


@dataclass(frozen=True)
class OsculatingFlag:
    """Bases a_{m_1}, ..., a_{m_w}; the k-th osculating space is the span of the first k."""

    basis: tuple

    def span(self, k: int) -> list[tuple]:
        return list(self.basis[:k])

    def level_of(self, v: Sequence) -> int:
        """Smallest k with v in the k-th osculating space."""
        e = Echelon(len(v))
        for k, b in enumerate(self.basis, 1):
            e.add(b)
            if e.contains(v):
                return k
        return len(self.basis) + 1

    def annihilated_levels(self, h: Sequence) -> int:
        """Largest i such that h kills the i-th osculating space."""
        i = 0
        for b in self.basis:
            if dot(h, b):
                break
            i += 1
        return i


def _flag_scan(gamma: SpaceBranch, width_vectors, target: int, cap: int):
    """Pivot indices where the running span grows, up to ``target`` jumps."""
    e = Echelon(width_vectors)
    pivots, basis = [], []
    g = gamma
    n = 1
    while len(pivots) < target:
        if n > cap:
            break
        if not g.exact and n > g.N:
            g = g.extended(min(max(2 * g.N, n), cap))
            if n > g.N:
                break
        v = g.coefficient(n)
        if e.add(v):
            pivots.append(n)
            basis.append(v)
        n += 1
    return pivots, basis, g


def cayley_character(gamma: SpaceBranch, cap: int | None = None) -> tuple[Character, OsculatingFlag]:
    """Character and osculating flag from the pivot exponents."""
    cap = cap if cap is not None else max(gamma.cap, 1)
    pivots, basis, _ = _flag_scan(gamma, gamma.w, gamma.w, cap)
    if len(pivots) < gamma.w:
        raise DegenerateBranch(
            f"only {len(pivots)} of {gamma.w} pivots below t^{cap}: the branch lies in a hyperplane")
    return Character.from_pivots(pivots), OsculatingFlag(tuple(basis))


def _as_space(gamma) -> SpaceBranch:
    return SpaceBranch.from_plane(gamma) if isinstance(gamma, PuiseuxBranch) else gamma


def hyperplane_branch_multiplicity(gamma, H, cap: int | None = None) -> int:
    """ord_t of a linear form (coefficient vector or MultiPoly) along the branch."""
    g = _as_space(gamma)
    h = _linear_coeffs(H, g)
    cap = cap if cap is not None else max(g.cap, 1)
    n = 1
    while n <= cap:
        if not g.exact and n > g.N:
            g = g.extended(min(max(2 * g.N, n), cap))
            if n > g.N:
                break
        if dot(h, g.coefficient(n)):
            return n
        n += 1
    raise HyperplaneContainsBranch(f"contact order exceeds t^{cap}")


def _linear_coeffs(H, g: SpaceBranch) -> list:
    if isinstance(H, MultiPoly):
        names = g.names or tuple(f"x{k + 1}" for k in range(g.w))
        if H.constant_term():
            raise InputError("the hyperplane must pass through the center")
        out = []
        for v in names:
            out.append(H.terms.get(tuple(1 if u == v else 0 for u in H.vars), 0) if v in H.vars else 0)
        if any(sum(e) > 1 for e in H.terms):
            raise InputError("hyperplane must be linear")
        return out
    return list(H)


# --------------------------------------------------------------------------
# projection

def project_branch(gamma, v: Sequence) -> SpaceBranch:
    """Image under the linear quotient by the direction ``v``."""
    g = _as_space(gamma)
    if len(v) != g.w or not any(v):
        raise InputError("direction must be a nonzero vector of the ambient dimension")
    r = next(k for k, c in enumerate(v) if c)
    inv = 1 / v[r] if not isinstance(v[r], int) else Fraction(1, v[r])
    out = []
    xr = g.series[r]
    for k, s in enumerate(g.series):
        if k == r:
            continue
        out.append((s - xr * (v[k] * inv)).map(simplify))
    if not any(out):
        raise ProjectionCollapsesBranch("the branch projects to a point")
    names = tuple(n for k, n in enumerate(g.names) if k != r) if g.names else ()
    return SpaceBranch(tuple(out), g.N, g.exact, names)


def predicted_projection(ch: Character, level: int) -> tuple:
    """Character after projecting from a direction at the given flag level.

    ``level`` k means a direction in the k-th osculating space but not the
    (k-1)-th; ``level = w`` means a direction outside the (w-1)-th.
    """
    a = list(ch.alphas)
    w = len(a)
    if level >= w:
        return tuple(a[:-1])
    k = level
    return tuple(a[: k - 1] + [a[k - 1] + a[k]] + a[k + 1:])


def direction_at_level(flag: OsculatingFlag, level: int, w: int, rng: random.Random) -> list:
    """Pseudorandom direction in the level-th osculating space, not lower."""
    if level >= w:
        while True:
            v = [Fraction(rng.randint(-9, 9)) for _ in range(w)]
            if flag.level_of(v) >= w:
                return v
    while True:
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in range(level)]
        if not coeffs[-1]:
            continue
        v = [0] * w
        for c, b in zip(coeffs, flag.basis):
            v = [a + c * x for a, x in zip(v, b)]
        return [simplify(x) for x in v]


# --------------------------------------------------------------------------
# linear systems along a branch

def _system_series(gamma, basis: Sequence[MultiPoly], n: int | None) -> list[UPoly]:
    if isinstance(gamma, PuiseuxBranch):
        return [series_on_branch(gamma, f, n) for f in common_forms(basis)]
    g = gamma
    out = []
    names = g.names or tuple(f"x{k + 1}" for k in range(g.w))
    for f in basis:
        f2 = f.with_vars(names)
        acc = UPoly()
        for e, c in f2.terms.items():
            term = UPoly([c])
            for k, p in enumerate(e):
                if p:
                    term = term * g.series[k] ** p if n is None else _mul_pow(term, g.series[k], p, n)
            acc = acc + term
        out.append(acc if n is None else acc.trunc(n))
    return out


def _mul_pow(acc: UPoly, s: UPoly, p: int, n: int) -> UPoly:
    for _ in range(p):
        acc = acc.mul_trunc(s, n)
    return acc


@dataclass(frozen=True)
class SystemCharacter:
    """Jump indices J_0 < J_1 < ... of the system along the branch.

    ``betas[0] = J_0`` and ``betas[k] = J_k - J_(k-1)``. Members of the
    level-i subsystem (those killing the first i+1 jump vectors) meet the
    branch with order at least ``J_(i+1)``.
    """

    jumps: tuple
    betas: tuple
    vectors: tuple          # the jump vectors b_{J_k}

    def level_order(self, i: int) -> int:
        return self.jumps[i + 1]


def system_character(gamma, basis: Sequence[MultiPoly], cap: int | None = None) -> SystemCharacter:
    """Filtration of a linear system by contact order along the branch."""
    basis = list(basis)
    width = len(basis)
    exact = gamma.exact
    if cap is None:
        if isinstance(gamma, PuiseuxBranch) and gamma.curve is not None:
            deg = max(f.total_degree for f in basis)
            cap = max(4 * gamma.curve.degree ** 2, gamma.curve.degree * deg + 1)
        else:
            cap = DEFAULT_CAP
    n = cap + 1
    g = gamma
    if isinstance(g, PuiseuxBranch) and not g.exact and g.N < cap:
        g = g.extended(cap)
    if isinstance(g, SpaceBranch) and not g.exact and g.N < cap:
        g = g.extended(cap)
    series = _system_series(g, basis, None if exact else n)
    e = Echelon(width)
    jumps, vecs = [], []
    top = max((s.degree for s in series), default=0) if exact else cap
    for k in range(0, top + 1):
        v = tuple(s[k] for s in series)
        if e.add(v):
            jumps.append(k)
            vecs.append(v)
            if len(jumps) == width:
                break
    if len(jumps) < width:
        raise SystemVanishesOnBranch(
            f"only {len(jumps)} of {width} jumps found (jumps {jumps}); a member vanishes on the branch")
    betas = tuple(j - p for p, j in zip([0] + jumps, jumps))
    return SystemCharacter(tuple(jumps), betas, tuple(vecs))


@dataclass(frozen=True)
class AlongBranch:
    observed: int           # off-center total, with multiplicity
    bound: int
    center_multiplicity: int
    distinct: int           # off-center distinct points
    member: MultiPoly       # the perturbed member, polynomial in eps

    @property
    def holds(self) -> bool:
        return self.observed >= self.bound


def intersections_along_branch(gamma, basis: Sequence[MultiPoly], i: int, r: int, seed: int = 0,
                               family: MultiPoly | None = None) -> AlongBranch:
    """Off-center intersections of a perturbed level-i member through r branch points.

    The member lies in the level-i subsystem and passes through the points
    gamma(c_j * eps); the bound is J_(i+r+1) - J_(i+1).
    """
    from .local import _count_small_roots, split_family

    basis = list(basis)
    n = len(basis) - 1
    if i < 0 or r < 1 or r > (n - 1) - i:
        raise InputError(f"need 0 <= i and 1 <= r <= {n - 1 - i}")
    if not gamma.exact:
        raise TruncationTooShort("perturbed members are built exactly only on polynomial branches")
    sc = system_character(gamma, basis)
    bound = sc.jumps[i + r + 1] - sc.jumps[i + 1]
    series = _system_series(gamma, basis, None)
    if family is not None:
        param, coeffs = split_family(family)
        fam_series = _system_series(gamma, coeffs, None)
        lam = None
    else:
        rng = random.Random(seed)
        eps = PerturbationScalar.eps()
        rows = [list(v) for v in sc.vectors[: i + 1]]
        cs = set()
        while len(cs) < r:
            c = Fraction(rng.randint(1, 9)) * rng.choice((1, -1))
            cs.add(c)
        for c in sorted(cs):
            rows.append([s(eps * c) for s in series])
        rows = [[PerturbationScalar(x) if not isinstance(x, PerturbationScalar) else x for x in row] for row in rows]
        ker = kernel(rows, len(basis))
        if not ker:
            raise SystemVanishesOnBranch("no member satisfies the conditions")
        lam = [PerturbationScalar(0)] * len(basis)
        for vec in ker:
            c = Fraction(rng.randint(1, 9))
            lam = [a + c * b for a, b in zip(lam, vec)]
        lam = _clear_denominators(lam)
        fam_series = None
    terms: dict = {}
    if lam is not None:
        for coef, s in zip(lam, series):
            for ke, ce in enumerate(coef.c):
                if not ce:
                    continue
                for j, cs_ in enumerate(s.c):
                    if cs_:
                        key = (ke, j)
                        terms[key] = terms.get(key, 0) + ce * cs_
    else:
        for ke, s in enumerate(fam_series):
            for j, cs_ in enumerate(s.c):
                if cs_:
                    terms[(ke, j)] = terms.get((ke, j), 0) + cs_
    h = MultiPoly(("eps", "t"), terms)
    sols: list = []
    tower = common_tower([c for s in series for c in s.c])
    distinct, total, center = _count_small_roots(h, sols, 1, tower)
    member = _member_poly(lam, basis) if lam is not None else family
    return AlongBranch(total - center, bound, center, distinct, member)


def _member_poly(lam: list[UPoly], basis: Sequence[MultiPoly]) -> MultiPoly:
    vs = tuple(dict.fromkeys(v for f in basis for v in f.vars)) + ("eps",)
    acc = MultiPoly(vs)
    for coef, f in zip(lam, basis):
        acc = acc + MultiPoly.from_upoly(coef, "eps", vs) * f.with_vars(vs)
    return acc


def _clear_denominators(lam: list) -> list[UPoly]:
    """Scale a K(eps) vector to polynomials in eps with no common eps factor."""
    den = UPoly([1])
    from .upoly import gcd as ugcd

    for a in lam:
        if a:
            d = a.den
            den = (den * d) // ugcd(den, d)
    polys = [(a.num * (den // a.den)) if a else UPoly() for a in lam]
    low = min((p.order() for p in polys if p), default=0)
    return [UPoly(p.c[low:]) if p else UPoly() for p in polys]


# --------------------------------------------------------------------------
# taxonomy

def tangent_direction(b: PuiseuxBranch) -> tuple:
    """First nonzero coefficient vector of the branch."""
    g = SpaceBranch.from_plane(b)
    _, flag = cayley_character(g)
    return flag.basis[0]


def tangent_line(b: PuiseuxBranch) -> MultiPoly:
    """The tangent line as a polynomial in the chart coordinates."""
    g = SpaceBranch.from_plane(b)
    a, c = next(v for v in coefficient_vectors(g, g.cap) if any(v))
    xv, yv = {"z": ("x", "y"), "y": ("x", "z"), "x": ("y", "z")}[b.chart]
    vs = (xv, yv)
    x0, y0 = b.center_affine
    X, Y = MultiPoly.var(xv, vs), MultiPoly.var(yv, vs)
    return ((X - x0) * c - (Y - y0) * a).normalized()


@dataclass(frozen=True)
class PointClassification:
    label: str
    s: int
    branches: tuple          # (class size, character, tangent slope) triples

    def __str__(self) -> str:
        return self.label


def _slope_key(direction: tuple):
    a, c = direction
    if a:
        return ("s", simplify(c / a))
    return ("inf", 0)


def classify_point(C: PlaneCurve, p) -> PointClassification:
    """Label from {nonsingular-ordinary, inflection, node, cusp, tacnode, ordinary-s-fold, other}."""
    from .local import s_fold_order

    s = s_fold_order(C, p)
    bs = expand_branches(C, p)
    data = []
    geometric = 0
    for b in bs:
        g = SpaceBranch.from_plane(b)
        try:
            ch, flag = cayley_character(g)
            alphas, tangent = ch.alphas, flag.basis[0]
        except DegenerateBranch:
            if not b.exact:
                raise
            # a line component: smooth, with no osculating data beyond the tangent
            alphas, tangent = (1, 1), next(v for v in coefficient_vectors(g, g.N) if any(v))
        data.append((b.class_size, alphas, _slope_key(tangent), b))
        geometric += b.class_size
    info = tuple((n, a, str(k[1]) if k[0] == "s" else "inf") for n, a, k, _ in data)
    if geometric == 1:
        a = data[0][1]
        if a == (1, 1):
            label = "nonsingular-ordinary"
        elif a[0] == 1:
            label = "inflection"
        elif a == (2, 1):
            label = "cusp"
        else:
            label = "other"
        return PointClassification(label, s, info)
    all_ordinary = all(a == (1, 1) for _, a, _, _ in data)
    smooth = all(a[0] == 1 for _, a, _, _ in data)
    ntangents = _distinct_tangents(data)
    if all_ordinary and ntangents == geometric:
        label = "node" if geometric == 2 else "ordinary-s-fold"
    elif geometric == 2 and smooth and ntangents == 1:
        label = "tacnode"
    else:
        label = "other"
    return PointClassification(label, s, info)


def _distinct_tangents(data) -> int:
    seen = []
    count = 0
    for size, _a, key, b in data:
        val = key[1]
        base = common_tower(list(b.center_affine))
        in_base = not hasattr(val, "tower") or val.tower.is_prefix_of(base) and val.tower.depth <= base.depth
        if size > 1 and not in_base:
            count += size
            continue
        if key not in seen:
            seen.append(key)
            count += 1
    return count
