"""Linear systems of forms on a plane curve and the series they cut."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .arith import QQ, adjoin_root, factor_rational, simplify
from .errors import (
    DegenerateSystem,
    DirectionDegenerate,
    InfiniteIntersection,
    InputError,
    InvariantViolation,
    LedgerExceedsFixedContribution,
    MemberContainsCurve,
    OrderTooSmall,
    PointNotOnCurve,
)
from .linalg import Echelon
from .local import (
    PointClass,
    _resolve,
    intersection_points,
    nearby_intersections,
    point_multiplicity,
    s_fold_order,
    split_family,
)
from .poly import (
    HOMOG,
    MultiPoly,
    PlaneCurve,
    point_text,
    common_forms,
    divide_exact,
    normalize_point,
    parse_list,
    poly_gcd,
    reduce_mod,
)
from .puiseux import branch_order, expand_branches
from .upoly import UPoly

DIRECTION_RETRIES = 8


def _monomial_vectors(forms: Sequence[MultiPoly]) -> list[list]:
    keys = sorted({e for f in forms for e in f.terms})
    return [[f.terms.get(e, 0) for e in keys] for f in forms]


def _rank(forms: Sequence[MultiPoly]) -> int:
    vecs = _monomial_vectors(forms)
    if not vecs or not vecs[0]:
        return 0
    e = Echelon(len(vecs[0]))
    for v in vecs:
        e.add(v)
    return e.rank


@dataclass(frozen=True)
class LinearSystem:
    """The forms lambda_0*phi_0 + ... + lambda_r*phi_r of one degree."""

    basis: tuple
    name: str = ""

    def __post_init__(self):
        if not self.basis:
            raise DegenerateSystem("a linear system needs at least one form")
        if _rank(self.basis) != len(self.basis):
            raise DegenerateSystem("basis forms are linearly dependent")

    @classmethod
    def parse(cls, forms: str | Sequence[str], degree: int | None = None, name: str = "") -> "LinearSystem":
        if isinstance(forms, str):
            polys = parse_list(forms)
        else:
            polys = [p for text in forms for p in parse_list(text)]
        return cls(tuple(common_forms(polys, degree)), name)

    @classmethod
    def all_forms(cls, k: int) -> "LinearSystem":
        X, Y, Z = (MultiPoly.var(v, HOMOG) for v in HOMOG)
        basis = [X ** a * Y ** b * Z ** (k - a - b) for a in range(k, -1, -1) for b in range(k - a, -1, -1)]
        return cls(tuple(basis), f"all forms of degree {k}")

    @property
    def degree(self) -> int:
        return self.basis[0].total_degree

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    def member(self, lam: Sequence) -> MultiPoly:
        if len(lam) != len(self.basis):
            raise InputError(f"expected {len(self.basis)} parameters, got {len(lam)}")
        if not any(lam):
            raise InputError("the zero parameter vector gives no member")
        acc = MultiPoly(HOMOG)
        for c, f in zip(lam, self.basis):
            if c:
                acc = acc + f * c
        return acc

    def check_on(self, C: PlaneCurve) -> None:
        """Reject the system if some member is a multiple of C."""
        rems = [reduce_mod(f, C.form) for f in self.basis]
        if _rank(rems) != len(rems):
            raise DegenerateSystem("a member of the system contains the curve")

    def coordinates(self, F: MultiPoly) -> list | None:
        """Parameters of F in the basis, or None when F is not a member."""
        from .linalg import kernel

        vecs = _monomial_vectors(list(self.basis) + [common_forms([F], self.degree)[0]])
        cols = list(zip(*vecs))
        ker = kernel([list(c) for c in cols], len(vecs))
        for v in ker:
            if v[-1]:
                return [simplify(-c / v[-1]) for c in v[:-1]]
        return None


def _member_form(sigma: LinearSystem, lam) -> MultiPoly:
    if isinstance(lam, MultiPoly):
        return common_forms([lam], sigma.degree)[0]
    return sigma.member(lam)


def _point_key(P: tuple) -> tuple:
    return tuple(str(simplify(c)) for c in normalize_point(P))


# --------------------------------------------------------------------------
# weighted sets and base loci

@dataclass(frozen=True)
class WeightedSet:
    member: MultiPoly
    entries: tuple          # (PointClass, multiplicity)

    @property
    def total(self) -> int:
        return sum(pc.size * m for pc, m in self.entries)

    def weight_at(self, point) -> int:
        key = _point_key(tuple(point) if len(point) == 3 else (point[0], point[1], 1))
        for pc, m in self.entries:
            if _point_key(pc.point) == key:
                return m
        return 0


def weighted_set(sigma: LinearSystem, lam, C: PlaneCurve, seed: int = 0) -> WeightedSet:
    """Intersection points of C with one member, with multiplicities."""
    from .local import bezout_table

    F = _member_form(sigma, lam)
    try:
        rep = bezout_table(C, F, seed)
    except InfiniteIntersection as exc:
        raise MemberContainsCurve(f"member {F} shares a component with the curve") from exc
    return WeightedSet(F, tuple((en.point, en.multiplicity) for en in rep.entries))


def weighted_set_dominates(a: WeightedSet, b: WeightedSet) -> bool:
    """True if every point of b carries at least as much weight in a."""
    return all(a.weight_at(pc.point) >= m for pc, m in b.entries)


def _vanishes_at(f: MultiPoly, P: tuple) -> bool:
    return not simplify(f(*P))


def base_locus_on_curve(sigma: LinearSystem, C: PlaneCurve, seed: int = 0) -> list[PointClass]:
    """Common zeros of the system lying on C, as Galois classes."""
    g = sigma.basis[0]
    for f in sigma.basis[1:]:
        g = poly_gcd(g, f)
    found: dict = {}
    if not g.is_constant():
        try:
            for pc, _ in intersection_points(C, g, seed):
                found[_point_key(pc.point)] = pc
        except InfiniteIntersection as exc:
            raise DegenerateSystem("every member shares a component with the curve") from exc
    residual = [divide_exact(f, g) for f in sigma.basis] if not g.is_constant() else list(sigma.basis)
    if all(not r.is_constant() for r in residual):
        rng = random.Random(seed)
        for _ in range(16):
            coeffs = [Fraction(rng.randint(1, 9)) for _ in residual]
            psi = MultiPoly(HOMOG)
            for c, r in zip(coeffs, residual):
                psi = psi + r * c
            try:
                pts = intersection_points(C, psi, seed)
            except InfiniteIntersection:
                continue
            for pc, _ in pts:
                if all(_vanishes_at(r, pc.point) for r in residual):
                    found.setdefault(_point_key(pc.point), pc)
            break
        else:
            raise DegenerateSystem("no member of the residual system meets C properly")
    return sorted(found.values(), key=lambda pc: pc.sort_key())


# --------------------------------------------------------------------------
# fixed and mobile parts

@dataclass(frozen=True)
class FixedContribution:
    total: int                  # I_p
    per_branch: tuple           # I_gamma for each branch (repeated by class size)
    in_base: bool


def fixed_contribution(sigma: LinearSystem, C: PlaneCurve, p) -> FixedContribution:
    """Order of a generic member on each branch at p."""
    P, _, _ = _resolve(p)
    if C.form(*P):
        raise PointNotOnCurve(f"point {point_text(P)} is not on the curve")
    if not all(_vanishes_at(f, P) for f in sigma.basis):
        n = sum(b.class_size for b in expand_branches(C, P))
        return FixedContribution(0, (0,) * n, False)
    per = []
    for b in expand_branches(C, P):
        orders = [branch_order(b, f).order for f in sigma.basis]
        orders = [o for o in orders if o is not None]
        if not orders:
            raise DegenerateSystem("every member contains a branch of the curve")
        per.extend([min(orders)] * b.class_size)
    return FixedContribution(sum(per), tuple(per), True)


@dataclass(frozen=True)
class MobileMultiplicity:
    I: int
    I_p: int
    mobile: int
    nearby_off_center: int | None = None


def mobile_multiplicity(sigma: LinearSystem, C: PlaneCurve, p, lam, cross_check: bool = False,
                        seed: int = 0) -> MobileMultiplicity:
    """I - I_p, optionally checked against the perturbed off-center count."""
    F = _member_form(sigma, lam)
    P, _, _ = _resolve(p)
    fixed = fixed_contribution(sigma, C, P)
    I = point_multiplicity(C, F, P).total if _vanishes_at(F, P) else 0
    mobile = I - fixed.total
    if mobile < 0:
        raise InvariantViolation(f"member order {I} is below the fixed contribution {fixed.total}")
    off = None
    if cross_check:
        nc, _ = _perturbed_count(sigma, C, P, F, seed)
        off = nc.off_center_total
        if off != mobile:
            raise InvariantViolation(f"off-center count {off} != I - I_p = {mobile}")
    return MobileMultiplicity(I, fixed.total, mobile, off)


def _generic_direction(sigma: LinearSystem, C: PlaneCurve, P: tuple, F: MultiPoly,
                       rng: random.Random) -> MultiPoly | None:
    """A pseudorandom member with the generic order on every branch at P."""
    lam = [Fraction(rng.randint(-9, 9)) for _ in sigma.basis]
    if not any(lam):
        return None
    psi = sigma.member(lam)
    if _rank([psi, F]) < 2:
        return None
    fixed = fixed_contribution(sigma, C, P)
    if not fixed.in_base:
        return psi if not _vanishes_at(psi, P) else None
    k = 0
    for b in expand_branches(C, P):
        o = branch_order(b, psi).order
        if o is None or o != fixed.per_branch[k]:
            return None
        k += b.class_size
    return psi


def _perturbed_count(sigma, C, P, F, seed):
    rng = random.Random(seed)
    for _ in range(DIRECTION_RETRIES):
        psi = _generic_direction(sigma, C, P, F, rng)
        if psi is None:
            continue
        vs = HOMOG + ("eps",)
        family = F.with_vars(vs) + psi.with_vars(vs) * MultiPoly.var("eps", vs)
        return nearby_intersections(C, P, family, "eps", seed), psi
    raise DirectionDegenerate(f"no generic direction in {DIRECTION_RETRIES} tries")


@dataclass(frozen=True)
class ISigma:
    value: int
    I: int
    I_p: int
    direction: MultiPoly
    seed: int


def i_sigma(sigma: LinearSystem, C: PlaneCurve, p, lam, seed: int = 0) -> ISigma:
    """Distinct intersections near p of a member moved generically inside the system."""
    F = _member_form(sigma, lam)
    P, _, _ = _resolve(p)
    if C.form(*P):
        raise PointNotOnCurve(f"point {point_text(P)} is not on the curve")
    I = point_multiplicity(C, F, P).total if _vanishes_at(F, P) else 0
    fixed = fixed_contribution(sigma, C, P)
    nc, psi = _perturbed_count(sigma, C, P, F, seed)
    value = nc.distinct
    if fixed.in_base and I != fixed.total + value - 1:
        raise InvariantViolation(f"I = {I} but I_p + I^Sigma - 1 = {fixed.total + value - 1}")
    if not fixed.in_base and I and s_fold_order(C, P) == 1 and value != I:
        raise InvariantViolation(f"coincident mobile point at {point_text(P)}: I^Sigma = {value} < I = {I}")
    return ISigma(value, I, fixed.total, psi, seed)


# --------------------------------------------------------------------------
# coincident mobile points

@dataclass(frozen=True)
class CoincidentPoint:
    point: tuple
    parameter: object
    I: int
    I_sigma: int


@dataclass(frozen=True)
class ScanResult:
    flagged: tuple
    checked: tuple          # (point, parameter, I, I_sigma) for every probe
    skipped: tuple          # (point, reason)


def coincident_mobile_scan(family: MultiPoly, C: PlaneCurve, samples: Sequence, param: str | None = None,
                           seed: int = 0) -> ScanResult:
    """Sample points where a member meets C with fewer nearby points than its multiplicity."""
    param, coeffs = split_family(family, param)
    flagged, checked, skipped = [], [], []
    for p in samples:
        P, _, _ = _resolve(p)
        if C.form(*P):
            skipped.append((P, "not on the curve"))
            continue
        if s_fold_order(C, P) != 1:
            skipped.append((P, "singular point"))
            continue
        coords = _coords_for(coeffs[0], P)
        if coords is None:
            skipped.append((P, "at infinity for an affine family"))
            continue
        values = [c(*coords) if c else 0 for c in coeffs]
        poly = UPoly([simplify(v) for v in values])
        if not poly:
            skipped.append((P, "base point of the family"))
            continue
        if poly.degree < 1:
            skipped.append((P, "no member passes through the point"))
            continue
        # conjugate parameter values behave alike, so one root per factor
        for q, _ in factor_rational(poly):
            _, s0 = adjoin_root(QQ, q)
            shifted = _shift_family(coeffs, param, s0)
            F0 = _family_member(coeffs, s0)
            I = point_multiplicity(C, F0, P).total
            nc = nearby_intersections(C, P, shifted, param, seed)
            row = (P, s0, I, nc.distinct)
            checked.append(row)
            if nc.distinct < I:
                flagged.append(CoincidentPoint(*row))
    return ScanResult(tuple(flagged), tuple(checked), tuple(skipped))


def _coords_for(c: MultiPoly, P: tuple) -> tuple | None:
    if c.vars == HOMOG:
        return P
    if not P[2]:
        return None
    return (P[0] / P[2], P[1] / P[2])


def _family_member(coeffs: Sequence[MultiPoly], s0) -> MultiPoly:
    acc = MultiPoly(coeffs[0].vars)
    for k, c in enumerate(coeffs):
        if c:
            acc = acc + c * (s0 ** k)
    return acc


def _shift_family(coeffs: Sequence[MultiPoly], param: str, s0) -> MultiPoly:
    """The family re-centred so that the member through the point sits at param = 0."""
    vs = coeffs[0].vars + (param,)
    s = MultiPoly.var(param, vs) + s0
    acc = MultiPoly(vs)
    for k, c in enumerate(coeffs):
        if c:
            acc = acc + c.with_vars(vs) * s ** k
    return acc


# --------------------------------------------------------------------------
# series g_n^r

@dataclass(frozen=True)
class GnrSeries:
    n: int
    r: int
    removed: tuple = field(default=())      # (point, amount)

    def __str__(self) -> str:
        return f"g_{self.n}^{self.r}"


def series_order_dim(sigma: LinearSystem, C: PlaneCurve, ledger: Mapping | Sequence = ()) -> GnrSeries:
    """Order and dimension of the series cut on C, after the ledger's removals."""
    sigma.check_on(C)
    items = list(ledger.items()) if isinstance(ledger, Mapping) else list(ledger)
    removed = []
    total = 0
    for p, amount in items:
        P, _, _ = _resolve(p)
        fixed = fixed_contribution(sigma, C, P)
        if amount < 0 or amount > fixed.total:
            raise LedgerExceedsFixedContribution(
                f"cannot remove {amount} at {point_text(P)}: fixed contribution is {fixed.total}")
        removed.append((P, amount))
        total += amount
    n = C.degree * sigma.degree - total
    r = sigma.dim
    if r > n:
        raise InvariantViolation(f"dimension {r} exceeds order {n}")
    return GnrSeries(n, r, tuple(removed))


# --------------------------------------------------------------------------
# adjoint arithmetic

@dataclass(frozen=True)
class AdjointBound:
    r1: int
    n1: int
    max_steps: int

    def step_ok(self, i: int) -> bool:
        """Whether r1 - (i-1) <= n1 - 2(i-1) still holds at step i."""
        return self.r1 - (i - 1) <= self.n1 - 2 * (i - 1)


def adjoint_bound(n: int) -> AdjointBound:
    """Dimension and order of the adjoint series of degree n-1, with the step bound."""
    if n < 2:
        raise OrderTooSmall("curve order must be at least 2")
    r1 = (n - 1) * (n + 2) // 2
    n1 = n * (n - 1)
    return AdjointBound(r1, n1, n1 - r1 + 1)
