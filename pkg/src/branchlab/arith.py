"""Exact scalars: rationals, algebraic extension towers, and the field Q(eps).

Rationals are plain :class:`fractions.Fraction`. An element of a tower of
depth ``k`` is a polynomial in the top generator, with coefficients in the
depth ``k-1`` field, reduced modulo the top minimal polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DivisionByZero,
    NotIrreducible,
    TowerDepthExceeded,
    TowerMismatch,
)
from .upoly import UPoly, gcd, squarefree_decomposition, xgcd

DEFAULT_TOWER_CAP = 4

Scalar = object  # int | Fraction | AlgebraicNumber


def Q(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/4"`` to Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Level:
    name: str
    minpoly: tuple          # monic, low degree first, coefficients in the parent field
    verified: bool          # irreducibility checked (False: squarefree + no-root only)


class FieldTower:
    """Q(g1)(g2)... ; immutable, extension yields a new tower."""

    __slots__ = ("levels", "_hash", "_parent", "_mod")

    def __init__(self, levels: Sequence[Level] = ()):
        self.levels = tuple(levels)
        self._hash = hash(self.levels)
        self._parent = None
        self._mod = UPoly(self.levels[-1].minpoly) if self.levels else None

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def parent(self) -> "FieldTower":
        if self._parent is None:
            self._parent = FieldTower(self.levels[:-1])
        return self._parent

    @property
    def modulus(self) -> UPoly:
        return self._mod

    @property
    def degree(self) -> int:
        """Absolute degree over Q."""
        d = 1
        for lv in self.levels:
            d *= len(lv.minpoly) - 1
        return d

    def is_prefix_of(self, other: "FieldTower") -> bool:
        return self.levels == other.levels[: len(self.levels)]

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTower) and self.levels == other.levels

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.levels:
            return "QQ"
        return "QQ(" + ", ".join(lv.name for lv in self.levels) + ")"

    @property
    def trusted(self) -> bool:
        """True if some level's irreducibility was assumed rather than checked."""
        return not all(lv.verified for lv in self.levels)

    def gen(self) -> "AlgebraicNumber":
        return AlgebraicNumber(self, UPoly([0, 1]))

    def lift(self, x):
        """Embed ``x`` (rational or element of a prefix tower) into this tower."""
        if self.depth == 0:
            if isinstance(x, AlgebraicNumber):
                raise TowerMismatch(f"cannot embed {x.tower} into QQ")
            return Q(x)
        if isinstance(x, AlgebraicNumber):
            if x.tower == self:
                return x
            if not x.tower.is_prefix_of(self):
                raise TowerMismatch(f"{x.tower} is not a subfield of {self}")
        return AlgebraicNumber(self, UPoly([self.parent.lift(x)]))

    def zero(self):
        return self.lift(0)

    def one(self):
        return self.lift(1)


QQ = FieldTower()


def tower_of(x) -> FieldTower:
    if isinstance(x, AlgebraicNumber):
        return x.tower
    if isinstance(x, PerturbationScalar):
        return x.tower
    return QQ


def common_tower(values: Iterable) -> FieldTower:
    """Smallest tower among ``values``' towers containing all of them."""
    best = QQ
    for v in values:
        t = tower_of(v)
        if t.depth > best.depth:
            if not best.is_prefix_of(t):
                raise TowerMismatch(f"{best} and {t} are incompatible")
            best = t
        elif not t.is_prefix_of(best):
            raise TowerMismatch(f"{best} and {t} are incompatible")
    return best


class AlgebraicNumber:
    """Element of a :class:`FieldTower` of depth >= 1."""

    __slots__ = ("tower", "poly")

    def __init__(self, tower: FieldTower, poly: UPoly):
        self.tower = tower
        self.poly = poly

    # coercion -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.tower == self.tower:
                return self, other
            if other.tower.is_prefix_of(self.tower):
                return self, self.tower.lift(other)
            if self.tower.is_prefix_of(other.tower):
                return other.tower.lift(self), other
            raise TowerMismatch(f"{self.tower} vs {other.tower}")
        if isinstance(other, (int, Fraction)):
            return self, self.tower.lift(other)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return AlgebraicNumber(a.tower, a.poly + b.poly)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.tower, -self.poly)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return AlgebraicNumber(a.tower, a.poly - b.poly)

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return AlgebraicNumber(a.tower, b.poly - a.poly)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraicNumber(self.tower, self.poly.scale(other))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return AlgebraicNumber(a.tower, (a.poly * b.poly) % a.tower.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if not self.poly:
            raise DivisionByZero("inverse of zero")
        g, s, _ = xgcd(self.poly, self.tower.modulus)
        if g.degree > 0:
            raise NotIrreducible(
                f"zero divisor found: minimal polynomial of {self.tower.levels[-1].name} is reducible"
            )
        return AlgebraicNumber(self.tower, s % self.tower.modulus)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZero("division by zero")
            return AlgebraicNumber(self.tower, self.poly.scale(Fraction(1) / other))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b * a.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self) -> bool:
        return bool(self.poly)

    def __eq__(self, other) -> bool:
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return not (a.poly - b.poly)

    def __hash__(self):
        return hash((self.tower, self.poly.degree))

    # inspection ------------------------------------------------------------
    def coords(self) -> list:
        """Nested coordinate lists (rationals at the innermost level)."""
        d = len(self.tower.levels[-1].minpoly) - 1
        out = []
        for k in range(d):
            c = self.poly[k]
            if self.tower.depth == 1:
                out.append(Q(c))
            else:
                out.append(self.tower.parent.lift(c).coords())
        return out

    def rational_value(self) -> Fraction | None:
        """The rational this element equals, if any."""
        if self.poly.degree > 0:
            return None
        c = self.poly[0]
        if isinstance(c, AlgebraicNumber):
            return c.rational_value()
        return Q(c)

    def in_parent(self):
        """The element of the parent field this equals, or None."""
        if self.poly.degree > 0:
            return None
        return self.tower.parent.lift(self.poly[0])

    def __repr__(self) -> str:
        return format_scalar(self)


def simplify(x):
    """Drop an element to the smallest tower prefix containing it."""
    while isinstance(x, AlgebraicNumber):
        p = x.in_parent()
        if p is None:
            return x
        x = p
    return x


def format_scalar(x) -> str:
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, AlgebraicNumber):
        name = x.tower.levels[-1].name
        parts = []
        for k in range(x.poly.degree, -1, -1):
            c = x.poly[k]
            if not c:
                continue
            cs = format_scalar(c)
            if isinstance(c, AlgebraicNumber) and c.poly.degree > 0:
                cs = f"({cs})"
            mono = "" if k == 0 else (name if k == 1 else f"{name}^{k}")
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        if not parts:
            return "0"
        s = " + ".join(parts).replace("+ -", "- ")
        return s
    if isinstance(x, PerturbationScalar):
        return str(x)
    return str(x)


# --------------------------------------------------------------------------
# extension and factorisation

def _to_sympy(p: UPoly):
    import sympy

    z = sympy.Symbol("z")
    coeffs = [sympy.Rational(Q(c).numerator, Q(c).denominator) for c in reversed(p.c)]
    return sympy.Poly(coeffs, z, domain="QQ")


def _from_sympy(sp) -> UPoly:
    return UPoly([Fraction(int(c.p), int(c.q)) for c in reversed(sp.all_coeffs())])


def factor_rational(p: UPoly) -> list[tuple[UPoly, int]]:
    """Monic irreducible factors over Q with multiplicities."""
    if p.degree < 1:
        return []
    _, facs = _to_sympy(p).factor_list()
    out = [(_from_sympy(f).monic(), m) for f, m in facs]
    out.sort(key=lambda fm: (fm[0].degree, [Q(c) for c in fm[0].c], fm[1]))
    return out


def _norm(p: UPoly, tower: FieldTower) -> UPoly:
    """Norm over Q of a polynomial with coefficients in a depth-1 tower."""
    d = tower.degree
    gen = tower.gen()
    # columns: coordinates of p * g^j, entries polynomials in u over Q
    powers = [tower.one()]
    for _ in range(d - 1):
        powers.append(powers[-1] * gen)
    mat = [[UPoly() for _ in range(d)] for _ in range(d)]
    for j in range(d):
        for k, ck in enumerate(p.c):
            e = tower.lift(ck) * powers[j]
            for i in range(d):
                c = e.poly[i]
                if c:
                    mat[i][j] = mat[i][j] + UPoly.monomial(Q(c), k)
    return bareiss_det(mat)


def bareiss_det(mat: list[list[UPoly]]) -> UPoly:
    """Fraction-free determinant over Q[u]."""
    n = len(mat)
    m = [row[:] for row in mat]
    sign = 1
    prev = UPoly([1])
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return UPoly()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return m[n - 1][n - 1] * sign if n else UPoly([1])


def factor_over_field(p: UPoly) -> list[tuple[UPoly, int, bool]]:
    """Factor ``p`` over the field generated by its coefficients.

    Returns ``(monic factor, multiplicity, verified)``. Over Q and over simple
    extensions (depth 1) the factors are irreducible (norm method). Over deeper
    towers only the squarefree decomposition is performed; any nonlinear factor
    is returned with ``verified=False``.
    """
    if p.degree < 1:
        return []
    tower = common_tower(p.c)
    if tower.depth == 0:
        return [(f, m, True) for f, m in factor_rational(p)]
    p = p.map(tower.lift)
    out = []
    for s, mult in squarefree_decomposition(p):
        if s.degree == 1:
            out.append((s, mult, True))
            continue
        if tower.depth == 1:
            for f in _trager(s, tower):
                out.append((f, mult, True))
        else:
            out.append((s, mult, False))
    return out


def _trager(s: UPoly, tower: FieldTower) -> list[UPoly]:
    gen = tower.gen()
    for k in (0, 1, -1, 2, -2, 3, -3, 4, 5, 6, 7):
        shifted = s.taylor_shift(gen * (-k)) if k else s
        n = _norm(shifted, tower)
        if n.degree < 1 or gcd(n, n.deriv()).degree > 0:
            continue
        out = []
        for ni, _ in factor_rational(n):
            g = gcd(shifted, ni.map(tower.lift))
            if g.degree > 0:
                out.append(g.taylor_shift(gen * k) if k else g)
        if sum(f.degree for f in out) == s.degree:
            return [f.monic() for f in out]
    return [s]


def adjoin_root(
    tower: FieldTower, p: UPoly, name: str | None = None, cap: int = DEFAULT_TOWER_CAP
) -> tuple[FieldTower, object]:
    """Extend ``tower`` by a root of ``p`` (assumed irreducible over it).

    Linear ``p`` returns its root without extending.
    """
    if p.degree < 1:
        raise NotIrreducible("constant polynomial has no root")
    p = p.map(tower.lift).monic()
    if p.degree == 1:
        return tower, -p[0]
    if tower.depth >= cap:
        raise TowerDepthExceeded(f"tower depth cap {cap} reached")
    facs = factor_over_field(p)
    if len(facs) != 1 or facs[0][1] != 1:
        raise NotIrreducible(f"polynomial of degree {p.degree} is reducible over {tower}")
    verified = facs[0][2]
    name = name or f"a{tower.depth + 1}"
    level = Level(name, tuple(p.c), verified)
    new = FieldTower(tower.levels + (level,))
    return new, new.gen()


def minimal_polynomial_rational(x) -> UPoly:
    """Minimal polynomial over Q of a tower element (via the norm of z - x)."""
    x = simplify(x)
    if not isinstance(x, AlgebraicNumber):
        return UPoly([-Q(x), 1])
    # char poly of multiplication by x over Q, then squarefree part
    cp = _charpoly_over_q(x)
    facs = [f for f, _ in factor_rational(cp)]
    for f in facs:
        if not f(x):
            return f
    raise NotIrreducible("no rational factor of the characteristic polynomial vanishes")


def _charpoly_over_q(x: "AlgebraicNumber") -> UPoly:
    t = x.tower
    basis = _absolute_basis(t)
    d = len(basis)
    cols = [_absolute_coords(x * b, t) for b in basis]
    mat = [[UPoly([-cols[j][i]]) + (UPoly([0, 1]) if i == j else UPoly()) for j in range(d)] for i in range(d)]
    return bareiss_det(mat)


def _absolute_basis(t: FieldTower) -> list:
    if t.depth == 0:
        return [Fraction(1)]
    inner = _absolute_basis(t.parent)
    g = t.gen()
    deg = len(t.levels[-1].minpoly) - 1
    out = []
    gp = t.one()
    for _ in range(deg):
        for b in inner:
            out.append(t.lift(b) * gp)
        gp = gp * g
    return out


def _absolute_coords(x, t: FieldTower) -> list[Fraction]:
    if t.depth == 0:
        return [Q(x)]
    x = t.lift(x)
    deg = len(t.levels[-1].minpoly) - 1
    out = []
    for k in range(deg):
        out.extend(_absolute_coords(x.poly[k] if x.poly[k] else 0, t.parent))
    return out


# --------------------------------------------------------------------------
# the perturbation field K(eps)

class PerturbationScalar:
    """Rational function num(eps)/den(eps), reduced, with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced: bool = False):
        if not isinstance(num, UPoly):
            num = UPoly([num])
        if den is None:
            den = UPoly([1])
        elif not isinstance(den, UPoly):
            den = UPoly([den])
        if not den:
            raise DivisionByZero("zero denominator")
        if not _reduced:
            if not num:
                den = UPoly([1])
            else:
                g = gcd(num, den)
                if g.degree > 0:
                    num, den = num // g, den // g
                lc = den.lc
                if lc - 1:
                    inv = 1 / lc if not isinstance(lc, int) else Fraction(1, lc)
                    num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @classmethod
    def eps(cls) -> "PerturbationScalar":
        return cls(UPoly([0, 1]))

    @property
    def tower(self) -> FieldTower:
        return common_tower(list(self.num.c) + list(self.den.c))

    @staticmethod
    def _wrap(x):
        if isinstance(x, PerturbationScalar):
            return x
        if isinstance(x, (int, Fraction, AlgebraicNumber)):
            return PerturbationScalar(UPoly([x]), _reduced=True)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return PerturbationScalar(self.num + o.num, self.den)
        return PerturbationScalar(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return PerturbationScalar(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, AlgebraicNumber)):
            if not other:
                return PerturbationScalar(UPoly())
            return PerturbationScalar(self.num.scale(other), self.den, _reduced=True)
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return PerturbationScalar(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverse of zero")
        return PerturbationScalar(self.den, self.num)

    def __truediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return PerturbationScalar(self.num ** n, self.den ** n)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num.degree, self.den.degree))

    def valuation(self) -> int | None:
        """Order of vanishing at eps = 0 (None for zero)."""
        if not self.num:
            return None
        return self.num.order() - self.den.order()

    def evaluate(self, e0):
        d = self.den(e0)
        if not d:
            raise DivisionByZero(f"pole at eps = {e0}")
        return self.num(e0) / d if not isinstance(d, int) else Fraction(self.num(e0)) / d

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant(self):
        return self.num[0]

    def __repr__(self) -> str:
        n = _fmt_upoly(self.num, "eps")
        if self.den.degree == 0:
            return n
        return f"({n})/({_fmt_upoly(self.den, 'eps')})"


def _fmt_upoly(p: UPoly, var: str) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p[k]
        if not c:
            continue
        cs = format_scalar(c)
        if isinstance(c, AlgebraicNumber) and c.poly.degree > 0 and k:
            cs = f"({cs})"
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        elif cs == "-1":
            parts.append("-" + mono)
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


EPS = PerturbationScalar.eps()
