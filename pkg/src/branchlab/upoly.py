"""Dense univariate polynomials over an arbitrary exact field.

Coefficients are stored low degree first. Any objects closed under
``+ - * /`` with a meaningful ``bool`` (false iff zero) work: ``int``,
``Fraction``, :class:`~branchlab.arith.AlgebraicNumber`,
:class:`~branchlab.arith.PerturbationScalar`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DivisionByZero


def _strip(coeffs: list) -> list:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    del coeffs[n:]
    return coeffs


class UPoly:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        self.c = _strip(list(coeffs))

    @classmethod
    def monomial(cls, coeff, k: int) -> "UPoly":
        return cls([0] * k + [coeff])

    @classmethod
    def x(cls) -> "UPoly":
        return cls([0, 1])

    # -- basic queries -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def lc(self):
        return self.c[-1] if self.c else 0

    def __bool__(self) -> bool:
        return bool(self.c)

    def __len__(self) -> int:
        return len(self.c)

    def __getitem__(self, k: int):
        return self.c[k] if 0 <= k < len(self.c) else 0

    def order(self) -> int | None:
        """Index of the lowest nonzero coefficient (None for the zero polynomial)."""
        for k, a in enumerate(self.c):
            if a:
                return k
        return None

    def is_constant(self) -> bool:
        return len(self.c) <= 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, UPoly):
            other = UPoly([other])
        if len(self.c) != len(other.c):
            return False
        return all(not (a - b) for a, b in zip(self.c, other.c))

    def __hash__(self):
        return hash(len(self.c))

    def __repr__(self) -> str:
        return f"UPoly({self.c!r})"

    # -- ring operations ---------------------------------------------
    def __add__(self, other) -> "UPoly":
        if not isinstance(other, UPoly):
            other = UPoly([other])
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = out[i] + v
        return UPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "UPoly":
        return UPoly([-a for a in self.c])

    def __sub__(self, other) -> "UPoly":
        if not isinstance(other, UPoly):
            other = UPoly([other])
        return self + (-other)

    def __rsub__(self, other) -> "UPoly":
        return (-self) + other

    def __mul__(self, other) -> "UPoly":
        if not isinstance(other, UPoly):
            return UPoly([a * other for a in self.c])
        a, b = self.c, other.c
        if not a or not b:
            return UPoly()
        out = [0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if not u:
                continue
            for j, v in enumerate(b):
                if v:
                    out[i + j] = out[i + j] + u * v
        return UPoly(out)

    def __rmul__(self, other) -> "UPoly":
        return UPoly([other * a for a in self.c])

    def __pow__(self, n: int) -> "UPoly":
        result = UPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, s) -> "UPoly":
        return UPoly([a * s for a in self.c])

    def mul_trunc(self, other: "UPoly", n: int) -> "UPoly":
        """Product modulo x^n."""
        a, b = self.c[:n], other.c[:n]
        out = [0] * min(n, max(len(a) + len(b) - 1, 0))
        for i, u in enumerate(a):
            if not u:
                continue
            for j in range(min(len(b), n - i)):
                v = b[j]
                if v:
                    out[i + j] = out[i + j] + u * v
        return UPoly(out)

    def trunc(self, n: int) -> "UPoly":
        return UPoly(self.c[:n])

    def shift_up(self, k: int) -> "UPoly":
        return UPoly([0] * k + self.c) if self.c else UPoly()

    # -- field operations ---------------------------------------------
    def divmod(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        if not other:
            raise DivisionByZero("polynomial division by zero")
        r = list(self.c)
        db = other.degree
        inv_lc = 1 / other.lc if not isinstance(other.lc, int) else Fraction(1, other.lc)
        q = [0] * max(len(r) - db, 0)
        for k in range(len(r) - 1, db - 1, -1):
            a = r[k]
            if not a:
                continue
            f = a * inv_lc
            q[k - db] = f
            for j, v in enumerate(other.c):
                if v:
                    r[k - db + j] = r[k - db + j] - f * v
        return UPoly(q), UPoly(r[:db] if db > 0 else [])

    def __floordiv__(self, other) -> "UPoly":
        return self.divmod(other)[0]

    def __mod__(self, other) -> "UPoly":
        return self.divmod(other)[1]

    def monic(self) -> "UPoly":
        if not self.c:
            return self
        lc = self.lc
        if not (lc - 1):
            return self
        inv = 1 / lc if not isinstance(lc, int) else Fraction(1, lc)
        return UPoly([a * inv for a in self.c])

    def deriv(self) -> "UPoly":
        return UPoly([k * a for k, a in enumerate(self.c)][1:])

    def __call__(self, x):
        acc = 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def compose(self, other: "UPoly") -> "UPoly":
        acc = UPoly()
        for a in reversed(self.c):
            acc = acc * other + a
        return acc

    def taylor_shift(self, a) -> "UPoly":
        """p(x + a)."""
        return self.compose(UPoly([a, 1]))

    def map(self, fn) -> "UPoly":
        return UPoly([fn(a) for a in self.c])


def gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def xgcd(a: UPoly, b: UPoly) -> tuple[UPoly, UPoly, UPoly]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = UPoly([1]), UPoly()
    t0, t1 = UPoly(), UPoly([1])
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = 1 / r0.lc if not isinstance(r0.lc, int) else Fraction(1, r0.lc)
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def squarefree_decomposition(p: UPoly) -> list[tuple[UPoly, int]]:
    """Yun's algorithm (characteristic 0). Factors are monic, nonconstant,
    pairwise coprime, squarefree; the leading coefficient is dropped."""
    if p.degree < 1:
        return []
    out = []
    dp = p.deriv()
    a = gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.deriv()
    i = 1
    while b.degree > 0:
        ai = gcd(b, d)
        b = b // ai
        c = d // ai
        d = c - b.deriv()
        if ai.degree > 0:
            out.append((ai.monic(), i))
        i += 1
    return out


def squarefree_part(p: UPoly) -> UPoly:
    if p.degree < 1:
        return p
    return (p // gcd(p, p.deriv())).monic()


def from_roots(roots: Sequence) -> UPoly:
    out = UPoly([1])
    for r in roots:
        out = out * UPoly([-r, 1])
    return out


# -- truncated power series helpers (lists indexed by exponent) -------

def series_inverse(a: UPoly, n: int) -> UPoly:
    """Inverse of a power series with nonzero constant term, modulo x^n."""
    a0 = a[0]
    if not a0:
        raise DivisionByZero("series with zero constant term is not invertible")
    inv0 = 1 / a0 if not isinstance(a0, int) else Fraction(1, a0)
    out = [inv0]
    for k in range(1, n):
        acc = 0
        for j in range(1, min(k, a.degree) + 1):
            if a[j] and out[k - j]:
                acc = acc + a[j] * out[k - j]
        out.append(-acc * inv0)
    return UPoly(out)
