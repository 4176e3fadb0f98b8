"""Sparse multivariate polynomials and plane-curve plumbing.

Polynomials are immutable maps from exponent tuples to nonzero coefficients.
Text I/O uses the grammar ``integer/rational coefficients, identifiers,
+ - * / ^ and parentheses``; juxtaposition is rejected.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .arith import AlgebraicNumber, PerturbationScalar, common_tower, format_scalar
from .errors import (
    LineInsideHypersurface,
    NotDivisible,
    ParseError,
    ProbeExhausted,
    VariableMismatch,
)
from .upoly import UPoly, squarefree_decomposition

_PREFERRED = ["x", "y", "z", "X", "Y", "Z", "t", "s", "u", "v", "w"]


def _var_key(v: str):
    return (_PREFERRED.index(v), "") if v in _PREFERRED else (len(_PREFERRED), v)


def _clean(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if c}


class MultiPoly:
    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None, _clean_ok: bool = False):
        self.vars = tuple(variables)
        if terms is None:
            terms = {}
        self.terms = dict(terms) if _clean_ok else _clean(terms)

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c, variables: Sequence[str]) -> "MultiPoly":
        n = len(variables)
        return cls(variables, {(0,) * n: c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatch(f"{name} not among {variables}")
        e = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {e: Fraction(1)})

    @classmethod
    def from_upoly(cls, p: UPoly, name: str, variables: Sequence[str] | None = None) -> "MultiPoly":
        variables = tuple(variables or (name,))
        i = variables.index(name)
        terms = {}
        for k, c in enumerate(p.c):
            if c:
                e = [0] * len(variables)
                e[i] = k
                terms[tuple(e)] = c
        return cls(variables, terms, _clean_ok=True)

    # queries ------------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), 0)

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_total_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, v: str) -> int:
        i = self.vars.index(v)
        return max((e[i] for e in self.terms), default=-1)

    def depends_on(self, v: str) -> bool:
        return v in self.vars and self.degree_in(v) > 0

    def used_vars(self) -> list[str]:
        return [v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms)]

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coefficients(self) -> list:
        return list(self.terms.values())

    @property
    def tower(self):
        return common_tower(self.terms.values())

    # alignment ------------------------------------------------------------
    def with_vars(self, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        if variables == self.vars:
            return self
        idx = []
        for i, v in enumerate(self.vars):
            if v in variables:
                idx.append(variables.index(v))
            else:
                if any(e[i] for e in self.terms):
                    raise VariableMismatch(f"variable {v} not in {variables}")
                idx.append(None)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for i, k in enumerate(e):
                if idx[i] is not None:
                    ne[idx[i]] = k
            terms[tuple(ne)] = c
        return MultiPoly(variables, terms, _clean_ok=True)

    def _align(self, other) -> tuple["MultiPoly", "MultiPoly"]:
        if not isinstance(other, MultiPoly):
            return self, MultiPoly.const(other, self.vars)
        if other.vars == self.vars:
            return self, other
        vs = list(self.vars) + [v for v in other.vars if v not in self.vars]
        return self.with_vars(vs), other.with_vars(vs)

    # ring operations ---------------------------------------------------------
    def __add__(self, other) -> "MultiPoly":
        a, b = self._align(other)
        t = dict(a.terms)
        for e, c in b.terms.items():
            t[e] = t[e] + c if e in t else c
        return MultiPoly(a.vars, t)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()}, _clean_ok=True)

    def __sub__(self, other) -> "MultiPoly":
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            if not other:
                return MultiPoly(self.vars)
            return MultiPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        a, b = self._align(other)
        t: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(i + j for i, j in zip(e1, e2))
                v = c1 * c2
                t[e] = t[e] + v if e in t else v
        return MultiPoly(a.vars, t)

    def __rmul__(self, other) -> "MultiPoly":
        if not other:
            return MultiPoly(self.vars)
        return MultiPoly(self.vars, {e: other * c for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        result = MultiPoly.const(Fraction(1), self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other, self.vars)
        return not (self - other)

    def __hash__(self):
        return hash((len(self.terms), self.total_degree))

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    # evaluation and substitution -------------------------------------------
    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        if len(point) != len(self.vars):
            raise VariableMismatch(f"expected {len(self.vars)} values, got {len(point)}")
        acc = 0
        pw = [dict() for _ in point]
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    if k not in pw[i]:
                        pw[i][k] = point[i] ** k
                    term = term * pw[i][k]
            acc = acc + term
        return acc

    def subs(self, mapping: Mapping[str, object], variables: Sequence[str] | None = None) -> "MultiPoly":
        """Substitute polynomials (or scalars) for variables."""
        target_vars = list(variables) if variables is not None else None
        if target_vars is None:
            target_vars = [v for v in self.vars if v not in mapping]
            for val in mapping.values():
                if isinstance(val, MultiPoly):
                    for v in val.vars:
                        if v not in target_vars:
                            target_vars.append(v)
        tv = tuple(target_vars)
        images = []
        for v in self.vars:
            if v in mapping:
                val = mapping[v]
                images.append(val.with_vars(tv) if isinstance(val, MultiPoly) else MultiPoly.const(val, tv))
            else:
                images.append(MultiPoly.var(v, tv))
        result = MultiPoly(tv)
        cache: list[dict] = [dict() for _ in self.vars]
        for e, c in self.terms.items():
            term = MultiPoly.const(c, tv)
            for i, k in enumerate(e):
                if k:
                    if k not in cache[i]:
                        cache[i][k] = images[i] ** k
                    term = term * cache[i][k]
            result = result + term
        return result

    def evaluate_partial(self, mapping: Mapping[str, object]) -> "MultiPoly":
        return self.subs(mapping)

    def translate(self, shift: Mapping[str, object]) -> "MultiPoly":
        """f(v + a) for each v -> a in ``shift``."""
        mapping = {v: MultiPoly.var(v, self.vars) + a for v, a in shift.items() if a}
        if not mapping:
            return self
        return self.subs(mapping, self.vars)

    def derivative(self, v: str) -> "MultiPoly":
        i = self.vars.index(v)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                t[tuple(ne)] = c * e[i]
        return MultiPoly(self.vars, t, _clean_ok=True)

    def homogenize(self, h: str, degree: int | None = None) -> "MultiPoly":
        d = self.total_degree if degree is None else degree
        vs = self.vars if h in self.vars else self.vars + (h,)
        f = self.with_vars(vs)
        i = vs.index(h)
        t = {}
        for e, c in f.terms.items():
            ne = list(e)
            ne[i] += d - sum(e)
            t[tuple(ne)] = c
        return MultiPoly(vs, t, _clean_ok=True)

    def dehomogenize(self, h: str) -> "MultiPoly":
        i = self.vars.index(h)
        vs = self.vars[:i] + self.vars[i + 1:]
        t: dict = {}
        for e, c in self.terms.items():
            ne = e[:i] + e[i + 1:]
            t[ne] = t[ne] + c if ne in t else c
        return MultiPoly(vs, t)

    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        return MultiPoly(tuple(mapping.get(v, v) for v in self.vars), self.terms, _clean_ok=True)

    # univariate views --------------------------------------------------------
    def coeff_list(self, v: str) -> list["MultiPoly"]:
        """Coefficients in ``v`` (index = power), each free of ``v``."""
        i = self.vars.index(v)
        d = self.degree_in(v)
        out = [dict() for _ in range(d + 1)]
        for e, c in self.terms.items():
            ne = e[:i] + (0,) + e[i + 1:]
            out[e[i]][ne] = c
        return [MultiPoly(self.vars, t, _clean_ok=True) for t in out]

    def to_upoly(self, v: str | None = None) -> UPoly:
        """View as univariate; all other variables must be absent."""
        if v is None:
            used = self.used_vars()
            if len(used) > 1:
                raise VariableMismatch(f"not univariate: {used}")
            v = used[0] if used else self.vars[0]
        i = self.vars.index(v)
        coeffs = [0] * (max((e[i] for e in self.terms), default=-1) + 1)
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise VariableMismatch(f"depends on variables other than {v}")
            coeffs[e[i]] = c
        return UPoly(coeffs)

    # ordering ----------------------------------------------------------------
    def grlex_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda ec: (-sum(ec[0]), tuple(-k for k in ec[0])))

    def lex_lead(self) -> tuple[tuple, object]:
        e = max(self.terms)
        return e, self.terms[e]

    def normalized(self) -> "MultiPoly":
        """Scale so the graded-lex leading coefficient is 1."""
        if not self.terms:
            return self
        c = self.grlex_terms()[0][1]
        inv = 1 / c if not isinstance(c, int) else Fraction(1, c)
        return self * inv

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self)!r}, vars={self.vars})"


def format_poly(f: MultiPoly) -> str:
    if not f.terms:
        return "0"
    parts = []
    for e, c in f.grlex_terms():
        mono = "*".join(
            v if k == 1 else f"{v}^{k}" for v, k in zip(f.vars, e) if k
        )
        cs = format_scalar(c)
        if isinstance(c, (AlgebraicNumber, PerturbationScalar)) and ("+" in cs or " - " in cs):
            cs = f"({cs})"
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        elif cs == "-1":
            parts.append("-" + mono)
        else:
            parts.append(f"{cs}*{mono}")
    s = " + ".join(parts)
    return s.replace("+ -", "- ")


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_ε][A-Za-z_0-9ε]*)|(\*\*|[-+*/^(),]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at {pos} in {text!r}")
        if m.group(1):
            out.append(("num", m.group(1)))
        elif m.group(2):
            out.append(("id", m.group(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, tokens, variables):
        self.toks = tokens
        self.i = 0
        self.vars = variables

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self) -> MultiPoly:
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> MultiPoly:
        node = self.unary()
        while True:
            t = self.peek()
            if t in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.unary()
                if t[1] == "*":
                    node = node * rhs
                else:
                    if not rhs.is_constant() or not rhs:
                        raise ParseError("division only by nonzero constants")
                    node = node * (Fraction(1) / rhs.constant_term())
            elif t[0] in ("num", "id") or t == ("op", "("):
                raise ParseError(f"juxtaposition is not allowed (near {t[1]!r}); use '*'")
            else:
                return node

    def unary(self) -> MultiPoly:
        t = self.peek()
        if t == ("op", "-"):
            self.take()
            return -self.unary()
        if t == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "num":
                raise ParseError("exponent must be a nonnegative integer")
            return base ** int(t[1])
        return base

    def atom(self) -> MultiPoly:
        t = self.take()
        if t[0] == "num":
            return MultiPoly.const(Fraction(int(t[1])), self.vars)
        if t[0] == "id":
            if t[1] not in self.vars:
                raise ParseError(f"unknown variable {t[1]!r}")
            return MultiPoly.var(t[1], self.vars)
        if t == ("op", "("):
            node = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError("missing ')'")
            return node
        raise ParseError(f"unexpected token {t[1]!r}")


def parse_poly(text: str, variables: Sequence[str] | None = None) -> MultiPoly:
    """Parse ``text`` (e.g. ``"Y^2*Z - X^3"``) into a :class:`MultiPoly`."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty polynomial")
    if variables is None:
        names = []
        for kind, val in toks:
            if kind == "id" and val not in names:
                names.append(val)
        variables = sorted(names, key=_var_key)
    p = _Parser(toks, tuple(variables))
    node = p.expr()
    if p.i != len(toks):
        raise ParseError(f"trailing input near {toks[p.i][1]!r}")
    return node


def parse_list(text: str, variables: Sequence[str] | None = None) -> list[MultiPoly]:
    """Parse comma-separated polynomials sharing one variable list."""
    pieces = _split_top(text)
    if variables is None:
        names: list[str] = []
        for piece in pieces:
            for kind, val in _tokenize(piece):
                if kind == "id" and val not in names:
                    names.append(val)
        variables = sorted(names, key=_var_key)
    return [parse_poly(p, variables) for p in pieces]


def _split_top(text: str) -> list[str]:
    depth = 0
    cur = []
    out = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [p.strip() for p in out if p.strip()]


def parse_scalar(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


# --------------------------------------------------------------------------
# division, gcd, resultant, squarefree

def divide_exact(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """f / g, raising NotDivisible unless g divides f."""
    f, g = f._align(g)
    if not g:
        raise NotDivisible("division by zero polynomial")
    ge, gc = g.lex_lead()
    inv = 1 / gc if not isinstance(gc, int) else Fraction(1, gc)
    rem = dict(f.terms)
    quo: dict = {}
    while rem:
        e = max(rem)
        c = rem[e]
        d = tuple(a - b for a, b in zip(e, ge))
        if any(k < 0 for k in d):
            raise NotDivisible("polynomial is not divisible")
        q = c * inv
        quo[d] = q
        for e2, c2 in g.terms.items():
            ee = tuple(a + b for a, b in zip(d, e2))
            v = rem.get(ee, 0) - q * c2
            if v:
                rem[ee] = v
            else:
                rem.pop(ee, None)
    return MultiPoly(f.vars, quo, _clean_ok=True)


def reduce_mod(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Remainder of f on division by the single polynomial g (lex order).

    A single polynomial is a Groebner basis of its ideal, so this remainder is
    a canonical representative of f modulo (g).
    """
    f, g = f._align(g)
    ge, gc = g.lex_lead()
    inv = 1 / gc if not isinstance(gc, int) else Fraction(1, gc)
    rem = dict(f.terms)
    out: dict = {}
    while rem:
        e = max(rem)
        c = rem.pop(e)
        d = tuple(a - b for a, b in zip(e, ge))
        if any(k < 0 for k in d):
            out[e] = c
            continue
        q = c * inv
        for e2, c2 in g.terms.items():
            if e2 == ge:
                continue
            ee = tuple(a + b for a, b in zip(d, e2))
            v = rem.get(ee, 0) - q * c2
            if v:
                rem[ee] = v
            else:
                rem.pop(ee, None)
    return MultiPoly(f.vars, out, _clean_ok=True)


def _prem(a: list[MultiPoly], b: list[MultiPoly]) -> list[MultiPoly]:
    """Pseudo-remainder of coefficient lists (index = power)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    while len(r) - 1 >= db and any(r):
        dr = len(r) - 1
        lr = r[-1]
        r = [c * lb for c in r]
        for j, bc in enumerate(b):
            r[dr - db + j] = r[dr - db + j] - lr * bc
        e -= 1
        while r and not r[-1]:
            r.pop()
    if e > 0 and r:
        f = lb ** e
        r = [c * f for c in r]
    return r


def _trim(cs: list[MultiPoly]) -> list[MultiPoly]:
    while cs and not cs[-1]:
        cs = cs[:-1]
    return cs


def resultant(f: MultiPoly, g: MultiPoly, v: str) -> MultiPoly:
    """Resultant in ``v`` by the subresultant PRS (no content extraction)."""
    f, g = f._align(g)
    one = MultiPoly.const(Fraction(1), f.vars)
    A = _trim(f.coeff_list(v)) if f else []
    B = _trim(g.coeff_list(v)) if g else []
    if not A or not B:
        return MultiPoly(f.vars)
    da, db = len(A) - 1, len(B) - 1
    if db == 0:
        return B[0] ** da
    if da == 0:
        return A[0] ** db
    s = 1
    if da < db:
        A, B = B, A
        da, db = db, da
        if da % 2 and db % 2:
            s = -1
    gg, h = one, one
    while True:
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        R = _trim(_prem(A, B))
        if not R:
            return MultiPoly(f.vars)
        A = B
        div = gg * h ** delta
        B = [divide_exact(c, div) for c in R]
        gg = A[-1]
        if delta >= 1:
            h = divide_exact(gg ** delta, h ** (delta - 1))
        da, db = len(A) - 1, len(B) - 1
        if db == 0:
            if da == 1:
                h = B[0]
            else:
                h = divide_exact(B[0] ** da, h ** (da - 1))
            return h * s


def content_in(f: MultiPoly, v: str) -> MultiPoly:
    g = MultiPoly(f.vars)
    for c in f.coeff_list(v):
        if c:
            g = poly_gcd(g, c)
            if g.is_constant():
                break
    return g


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Greatest common divisor, normalised to graded-lex leading coefficient 1."""
    f, g = f._align(g)
    if not f:
        return g.normalized()
    if not g:
        return f.normalized()
    if _rational(f) and _rational(g):
        return _from_sympy(_to_sympy(f).gcd(_to_sympy(g)), f.vars).normalized()
    return _gcd_prs(f, g)


def _gcd_prs(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Recursive primitive-PRS gcd; works over any exact coefficient field."""
    f, g = f._align(g)
    if not f:
        return g.normalized()
    if not g:
        return f.normalized()
    used = [v for v in f.vars if f.depends_on(v) or g.depends_on(v)]
    if not used:
        return MultiPoly.const(Fraction(1), f.vars)
    v = used[0]
    if not f.depends_on(v):
        return _gcd_prs(f, content_in(g, v))
    if not g.depends_on(v):
        return _gcd_prs(content_in(f, v), g)
    cf, cg = content_in(f, v), content_in(g, v)
    c = _gcd_prs(cf, cg)
    a = divide_exact(f, cf).coeff_list(v)
    b = divide_exact(g, cg).coeff_list(v)
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1:
        r = _trim(_prem(a, b))
        a = b
        if not r:
            b = []
            break
        rp = _from_coeffs(r, v, f.vars)
        rp = divide_exact(rp, content_in(rp, v)) if rp.depends_on(v) else MultiPoly.const(Fraction(1), f.vars)
        b = rp.coeff_list(v)
    if b:  # constant remainder: primitive parts coprime
        h = MultiPoly.const(Fraction(1), f.vars)
    else:
        h = _from_coeffs(a, v, f.vars)
        h = divide_exact(h, content_in(h, v))
    return (c * h).normalized()


def _rational(f: MultiPoly) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in f.terms.values())


def _to_sympy(f: MultiPoly):
    """sympy Poly over QQ in all of f's variables (rational coefficients only)."""
    import sympy

    gens = sympy.symbols(" ".join(f.vars)) if len(f.vars) > 1 else (sympy.Symbol(f.vars[0]),)
    rep = {e: sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for e, c in f.terms.items()}
    return sympy.Poly.from_dict(rep, *gens, domain="QQ")


def _from_sympy(sp, variables) -> MultiPoly:
    return MultiPoly(variables, {e: Fraction(int(c.p), int(c.q)) for e, c in sp.as_dict().items()})


def _from_coeffs(cs: list[MultiPoly], v: str, variables) -> MultiPoly:
    x = MultiPoly.var(v, variables)
    out = MultiPoly(variables)
    for k, c in enumerate(cs):
        if c:
            out = out + c * x ** k
    return out


def squarefree_decompose(f: MultiPoly) -> list[tuple[MultiPoly, int]]:
    """Squarefree decomposition (Yun, recursively over contents).

    Factors are normalised, pairwise coprime, squarefree; their product with
    multiplicities equals ``f`` up to a nonzero scalar.
    """
    if not f or f.is_constant():
        return []
    if _rational(f):
        _, parts = _to_sympy(f).sqf_list()
        return [(_from_sympy(q, f.vars).normalized(), m) for q, m in parts]
    return _yun(f)


def _yun(f: MultiPoly) -> list[tuple[MultiPoly, int]]:
    if not f or f.is_constant():
        return []
    used = f.used_vars()
    v = used[0]
    cont = content_in(f, v)
    p = divide_exact(f, cont)
    acc: dict[int, MultiPoly] = {}
    dp = p.derivative(v)
    a = poly_gcd(p, dp)
    b = divide_exact(p, a)
    c = divide_exact(dp, a)
    d = c - b.derivative(v)
    i = 1
    while b.depends_on(v):
        ai = poly_gcd(b, d)
        b = divide_exact(b, ai)
        c = divide_exact(d, ai)
        d = c - b.derivative(v)
        if not ai.is_constant():
            acc[i] = ai.normalized()
        i += 1
    for q, m in _yun(cont):
        acc[m] = acc[m] * q if m in acc else q
    return [(acc[m].normalized(), m) for m in sorted(acc)]


def is_squarefree(f: MultiPoly) -> bool:
    return all(m == 1 for _, m in squarefree_decompose(f))


def product_of(factors: Iterable[tuple[MultiPoly, int]], variables) -> MultiPoly:
    out = MultiPoly.const(Fraction(1), variables)
    for q, m in factors:
        out = out * q ** m
    return out


def same_up_to_scalar(f: MultiPoly, g: MultiPoly) -> bool:
    f, g = f._align(g)
    if not f or not g:
        return not f and not g
    return f.normalized() == g.normalized()


# --------------------------------------------------------------------------
# plane curves, points, lines

HOMOG = ("X", "Y", "Z")
CHART_VARS = {"z": ("x", "y"), "y": ("x", "z"), "x": ("y", "z")}


def to_form(f: MultiPoly) -> MultiPoly:
    """Homogeneous form in (X, Y, Z) from affine (x, y) or homogeneous input."""
    used = f.used_vars()
    if all(v in HOMOG for v in used):
        if not f.is_homogeneous():
            raise VariableMismatch("uppercase input must be homogeneous in X, Y, Z")
        return f.with_vars(HOMOG)
    if all(v in ("x", "y") for v in used):
        g = f.with_vars(("x", "y")).homogenize("z").rename({"x": "X", "y": "Y", "z": "Z"})
        return g.with_vars(HOMOG)
    raise VariableMismatch(f"curve variables must be x,y or X,Y,Z (got {used})")


def common_forms(polys: Sequence[MultiPoly], degree: int | None = None) -> list[MultiPoly]:
    """Forms of one common degree from affine or homogeneous input.

    Affine members (in x, y, or constants) are homogenised with Z up to the
    common degree, which defaults to the largest degree present.
    """
    homog = [bool(f.used_vars()) and all(v in HOMOG for v in f.used_vars()) for f in polys]
    k = degree
    if k is None:
        k = max((f.total_degree for f in polys if f), default=0)
    out = []
    for f, h in zip(polys, homog):
        if h:
            g = to_form(f)
            if g.total_degree != k:
                raise VariableMismatch(f"form of degree {g.total_degree} in a system of degree {k}")
        else:
            a = to_form(f).rename({"X": "x", "Y": "y", "Z": "z"}).dehomogenize("z").with_vars(("x", "y")) \
                if f else MultiPoly(("x", "y"))
            if a and a.total_degree > k:
                raise VariableMismatch(f"member of degree {a.total_degree} exceeds {k}")
            g = a.homogenize("z", k).rename({"x": "X", "y": "Y", "z": "Z"}).with_vars(HOMOG)
        out.append(g)
    return out


def dehomogenize_chart(form: MultiPoly, chart: str) -> MultiPoly:
    """Affine equation in the chart where the named coordinate is 1."""
    f = form.with_vars(HOMOG).rename({"X": "x", "Y": "y", "Z": "z"})
    return f.dehomogenize(chart).with_vars(CHART_VARS[chart])


def chart_of(point: Sequence) -> str:
    X, Y, Z = point
    if Z:
        return "z"
    if Y:
        return "y"
    return "x"


def affine_coords(point: Sequence, chart: str) -> tuple:
    X, Y, Z = point
    if chart == "z":
        return (X / Z, Y / Z)
    if chart == "y":
        return (X / Y, Z / Y)
    return (Y / X, Z / X)


def normalize_point(point: Sequence) -> tuple:
    """Scale a projective point so its last nonzero coordinate is 1."""
    for k in (2, 1, 0):
        if point[k]:
            c = point[k]
            c = Fraction(c) if isinstance(c, int) else c
            return tuple(p / c if p else Fraction(0) for p in point)
    raise VariableMismatch("(0:0:0) is not a projective point")


def point_text(P: Sequence) -> str:
    """``(X:Y:Z)`` with exact coordinates."""
    from .arith import format_scalar

    return "(" + ":".join(format_scalar(c) for c in P) + ")"


def as_projective(p: Sequence) -> tuple:
    p = tuple(Fraction(c) if isinstance(c, int) else c for c in p)
    if len(p) == 2:
        return (p[0], p[1], Fraction(1))
    if len(p) == 3:
        return p
    raise VariableMismatch("points are (x, y) or (X:Y:Z)")


@dataclass(frozen=True)
class PlaneCurve:
    form: MultiPoly
    components: tuple = ()      # ((form, multiplicity), ...) supplied by the user
    name: str = ""

    def __post_init__(self):
        if not self.form or self.form.is_constant():
            raise VariableMismatch("a curve needs a nonconstant defining polynomial")
        if self.components:
            prod = product_of(self.components, HOMOG)
            if not same_up_to_scalar(prod, self.form):
                raise VariableMismatch("components do not multiply to the defining polynomial")

    @classmethod
    def parse(cls, text: str, components: Sequence[str] = (), name: str = "") -> "PlaneCurve":
        form = to_form(parse_poly(text))
        comps = []
        for c in components:
            if isinstance(c, (tuple, list)):
                ctext, mult = c
            else:
                ctext, mult = c, 1
            comps.append((to_form(parse_poly(ctext)), int(mult)))
        return cls(form, tuple(comps), name)

    @property
    def degree(self) -> int:
        return self.form.total_degree

    def affine(self, chart: str = "z") -> MultiPoly:
        return dehomogenize_chart(self.form, chart)

    def component_forms(self) -> list[MultiPoly]:
        if self.components:
            return [c for c, _ in self.components]
        return [self.form]

    def contains(self, point: Sequence) -> bool:
        return not self.form(*as_projective(point))

    def __str__(self) -> str:
        return str(self.form)


@dataclass(frozen=True)
class ProjLine:
    p1: tuple
    p2: tuple

    def __post_init__(self):
        a, b = self.p1, self.p2
        cross = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        if not any(cross):
            raise VariableMismatch("line anchors must be projectively distinct")

    def equation(self) -> MultiPoly:
        a, b = self.p1, self.p2
        cross = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        X, Y, Z = (MultiPoly.var(v, HOMOG) for v in HOMOG)
        return X * cross[0] + Y * cross[1] + Z * cross[2]


def restrict_to_line(F: MultiPoly, line: ProjLine) -> MultiPoly:
    """Binary form F(s*p1 + u*p2) in (s, u)."""
    F = F.with_vars(HOMOG)
    su = ("s", "u")
    s, u = MultiPoly.var("s", su), MultiPoly.var("u", su)
    images = {v: s * line.p1[i] + u * line.p2[i] for i, v in enumerate(HOMOG)}
    out = F.subs(images, su)
    if not out:
        raise LineInsideHypersurface("the line lies inside the hypersurface")
    return out


def binary_root_profile(form: MultiPoly) -> list[int]:
    """Multiplicities of the distinct roots of a binary form in (s, u)."""
    form = form.with_vars(("s", "u"))
    m = form.total_degree
    f = form.dehomogenize("u").to_upoly("s")
    prof = []
    for q, mult in squarefree_decomposition(f):
        prof.extend([mult] * q.degree)
    if f.degree < m:
        prof.append(m - f.degree)
    return sorted(prof, reverse=True)


def random_line(rng: random.Random, bound: int = 9) -> ProjLine:
    while True:
        p1 = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(3))
        p2 = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(3))
        try:
            return ProjLine(p1, p2)
        except VariableMismatch:
            continue


def generic_line_probe(F: MultiPoly, seed: int | random.Random = 0, retries: int = 16) -> tuple[ProjLine, int]:
    """Distinct intersection count of a squarefree form with a pseudorandom line.

    Re-probes until the count reaches the degree; after ``retries`` failures
    raises :class:`ProbeExhausted`.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    F = F.with_vars(HOMOG)
    m = F.total_degree
    best = None
    for _ in range(retries):
        line = random_line(rng)
        try:
            prof = binary_root_profile(restrict_to_line(F, line))
        except LineInsideHypersurface:
            continue
        best = (line, len(prof))
        if len(prof) == m:
            return best
    raise ProbeExhausted(f"no probe line met the form in {m} distinct points (best {best and best[1]})")


def generic_line_profile(F: MultiPoly, seed: int | random.Random = 0, retries: int = 16) -> tuple[ProjLine, list[int]]:
    """Root multiplicity profile of F on a line transverse to its reduced form.

    For F = G^s with G squarefree of degree m the profile is ``[s] * m``.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    F = F.with_vars(HOMOG)
    reduced = product_of([(q, 1) for q, _ in squarefree_decompose(F)], HOMOG)
    line, _ = generic_line_probe(reduced, rng, retries)
    return line, binary_root_profile(restrict_to_line(F, line))


def random_projective_transform(rng: random.Random, bound: int = 5) -> list[list[Fraction]]:
    while True:
        m = [[Fraction(rng.randint(-bound, bound)) for _ in range(3)] for _ in range(3)]
        if det3(m):
            return m


def det3(m) -> object:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def apply_transform(form: MultiPoly, m) -> MultiPoly:
    """F(M * (X, Y, Z)^T)."""
    form = form.with_vars(HOMOG)
    X, Y, Z = (MultiPoly.var(v, HOMOG) for v in HOMOG)
    images = {HOMOG[i]: X * m[i][0] + Y * m[i][1] + Z * m[i][2] for i in range(3)}
    return form.subs(images, HOMOG)


def mat_vec(m, v) -> tuple:
    return tuple(m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] for i in range(3))
