"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; each test prints its
verdict line directly to the terminal, even when output is captured.
"""
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from corpus_data import BEZOUT_PAIRS, BRANCHES, LINEAR_FAMILIES, SPACE_BRANCHES, SQUARED_FAMILY
from branchlab.character import (
    SpaceBranch,
    cayley_character,
    direction_at_level,
    hyperplane_branch_multiplicity,
    predicted_projection,
    project_branch,
    tangent_line,
)
from branchlab.cli import rational_points
from branchlab.errors import InfiniteIntersection
from branchlab.linalg import kernel
from branchlab.linsys import (
    LinearSystem,
    adjoint_bound,
    coincident_mobile_scan,
    i_sigma,
    mobile_multiplicity,
    series_order_dim,
)
from branchlab.local import bezout_table, fulton_intersection, nearby_intersections, s_fold_order
from branchlab.poly import HOMOG, MultiPoly, PlaneCurve, parse_poly, to_form
from branchlab.puiseux import branch_order, expand_branches

ROOT = Path(__file__).resolve().parent.parent
XY = ("x", "y")


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:>2}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


# ---------------------------------------------------------------- 1, 2: fixtures

def test_criterion_01_cusp_fixture(verdict):
    expand_branches(PlaneCurve.parse("y - x"), (0, 0))  # warm imports
    start = time.perf_counter()
    C = PlaneCurve.parse("y^2 - x^3")
    bs = expand_branches(C, (0, 0))
    (b,) = bs
    ch, _ = cayley_character(SpaceBranch.from_plane(b))
    tangent = tangent_line(b)
    contact = branch_order(b, parse_poly("y", XY))
    nc = nearby_intersections(C, (0, 0), parse_poly("y - eps"))
    elapsed = time.perf_counter() - start
    checks = {
        "one branch": len(bs) == 1,
        "(t^2, t^3)": b.exact and b.x.c == [0, 0, 1] and b.y.c == [0, 0, 0, 1],
        "character (2,1)": ch.alphas == (2, 1),
        "tangent y": tangent == parse_poly("y", XY),
        "contact 3": contact == 3,
        "3 distinct nearby": nc.distinct == 3 and nc.center_multiplicity == 0,
        "< 1 s": elapsed < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    verdict(1, not bad, f"cusp fixture in {elapsed:.3f} s" + (f"; failed {bad}" if bad else ""))


def test_criterion_02_parabola_fixture(verdict):
    start = time.perf_counter()
    C = PlaneCurve.parse("y - x^2")
    (b,) = expand_branches(C, (0, 0))
    ch, _ = cayley_character(SpaceBranch.from_plane(b))
    family = parse_poly("y - (2*eps*x - eps^2)")
    nc = nearby_intersections(C, (0, 0), family)
    limit = parse_poly("y - (2*eps*x - eps^2)").subs({"eps": 0}, family.vars).with_vars(XY)
    elapsed = time.perf_counter() - start
    checks = {
        "character (1,1)": ch.alphas == (1, 1),
        "1 distinct": nc.distinct == 1,
        "total 2": nc.total == 2,
        "limit is the tangent": limit == tangent_line(b),
        "< 1 s": elapsed < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    verdict(2, not bad, f"parabola fixture in {elapsed:.3f} s" + (f"; failed {bad}" if bad else ""))


# ---------------------------------------------------------------- 3, 4: Bezout and the oracle

def _bezout_reports():
    out = []
    for c, f in BEZOUT_PAIRS:
        out.append((c, f, bezout_table(PlaneCurve.parse(c), to_form(parse_poly(f)))))
    return out


def test_criterion_03_bezout_suite(verdict):
    start = time.perf_counter()
    reports = _bezout_reports()
    elapsed = time.perf_counter() - start
    bad = [(c, f) for c, f, r in reports if not (r.bezout_ok and r.branch_sums_ok())]
    top = max(r.d * r.e for _, _, r in reports)
    ok = not bad and len(reports) >= 20 and top == 24 and elapsed < 60
    verdict(3, ok, f"{len(reports)} pairs, max d*e = {top}, all totals = d*e and branch sums agree "
                   f"in {elapsed:.1f} s" if ok else f"failures {bad}, max d*e {top}, {elapsed:.1f} s")


def test_criterion_04_oracle_equivalence(verdict):
    checks, bad = 0, []
    for c, f, rep in _bezout_reports():
        for en in rep.entries:
            if en.point.tower.depth:
                continue
            ref = fulton_intersection(parse_poly(c), parse_poly(f), en.point.point)
            checks += 1
            if ref != en.multiplicity or en.multiplicity != sum(en.per_branch):
                bad.append((c, f, en.point.point, ref, en.multiplicity))
    ok = not bad and checks >= 40
    verdict(4, ok, f"{checks} rational intersection points, recursive oracle = branch-order sum"
                   + (f"; mismatches {bad}" if bad else ""))


# ---------------------------------------------------------------- 5, 6: characters

def _hyperplane(flag, w, rng):
    i = rng.randint(0, w - 1)
    if i == 0:
        return [Fraction(rng.randint(-9, 9)) for _ in range(w)]
    h = [Fraction(0)] * w
    for vec in kernel([list(b) for b in flag.basis[:i]], w):
        c = rng.randint(-9, 9)
        h = [a + c * x for a, x in zip(h, vec)]
    return h


def test_criterion_05_filtration_law(verdict):
    start = time.perf_counter()
    rng = random.Random(2024)
    widths = set()
    probes, bad = 0, []
    for text in BRANCHES:
        g = SpaceBranch.parse(text)
        widths.add(g.w)
        ch, flag = cayley_character(g)
        done = 0
        while done < 200:
            h = _hyperplane(flag, g.w, rng)
            if not any(h):
                continue
            done += 1
            order = hyperplane_branch_multiplicity(g, h)
            level = flag.annihilated_levels(h)
            if order not in ch.levels() or order != ch.pivots[level]:
                bad.append((text, h, order))
        probes += done
    elapsed = time.perf_counter() - start
    ok = not bad and len(BRANCHES) >= 10 and widths >= {2, 3, 4} and elapsed < 30
    verdict(5, ok, f"{len(BRANCHES)} branches (w in {sorted(widths)}), {probes} hyperplanes, "
                   f"orders on the flag levels in {elapsed:.1f} s" + (f"; violations {bad[:3]}" if bad else ""))


def test_criterion_06_projection_rules(verdict):
    rng = random.Random(7)
    bad, checks = [], 0
    for text in SPACE_BRANCHES:
        g = SpaceBranch.parse(text)
        ch, flag = cayley_character(g)
        # generic, inside the osculating hyperplane, on the tangent line, plus any middle levels
        for level in sorted({g.w, g.w - 1, 1} | set(range(1, g.w + 1))):
            v = direction_at_level(flag, level, g.w, rng)
            got = cayley_character(project_branch(g, v))[0].alphas
            checks += 1
            if got != predicted_projection(ch, level):
                bad.append((text, level, got))
    ok = not bad and len(SPACE_BRANCHES) >= 5
    verdict(6, ok, f"{len(SPACE_BRANCHES)} space branches, {checks} projections match the rule"
                   + (f"; mismatches {bad}" if bad else ""))


# ---------------------------------------------------------------- 7: coincident mobile points

def test_criterion_07_mobile_point_dichotomy(verdict):
    nonempty, probes = [], 0
    for fam, c, pts in LINEAR_FAMILIES:
        C = PlaneCurve.parse(c)
        res = coincident_mobile_scan(parse_poly(fam), C, pts or rational_points(C, 5))
        probes += len(res.checked)
        if res.flagged or not res.checked:
            nonempty.append(fam)
    fam, c = SQUARED_FAMILY
    C = PlaneCurve.parse(c)
    samples = [(Fraction(a), 0) for a in (-3, -1, 0, Fraction(1, 2), 2, 5)]
    sq = coincident_mobile_scan(parse_poly(fam), C, samples)
    every = len(sq.flagged) == len(samples) and all(p.I_sigma < p.I for p in sq.flagged)
    ok = not nonempty and len(LINEAR_FAMILIES) >= 10 and every
    verdict(7, ok, f"{len(LINEAR_FAMILIES)} linear families, {probes} probes, none flagged; "
                   f"squared family flagged at {len(sq.flagged)}/{len(samples)} points"
                   + (f"; unexpected {nonempty}" if nonempty else ""))


# ---------------------------------------------------------------- 8: identities

PENCIL = LinearSystem.parse("X, Y")
LINES = LinearSystem.parse("X, Y, Z")
CONICS_AT_ORIGIN = LinearSystem.parse("X*Z, Y*Z, X^2, X*Y, Y^2")

IDENTITY_PROBES = [
    ("Y^2*Z - X^3", PENCIL, (0, 0)),
    ("y^2 - x^2 - x^3", PENCIL, (0, 0)),
    ("y^2 - x^4 + y^4", PENCIL, (0, 0)),
    ("y - x^3", PENCIL, (0, 0)),
    ("x^3 + y^3 - 3*x*y", PENCIL, (0, 0)),
    ("y^5 - x^2", PENCIL, (0, 0)),
    ("y^2 - x^3", CONICS_AT_ORIGIN, (0, 0)),
    ("y^2 - x^2 - x^3", CONICS_AT_ORIGIN, (0, 0)),
    ("x^2 + y^2 - 1", LinearSystem.parse("x - 1, y"), (1, 0)),
    ("Y^2*Z - X^3", LINES, (1, 1)),
    ("x^2 + y^2 - 1", LINES, (0, 1)),
    ("y^2 - x^3 - x + 2", LINES, (1, 0)),
]


def _members(sigma, rng, count):
    out = [[1 if k == j else 0 for k in range(len(sigma.basis))] for j in range(len(sigma.basis))]
    while len(out) < count:
        lam = [rng.randint(-5, 5) for _ in sigma.basis]
        if any(lam):
            out.append(lam)
    return out


def _singular_points(C, seed=0):
    rng = random.Random(seed)
    parts = [C.form.derivative(v) for v in HOMOG]
    for _ in range(8):
        G = MultiPoly(HOMOG)
        for p in parts:
            G = G + p * rng.randint(-9, 9)
        if not G:
            continue
        try:
            rep = bezout_table(C, G, seed)
        except InfiniteIntersection:
            continue
        return [en.point for en in rep.entries if all(not p(*en.point.point) for p in parts)]
    raise AssertionError("no combination of partials meets the curve properly")


def test_criterion_08_identities(verdict):
    rng = random.Random(11)
    counts = {"base": 0, "mobile": 0, "series": 0, "branches": 0}
    bad = []
    for c, sigma, p in IDENTITY_PROBES:
        C = PlaneCurve.parse(c)
        for lam in _members(sigma, rng, 6):
            F = sigma.member(lam)
            if not F(*(tuple(Fraction(v) for v in p) + (Fraction(1),))):
                r = i_sigma(sigma, C, p, lam)
                if r.I_p:
                    counts["base"] += 1
                    if r.I != r.I_p + r.value - 1:
                        bad.append(("base", c, lam))
            mm = mobile_multiplicity(sigma, C, p, lam, cross_check=True)
            counts["mobile"] += 1
            if mm.I != mm.I_p + mm.mobile:
                bad.append(("mobile", c, lam))
    for c in sorted({t for pair in BEZOUT_PAIRS for t in pair}):
        C = PlaneCurve.parse(c)
        for k in range(1, C.degree):
            g = series_order_dim(LinearSystem.all_forms(k), C)
            counts["series"] += 1
            if g.r > g.n:
                bad.append(("series", c, k))
        if C.degree < 2:
            continue
        for pc in _singular_points(C):
            s = s_fold_order(C, pc.point)
            n = sum(b.class_size for b in expand_branches(C, pc.point))
            counts["branches"] += 1
            if not (s >= 2 and n <= s):
                bad.append(("branches", c, pc.point))
    ok = not bad and all(counts.values())
    verdict(8, ok, "I = I_p + I^Sigma - 1 at {base} base-point probes, I = I_p + I^mobile at {mobile} probes, "
                   "r <= n for {series} series, branches <= s at {branches} singular points".format(**counts)
                   + (f"; failures {bad}" if bad else ""))


# ---------------------------------------------------------------- 9: adjoint arithmetic

def test_criterion_09_adjoint_arithmetic(verdict):
    bad = []
    for n in range(2, 13):
        b = adjoint_bound(n)
        expect = ((n - 1) * (n + 2) // 2, n * (n - 1), (n - 1) * (n - 2) // 2 + 1)
        chain = [b.step_ok(i) for i in range(1, b.max_steps + 2)]
        if (b.r1, b.n1, b.max_steps) != expect or not all(chain[:-1]) or chain[-1]:
            bad.append(n)
    verdict(9, not bad, "r1, n1, max_steps match for n = 2..12 and the chain stops exactly at max_steps"
                        + (f"; failures at n = {bad}" if bad else ""))


# ---------------------------------------------------------------- 10: determinism

CLI_RUNS = [
    ["run", str(ROOT / "corpus" / "demo.json")],
    ["bezout", "x^3 + y^3 - 3*x*y", "x^2 + y^2 - 1"],
    ["linsys", "Y^2*Z - X^3", "--system", "X, Y", "--member", "0,1", "--at", "0,0"],
    ["project", "--branch", "t, t^3, t^4", "--level", "2"],
    ["scan", "--family", "y - (x - s)^2", "--curve", "y", "--points", "5"],
]


def _cli_outputs(seed):
    outs = []
    for argv in CLI_RUNS:
        proc = subprocess.run([sys.executable, "-m", "branchlab", *argv, "--json", "--seed", str(seed)],
                              capture_output=True, timeout=600)
        outs.append((proc.returncode, proc.stdout))
    return outs


def test_criterion_10_determinism(verdict):
    first, second = _cli_outputs(5), _cli_outputs(5)
    same = first == second
    clean = all(code == 0 and out for code, out in first)
    size = sum(len(out) for _, out in first)
    verdict(10, same and clean, f"{len(CLI_RUNS)} CLI runs repeated in fresh processes, {size} bytes of JSON, "
                                + ("byte-identical" if same else "outputs differ")
                                + ("" if clean else "; a run failed"))
