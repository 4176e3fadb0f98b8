"""The ``branchlab`` command line.

Every subcommand maps onto one analysis; ``run`` executes a JSON corpus of
named curves, systems, branches and analyses. Exit codes: 0 ok, 1 an
invariant check failed, 2 bad input, 3 a resource cap was hit.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from typing import Callable

from . import __version__
from . import report as rp
from .arith import factor_rational
from .character import (
    SpaceBranch,
    cayley_character,
    classify_point,
    direction_at_level,
    intersections_along_branch,
    predicted_projection,
    project_branch,
    system_character,
    tangent_line,
)
from .errors import BranchlabError, InputError, InvariantViolation, ParseError
from .linsys import (
    LinearSystem,
    adjoint_bound,
    base_locus_on_curve,
    coincident_mobile_scan,
    fixed_contribution,
    i_sigma,
    mobile_multiplicity,
    series_order_dim,
    weighted_set,
)
from .local import bezout_table, fulton_intersection, nearby_intersections, point_multiplicity, s_fold_order
from .poly import PlaneCurve, format_poly, parse_list, parse_poly, parse_scalar
from .puiseux import expand_branches

CORPUS_VERSION = 1


# --------------------------------------------------------------------------
# argument parsing helpers

def parse_point(text: str) -> tuple:
    """``"1/2,0"`` (affine) or ``"0:1:0"`` (projective)."""
    sep = ":" if ":" in text else ","
    parts = [p for p in text.split(sep)]
    if len(parts) not in (2, 3) or (sep == "," and len(parts) != 2):
        raise ParseError(f"bad point {text!r}: use x,y or X:Y:Z")
    return tuple(parse_scalar(p) for p in parts)


def parse_vector(text: str) -> list[Fraction]:
    return [parse_scalar(p) for p in text.split(",")]


def parse_points(text: str) -> list[tuple]:
    return [parse_point(p) for p in text.split(";") if p.strip()]


def parse_ledger(text: str) -> list:
    """``"0,0=2; 1,1=1"``: amounts removed at points."""
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        if "=" not in item:
            raise ParseError(f"ledger entries look like point=amount, got {item!r}")
        p, a = item.split("=", 1)
        out.append((parse_point(p.strip()), int(a)))
    return out


def _curve(params: dict) -> PlaneCurve:
    comps = params.get("components") or ()
    if isinstance(comps, str):
        comps = [c.strip() for c in comps.split(";") if c.strip()]
    return PlaneCurve.parse(params["curve"], comps, params.get("curve_name", ""))


def _seed(params: dict, seed: int) -> int:
    return int(params.get("seed", seed))


def rational_points(C: PlaneCurve, count: int, skip_singular: bool = True) -> list[tuple]:
    """Rational affine points found by slicing with x = 0, 1, -1, 2, ... and y = ...."""
    f = C.affine("z")
    found: list[tuple] = []
    seen = set()

    def add(P):
        if P in seen:
            return
        seen.add(P)
        if skip_singular and s_fold_order(C, P) != 1:
            return
        found.append(P)

    k = 0
    while len(found) < count and k < 200:
        a = Fraction((k + 1) // 2 * (1 if k % 2 else -1))
        k += 1
        for fixed, free in (("x", "y"), ("y", "x")):
            u = f.with_vars(("x", "y")).subs({fixed: a}, ("x", "y")).to_upoly(free)
            if not u:
                continue
            for q, _ in factor_rational(u):
                if q.degree == 1:
                    r = -q[0] / q[1]
                    add((a, r) if fixed == "x" else (r, a))
        if f.subs({"x": a}, ("x", "y")).is_constant() and not f.subs({"x": a}, ("x", "y")):
            for b in range(-3, 4):
                add((a, Fraction(b)))
    found.sort(key=lambda P: (abs(P[0]) + abs(P[1]), P))
    return found[:count]


# --------------------------------------------------------------------------
# analyses (shared by subcommands and corpus entries)

def op_branches(params: dict, seed: int):
    C = _curve(params)
    P = parse_point(params["at"])
    N = int(params["trunc"]) if params.get("trunc") else None
    bs = expand_branches(C, P, N)
    result = {"curve": format_poly(C.form), "point": rp.point(P), "branches": [rp.branch(b) for b in bs]}
    lines = [f"{len(bs)} branch(es) of {format_poly(C.form)} at {_ptxt(P)}"]
    for k, b in enumerate(bs, 1):
        xv, yv = rp.CHART_VARS[b.chart]
        lines.append(f"  [{k}] e={b.e} class={b.class_size} chart={b.chart} field={b.tower!r}")
        lines.append(f"      {xv} = {rp.series_text(b.x)}")
        lines.append(f"      {yv} = {rp.series_text(b.y, exact=b.exact)}")
    return result, lines


def op_character(params: dict, seed: int):
    if params.get("branch"):
        g = SpaceBranch.parse(params["branch"])
        ch, flag = cayley_character(g)
        result = {"branch": params["branch"], "character": rp.character(ch, flag)}
        lines = [f"character {ch}  pivots {list(ch.pivots)}"]
        if params.get("system"):
            sc = system_character(g, parse_list(params["system"], g.names))
            result["system"] = rp.system_character(sc)
            lines.append(f"system jumps {list(sc.jumps)}  betas {list(sc.betas)}")
        return result, lines
    C = _curve(params)
    P = parse_point(params["at"])
    out, lines = [], []
    for b in expand_branches(C, P):
        ch, flag = cayley_character(SpaceBranch.from_plane(b))
        entry = {"branch": rp.branch(b), "character": rp.character(ch, flag),
                 "tangent": format_poly(tangent_line(b))}
        out.append(entry)
        lines.append(f"character {ch}  class={b.class_size}  tangent {entry['tangent']} = 0")
    cl = classify_point(C, P)
    lines.append(f"point type: {cl.label} (s = {cl.s})")
    return {"curve": format_poly(C.form), "point": rp.point(P), "branches": out,
            "classification": rp.classification(cl)}, lines


def op_classify(params: dict, seed: int):
    C = _curve(params)
    P = parse_point(params["at"])
    cl = classify_point(C, P)
    return rp.classification(cl), [f"{cl.label} (s = {cl.s})"]


def op_intersect(params: dict, seed: int):
    C = _curve(params)
    F = parse_poly(params["form"])
    P = parse_point(params["at"])
    pm = point_multiplicity(C, F, P)
    result = rp.point_multiplicity(pm)
    lines = [f"I = {pm.total}  per branch {pm.per_branch}"]
    if params.get("verify_oracle"):
        ref = fulton_intersection(C.form, F, P)
        result["oracle"] = ref
        if ref != pm.total:
            raise InvariantViolation(f"branch sum {pm.total} != recursive oracle {ref}")
        lines.append(f"oracle agrees: {ref}")
    return result, lines


def op_nearby(params: dict, seed: int):
    C = _curve(params)
    P = parse_point(params["at"])
    fam = parse_poly(params["family"])
    nc = nearby_intersections(C, P, fam, params.get("param"), _seed(params, seed))
    return rp.nearby(nc), [
        f"distinct {nc.distinct}  total {nc.total}  at center {nc.center_multiplicity}  ({nc.method})"]


def op_bezout(params: dict, seed: int):
    C = _curve(params)
    F = parse_poly(params["form"])
    rep = bezout_table(C, F, _seed(params, seed))
    lines = [f"{'point':<40} {'class':>5} {'mult':>5}  per branch"]
    for en in rep.entries:
        lines.append(f"{_ptxt(en.point.point):<40} {en.class_size:>5} {en.multiplicity:>5}  {list(en.per_branch)}")
    lines.append(f"total {rep.total} = {rep.d}*{rep.e}")
    return rp.intersection_report(rep), lines


def _system(params: dict) -> LinearSystem:
    deg = params.get("degree")
    return LinearSystem.parse(params["system"], int(deg) if deg is not None else None)


def op_linsys(params: dict, seed: int):
    C = _curve(params)
    sigma = _system(params)
    s = _seed(params, seed)
    base = base_locus_on_curve(sigma, C, s)
    ledger = parse_ledger(params["ledger"]) if isinstance(params.get("ledger"), str) else params.get("ledger") or []
    ser = series_order_dim(sigma, C, [(parse_point(p) if isinstance(p, str) else p, a) for p, a in ledger])
    result = {"degree": sigma.degree, "dim": sigma.dim, "basis": [format_poly(f) for f in sigma.basis],
              "base_locus": [rp.point_class(pc) for pc in base], "series": rp.series(ser)}
    lines = [f"system of degree {sigma.degree}, dimension {sigma.dim}; series {ser}",
             f"base points on C: {[_ptxt(pc.point) for pc in base]}"]
    lam = parse_vector(params["member"]) if params.get("member") else None
    if lam is not None:
        ws = weighted_set(sigma, lam, C, s)
        result["weighted_set"] = rp.weighted(ws)
        lines.append(f"member {format_poly(ws.member)}: " + ", ".join(
            f"{_ptxt(pc.point)}^{m}" + (f" (x{pc.size})" if pc.size > 1 else "") for pc, m in ws.entries)
            + f"  total {ws.total}")
    if params.get("at"):
        P = parse_point(params["at"])
        fc = fixed_contribution(sigma, C, P)
        result["fixed"] = rp.fixed(fc)
        lines.append(f"I_p at {_ptxt(P)} = {fc.total}" + ("" if fc.in_base else " (not a base point)"))
        if lam is not None:
            mm = mobile_multiplicity(sigma, C, P, lam, cross_check=True, seed=s)
            isg = i_sigma(sigma, C, P, lam, s)
            result["mobile"] = rp.mobile(mm)
            result["i_sigma"] = rp.isigma(isg)
            lines.append(f"I = {mm.I}, I_mobile = {mm.mobile}, I_Sigma = {isg.value}")
    return result, lines


def op_project(params: dict, seed: int):
    g = SpaceBranch.parse(params["branch"])
    ch, flag = cayley_character(g)
    if params.get("direction"):
        v = parse_vector(params["direction"])
        level = flag.level_of(v)
        level = min(level, g.w)
    else:
        level = int(params["level"])
        v = direction_at_level(flag, level, g.w, random.Random(_seed(params, seed)))
    img = project_branch(g, v)
    got, _ = cayley_character(img)
    pred = predicted_projection(ch, level)
    result = {"character": rp.character(ch), "direction": [rp.scalar(c) for c in v], "level": level,
              "image": [rp.upoly(s) for s in img.series], "image_character": rp.character(got),
              "predicted": list(pred), "agrees": tuple(got.alphas) == tuple(pred)}
    if tuple(got.alphas) != tuple(pred):
        raise InvariantViolation(f"projected character {got} differs from the rule's {pred}")
    return result, [f"{ch} projected from level {level}: {got} (rule {tuple(pred)})"]


def op_along(params: dict, seed: int):
    g = SpaceBranch.parse(params["branch"])
    basis = parse_list(params["system"], g.names)
    fam = parse_poly(params["family"]) if params.get("family") else None
    ab = intersections_along_branch(g, basis, int(params["i"]), int(params["r"]), _seed(params, seed), fam)
    if not ab.holds:
        raise InvariantViolation(f"observed {ab.observed} below the bound {ab.bound}")
    return rp.along_branch(ab), [f"observed {ab.observed} >= bound {ab.bound}"]


def op_scan(params: dict, seed: int):
    C = PlaneCurve.parse(params["curve"])
    fam = parse_poly(params["family"])
    if params.get("at"):
        pts = parse_points(params["at"])
    else:
        pts = rational_points(C, int(params.get("points", 5)))
    res = coincident_mobile_scan(fam, C, pts, params.get("param"), _seed(params, seed))
    lines = [f"{len(res.flagged)} coincident mobile point(s) among {len(res.checked)} probes"]
    for c in res.flagged:
        lines.append(f"  {_ptxt(c.point)}: I = {c.I}, I_Sigma = {c.I_sigma}")
    return rp.scan(res), lines


def op_adjoint(params: dict, seed: int):
    n = int(params["n"])
    ab = adjoint_bound(n)
    steps = [ab.step_ok(i) for i in range(1, ab.max_steps + 2)]
    if not all(steps[:-1]) or steps[-1]:
        raise InvariantViolation("the inequality chain does not stop at max_steps")
    return {"n": n, "r1": ab.r1, "n1": ab.n1, "max_steps": ab.max_steps}, [
        f"r1 = {ab.r1}, n1 = {ab.n1}, max_steps = {ab.max_steps}"]


OPS: dict[str, Callable] = {
    "branches": op_branches,
    "character": op_character,
    "classify": op_classify,
    "intersect": op_intersect,
    "nearby": op_nearby,
    "bezout": op_bezout,
    "linsys": op_linsys,
    "project": op_project,
    "along": op_along,
    "scan": op_scan,
    "adjoint": op_adjoint,
}


def _ptxt(P) -> str:
    return "(" + (":" if len(P) == 3 else ",").join(rp.format_scalar(c) for c in P) + ")"


# --------------------------------------------------------------------------
# corpus files

def _unique_pairs(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r} in corpus")
        out[k] = v
    return out


def load_corpus(text: str) -> dict:
    try:
        doc = json.loads(text, object_pairs_hook=_unique_pairs)
    except json.JSONDecodeError as exc:
        raise ParseError(f"corpus is not valid JSON: {exc}") from exc
    if doc.get("version") != CORPUS_VERSION:
        raise ParseError(f"unsupported corpus version {doc.get('version')!r}")
    for key in ("curves", "systems", "branches"):
        doc.setdefault(key, {})
    names = [a.get("name") for a in doc.get("analyses", [])]
    if len(set(names)) != len(names) or None in names:
        raise ParseError("every analysis needs a unique name")
    return doc


def _resolve_refs(entry: dict, corpus: dict) -> dict:
    params = dict(entry)
    curve = params.get("curve")
    if isinstance(curve, str) and curve in corpus["curves"]:
        c = corpus["curves"][curve]
        params["curve_name"] = curve
        params["curve"] = c["poly"] if isinstance(c, dict) else c
        if isinstance(c, dict) and c.get("components"):
            params["components"] = c["components"]
    sysref = params.get("system")
    if isinstance(sysref, str) and sysref in corpus["systems"]:
        s = corpus["systems"][sysref]
        params["system"] = ", ".join(s["basis"]) if isinstance(s, dict) else s
        if isinstance(s, dict) and "degree" in s:
            params["degree"] = s["degree"]
    br = params.get("branch")
    if isinstance(br, str) and br in corpus["branches"]:
        params["branch"] = corpus["branches"][br]
    return params


def run_corpus(corpus: dict, seed: int) -> tuple[list, int]:
    results, code = [], 0
    for entry in corpus.get("analyses", []):
        op = entry.get("op")
        if op not in OPS:
            raise ParseError(f"unknown op {op!r} in analysis {entry.get('name')!r}")
        params = _resolve_refs(entry, corpus)
        try:
            res, _ = OPS[op](params, seed)
            results.append({"name": entry["name"], "op": op, "status": "ok", "result": res})
        except BranchlabError as exc:
            results.append({"name": entry["name"], "op": op, "status": "error",
                            "error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code})
            code = _worse(code, exc.exit_code)
    return results, code


def _worse(a: int, b: int) -> int:
    rank = {0: 0, 2: 1, 3: 2, 1: 3}
    return a if rank[a] >= rank[b] else b


# --------------------------------------------------------------------------
# argparse front end

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="branchlab", description="Exact branch-level intersection theory of plane curves.")
    ap.add_argument("--version", action="version", version=f"branchlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    common.add_argument("--seed", type=int, default=None, help="seed for pseudorandom choices")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = cmd("branches", "Puiseux branches of a curve at a point")
    p.add_argument("curve")
    p.add_argument("--at", required=True)
    p.add_argument("--trunc", type=int)
    p.add_argument("--components", help="factors of the curve, separated by ';'")

    p = cmd("character", "Cayley character of a branch")
    p.add_argument("curve", nargs="?")
    p.add_argument("--at")
    p.add_argument("--branch", help='parametrisation such as "t^2, t^3"')
    p.add_argument("--system", help="basis of a linear system, for its jumps along the branch")
    p.add_argument("--components")

    p = cmd("classify", "singularity type of a point")
    p.add_argument("curve")
    p.add_argument("--at", required=True)
    p.add_argument("--components")

    p = cmd("intersect", "local intersection multiplicity at a point")
    p.add_argument("curve")
    p.add_argument("form")
    p.add_argument("--at", required=True)
    p.add_argument("--verify-oracle", action="store_true", help="cross-check with the recursive algorithm")
    p.add_argument("--components")

    p = cmd("nearby", "intersections near a point with a one-parameter family")
    p.add_argument("curve")
    p.add_argument("--at", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--param")
    p.add_argument("--components")

    p = cmd("bezout", "all intersection points of two curves")
    p.add_argument("curve")
    p.add_argument("form")
    p.add_argument("--components")

    p = cmd("linsys", "series cut on a curve by a linear system")
    p.add_argument("curve")
    p.add_argument("--system", required=True, help='basis forms, e.g. "X, Y, Z"')
    p.add_argument("--degree", type=int)
    p.add_argument("--member", help="parameters of one member, comma separated")
    p.add_argument("--at", help="point for fixed and mobile multiplicities")
    p.add_argument("--ledger", help='removed amounts, e.g. "0,0=2"')
    p.add_argument("--components")

    p = cmd("project", "project a space branch from a direction")
    p.add_argument("--branch", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--direction")
    g.add_argument("--level", type=int)

    p = cmd("along", "intersections of a perturbed member along a branch")
    p.add_argument("--branch", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--i", dest="i", type=int, required=True)
    p.add_argument("--r", dest="r", type=int, required=True)
    p.add_argument("--family")

    p = cmd("scan", "search for coincident mobile points of a family")
    p.add_argument("--family", required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--at", help="explicit sample points separated by ';'")
    p.add_argument("--param")

    p = cmd("adjoint", "adjoint-series arithmetic for a curve of order n")
    p.add_argument("n", type=int)

    p = cmd("run", "run every analysis of a corpus file")
    p.add_argument("corpus")
    return ap


def default_seed(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("BRANCHLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"BRANCHLAB_SEED must be an integer, got {env!r}") from exc
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        seed = default_seed(args.seed)
        if args.command == "run":
            with open(args.corpus, encoding="utf-8") as fh:
                corpus = load_corpus(fh.read())
            results, code = run_corpus(corpus, seed)
            if args.json:
                doc = rp.document("run", seed, results, __version__,
                                  time.perf_counter() - start if args.timing else None)
                print(rp.dumps(doc))
            else:
                for r in results:
                    status = "ok" if r["status"] == "ok" else f"{r['error']}: {r['message']}"
                    print(f"{r['name']:<32} {r['op']:<10} {status}")
            return code
        params = {k: v for k, v in vars(args).items() if v is not None and k not in ("json", "seed", "timing")}
        if args.command == "character" and not params.get("branch") and not (params.get("curve") and params.get("at")):
            raise InputError("character needs --branch or a curve with --at")
        result, lines = OPS[args.command](params, seed)
        if args.json:
            doc = rp.document(args.command, seed, result, __version__,
                              time.perf_counter() - start if args.timing else None)
            print(rp.dumps(doc))
        else:
            print("\n".join(lines))
        return 0
    except BranchlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
