"""Exact JSON encodings and plain-text tables for analysis results."""
from __future__ import annotations

import json
from fractions import Fraction

from .arith import AlgebraicNumber, FieldTower, PerturbationScalar, format_scalar, minimal_polynomial_rational, simplify
from .character import AlongBranch, Character, OsculatingFlag, PointClassification, SystemCharacter
from .linsys import FixedContribution, GnrSeries, ISigma, MobileMultiplicity, ScanResult, WeightedSet
from .local import IntersectionReport, NearbyCount, PointClass, PointMultiplicity
from .poly import CHART_VARS, MultiPoly, format_poly
from .puiseux import PuiseuxBranch
from .upoly import UPoly

SCHEMA = "branchlab-report/1"
DISPLAY_TERMS = 8


def scalar(x):
    """Rationals as "p/q" strings; algebraic numbers with their minimal polynomial."""
    x = simplify(x)
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, AlgebraicNumber):
        return {
            "value": format_scalar(x),
            "coords": _nested(x.coords()),
            "minimal_polynomial": [str(c) for c in minimal_polynomial_rational(x).c],
        }
    if isinstance(x, PerturbationScalar):
        return {"eps_function": str(x)}
    raise TypeError(f"cannot encode {type(x).__name__}")


def _nested(c):
    if isinstance(c, list):
        return [_nested(v) for v in c]
    return str(Fraction(c))


def tower(t: FieldTower) -> list:
    return [{"name": lv.name, "minpoly": [scalar(c) if c else "0" for c in lv.minpoly], "verified": lv.verified}
            for lv in t.levels]


def point(P) -> list:
    return [scalar(c) for c in P]


def series_text(s: UPoly, var: str = "t", terms: int = DISPLAY_TERMS, exact: bool = True) -> str:
    """Series through t^terms, with an O-term when more exists or is unknown."""
    parts = []
    for k in range(1, min(s.degree, terms) + 1 if s else 0):
        c = s[k]
        if not c:
            continue
        cs = format_scalar(c)
        if isinstance(c, AlgebraicNumber) and " " in cs:
            cs = f"({cs})"
        mono = var if k == 1 else f"{var}^{k}"
        parts.append(mono if cs == "1" else "-" + mono if cs == "-1" else f"{cs}*{mono}")
    if s and s[0]:
        parts.insert(0, format_scalar(s[0]))
    text = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    if not exact or (s and s.degree > terms):
        text += f" + O({var}^{terms + 1})"
    return text


def upoly(s: UPoly) -> list:
    return [scalar(c) if c else "0" for c in s.c]


def branch(b: PuiseuxBranch) -> dict:
    xv, yv = CHART_VARS[b.chart]
    return {
        "center": point(b.center),
        "chart": b.chart,
        "chart_vars": [xv, yv],
        "ramification": b.e,
        "class_size": b.class_size,
        "exact": b.exact,
        "truncation": b.N,
        "tower": tower(b.tower),
        "x": upoly(b.x),
        "y": upoly(b.y),
        "x_text": series_text(b.x),
        "y_text": series_text(b.y, exact=b.exact),
    }


def character(ch: Character, flag: OsculatingFlag | None = None) -> dict:
    out = {"alphas": list(ch.alphas), "pivots": list(ch.pivots)}
    if flag is not None:
        out["flag"] = [[scalar(c) for c in v] for v in flag.basis]
    return out


def point_class(pc: PointClass) -> dict:
    return {
        "point": point(pc.point),
        "class_size": pc.size,
        "tower": tower(pc.tower),
        "minimal_polynomials": [[str(c) for c in m.c] for m in pc.minimal_polynomials()],
    }


def intersection_report(rep: IntersectionReport) -> dict:
    return {
        "d": rep.d,
        "e": rep.e,
        "total": rep.total,
        "bezout_ok": rep.bezout_ok,
        "seed": rep.seed,
        "points": [
            dict(point_class(en.point), multiplicity=en.multiplicity, per_branch=list(en.per_branch),
                 resultant_multiplicity=en.resultant_multiplicity, resolved=en.resolved)
            for en in rep.entries
        ],
    }


def point_multiplicity(pm: PointMultiplicity) -> dict:
    return {
        "total": pm.total,
        "per_branch": pm.per_branch,
        "contacts": [{"branch": branch(c.branch), "order": c.order} for c in pm.contacts],
    }


def nearby(nc: NearbyCount) -> dict:
    return {
        "distinct": nc.distinct,
        "total": nc.total,
        "center_multiplicity": nc.center_multiplicity,
        "off_center_distinct": nc.off_center_distinct,
        "off_center_total": nc.off_center_total,
        "method": nc.method,
        "solutions": [
            {"valuation": None if s.valuation is None else str(s.valuation), "ramification": s.ramification,
             "class_size": s.class_size, "multiplicity": s.multiplicity}
            for s in nc.solutions
        ],
    }


def system_character(sc: SystemCharacter) -> dict:
    return {"jumps": list(sc.jumps), "betas": list(sc.betas)}


def along_branch(ab: AlongBranch) -> dict:
    return {"observed": ab.observed, "bound": ab.bound, "holds": ab.holds,
            "center_multiplicity": ab.center_multiplicity, "distinct": ab.distinct,
            "member": format_poly(ab.member) if isinstance(ab.member, MultiPoly) else None}


def classification(pc: PointClassification) -> dict:
    return {"label": pc.label, "s": pc.s,
            "branches": [{"class_size": n, "alphas": list(a), "tangent_slope": sl} for n, a, sl in pc.branches]}


def weighted(ws: WeightedSet) -> dict:
    return {"member": format_poly(ws.member), "total": ws.total,
            "points": [dict(point_class(pc), weight=m) for pc, m in ws.entries]}


def fixed(fc: FixedContribution) -> dict:
    return {"I_p": fc.total, "per_branch": list(fc.per_branch), "in_base": fc.in_base}


def mobile(mm: MobileMultiplicity) -> dict:
    return {"I": mm.I, "I_p": mm.I_p, "mobile": mm.mobile, "nearby_off_center": mm.nearby_off_center}


def isigma(r: ISigma) -> dict:
    return {"I_sigma": r.value, "I": r.I, "I_p": r.I_p, "direction": format_poly(r.direction), "seed": r.seed}


def series(g: GnrSeries) -> dict:
    return {"n": g.n, "r": g.r, "label": str(g),
            "removed": [{"point": point(P), "amount": a} for P, a in g.removed]}


def scan(r: ScanResult) -> dict:
    def row(P, s0, I, Is):
        return {"point": point(P), "parameter": scalar(s0), "I": I, "I_sigma": Is}

    return {
        "flagged": [row(c.point, c.parameter, c.I, c.I_sigma) for c in r.flagged],
        "checked": [row(*c) for c in r.checked],
        "skipped": [{"point": point(P), "reason": why} for P, why in r.skipped],
    }


def document(command: str, seed: int, result, version: str, timing: float | None = None) -> dict:
    doc = {"schema": SCHEMA, "tool_version": version, "command": command, "seed": seed, "result": result}
    if timing is not None:
        doc["timing_seconds"] = f"{timing:.3f}"
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)
