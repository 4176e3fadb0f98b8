"""Shared curves, forms, branches and families used across the test suite."""
from fractions import Fraction

# (curve, form) pairs for Bezout tables
BEZOUT_PAIRS = [
    ("Y^2*Z - X^3", "Y"),
    ("Y^2*Z - X^3", "X"),
    ("Y^2*Z - X^3", "Z"),
    ("y^2 - x^2 - x^3", "y - x"),
    ("y^2 - x^2 - x^3", "x"),
    ("y^2 - x^3", "y^2 - x^2 - x^3"),
    ("y^2 - x^3", "x^2 - y^3"),
    ("x^2 + y^2 - 1", "x^2 + 4*y^2 - 4"),
    ("x^2 + y^2 - 1", "(x - 1)^2 + y^2 - 1"),
    ("y - x^2", "y - 2*x + 1"),
    ("y^2 - x^4 + y^4", "y"),
    ("y^2 - x^4 + y^4", "x"),
    ("y^2 - x^4 + y^4", "y - x"),
    ("x^3 + y^3 - 3*x*y", "y - x"),
    ("x^3 + y^3 - 3*x*y", "x^2 + y^2 - 1"),
    ("x^4 + y^4 - 1", "x^2 + y^2 - 1"),
    ("(x^2 + y^2)^2 - x^2 + y^2", "x^2 + y^2 - 2*x"),
    ("y^5 - x^2", "y^2 - x^3"),
    ("(y^2 - x^3)^2 - x^5*y", "y"),
    ("(y^2 - x^3)^2 - x^5*y", "y^2 - x^3"),
    ("(y^2 - x^3)^2 - x^5*y", "x*y*(x - 1)*(y - 1)"),
    ("x^4 + y^4 - 1", "x*y*(x - y)*(x + y)*(x - 2)*(y - 2)"),
    ("y^2 - x^3 + x", "y^2 - x^3 - x + 1"),
    ("y*(y - x^2)*(y + x^2)", "x^3 - y"),
]

# parametrised branches at the origin, plane (w=2) and space (w=3, 4)
BRANCHES = [
    "t^2, t^3",
    "t, t^2",
    "t^3, t^5",
    "t^2, t^5 + t^6",
    "t, t^4 - t^5",
    "t, t^2, t^3",
    "t, t^3, t^4",
    "t^2, t^3, t^7",
    "t + t^2, t^3 - t^4, 2*t^5",
    "t, t^2, t^3, t^4",
    "t^2, t^3, t^5, t^7",
    "t^3, t^4 + t^5, t^5, t^8 - t^6",
]

SPACE_BRANCHES = [b for b in BRANCHES if b.count(",") >= 2]

# (family in the parameter s, curve, sample points); each family is linear in s
LINEAR_FAMILIES = [
    ("y - x^2 - s", "y", [(-2, 0), (0, 0), (1, 0), (3, 0), (Fraction(1, 2), 0)]),
    ("y - 2 - s*(x - 3)", "x^2 + y^2 - 1", None),
    ("y - s*x", "y - x^2 - 1", None),
    ("x - s", "x^2 + y^2 - 1", None),
    ("x + s*y - 3*s", "x^2 + y^2 - 1", None),
    ("y - s", "y^2 - x^3", None),
    ("y - s*x^2", "x^2 + 4*y^2 - 4", [(2, 0), (-2, 0), (Fraction(6, 5), Fraction(4, 5)), (Fraction(-6, 5), Fraction(-4, 5))]),
    ("x^2 + y^2 - s", "y - x", None),
    ("y - x - s*(x^2 + 1)", "y^2 - x^2 - x^3", None),
    ("x*y - s", "x^3 + y^3 - 3*x*y",
     [(Fraction(3, 2), Fraction(3, 2)), (Fraction(2, 3), Fraction(4, 3)), (Fraction(6, 7), Fraction(-12, 7)),
      (Fraction(4, 3), Fraction(2, 3))]),
    ("s*x + (1 - s)*y - 1", "y - x^3", [(2, 8), (-2, -8), (3, 27), (Fraction(1, 2), Fraction(1, 8))]),
    ("y - s*(x - 2)", "x^2 - y^2 - 1",
     [(Fraction(5, 3), Fraction(4, 3)), (Fraction(-5, 3), Fraction(4, 3)), (Fraction(5, 4), Fraction(3, 4)), (1, 0)]),
]

# the squared family: every point (a, 0) of y = 0 is a coincident mobile point
SQUARED_FAMILY = ("y - (x - s)^2", "y")
