import os

import sympy as sp
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "40")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def poly_to_sympy(p):
    """Independent representation of an exact polynomial for oracle checks."""
    syms = sp.symbols(p.variables)
    expr = sp.Integer(0)
    for mono, c in p.items():
        coef = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        term = coef
        for s, e in zip(syms, mono):
            term *= s**e
        expr += term
    return sp.expand(expr), syms
