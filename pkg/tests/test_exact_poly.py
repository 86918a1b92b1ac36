from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import poly_to_sympy
from transgress.errors import PolynomialError
from transgress.exact_poly import (
    GREVLEX,
    INFINITE,
    LEX,
    GaussRational,
    Ideal,
    Polynomial,
    block_order,
    colength,
    eliminate,
    format_polynomial,
    groebner,
    normal_form,
    parse_polynomial,
    saturate,
)

XY = ("x", "y")


def P(text, variables=XY):
    return parse_polynomial(text, variables)


def basis_texts(basis, order=GREVLEX):
    return sorted(b.to_text(order) for b in basis)


# ---------------------------------------------------------------- parsing


@pytest.mark.parametrize(
    "text",
    ["3*x^2*y - (1/2+1*i)*y + 7", "x*y^3 - x", "-(2/3-5*i)*x^4", "0", "y^2 + x^2"],
)
def test_parse_format_roundtrip(text):
    p = P(text)
    assert P(format_polynomial(p)) == p


def test_double_star_means_power():
    assert P("x**2 + 3*y") == P("x^2 + 3*y")


@pytest.mark.parametrize("bad", ["x^", "x^1/2", "q + 1", "x + + (1+i", ""])
def test_parse_rejects_malformed(bad):
    with pytest.raises(PolynomialError):
        P(bad)


def test_gauss_rational_exact():
    a = GaussRational(Fraction(1, 3), 2)
    assert a * a.inverse() == GaussRational(1)
    assert (a - a) == GaussRational(0)
    assert a.conjugate() * a == GaussRational(Fraction(1, 9) + 4)


# ---------------------------------------------------------------- normal forms


@pytest.mark.parametrize(
    "f, basis, order, expected",
    [
        ("x^3", ["x^2 - y"], LEX, "x*y"),
        ("x^2*y^2", ["x^2", "x*y", "y^2"], GREVLEX, "0"),
        ("y", ["x^2 - y"], LEX, "y"),
    ],
)
def test_normal_form_examples(f, basis, order, expected):
    assert normal_form(P(f), [P(b) for b in basis], order) == P(expected)


def test_normal_form_ring_mismatch():
    with pytest.raises(PolynomialError):
        normal_form(P("x"), [parse_polynomial("z", ("z",))])


# ---------------------------------------------------------------- groebner


@pytest.mark.parametrize(
    "gens, order, expected",
    [
        (["x^2 - y", "x*y - 1"], LEX, ["x - y^2", "y^3 - 1"]),
        (["x^2", "x*y", "y^2"], GREVLEX, ["x^2", "x*y", "y^2"]),
        (["x - 1"], LEX, ["x - 1"]),
    ],
)
def test_groebner_examples(gens, order, expected):
    assert basis_texts(groebner([P(g) for g in gens], order), order) == basis_texts([P(e) for e in expected], order)


@pytest.mark.parametrize(
    "gens",
    [
        ["x^2 + y^2 - 1", "x - y"],
        ["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"],
        ["x*y - 1", "y^2 - x"],
        ["(1+1*i)*x^2 + y", "x*y^2 - (0+1*i)"],
    ],
)
@pytest.mark.parametrize("order_name", ["lex", "grevlex"])
def test_groebner_matches_sympy(gens, order_name):
    ours = groebner([P(g) for g in gens], LEX if order_name == "lex" else GREVLEX)
    x, y = sp.symbols("x y")
    theirs = sp.groebner([poly_to_sympy(P(g))[0] for g in gens], x, y, order=order_name)
    ours_sp = sorted((sp.expand(poly_to_sympy(b)[0]) for b in ours), key=sp.default_sort_key)
    theirs_sp = sorted((sp.expand(b) for b in theirs.exprs), key=sp.default_sort_key)
    # both reduced; compare up to the monic normalization
    norm = lambda e: sp.expand(e / sp.Poly(e, x, y).LC(order=order_name))
    assert sorted(map(norm, ours_sp), key=sp.default_sort_key) == sorted(map(norm, theirs_sp), key=sp.default_sort_key)


def test_groebner_canonical_under_permutation():
    gens = [P("x^3 - 2*x*y"), P("x^2*y - 2*y^2 + x")]
    g1 = groebner(gens, GREVLEX)
    g2 = groebner(list(reversed(g1)) + gens, GREVLEX)
    assert basis_texts(g1) == basis_texts(g2)


def test_ideal_cache_and_membership():
    I = Ideal.parse(XY, ["x^2 - y", "x*y - 1"])
    assert I.groebner(LEX) == I.groebner(LEX)
    assert I.contains(P("y^3 - 1"), LEX)
    assert not I.contains(P("y - 1"), LEX)


# ---------------------------------------------------------------- elimination and saturation


@pytest.mark.parametrize(
    "gens, expected",
    [
        (["u - t*x^2", "v - t*x*y"], ["x*v - y*u"]),
        (["u - t*x^2", "v - t*y^3"], ["y^3*u - x^2*v"]),
    ],
)
def test_eliminate_examples(gens, expected):
    ring = ("t", "u", "v", "x", "y")
    out = eliminate(Ideal.parse(ring, gens), ["t"]).in_ring(("u", "v", "x", "y"))
    want = Ideal.parse(("u", "v", "x", "y"), expected)
    assert out.same_as(want)


def test_eliminate_empty_drop_is_identity():
    I = Ideal.parse(("x",), ["x - 1"])
    assert eliminate(I, []).same_as(I)


def test_eliminate_monotone():
    ring = ("t", "x", "y")
    I = Ideal.parse(ring, ["x - t^2", "y - t^3"])
    out = eliminate(I, ["t"])
    for g in out.groebner():
        assert I.contains(g.rename(ring))


@pytest.mark.parametrize(
    "gens, f, expected",
    [
        (["x*y", "x*z"], "x", ["y", "z"]),
        (["x^2"], "y", ["x^2"]),
        (["x^2"], "x", ["1"]),
    ],
)
def test_saturate_examples(gens, f, expected):
    ring = ("x", "y", "z")
    out = saturate(Ideal.parse(ring, gens), P(f, ring))
    assert out.same_as(Ideal.parse(ring, expected))


def test_saturate_by_zero_rejected():
    with pytest.raises(PolynomialError):
        saturate(Ideal.parse(XY, ["x"]), Polynomial(XY))


# ---------------------------------------------------------------- colength


def test_colength_examples():
    assert colength(Ideal.parse(XY, ["x^2", "y^3"])) == 6
    assert colength(Ideal.parse(XY, ["x"])) is INFINITE
    assert colength(Ideal.parse(XY, ["1"])) == 0


@pytest.mark.parametrize("a", range(1, 6))
@pytest.mark.parametrize("b", range(1, 6))
def test_colength_product_law(a, b):
    assert colength(Ideal.parse(XY, [f"x^{a}", f"y^{b}"])) == a * b


def test_colength_independent_of_order():
    I = Ideal.parse(XY, ["x^2 + y^2 - 1", "x - y"])
    assert colength(I, LEX) == colength(I, GREVLEX) == 2


def test_block_order_eliminates_front_block():
    ring = ("t", "x", "y")
    basis = groebner([P("x - t^2", ring), P("y - t^3", ring)], block_order(["t"]))
    free = [g for g in basis if not g.involves("t")]
    assert [g.rename(("x", "y")).monic(GREVLEX) for g in free] == [P("x^3 - y^2").monic(GREVLEX)]


# ---------------------------------------------------------------- properties

coef = st.builds(
    GaussRational,
    st.fractions(min_value=-5, max_value=5, max_denominator=4),
    st.fractions(min_value=-5, max_value=5, max_denominator=4),
)
mono = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(mono, coef, max_size=4).map(lambda d: Polynomial(XY, d))


@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert f - f == Polynomial(XY)


@given(polys, polys)
def test_ideal_closure_under_basis(f, g):
    G = groebner([P("x^2 - y"), P("x*y - 1")], GREVLEX)
    a = f * G[0] + g * G[-1]
    assert normal_form(a, G, GREVLEX).is_zero()
    assert normal_form(a * f, G, GREVLEX).is_zero()


@given(polys)
def test_normal_form_remainder_is_reduced(f):
    G = groebner([P("x^2 - y"), P("x*y - 1")], LEX)
    r = normal_form(f, G, LEX)
    lead = [g.leading_monomial(LEX) for g in G]
    for m, _ in r.items():
        assert not any(all(a <= b for a, b in zip(l, m)) for l in lead)
    assert normal_form(f - r, G, LEX).is_zero()
