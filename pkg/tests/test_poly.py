import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from firstintegrals.poly import Poly, STANDARD_RELATIONS, poly_parse, poly_to_json, poly_from_json
from firstintegrals.scalars import GaussianRational, I

X = Poly.var("x")
Y = Poly.var("y")
Z = Poly.var("z")
R = Poly.var("r")


def rand_poly(rng, nterms=4, nvars=3, maxdeg=3):
    names = ["x", "y", "z"][:nvars]
    p = Poly()
    for _ in range(nterms):
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        exps = {n: rng.randint(0, maxdeg) for n in names}
        p = p + Poly.monomial(c, **exps)
    return p


def test_arithmetic_basics():
    p = (X + Y) * (X - Y)
    assert p == X * X - Y * Y
    assert (p - p).is_zero()
    assert (X + 1) ** 3 == X**3 + 3 * X**2 + 3 * X + 1


def test_power_rule():
    p = X**2 * Y
    assert p.diff("x") == 2 * X * Y


def test_leibniz_random():
    rng = random.Random(7)
    for _ in range(30):
        p = rand_poly(rng)
        q = rand_poly(rng)
        s = rng.choice(["x", "y", "z"])
        assert (p * q).diff(s) == p.diff(s) * q + p * q.diff(s)


def test_radial_relation_reduction():
    # r^2 reduces to x^2+y^2+z^2; odd powers stay symbolic
    assert (R * R).reduce() == X**2 + Y**2 + Z**2
    assert (R**3).reduce() == (X**2 + Y**2 + Z**2) * R
    assert R.reduce() == R


def test_radial_chain_rule():
    # d/dx r = x/r represented as x * r^-1
    dr = R.diff("x")
    assert dr == Poly.monomial(1, x=1, r=-1)
    # d/dx r^-1 = -x r^-3
    rinv = Poly.var("r", -1)
    assert rinv.diff("x") == Poly.monomial(-1, x=1, r=-3)


def test_cleared_identity():
    # x^2/r^2 + y^2/r^2 + z^2/r^2 - 1 == 0 after clearing
    p = (X**2 + Y**2 + Z**2) * Poly.var("r", -2) - 1
    assert p.cleared().is_zero()


def test_split_by_t():
    t = Poly.var("t")
    a, b, c = Poly.var("a"), Poly.var("b"), Poly.var("c")
    p = a + b * t + c * t**2
    parts = p.split({"t"})
    assert parts[()] == a
    assert parts[(("t", 1),)] == b
    assert parts[(("t", 2),)] == c


def test_gaussian_coefficients():
    p = Poly.const(I) * X + Poly.const(GaussianRational(1, 0)) * Y
    q = p * p
    assert q == Poly.const(-1) * X**2 + Poly.const(GaussianRational(0, 2)) * X * Y + Y**2


def test_eval_with_radical():
    p = Poly.var("r", -1) * X  # x / r
    v = p.eval({"x": 3.0, "y": 4.0, "z": 0.0})
    assert abs(v - 0.6) < 1e-12


def test_subs_poly():
    p = X**2 + Y
    q = p.subs({"x": Y + 1})
    assert q == Y**2 + 3 * Y + 1


def test_parse_and_json_roundtrip():
    p = poly_parse("3/2 x^2 y - z + 1")
    assert p == Fraction(3, 2) * X**2 * Y - Z + 1
    assert poly_from_json(poly_to_json(p)) == p


@settings(max_examples=50, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 3), st.integers(0, 3))
def test_diff_linearity(a, b, m, n):
    p = Poly.monomial(1, x=m, y=1)
    q = Poly.monomial(1, x=n)
    lin = (a * p + b * q).diff("x")
    assert lin == a * p.diff("x") + b * q.diff("x")
