from fractions import Fraction

import pytest

from firstintegrals import linalg as la


def test_nullspace_simple():
    # x + y + z = 0, x - y = 0  ->  1-dim nullspace
    rows = [{0: Fraction(1), 1: Fraction(1), 2: Fraction(1)},
            {0: Fraction(1), 1: Fraction(-1)}]
    ns = la.nullspace(rows, 3)
    assert len(ns) == 1
    v = ns[0]
    assert v[0] + v[1] + v[2] == 0 and v[0] == v[1]


def test_rank_and_span():
    rows = [{0: Fraction(1)}, {1: Fraction(1)}, {0: Fraction(2), 1: Fraction(3)}]
    assert la.rank(rows, 3) == 2
    assert la.in_span([[1, 0, 0], [0, 1, 0]], [2, 3, 0], 3)
    assert not la.in_span([[1, 0, 0]], [0, 1, 0], 3)
    assert la.same_span([[1, 0], [0, 1]], [[1, 1], [1, -1]], 2)


def test_rational_roots():
    # (x-2)(x+1/3)(x^2+1) = 0
    p = [Fraction(1)]
    for r in (Fraction(2), Fraction(-1, 3)):
        p = la._times_linear(p, -r)
    p2 = [Fraction(0)] * (len(p) + 2)
    for i, c in enumerate(p):
        p2[i] += c          # * 1
        p2[i + 2] += c      # * x^2
    roots = la.rational_roots(p2)
    assert Fraction(2) in roots and Fraction(-1, 3) in roots


def test_spectral_roots_diagonal():
    # M(mu) = diag(mu - 2, mu - 2, mu + 3): rank drops at 2 and -3
    rows = [
        {0: [Fraction(-2), Fraction(1)]},
        {1: [Fraction(-2), Fraction(1)]},
        {2: [Fraction(3), Fraction(1)]},
    ]
    roots = la.spectral_roots(rows, 3)
    assert roots == [Fraction(-3), Fraction(2)]
    at2 = la.eval_param_rows(rows, Fraction(2))
    assert la.rank(at2, 3) == 1
    ns = la.nullspace(at2, 3)
    assert len(ns) == 2


def test_spectral_no_roots():
    rows = [{0: [Fraction(1), Fraction(1)]}, {1: [Fraction(1)]}]
    # M = [[1+mu,0],[0,1]] -> root at -1
    roots = la.spectral_roots(rows, 2)
    assert roots == [Fraction(-1)]


def test_solve_particular():
    rows = [{0: Fraction(1), 1: Fraction(1)}, {0: Fraction(1), 1: Fraction(-1)}]
    x = la.solve_particular(rows, [Fraction(3), Fraction(1)], 2)
    assert x == [Fraction(2), Fraction(1)]
    assert la.solve_particular([{0: Fraction(1)}, {0: Fraction(1)}],
                               [Fraction(1), Fraction(2)], 1) is None
