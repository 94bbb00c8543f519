from fractions import Fraction

import pytest

from firstintegrals import geometry as geo
from firstintegrals.poly import Poly


E2 = geo.DiagonalMetric.euclidean(2)
E3 = geo.DiagonalMetric.euclidean(3)


def test_kv_hv_basis_e2():
    basis = geo.kv_hv_basis(2)
    kinds = [k for _, k in basis]
    assert kinds.count("gradientKV") == 2
    assert kinds.count("nonGradientKV") == 1
    assert kinds.count("HV") == 1
    for vec, kind in basis:
        d = geo.sym_cov_derivative(vec, E2)
        if kind == "HV":
            # L_(a;b) = delta_ab
            assert d[(0, 0)] == Poly.const(1)
            assert d[(1, 1)] == Poly.const(1)
            assert d[(0, 1)].is_zero()
        else:
            assert d.is_zero()


def test_kv_hv_basis_e3():
    basis = geo.kv_hv_basis(3)
    kinds = [k for _, k in basis]
    assert kinds.count("gradientKV") == 3
    assert kinds.count("nonGradientKV") == 3
    assert kinds.count("HV") == 1
    for vec, kind in basis:
        d = geo.sym_cov_derivative(vec, E3)
        if kind != "HV":
            assert d.is_zero()


@pytest.mark.parametrize("dim,m,want", [(2, 2, 6), (2, 3, 10), (2, 4, 15), (3, 2, 20)])
def test_kt_basis_dimensions(dim, m, want):
    assert geo.kt_space_dimension(dim, m) == want
    basis = geo.kt_basis(dim, m)
    assert len(basis) == want
    g = geo.DiagonalMetric.euclidean(dim)
    for el in basis.elements:
        assert geo.verify_kt(el, g)
    assert geo.tensors_rank(basis.elements) == want


def test_unsupported_order():
    with pytest.raises(geo.UnsupportedOrder):
        geo.kt_basis(3, 3)
    with pytest.raises(geo.UnsupportedDim):
        geo.kv_hv_basis(4)


@pytest.mark.parametrize("dim,m", [(2, 2), (2, 3), (2, 4), (3, 2)])
def test_reducible_generator(dim, m):
    gen, generated = geo.reducible_kt_generator(dim, m)
    g = geo.DiagonalMetric.euclidean(dim)
    # derivative of the generator equals the stated generated tensor
    again = geo.sym_cov_derivative(gen, g)
    assert (again - generated).is_zero()
    # every generated KT lies in the span of the full basis
    basis = geo.kt_basis(dim, m)
    params = geo._generator_components(dim, m)[1]
    for p in params:
        one = {q: Fraction(1 if q == p else 0) for q in params}
        Tp = generated.subs_params(one)
        assert geo.verify_kt(Tp, g)
        assert geo.tensor_in_span(basis.elements, Tp)


def test_reducible_slices():
    # (2,2): generated = general KT with gamma = 0, 5-dimensional
    _, generated = geo.reducible_kt_generator(2, 2)
    params = geo._generator_components(2, 2)[1]
    gens = []
    for p in params:
        one = {q: Fraction(1 if q == p else 0) for q in params}
        gens.append(generated.subs_params(one))
    assert geo.tensors_rank(gens) == 5
    basis = geo.kt_basis(2, 2)
    slice_ = [el for el, name in zip(basis.elements, basis.parameters)
              if name != "gamma"]
    assert geo.tensors_same_span(gens, slice_)


def test_reducible_slice_23_24():
    for (dim, m), killed in [((2, 3), {"a1"}), ((2, 4), {"a1"})]:
        _, generated = geo.reducible_kt_generator(dim, m)
        params = geo._generator_components(dim, m)[1]
        gens = []
        for p in params:
            one = {q: Fraction(1 if q == p else 0) for q in params}
            T = generated.subs_params(one)
            if not T.is_zero():
                gens.append(T)
        basis = geo.kt_basis(dim, m)
        slice_ = [el for el, name in zip(basis.elements, basis.parameters)
                  if name not in killed]
        assert geo.tensors_same_span(gens, slice_)


def test_reducible_slice_32():
    _, generated = geo.reducible_kt_generator(3, 2)
    params = geo._generator_components(3, 2)[1]
    gens = []
    for p in params:
        one = {q: Fraction(1 if q == p else 0) for q in params}
        T = generated.subs_params(one)
        if not T.is_zero():
            gens.append(T)
    killed = {"a1", "a4", "a6", "a7", "a10", "a14"}
    basis = geo.kt_basis(3, 2)
    slice_ = [el for el, name in zip(basis.elements, basis.parameters)
              if name not in killed]
    assert geo.tensors_same_span(gens, slice_)


def test_cra46_spans_fle3():
    fam = geo.cra46_family()
    assert len(fam) == 20
    for el in fam.elements:
        assert geo.verify_kt(el, E3)
    assert geo.tensors_rank(fam.elements) == 20
    assert geo.tensors_same_span(fam.elements, geo.kt_basis(3, 2).elements)


def test_christoffel_flat_zero():
    gamma = geo.christoffel(E3)
    assert all(gamma[a][b][c].is_zero()
               for a in range(3) for b in range(3) for c in range(3))


def test_christoffel_curved_example():
    # ds^2 = z^2(dx^2+dy^2)+dz^2: geodesics xdd = -(2/z) xd zd, zdd = z(xd^2+yd^2)
    g = geo.DiagonalMetric(3, [Poly.monomial(1, z=2), Poly.monomial(1, z=2),
                               Poly.const(1)])
    gamma = geo.christoffel(g)
    assert gamma[0][0][2] == Poly.var("z", -1)
    assert gamma[2][0][0] == -Poly.var("z")
    assert gamma[1][1][2] == Poly.var("z", -1)
    assert gamma[2][1][1] == -Poly.var("z")
    assert gamma[0][0][0].is_zero()


def test_christoffel_polar_style():
    # diag(1, x^2): Gamma^y_xy = 1/x, Gamma^x_yy = -x  (brute-force oracle below)
    g = geo.DiagonalMetric(2, [Poly.const(1), Poly.monomial(1, x=2)])
    gamma = geo.christoffel(g)
    assert gamma[1][0][1] == Poly.var("x", -1)
    assert gamma[0][1][1] == -Poly.var("x")
    # oracle: defining formula with symbolic differentiation, diag metric
    names = ("x", "y")
    for a in range(2):
        for b in range(2):
            for c in range(2):
                term = Poly()
                if a == b:
                    term = term + g.diag[a].diff(names[c])
                if a == c:
                    term = term + g.diag[a].diff(names[b])
                if b == c:
                    term = term - g.diag[b].diff(names[a])
                expected = g.inverse_entry(a) * term * Fraction(1, 2)
                assert gamma[a][b][c] == expected


def test_rotation_kv_flat():
    L = geo.SymTensorField(2, 1, {(0,): Poly.var("y"), (1,): -Poly.var("x")})
    assert geo.sym_cov_derivative(L, E2).is_zero()


def test_metric_is_kt():
    g = geo.DiagonalMetric(3, [Poly.monomial(1, z=2), Poly.monomial(1, z=2),
                               Poly.const(1)])
    T = geo.SymTensorField(3, 2, {(0, 0): g.diag[0], (1, 1): g.diag[1],
                                  (2, 2): g.diag[2]})
    assert geo.verify_kt(T, g)


def test_curved_kt_nullspace_dimension():
    g = geo.DiagonalMetric(3, [Poly.monomial(1, z=2), Poly.monomial(1, z=2),
                               Poly.const(1)])
    basis = geo.kt_nullspace(g, 2, bounds={"x": (0, 2), "y": (0, 2), "z": (0, 4)})
    assert len(basis) == 7
    for T in basis:
        assert geo.verify_kt(T, g)


def test_curved_hv():
    # L = (z^2(b1 y + b2), -z^2(b1 x + b3), c1 z) has L_(a;b) = c1 g_ab
    g = geo.DiagonalMetric(3, [Poly.monomial(1, z=2), Poly.monomial(1, z=2),
                               Poly.const(1)])
    b1, b2, b3, c1 = Fraction(2), Fraction(3), Fraction(-1), Fraction(5)
    z2 = Poly.monomial(1, z=2)
    L = geo.SymTensorField(3, 1, {
        (0,): z2 * (b1 * Poly.var("y") + b2),
        (1,): -z2 * (b1 * Poly.var("x") + b3),
        (2,): c1 * Poly.var("z"),
    })
    d = geo.sym_cov_derivative(L, g)
    expected = geo.SymTensorField(3, 2, {(0, 0): c1 * g.diag[0],
                                         (1, 1): c1 * g.diag[1],
                                         (2, 2): c1 * g.diag[2]})
    assert (d - expected).is_zero()
