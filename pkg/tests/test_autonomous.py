from fractions import Fraction

import pytest

from firstintegrals import autonomous as au
from firstintegrals import expr as ex
from firstintegrals.dynamics import DynamicalSystem, FirstIntegral, independent_count
from firstintegrals.poly import Poly

P = Poly.monomial
x, y, z = Poly.var("x"), Poly.var("y"), Poly.var("z")
vx, vy, vz = Poly.var("vx"), Poly.var("vy"), Poly.var("vz")
t = Poly.var("t")


def fi_exprs(fis):
    return [f.expression for f in fis]


def contains_fi(fis, target):
    """target Expr lies in the rational span of the FI expressions.

    Exact check via polynomialization over a shared monomial grid.
    """
    from firstintegrals.expr import to_fraction, _PolyContext
    from firstintegrals.linalg import in_span
    ctx = _PolyContext()
    polys = []
    for e in fi_exprs(fis) + [target]:
        n, d, ctx = to_fraction(e, ctx)
        if not d.is_constant():
            n = n  # denominators are cleared jointly below
        polys.append((n, d))
    # common denominator
    den = Poly.const(1)
    for _, d in polys:
        den = den * d
    cleared = []
    for n, d in polys:
        other = Poly.const(1)
        for m, dd in polys:
            if dd is not d:
                other = other * dd
        cleared.append((n * other).reduce(ctx.relations))
    cols = sorted({m for p in cleared for m in p.terms})
    cix = {m: i for i, m in enumerate(cols)}
    vecs = []
    for p in cleared:
        v = [Fraction(0)] * len(cols)
        for m, c in p.terms.items():
            v[cix[m]] = c
        vecs.append(v)
    return in_span(vecs[:-1], vecs[-1], len(cols))


def test_geodesic_table_e2():
    # V=0: Integral-1 space = {C_ab v v} + {t^2/2 G_;ab vv - t G_,a v + G}
    V = Poly()
    fis = au.solve_qfis(V, 2)
    i1 = [f for f in fis if f.branch == "Integral1"]
    assert len(i1) == 11  # 6 KTs + 5 quadratic G's
    # energy and the time-dependent dilation FI are present
    H = ex.from_poly(P(Fraction(1, 2), vx=2) + P(Fraction(1, 2), vy=2))
    assert contains_fi(i1, H)
    G = P(Fraction(1, 2), x=2) + P(Fraction(1, 2), y=2)
    tdep = (P(Fraction(1, 2), t=2, vx=2) + P(Fraction(1, 2), t=2, vy=2)
            - P(1, t=1, x=1, vx=1) - P(1, t=1, y=1, vy=1) + G)
    assert contains_fi(i1, ex.from_poly(tdep))
    # Integral 2: -t B_(a;b) vv + B_a v over the 8-parameter family
    i2 = [f for f in fis if f.branch == "Integral2"]
    assert len(i2) == 8
    # Integral 3 empty for V = 0
    assert not [f for f in fis if f.branch == "Integral3"]


def test_geodesic_table_spans():
    # exact span equality with the directly constructed table families
    V = Poly()
    fis = [f for f in au.solve_qfis(V, 2) if f.branch == "Integral1"]
    from firstintegrals.geometry import kt_basis
    expected = []
    for el in kt_basis(2, 2).elements:
        expected.append(ex.from_poly(au.quad_form(el, 2)))
    # G quadratic family: G in {x^2/2, xy, y^2/2, x, y}
    for G in (P(Fraction(1, 2), x=2), P(1, x=1, y=1), P(Fraction(1, 2), y=2),
              P(1, x=1), P(1, y=1)):
        Gxx, Gxy, Gyy = G.diff("x").diff("x"), G.diff("x").diff("y"), G.diff("y").diff("y")
        e = (P(Fraction(1, 2), t=2) * (Gxx * vx * vx + 2 * Gxy * vx * vy + Gyy * vy * vy)
             - t * (G.diff("x") * vx + G.diff("y") * vy) + G)
        expected.append(ex.from_poly(e))
    exp_fis = [FirstIntegral(e) for e in expected]
    for f in fis:
        assert contains_fi(exp_fis, f.expression)
    for e in expected:
        assert contains_fi(fis, e)


KEPLER = P(-1, r=-1)  # V = -1/r  (k=1)


def test_kepler_qfis():
    fis = au.solve_qfis(KEPLER, 3)
    H = ex.from_poly(P(Fraction(1, 2), vx=2) + P(Fraction(1, 2), vy=2)
                     + P(Fraction(1, 2), vz=2) + KEPLER)
    M3 = ex.from_poly(P(1, x=1, vy=1) - P(1, y=1, vx=1))
    M1 = ex.from_poly(P(1, y=1, vz=1) - P(1, z=1, vy=1))
    R1 = ex.from_poly(
        x * (vy * vy + vz * vz) - vx * (y * vy + z * vz) + P(-1, x=1, r=-1))
    i1 = [f for f in fis if f.branch == "Integral1"]
    assert len(i1) == 10
    assert contains_fi(i1, H)
    assert contains_fi(i1, R1)
    i2 = [f for f in fis if f.branch == "Integral2"]
    assert contains_fi(i2, M3)
    assert contains_fi(i2, M1)
    assert not [f for f in fis if f.branch == "Integral3"]


def test_kepler_independence_count():
    fis = au.solve_qfis(KEPLER, 3)
    assert independent_count(fis, 3) == 5


OSC = P(-1, x=2) + P(-1, y=2) + P(-1, z=2)  # V = -k r^2, k=1


def test_oscillator_qfis():
    fis = au.solve_qfis(OSC, 3)
    i1 = [f for f in fis if f.branch == "Integral1"]
    # B_ij = v_i v_j - 2 q_i q_j  (k=1), six components
    for (i, j, names) in [(0, 0, ("x", "vx")), (1, 1, ("y", "vy"))]:
        q, v = names
        B = ex.from_poly(P(1, **{v: 2}) + P(-2, **{q: 2}))
        assert contains_fi(i1, B)
    B12 = ex.from_poly(P(1, vx=1, vy=1) + P(-2, x=1, y=1))
    assert contains_fi(i1, B12)
    # angular momentum squared combinations live in Integral 1 too
    M3sq = ex.from_poly((x * vy - y * vx) * (x * vy - y * vx))
    assert contains_fi(i1, M3sq)
    # spectral branch: mu = lambda^2 = 2k = 2 and mu = 8k = 8
    i3 = [f for f in fis if f.branch == "Integral3"]
    assert i3, "expected exponential FIs"
    mus = sorted({f.label for f in i3})
    assert any("mu=2" in m for m in mus)
    assert any("mu=8" in m for m in mus)


def test_oscillator_product_identity():
    # I3a+ * I3a- = B_aa symbolically (k=1: vdot = 2q, lambda^2 = 2)
    lam = ex.sqrt(ex.const(2))
    tt = ex.sym("t")
    for q, v in (("x", "vx"), ("y", "vy"), ("z", "vz")):
        ip = ex.exp_(lam * tt) * (ex.sym(v) - lam * ex.sym(q))
        im = ex.exp_(-1 * lam * tt) * (ex.sym(v) + lam * ex.sym(q))
        B = ex.from_poly(P(1, **{v: 2}) + P(-2, **{q: 2}))
        assert ex.is_zero(ip * im - B)


def test_integral3_nullspace_dimensions():
    # mu = 2k: nine of the twenty parameters are forced to zero (11 remain);
    # mu = 8k: six survive with a17 = 2 a4, a19 = 2 a1, a20 = 2 a7
    fis = au.solve_qfis_spectral(OSC, 3)
    by_mu = {}
    for f in fis:
        by_mu.setdefault(f.label, []).append(f)
    assert len(by_mu["I3(mu=2)"]) == 11
    assert len(by_mu["I3(mu=8)"]) == 6


def test_uniform_force_integral2():
    # V = x: Integral-2 has a nontrivial B branch (uniform force)
    V = P(1, x=1)
    cs = au.theorem1_conditions(V, 2, "integral2")
    ns = cs.nullspace()
    assert ns
    fis = [f for f in au.solve_qfis(V, 2) if f.branch == "Integral2"]
    # B = d/dy KV: I = vy (momentum conjugate to the force-free direction)
    assert contains_fi(fis, ex.sym("vy"))


def test_constant_shift_invariance():
    V1 = P(1, x=2) + P(1, y=2)
    V2 = V1 + 5
    f1 = au.solve_qfis(V1, 2)
    f2 = au.solve_qfis(V2, 2)
    assert len(f1) == len(f2)
    b1 = sorted(f.branch for f in f1)
    assert b1 == sorted(f.branch for f in f2)


def test_classify_linear_potential():
    V = P(2, x=1) + P(3, y=1)  # cx + lambda y
    rep = au.classify_2d_potential(V)
    assert rep["superintegrable"]
    assert len(rep["classI"]) == 2
    fis = rep["fis"]
    assert contains_fi(fis, ex.from_poly(vx + 2 * t))
    assert contains_fi(fis, ex.from_poly(vy + 3 * t))
    assert contains_fi(fis, ex.from_poly(
        P(Fraction(1, 2), vx=2) + P(2, x=1)))


def test_classify_separable():
    V = P(1, x=4) + P(1, y=2)  # F1(x) + F2(y), polynomial
    rep = au.classify_2d_potential(V)
    assert rep["separable"]
    assert rep["integrable"]
    assert contains_fi(rep["fis"], ex.from_poly(
        P(Fraction(1, 2), vx=2) + P(1, x=4)))


def test_classify_s1():
    # V = k/2 (x^2+y^2) + b/x^2 + c/y^2 with k=2, b=1, c=3
    V = P(1, x=2) + P(1, y=2) + P(1, x=-2) + P(3, y=-2)
    rep = au.classify_2d_potential(V)
    m = rep["s1_match"]
    assert m == {"k": 2, "b": 1, "c": 3}
    assert rep["superintegrable"]
    # I_s1a = M3^2 + 2b y^2/x^2 + 2c x^2/y^2
    M3sq = (x * vy - y * vx) * (x * vy - y * vx)
    Is1a = ex.from_poly(M3sq + 2 * P(1, y=2, x=-2) + 2 * P(3, x=2, y=-2))
    assert contains_fi(rep["fis"], Is1a)


def test_classify_class3_oscillator():
    # V = -(lambda^2/2) r^2 is the only Class III potential; lambda^2 = 1
    V = P(Fraction(-1, 2), x=2) + P(Fraction(-1, 2), y=2)
    rep = au.classify_2d_potential(V)
    assert rep["classIII"]
    assert any("exp" in d.get("expression", "") for d in rep["classIII"])


def test_inverse_noether_hamiltonian():
    V = P(Fraction(1, 2), x=2) + P(Fraction(1, 2), y=2)
    H = ex.from_poly(P(Fraction(1, 2), vx=2) + P(Fraction(1, 2), vy=2) + V)
    out = au.inverse_noether(H, V, 2)
    assert ex.equal(out["eta"][0], ex.from_poly(-vx))
    # f = -T + V
    expected_f = ex.from_poly(-P(Fraction(1, 2), vx=2) - P(Fraction(1, 2), vy=2) + V)
    assert ex.equal(out["f"], expected_f)


def test_inverse_noether_momentum():
    V = P(1, y=2)  # V(y): p_x conserved
    I = ex.sym("vx")
    out = au.inverse_noether(I, V, 2)
    assert ex.equal(out["eta"][0], ex.const(-1))
    assert ex.equal(out["eta"][1], ex.const(0))
    assert ex.is_zero(ex.differentiate(out["f"], "x"))


def test_inverse_noether_runge_lenz():
    R1 = ex.from_poly(
        x * (vy * vy + vz * vz) - vx * (y * vy + z * vz) + P(-1, x=1, r=-1))
    out = au.inverse_noether(R1, KEPLER, 3)
    assert out["noether_residual_zero"]


def test_nonpolynomial_rejected():
    with pytest.raises(au.NonPolynomialPotential):
        au.theorem1_conditions(Poly.var("w"), 2)
