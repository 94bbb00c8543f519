from fractions import Fraction

import pytest

from firstintegrals import expr as ex
from firstintegrals import timedep as td
from firstintegrals.dynamics import FirstIntegral, fi_drift, integrate
from firstintegrals.poly import Poly

from test_autonomous import contains_fi


X, Y, Z = Poly.var("x"), Poly.var("y"), Poly.var("z")


def test_polynomial_omega_n0():
    # Q = q (isotropic): I0a = C vv with C Q = 0, I0b = KV part
    Q = [X, Y]
    b = [Fraction(1), Fraction(2)]  # omega = 1 + 2t
    fis = td.polynomial_omega_solve(Q, b, 0)
    # rotation KV: L Q = x(-y) + ... wait rotation (y,-x): LQ = yx - xy = 0
    M3 = ex.from_poly(Poly.monomial(1, x=1, vy=1) - Poly.monomial(1, y=1, vx=1))
    assert contains_fi(fis, M3)
    # C = rotation^2 KT has C Q = 0: M3^2 present
    M3sq = ex.from_poly((X * Poly.var("vy") - Y * Poly.var("vx")) ** 2)
    assert contains_fi(fis, M3sq)


def test_polynomial_omega_n1_kepler_like():
    # 3d: Q = nu q / r^(nu+2) with nu = 1 is not polynomial; use the
    # oscillator-type polynomial Q = q with omega linear: l=1, n=1 branch
    Q = [X, Y, Z]
    b = [Fraction(0), Fraction(1)]  # omega = t  (b0 = 0)
    fis = td.polynomial_omega_solve(Q, b, 1)
    assert isinstance(fis, list)
    for f in fis:
        assert f.branch == "I1"


def test_polynomial_omega_exponential_only_l1():
    Q = [X, Y]
    assert len(td.polynomial_omega_exponential(Q, [Fraction(1), Fraction(1),
                                                   Fraction(1)])) == 0


def test_polynomial_omega_exponential_l1():
    # 1d Q = x, omega = b0 + b1 t: lam^3 L = -2 b1 L' Q etc.
    Q = [X]
    res = td.polynomial_omega_exponential(Q, [Fraction(0), Fraction(-27, 2)])
    for f in res:
        assert f.branch == "Ie"


KEPQ3 = None


def test_t2_generic_angular_momentum():
    fis = td.generalized_kepler_tfis(1, {"family": "generic"})
    assert len(fis) == 3


@pytest.mark.parametrize("nu", [-2, 1, 2, 3])
def test_t2_constant(nu):
    fis = td.generalized_kepler_tfis(nu, {"family": "constant", "k": 1})
    labels = {f.label for f in fis}
    assert "H" in labels
    if nu == -2:
        assert "B11" in labels
    if nu == 1:
        assert "R1" in labels
    if nu == 2:
        assert {"I1", "I2"} <= labels


@pytest.mark.parametrize("nu", [-2, 1, 2, 4, -1])
def test_t2_polynomial_family(nu):
    fis = td.generalized_kepler_tfis(
        nu, {"family": "polynomial", "k": 1, "b0": 1, "b1": 1, "b2": 1})
    assert [f.label for f in fis] == ["Jnu"]


def test_t2_kepler_2k_identity():
    fis = td.generalized_kepler_tfis(
        1, {"family": "kepler-2K", "k": 2, "b0": 1, "b1": 1})
    by = {f.label: f.expression for f in fis}
    E2, A = by["E2"], [by["A1"], by["A2"], by["A3"]]
    x, y, z = (ex.sym(q) for q in ("x", "y", "z"))
    vx, vy, vz = (ex.sym(v) for v in ("vx", "vy", "vz"))
    L = [y * vz - z * vy, z * vx - x * vz, x * vy - y * vx]
    # A . L = 0
    AdotL = A[0] * L[0] + A[1] * L[1] + A[2] * L[2]
    assert ex.is_zero(AdotL)
    # 2 E2 L^2 + k^2 = A^2
    L2 = L[0] * L[0] + L[1] * L[1] + L[2] * L[2]
    ident = 2 * E2 * L2 + ex.const(4) - (A[0] * A[0] + A[1] * A[1] + A[2] * A[2])
    assert ex.is_zero(ident)


def test_t2_e2_reduces_to_hamiltonian():
    # b1 = 0: E2 = b0^2 H
    fis = td.generalized_kepler_tfis(
        1, {"family": "kepler-2K", "k": 3, "b0": 2, "b1": 0})
    by = {f.label: f.expression for f in fis}
    x, y, z = (ex.sym(q) for q in ("x", "y", "z"))
    vx, vy, vz = (ex.sym(v) for v in ("vx", "vy", "vz"))
    r = ex.sym("r")
    H = (vx * vx + vy * vy + vz * vz) / 2 \
        - ex.const(Fraction(3, 2)) * ex.pow_(r, Fraction(-1))
    assert ex.is_zero(by["E2"] - 4 * H)


def test_t2_kepler_3k():
    fis = td.generalized_kepler_tfis(
        1, {"family": "kepler-3K", "k": 1, "b0": 2, "b1": 1, "b2": 1})
    assert [f.label for f in fis] == ["E3"]


def test_t2_oscillator_f_identities():
    fis = td.generalized_kepler_tfis(-2, {"family": "oscillator-f", "c0": 2})
    by = {f.label: f.expression for f in fis}
    # d I42 / d theta = I41 (as expressions in theta)
    for i in (1, 2, 3):
        d = ex.differentiate(by[f"I42_{i}"], "theta")
        assert ex.is_zero(d - by[f"I41_{i}"])
    # Lambda_ij = I41_i I41_j + I42_i I42_j
    for (i, j) in [(1, 1), (1, 2), (2, 3)]:
        rec = by[f"I41_{i}"] * by[f"I41_{j}"] + by[f"I42_{i}"] * by[f"I42_{j}"]
        assert ex.is_zero(rec - by[f"Lam{i}{j}"])
    # L_ij = sqrt(2/c0) (I41_i I42_j - I41_j I42_i), c0 = 2
    x, y = ex.sym("x"), ex.sym("y")
    vx, vy = ex.sym("vx"), ex.sym("vy")
    L12 = x * vy - y * vx
    rec = by["I41_1"] * by["I42_2"] - by["I41_2"] * by["I42_1"]
    assert ex.is_zero(rec - L12)


def test_t2_oscillator_g():
    fis = td.generalized_kepler_tfis(-2, {"family": "oscillator-g"})
    assert len(fis) == 3


def test_reparameterize_phi_zero():
    rep = td.reparameterize(ex.const(0), ex.from_poly(Poly.monomial(1, t=2)))
    assert rep.symbolic
    assert ex.is_zero(rep.s_of_t - ex.sym("t"))


def test_reparameterize_phi_constant():
    t = ex.sym("t")
    rep = td.reparameterize(ex.const(Fraction(2)), ex.exp_(ex.const(4) * t))
    assert rep.symbolic


def test_reparameterize_k_over_t():
    t = ex.sym("t")
    # phi = -k/t with k = 3: s = t^-2 / (-2)
    rep = td.reparameterize(ex.const(-3) / t, ex.pow_(t, Fraction(-8)))
    assert rep.symbolic
    # k = 1: s = ln t
    rep1 = td.reparameterize(ex.const(-1) / t, ex.pow_(t, Fraction(-2)))
    assert isinstance(rep1.s_of_t, ex.Ln)


def test_reparameterize_fallback():
    t = ex.sym("t")
    rep = td.reparameterize(ex.sin_(t), ex.const(1))
    assert not rep.symbolic


def test_nonlinear_master_family():
    # mu = 3, phi = 0, c3 = 0: omega = (c1 + c2 t)^(-3)
    out = td.nonlinear1d_qfi(3, ex.const(0), c=(1, 1, 0))
    assert out["fi"].branch == "nonlinear mu=3"
    # full quadratic K with damping phi = -2/t
    t = ex.sym("t")
    out2 = td.nonlinear1d_qfi(2, ex.const(-2) / t, c=(0, 1, 1))
    assert out2["fi"] is not None


def test_nonlinear_mu2_free_function():
    out = td.nonlinear1d_mu2(c4=Fraction(1), c5=Fraction(2))
    assert out["fi"] is not None


def test_nonlinear_mu1_solution():
    assert td.nonlinear1d_mu1_solution()


def test_nonlinear_mu_minus_one_rejected():
    with pytest.raises(td.UnsupportedMu):
        td.nonlinear1d_qfi(-1, ex.const(0))


def test_lane_emden_all_seven():
    rows_a = td.lane_emden_family(1, 5)
    assert [r["case_id"] for r in rows_a] == ["case5", "case6", "case7"]
    rows_b = td.lane_emden_family(2, 5)
    assert [r["case_id"] for r in rows_b] == ["case2", "case3", "case4"]
    # k = (mu+3)/(mu-1): case 3 becomes constant-omega (first subcase of 1)
    rows_c = td.lane_emden_family(Fraction(8, 4), 5)
    assert any("constant" in r["note"] for r in rows_c)
    # k = (mu+3)/(mu+1): case 4 constant-omega (second subcase of 1)
    rows_d = td.lane_emden_family(Fraction(8, 6), 5)
    assert any("constant" in r["note"] for r in rows_d)


def test_lane_emden_case2_shape():
    rows = td.lane_emden_family(3, 2, A=Fraction(2))
    case2 = next(r for r in rows if r["case_id"] == "case2")
    t, x, vx = ex.sym("t"), ex.sym("x"), ex.sym("vx")
    I = ex.pow_(t, Fraction(6)) * vx * vx / 2 \
        + ex.const(Fraction(2, 3)) * ex.pow_(x, Fraction(3))
    assert ex.is_zero(case2["fi"].expression - I)


def test_central_branch_a():
    out = td.central_potential_fi(branch="a", g2=True, L3=Fraction(2))
    assert out["fi"].branch == "central-a"


def test_central_branch_b_with_F():
    chi = ex.sym("chi")
    F = ex.pow_(chi, Fraction(-2)) + 3 * chi * chi
    out = td.central_potential_fi(branch="b", g1=True, F=F, L3=Fraction(1))
    assert out["fi"].branch == "central-b"


def test_central_requires_generator():
    with pytest.raises(td.DegenerateGenerator):
        td.central_potential_fi(branch="a", g2=None)


def test_yukawa():
    out = td.yukawa_potential_fi(Fraction(1), (1, 0, 1), Fraction(1))
    assert out["fi"].branch == "yukawa"
    # the potential collapses to the Yukawa form A(t) e^(-B(t) r)/r
    t, rr = ex.sym("t"), ex.sym("x")
    g1 = ex.const(1) + t * t
    target = ex.pow_(g1, Fraction(-1, 2)) \
        * ex.exp_(ex.const(-1) * rr * ex.pow_(g1, Fraction(-1, 2))) / rr
    assert ex.is_zero(out["V"] - target)


def test_lewis_symbolic():
    system = td.lewis_system_symbolic(Fraction(2))
    I = td.lewis_invariant_expr(Fraction(2))
    assert system.certifies(I)


def test_lewis_numeric_drift():
    c0 = Fraction(2)
    system = td.lewis_system_numeric(c0)
    I = FirstIntegral.certified(td.lewis_invariant_expr(c0),
                                td.lewis_system_symbolic(c0))
    traj = integrate(system, [0.8, 1.1, 0.2, -0.1], (0.0, 12.0), tol=1e-13)
    fi = FirstIntegral(td.lewis_invariant_expr(c0))
    assert fi_drift(fi, traj) <= 1e-8


def test_bd_quintessence():
    rep = td.bd_quintessence_check()
    assert rep["exact_residual_zero"]
    assert rep["family_residual_matches"]
    assert rep["tracking_error"] <= 1e-6
    assert rep["pass"]
