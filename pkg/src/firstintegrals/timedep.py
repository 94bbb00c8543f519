"""Time-dependent systems q''^a = -Gamma v v - omega(t) Q^a(q).

Covers: the polynomial-omega theorem (time-polynomial family plus the
lambda^3-eigenproblem that exists only for linear omega), the
generalized-Kepler table families, damping reparameterization, the 1d
nonlinear equation x'' = -omega x^mu + phi x', the Lane-Emden family, the
time-dependent central potentials, and the Brans-Dicke quintessence check.

Free functions enter as opaque symbols with declared time derivatives; all
emitted first integrals are certified symbolically against the defining
relations before they are returned.
"""

from __future__ import annotations

from fractions import Fraction

from . import expr as ex
from .autonomous import ConditionSystem, euler_antiderivative, quad_form, \
    vec_dot, vec_dot_v, vec_dot_row
from .damped import SpectralResult, _sym_grad, _vector_ansatz
from .dynamics import (DynamicalSystem, FirstIntegral, QNAMES, VNAMES,
                       fi_drift, integrate)
from .geometry import COORDS, SymTensorField, UnsupportedOrder, kt_basis, \
    generator_vector_basis, kv_hv_basis
from .linalg import eval_param_rows, nullspace, spectral_roots
from .poly import Poly


class UnsupportedFamily(ValueError):
    pass


class UnsupportedMu(ValueError):
    pass


class DegenerateGenerator(ValueError):
    pass


class TimeForce:
    """omega(t) Expr, polynomial or central Q components, optional damping."""

    def __init__(self, omega, Q, phi=None):
        if isinstance(omega, Poly) and omega.is_zero():
            raise ValueError("omega must not vanish identically")
        self.omega = omega
        self.Q = list(Q)
        self.phi = phi

    def system(self, metric=None, derivation=None):
        return DynamicalSystem.time_forced(ex._as_expr(self.omega), self.Q,
                                           metric=metric) \
            if derivation is None else _forced_system(self, derivation)


def _forced_system(tf, derivation):
    dim = len(tf.Q)
    accel = [ex.const(-1) * ex._as_expr(tf.omega) * ex._as_expr(tf.Q[a])
             for a in range(dim)]
    return DynamicalSystem(dim, accel, derivation=derivation)


# -- Theorem: polynomial omega ---------------------------------------------------------


def polynomial_omega_solve(Q, b, n, certify=True):
    """QFIs of q''^a = -omega(t) Q^a with omega = b0 + b1 t + ... + bl t^l.

    Supports time degrees n = 0 and n = 1 of the I_n family plus the
    exponential family I_e (which exists only for l = 1).  Q must be
    polynomial on flat E^2 or E^3.
    """
    dim = len(Q)
    names = COORDS[dim]
    ell = len(b) - 1
    if ell < 1 or b[-1] == 0:
        raise UnsupportedFamily("omega must be polynomial of degree >= 1")
    omega_poly = Poly()
    for r, br in enumerate(b):
        omega_poly = omega_poly + Poly.monomial(br, t=r)
    system = DynamicalSystem.time_forced(ex.from_poly(omega_poly), Q)
    out = []
    kb = kt_basis(dim, 2)
    kvs = [vec for vec, kind in kv_hv_basis(dim) if kind.endswith("KV")]
    t = Poly.var("t")

    if n == 0:
        # I0: C0 a KT with C0 Q = 0, L0 a KV with L0 Q = s
        C0, cp = _param_comb(kb.elements, "c")
        L0, lp = _param_comb(kvs, "k")
        unknowns = cp + lp
        cs = ConditionSystem(unknowns)
        ix = {u: i for i, u in enumerate(unknowns)}
        for a in range(dim):
            row = vec_dot_row(C0, Q, a, dim)
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "C0 Q = 0")
        LQ = vec_dot(L0, Q, dim)
        for nm in names:
            row = LQ.diff(nm)
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "L0 Q const")
        for vec in cs.nullspace():
            vals = dict(zip(unknowns, vec))
            C0v = C0.subs_params(vals)
            L0v = L0.subs_params(vals)
            s = vec_dot(L0v, Q, dim)
            Ipoly = quad_form(C0v, dim) + vec_dot_v(L0v, dim)
            for r, br in enumerate(b):
                Ipoly = Ipoly + s * br * t ** (r + 1) * Fraction(1, r + 1)
            out.append(_emit(Ipoly, system, certify, "I0"))
    elif n == 1:
        pairs, _ = generator_vector_basis(dim)
        C0, cp = _param_comb(kb.elements, "c")
        L0, l0p = _param_comb([p[0] for p in pairs], "g")
        L0d, _ = _param_comb([p[1] for p in pairs], "g")
        L1, l1p = _param_comb(kvs, "k")
        unknowns = cp + l0p + l1p
        cs = ConditionSystem(unknowns)
        ix = {u: i for i, u in enumerate(unknowns)}
        L1Q = vec_dot(L1, Q, dim)
        for nm in names:
            row = L1Q.diff(nm)
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "L1 Q const")
        L0Q = vec_dot(L0, Q, dim)
        for a in range(dim):
            row = L0Q.diff(names[a]) \
                + 2 * (ell + 1) * vec_dot_row(L0d, Q, a, dim)
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "(L0 Q)_,a")
        for k in range(1, ell + 1):
            for a in range(dim):
                row = k * b[k] * vec_dot_row(C0, Q, a, dim) \
                    + (ell - k + 1) * b[k - 1] * vec_dot_row(L0d, Q, a, dim)
                if not row.cleared().is_zero():
                    cs.add_rows(row, ix, f"b{k} chain")
        # curl of G_,a = 2 b0 C0 Q - L1
        W = [2 * b[0] * vec_dot_row(C0, Q, a, dim) - L1[(a,)]
             for a in range(dim)]
        for a in range(dim):
            for c in range(a + 1, dim):
                row = W[a].diff(names[c]) - W[c].diff(names[a])
                if not row.cleared().is_zero():
                    cs.add_rows(row, ix, "curl G")
        for vec in cs.nullspace():
            vals = dict(zip(unknowns, vec))
            C0v = C0.subs_params(vals)
            L0v = L0.subs_params(vals)
            L0dv = L0d.subs_params(vals)
            L1v = L1.subs_params(vals)
            s = vec_dot(L1v, Q, dim)
            L0Qv = vec_dot(L0v, Q, dim)
            Ipoly = quad_form(C0v, dim) - quad_form(L0dv, dim) * t \
                + vec_dot_v(L1v, dim) * t + vec_dot_v(L0v, dim)
            for r, br in enumerate(b):
                Ipoly = Ipoly + s * br * t ** (r + 2) * Fraction(1, r + 2)
                Ipoly = Ipoly + L0Qv * br * t ** (r + 1) * Fraction(1, r + 1)
            Wv = [2 * b[0] * vec_dot_row(C0v, Q, a, dim) - L1v[(a,)]
                  for a in range(dim)]
            Ipoly = Ipoly + euler_antiderivative(Wv, dim)
            out.append(_emit(Ipoly, system, certify, "I1"))
    else:
        raise UnsupportedOrder("polynomial-omega discovery supports n = 0, 1")
    return out


def polynomial_omega_exponential(Q, b, certify=True, strict=False):
    """The I_e family: exists only when omega = b0 + b1 t (degree one).

    lam^3 L_a = -2 b1 L_(a;b) Q^b and (L Q)_,a = (lam^3/b1) L_a; the
    eigenproblem runs in nu = lam^3.
    """
    dim = len(Q)
    names = COORDS[dim]
    ell = len(b) - 1
    if ell != 1:
        return SpectralResult()  # empty: the paper's I_e needs linear omega
    b0, b1 = b
    pairs, _ = generator_vector_basis(dim)
    L, lp = _param_comb([p[0] for p in pairs], "g")
    Ld, _ = _param_comb([p[1] for p in pairs], "g")
    cs = ConditionSystem(lp, parametric=True)
    ix = {u: i for i, u in enumerate(lp)}
    mu = Poly.var("mu")   # nu = lam^3
    for a in range(dim):
        row = mu * L[(a,)] + 2 * b1 * vec_dot_row(Ld, Q, a, dim)
        if not row.cleared().is_zero():
            cs.add_rows(row, ix, "lam^3 L = -2 b1 L' Q", mu="mu")
    LQ = vec_dot(L, Q, dim)
    for a in range(dim):
        row = b1 * LQ.diff(names[a]) - mu * L[(a,)]
        if not row.cleared().is_zero():
            cs.add_rows(row, ix, "(LQ)_,a = lam^3/b1 L", mu="mu")
    omega_poly = Poly.const(b0) + Poly.monomial(b1, t=1)
    system = DynamicalSystem.time_forced(ex.from_poly(omega_poly), Q)
    res = spectral_roots(cs.rows, len(lp), full=True, strict=strict)
    out = SpectralResult()
    out.unresolved = res["unresolved"]
    tt = ex.sym("t")
    for nu in res["roots"]:
        if nu == 0:
            continue
        lam = ex.pow_(ex.const(nu), Fraction(1, 3))
        rows = eval_param_rows(cs.rows, nu)
        for vec in nullspace(rows, len(lp)):
            vals = dict(zip(lp, vec))
            Lv = L.subs_params(vals)
            Ldv = Ld.subs_params(vals)
            LQv = vec_dot(Lv, Q, dim)
            e = (ex.const(-1) * ex.exp_(lam * tt) * ex.from_poly(quad_form(Ldv, dim))
                 + lam * ex.exp_(lam * tt) * ex.from_poly(vec_dot_v(Lv, dim))
                 + (ex.const(b0) - ex.const(b1) / lam) * ex.exp_(lam * tt)
                 * ex.from_poly(LQv)
                 + ex.const(b1) * tt * ex.exp_(lam * tt) * ex.from_poly(LQv))
            if certify:
                out.append(FirstIntegral.certified(e, system, branch="Ie",
                                                   label=f"Ie(lam^3={nu})"))
            else:
                out.append(FirstIntegral(e, branch="Ie"))
    return out


def _param_comb(elements, prefix):
    params = [f"{prefix}{i}" for i in range(len(elements))]
    dim = elements[0].dim
    rank_ = elements[0].rank
    comp = {}
    for p, el in zip(params, elements):
        for idx, pol in el.components.items():
            comp.setdefault(idx, Poly())
            comp[idx] = comp[idx] + Poly.var(p) * pol
    return SymTensorField(dim, rank_, comp), params


def _emit(Ipoly, system, certify, branch):
    e = ex.from_poly(Ipoly)
    if certify:
        return FirstIntegral.certified(e, system, order=2,
                                       time_degree=Ipoly.degree("t"),
                                       branch=branch)
    return FirstIntegral(e, order=2, branch=branch)


# -- generalized Kepler table ---------------------------------------------------------


def _kepler_Q(nu):
    """Q^a = nu q^a / r^(nu+2) for V = -omega(t)/r^nu on E^3."""
    return [Poly.monomial(nu, **{q: 1, "r": -(nu + 2)}) for q in QNAMES]


def generalized_kepler_tfis(nu, spec, certify=True):
    """Emit the Table-T2 row for the requested omega family.

    spec: {"family": ..., params}; families: "generic" (angular momentum),
    "constant" (k), "polynomial" (k (b0+b1 t+b2 t^2)^((nu-2)/2)),
    "kepler-2K", "kepler-3K" (nu=1), "oscillator-f", "oscillator-g" (nu=-2).
    Free functions come in as opaque symbols with a derivation chain.
    """
    if nu == 0:
        raise UnsupportedFamily("nu must be nonzero")
    family = spec["family"]
    t = ex.sym("t")
    x, y, z = (ex.sym(q) for q in QNAMES)
    vx, vy, vz = (ex.sym(v) for v in VNAMES)
    qv = [x, y, z]
    vv = [vx, vy, vz]
    r = ex.sym("r")
    Q = _kepler_Q(nu)
    out = []

    def rpow(k):
        return ex.pow_(r, Fraction(k))

    L = [qv[1] * vv[2] - qv[2] * vv[1],
         qv[2] * vv[0] - qv[0] * vv[2],
         qv[0] * vv[1] - qv[1] * vv[0]]
    v2 = vx * vx + vy * vy + vz * vz
    qdotv = x * vx + y * vy + z * vz
    r2 = ex.from_poly(Poly.monomial(1, x=2) + Poly.monomial(1, y=2)
                      + Poly.monomial(1, z=2))

    if family == "generic":
        # arbitrary omega: angular momentum only (omega an opaque symbol)
        system = _forced_system(TimeForce(ex.sym("omega"), Q),
                                {"omega": ex.sym("omegad")})
        for i, Li in enumerate(L):
            out.append(_cert(Li, system, certify, f"L{i+1}"))
        return out

    if family == "constant":
        k = Fraction(spec.get("k", 1))
        system = DynamicalSystem.time_forced(ex.const(k), Q)
        H = v2 / 2 - ex.const(k) * rpow(-nu)
        out.append(_cert(H, system, certify, "H"))
        for i, Li in enumerate(L):
            out.append(_cert(Li, system, certify, f"L{i+1}"))
        if nu == -2:
            for i in range(3):
                for j in range(i, 3):
                    B = vv[i] * vv[j] - 2 * k * qv[i] * qv[j]
                    out.append(_cert(B, system, certify, f"B{i+1}{j+1}"))
        if nu == 1:
            for i in range(3):
                R = qv[i] * v2 - vv[i] * qdotv - ex.const(k) * qv[i] * rpow(-1)
                out.append(_cert(R, system, certify, f"R{i+1}"))
        if nu == 2:
            H2 = v2 / 2 - ex.const(k) * rpow(-2)
            I1 = ex.const(-1) * t * t * H2 + t * qdotv - r2 / 2
            I2 = ex.const(-1) * t * H2 + qdotv / 2
            out.append(_cert(I1, system, certify, "I1"))
            out.append(_cert(I2, system, certify, "I2"))
        return out

    if family == "polynomial":
        k = Fraction(spec.get("k", 1))
        b0, b1, b2 = (Fraction(spec.get(s, d)) for s, d in
                      (("b0", 1), ("b1", 0), ("b2", 0)))
        poly = ex.from_poly(Poly.const(b0) + Poly.monomial(b1, t=1)
                            + Poly.monomial(b2, t=2))
        omega = ex.const(k) * ex.pow_(poly, Fraction(nu - 2, 2))
        system = DynamicalSystem.time_forced(omega, Q)
        Jnu = (poly * (v2 / 2 - omega * rpow(-nu))
               - (ex.const(b1) + 2 * b2 * t) / 2 * qdotv
               + ex.const(b2) * r2 / 2)
        out.append(_cert(Jnu, system, certify, "Jnu"))
        return out

    if family == "kepler-2K":
        if nu != 1:
            raise UnsupportedFamily("kepler-2K requires nu = 1")
        k = Fraction(spec.get("k", 1))
        b0, b1 = Fraction(spec.get("b0", 1)), Fraction(spec.get("b1", 1))
        lin = ex.from_poly(Poly.const(b0) + Poly.monomial(b1, t=1))
        omega = ex.const(k) / lin
        system = DynamicalSystem.time_forced(omega, Q)
        E2 = (lin * lin * (v2 / 2 - ex.const(k) * rpow(-1) / lin)
              - ex.const(b1) * lin * qdotv + ex.const(b1 * b1) * r2 / 2)
        out.append(_cert(E2, system, certify, "E2"))
        Rt = [qv[i] * v2 - vv[i] * qdotv - ex.const(k) * qv[i] * rpow(-1) / lin
              for i in range(3)]
        A = [lin * Rt[0] + ex.const(b1) * (qv[2] * L[1] - qv[1] * L[2]),
             lin * Rt[1] + ex.const(b1) * (qv[0] * L[2] - qv[2] * L[0]),
             lin * Rt[2] + ex.const(b1) * (qv[1] * L[0] - qv[0] * L[1])]
        for i in range(3):
            out.append(_cert(A[i], system, certify, f"A{i+1}"))
        return out

    if family == "kepler-3K":
        if nu != 1:
            raise UnsupportedFamily("kepler-3K requires nu = 1")
        k = Fraction(spec.get("k", 1))
        b0, b1, b2 = (Fraction(spec.get(s, d)) for s, d in
                      (("b0", 1), ("b1", 0), ("b2", 1)))
        poly = ex.from_poly(Poly.const(b0) + Poly.monomial(b1, t=1)
                            + Poly.monomial(b2, t=2))
        omega = ex.const(k) * ex.pow_(poly, Fraction(-1, 2))
        system = DynamicalSystem.time_forced(omega, Q)
        E3 = (poly * (v2 / 2 - ex.const(k) * rpow(-1) * ex.pow_(poly, Fraction(-1, 2)))
              - (ex.const(b1) + 2 * b2 * t) / 2 * qdotv + ex.const(b2) * r2 / 2)
        out.append(_cert(E3, system, certify, "E3"))
        return out

    if family == "oscillator-f":
        if nu != -2:
            raise UnsupportedFamily("oscillator-f requires nu = -2")
        c0 = Fraction(spec.get("c0", 2))
        f, fd, fdd, fddd = (ex.sym(s) for s in ("f", "fd", "fdd", "fddd"))
        theta = ex.sym("theta")
        omega = fdd / (4 * f) - (fd / f) ** 2 / 8 \
            - ex.const(c0) / 4 * ex.pow_(f, Fraction(-2))
        deriv = {"f": fd, "fd": fdd, "fdd": fddd,
                 "theta": ex.sqrt(ex.const(Fraction(c0, 2))) / f}
        system = _forced_system(TimeForce(omega, Q), deriv)
        for i in range(3):
            for j in range(i, 3):
                Lam = (f * (vv[i] * vv[j] - 2 * omega * qv[i] * qv[j])
                       - fd * (qv[i] * vv[j] + qv[j] * vv[i]) / 2
                       + fdd / 2 * qv[i] * qv[j])
                out.append(_cert(Lam, system, certify, f"Lam{i+1}{j+1}"))
        amp = [ex.pow_(f, Fraction(1, 2)) * vv[i]
               - fd / 2 * ex.pow_(f, Fraction(-1, 2)) * qv[i] for i in range(3)]
        rad = ex.sqrt(ex.const(Fraction(c0, 2))) * ex.pow_(f, Fraction(-1, 2))
        for i in range(3):
            I41 = rad * qv[i] * ex.sin_(theta) + amp[i] * ex.cos_(theta)
            I42 = (ex.const(-1) * rad * qv[i] * ex.cos_(theta)
                   + amp[i] * ex.sin_(theta))
            out.append(_cert(I41, system, certify, f"I41_{i+1}"))
            out.append(_cert(I42, system, certify, f"I42_{i+1}"))
        return out

    if family == "oscillator-g":
        if nu != -2:
            raise UnsupportedFamily("oscillator-g requires nu = -2")
        g, gd, gdd, gddd = (ex.sym(s) for s in ("g", "gd", "gdd", "gddd"))
        omega = gdd / (2 * g)
        system = _forced_system(TimeForce(omega, Q),
                                {"g": gd, "gd": gdd, "gdd": gddd})
        for i in range(3):
            I4 = g * vv[i] - gd * qv[i]
            out.append(_cert(I4, system, certify, f"I4_{i+1}"))
        return out

    raise UnsupportedFamily(f"unknown family {family}")


def _cert(e, system, certify, label):
    if certify:
        return FirstIntegral.certified(e, system, label=label)
    return FirstIntegral(e, label=label)


# -- reparameterization ---------------------------------------------------------------


class QuadratureFallback(Exception):
    """Flag (not an error): the quadratures are not elementary."""


class Reparameterization:
    def __init__(self, s_of_t, efactor, omega_bar, symbolic, note=""):
        self.s_of_t = s_of_t
        self.efactor = efactor          # e^(int phi dt)
        self.omega_bar = omega_bar      # Expr in symbol "s" (or None)
        self.symbolic = symbolic
        self.note = note


def reparameterize(phi, omega):
    """s(t) = int e^(int phi dt) dt,  omega_bar(s) = omega(t(s)) (dt/ds)^2.

    Catalog forms (phi = 0, constant, -k/t) resolve symbolically with a
    certified round trip; anything else returns a numeric-quadrature
    reparameterization flagged QuadratureFallback.
    """
    t = ex.sym("t")
    phi = ex._as_expr(phi)
    omega = ex._as_expr(omega)
    # phi == 0
    if ex.is_zero(phi):
        rep = Reparameterization(t, ex.const(1),
                                 ex.substitute(omega, {"t": ex.sym("s")}),
                                 True, "phi = 0")
        _roundtrip_check(rep, phi, omega)
        return rep
    # phi constant c
    if isinstance(phi, ex.Const):
        c = phi.value
        ef = ex.exp_(ex.const(c) * t)
        s_of_t = ef / c
        # t(s) = ln(c s)/c ; omega_bar = omega(t(s)) e^{-2 c t(s)} = omega/(c s)^2
        s = ex.sym("s")
        tb = ex.ln(ex.const(c) * s) / c
        ob = ex.substitute(omega, {"t": tb}) * ex.pow_(ex.const(c) * s,
                                                       Fraction(-2))
        rep = Reparameterization(s_of_t, ef, ob, True, "phi constant")
        _roundtrip_check(rep, phi, omega)
        return rep
    # phi = -k/t
    kcoef = _match_k_over_t(phi)
    if kcoef is not None:
        k = kcoef
        s = ex.sym("s")
        if k == 1:
            s_of_t = ex.ln(t)
            ef = ex.pow_(t, Fraction(-1))
            tb = ex.exp_(s)
        else:
            s_of_t = ex.pow_(t, Fraction(1 - k)) / (1 - k)
            ef = ex.pow_(t, Fraction(-k))
            tb = ex.pow_(ex.const(1 - k) * s, Fraction(1, 1 - k))
        ob = ex.substitute(omega, {"t": tb}) * ex.pow_(tb, Fraction(2 * k))
        rep = Reparameterization(s_of_t, ef, ob, True, f"phi = -{k}/t")
        _roundtrip_check(rep, phi, omega)
        return rep
    # cosmological phi = -3 (ln a)^. : s = int a^-3 dt, opaque quadrature
    rep = Reparameterization(None, None, None, False,
                             "QuadratureFallback: non-catalog phi")
    rep.flag = QuadratureFallback
    return rep


def _match_k_over_t(phi):
    """Return k if phi == -k/t for rational k, else None."""
    p = ex._poly_of(phi)
    if p is None and isinstance(phi, ex.Mul):
        p = ex._poly_of(ex.mul(*phi.factors))
    if p is None:
        n, d, ctx = ex.to_fraction(phi)
        if d == Poly.var("t") and n.is_constant():
            return -n.constant_value()
        return None
    if len(p.terms) == 1:
        (m, c), = p.terms.items()
        if m == (("t", -1),):
            return -c
    return None


def _roundtrip_check(rep, phi, omega):
    """omega(t) = omega_bar(s(t)) e^(2 int phi dt), certified symbolically."""
    back = ex.substitute(rep.omega_bar, {"s": rep.s_of_t}) \
        * ex.pow_(rep.efactor, Fraction(2))
    if not ex.is_zero(back - omega):
        raise ValueError("reparameterization round trip failed")


# -- 1d nonlinear equation -------------------------------------------------------------


def nonlinear1d_qfi(mu, phi, c=(1, 0, 0), certify=True):
    """x'' = -omega(t) x^mu + phi(t) x' with the master frequency family
    omega = [c1 + c2 S + c3 S^2]^(-(mu+3)/2) e^(2 int phi dt), S = s(t).

    Returns the admissible omega and the certified QFI.  mu must be a
    rational != -1.
    """
    mu = Fraction(mu)
    if mu == -1:
        raise UnsupportedMu("mu = -1 is excluded")
    c1, c2, c3 = (Fraction(v) for v in c)
    rep = reparameterize(phi, ex.const(1))
    if not rep.symbolic:
        raise UnsupportedFamily("phi outside the catalog forms")
    t = ex.sym("t")
    S = rep.s_of_t
    E = rep.efactor           # e^(int phi dt)
    K = ex.const(c1) + ex.const(c2) * S + ex.const(c3) * S * S
    omega = ex.pow_(K, Fraction(-(mu + 3), 2)) * ex.pow_(E, Fraction(2))
    x, vx = ex.sym("x"), ex.sym("vx")
    accel = ex.const(-1) * omega * ex.pow_(x, mu) + ex._as_expr(phi) * vx
    system = DynamicalSystem(1, [accel], label=f"nonlinear mu={mu}")
    I = (K * ex.pow_(E, Fraction(-2)) * vx * vx
         - (ex.const(c2) + 2 * c3 * S) * ex.pow_(E, Fraction(-1)) * x * vx
         + ex.const(Fraction(2, 1) / (mu + 1)) * ex.pow_(K, Fraction(-(mu + 1), 2))
         * ex.pow_(x, mu + 1)
         + ex.const(c3) * x * x)
    fi = FirstIntegral.certified(I, system, branch=f"nonlinear mu={mu}") \
        if certify else FirstIntegral(I)
    return {"omega": omega, "fi": fi, "system": system}


def nonlinear1d_mu2(phi=None, c4=Fraction(0), c5=Fraction(0), certify=True):
    """mu = 2 with a free function K11(s): omega_bar = K11^(-5/2) and
    d^3 K11/ds^3 = 2 (c4 + c5 s) K11^(-5/2); verified in the s variable."""
    s = ex.sym("t")  # the reduced time is the working variable
    K, Kd, Kdd = ex.sym("K11"), ex.sym("K11d"), ex.sym("K11dd")
    x, vx = ex.sym("x"), ex.sym("vx")
    c4, c5 = Fraction(c4), Fraction(c5)
    Kddd = 2 * (ex.const(c4) + ex.const(c5) * s) * ex.pow_(K, Fraction(-5, 2))
    wbar = ex.pow_(K, Fraction(-5, 2))
    accel = ex.const(-1) * wbar * x * x
    system = DynamicalSystem(1, [accel],
                             derivation={"K11": Kd, "K11d": Kdd, "K11dd": Kddd})
    I = (K * vx * vx - Kd * x * vx + (ex.const(c4) + ex.const(c5) * s) * vx
         + ex.const(Fraction(2, 3)) * ex.pow_(K, Fraction(-3, 2)) * x ** 3
         + Kdd * x * x / 2 - ex.const(c5) * x)
    fi = FirstIntegral.certified(I, system, branch="nonlinear mu=2") \
        if certify else FirstIntegral(I)
    return {"omega_bar": wbar, "fi": fi, "system": system}


def nonlinear1d_mu1_solution():
    """mu = 1: x(t) = rho (A sin theta + B cos theta), theta' = rho^-2 e^F,
    omega = -rho''/rho + phi (ln rho)' + rho^-4 e^(2F); returns the residual
    certificate of the closed-form solution."""
    rho, rhod, rhodd = ex.sym("rho"), ex.sym("rhod"), ex.sym("rhodd")
    theta, F = ex.sym("theta"), ex.sym("F")
    A, B = ex.sym("A"), ex.sym("B")
    phis, phid = ex.sym("phi"), ex.sym("phid")
    eF = ex.exp_(F)
    deriv = {"rho": rhod, "rhod": rhodd, "F": phis,
             "theta": ex.pow_(rho, Fraction(-2)) * eF, "phi": phid}
    omega = (ex.const(-1) * rhodd / rho + phis * rhod / rho
             + ex.pow_(rho, Fraction(-4)) * eF * eF)
    xsol = rho * (A * ex.sin_(theta) + B * ex.cos_(theta))
    # residual: x'' + omega x - phi x' with total derivatives via the chain
    dummy = DynamicalSystem(1, [ex.const(0)], derivation=deriv)
    xd = dummy.total_derivative(xsol)
    xdd = dummy.total_derivative(xd)
    resid = xdd + omega * xsol - phis * xd
    return ex.is_zero(resid)


def lane_emden_family(k, mu, A=Fraction(1), certify=True):
    """x'' = -omega(t) x^mu - (k/t) x': all admissible (omega, QFI) rows.

    Case a (k = 1) gives the three log rows, case b (k != 1) the three
    power rows; the constant-omega specials are flagged on their rows.
    """
    k = Fraction(k)
    mu = Fraction(mu)
    if mu == -1:
        raise UnsupportedMu("mu = -1 is excluded")
    t = ex.sym("t")
    x, vx = ex.sym("x"), ex.sym("vx")
    out = []

    def emit(case_id, omega, I, note=""):
        accel = ex.const(-1) * omega * ex.pow_(x, mu) \
            - ex.const(k) * ex.pow_(t, Fraction(-1)) * vx
        system = DynamicalSystem(1, [accel], label=f"lane-emden k={k} mu={mu}")
        fi = FirstIntegral.certified(I, system, branch=case_id, label=case_id) \
            if certify else FirstIntegral(I, label=case_id)
        out.append({"case_id": case_id, "omega": omega, "fi": fi, "note": note})

    xp = ex.pow_(x, mu + 1)
    Am = ex.const(A)
    if k == 1:
        lnt = ex.ln(t)
        # case 5: c2 = c3 = 0
        emit("case5", Am * ex.pow_(t, Fraction(-2)),
             t * t * vx * vx / 2 + Am / (mu + 1) * xp)
        # case 6: c1 = c3 = 0
        emit("case6", Am * ex.pow_(t, Fraction(-2))
             * ex.pow_(lnt, Fraction(-(mu + 3), 2)),
             t * t * lnt * vx * vx / 2 - t * x * vx / 2
             + Am / (mu + 1) * ex.pow_(lnt, Fraction(-(mu + 1), 2)) * xp)
        # case 7: c1 = c2 = 0
        emit("case7", Am * ex.pow_(t, Fraction(-2))
             * ex.pow_(lnt, Fraction(-mu - 3)),
             (t * lnt) * (t * lnt) * vx * vx / 2 - t * lnt * x * vx
             + Am / (mu + 1) * ex.pow_(lnt, Fraction(-mu - 1)) * xp
             + x * x / 2)
    else:
        # case 2: c2 = c3 = 0
        emit("case2", Am * ex.pow_(t, Fraction(-2 * k)),
             ex.pow_(t, Fraction(2 * k)) * vx * vx / 2 + Am / (mu + 1) * xp)
        # case 3: c1 = c3 = 0
        e3 = Fraction(k * mu - k - mu - 3, 2)
        note3 = "omega constant (first subcase of case 1)" \
            if (mu != 1 and k == (mu + 3) / (mu - 1)) else ""
        emit("case3", Am * ex.pow_(t, e3),
             ex.pow_(t, Fraction(k + 1)) * vx * vx
             + ex.const(k - 1) * ex.pow_(t, Fraction(k)) * x * vx
             + 2 * Am / (mu + 1) * ex.pow_(t, Fraction((mu + 1) * (k - 1), 2)) * xp,
             note3)
        # case 4: c1 = c2 = 0
        e4 = Fraction(k * mu + k - mu - 3)
        note4 = "omega constant (second subcase of case 1)" \
            if k == (mu + 3) / (mu + 1) else ""
        emit("case4", Am * ex.pow_(t, e4),
             t * t * vx * vx / 2 + ex.const(k - 1) * t * x * vx
             + Am / (mu + 1) * ex.pow_(t, Fraction((mu + 1) * (k - 1))) * xp
             + ex.const((k - 1) ** 2) * x * x / 2,
             note4)
    return out


# -- time-dependent central potentials ---------------------------------------------------


def central_potential_fi(g1=None, g2=None, F=None, g=None, L3=Fraction(1),
                         branch="b", certify=True):
    """Theorem on integrable time-dependent central potentials.

    branch "a": V = -(g2''/2g2) r^2 + (g'/g2) r - L3^2/(2 r^2),
                I = g2 r' - g2' r + g          (g2 != 0 required)
    branch "b": V = [ (g1'/g1)^2/8 - g1''/(4 g1) ] r^2
                    + (g2' - g2 g1'/(2 g1)) r / (2 g1)
                    + F(chi)/(2 g1) - L3^2/(2 r^2),
                chi = g1^(-1/2) r + (1/2) int g1^(-3/2) g2 dt,
                I = g1 r'^2 + (g2 - g1' r) r' + F(chi)
                    + (g1' r - g2)^2/(4 g1)   (g1 != 0 required)

    The radial coordinate is the symbol "x"; free functions are opaque
    symbols with derivation chains; F is an Expr in the symbol "chi".
    The equations of motion are r'' = L3^2/r^3 - dV/dr.
    """
    t = ex.sym("t")
    rr, vr = ex.sym("x"), ex.sym("vx")
    L3 = Fraction(L3)
    if branch == "a":
        if g2 is None:
            raise DegenerateGenerator("branch a requires g2 != 0")
        g2s, g2d, g2dd, g2ddd = (ex.sym(s) for s in
                                 ("g2", "g2d", "g2dd", "g2ddd"))
        gs, gd = ex.sym("gf"), ex.sym("gfd")
        deriv = {"g2": g2d, "g2d": g2dd, "g2dd": g2ddd, "gf": gd}
        V = (ex.const(-1) * g2dd / (2 * g2s) * rr * rr
             + gd / g2s * rr
             - ex.const(L3 ** 2) / 2 * ex.pow_(rr, Fraction(-2)))
        I = g2s * vr - g2d * rr + gs
    elif branch == "b":
        if g1 is None:
            raise DegenerateGenerator("branch b requires g1 != 0")
        g1s, g1d, g1dd, g1ddd = (ex.sym(s) for s in
                                 ("g1", "g1d", "g1dd", "g1ddd"))
        g2s, g2d, g2dd = (ex.sym(s) for s in ("g2", "g2d", "g2dd"))
        chiq = ex.sym("chiq")   # (1/2) int g1^(-3/2) g2 dt
        deriv = {"g1": g1d, "g1d": g1dd, "g1dd": g1ddd,
                 "g2": g2d, "g2d": g2dd,
                 "chiq": ex.pow_(g1s, Fraction(-3, 2)) * g2s / 2}
        if F is None:
            F = ex.const(0)
        chi = ex.pow_(g1s, Fraction(-1, 2)) * rr + chiq
        Fchi = ex.substitute(F, {"chi": chi})
        V = (((g1d / g1s) ** 2 / 8 - g1dd / (4 * g1s)) * rr * rr
             + (g2d - g2s * g1d / (2 * g1s)) / (2 * g1s) * rr
             + Fchi / (2 * g1s)
             - ex.const(L3 ** 2) / 2 * ex.pow_(rr, Fraction(-2)))
        I = (g1s * vr * vr + (g2s - g1d * rr) * vr + Fchi
             + (g1d * rr - g2s) ** 2 / (4 * g1s))
    else:
        raise ValueError("branch must be 'a' or 'b'")
    accel = ex.const(L3 ** 2) * ex.pow_(rr, Fraction(-3)) \
        - ex.differentiate(V, "x")
    system = DynamicalSystem(1, [accel], derivation=deriv,
                             label=f"central branch {branch}")
    fi = FirstIntegral.certified(I, system, branch=f"central-{branch}") \
        if certify else FirstIntegral(I)
    return {"V": V, "fi": fi, "system": system}


def yukawa_potential_fi(kconst=Fraction(1), b=(1, 0, 1), L3=Fraction(1)):
    """Integrable time-dependent Yukawa potential: branch b with
    g1 = b0 + b1 t + b2 t^2, g2 = 0,
    F = -c1/(4 g1) r^2 + L3^2 g1 / r^2 + 2 k exp(-chi)/chi, c1 = b1^2-4b2b0.

    Expressed directly with concrete g1; returns (V, certified FI).
    """
    b0, b1, b2 = (Fraction(v) for v in b)
    c1 = b1 ** 2 - 4 * b2 * b0
    t = ex.sym("t")
    rr, vr = ex.sym("x"), ex.sym("vx")
    g1 = ex.from_poly(Poly.const(b0) + Poly.monomial(b1, t=1)
                      + Poly.monomial(b2, t=2))
    g1d = ex.differentiate(g1, "t")
    chi = ex.pow_(g1, Fraction(-1, 2)) * rr
    Fbar = 2 * ex.const(kconst) * ex.exp_(ex.const(-1) * chi) / chi
    V = (ex.const(-1) * ((2 * b2) / (4 * g1)
                         - (g1d / g1) ** 2 / 8 + ex.const(c1) / (8 * g1 * g1))
         * rr * rr + Fbar / (2 * g1))
    # V reduces to k e^{-r/sqrt(g1)} / (r sqrt(g1)) when c1 = b1^2 - 4 b2 b0
    I = ((vr * vr + ex.const(L3 ** 2) * ex.pow_(rr, Fraction(-2))) * g1
         - g1d * rr * vr - ex.const(c1) / (4 * g1) * rr * rr
         + (g1d) ** 2 / (4 * g1) * rr * rr + Fbar)
    accel = ex.const(L3 ** 2) * ex.pow_(rr, Fraction(-3)) \
        - ex.differentiate(V, "x")
    system = DynamicalSystem(1, [accel], label="yukawa")
    fi = FirstIntegral.certified(I, system, branch="yukawa")
    return {"V": V, "fi": fi, "system": system}


# -- Lewis invariant and Brans-Dicke ------------------------------------------------------


def lewis_invariant_expr(c0=Fraction(2)):
    """I = (x rho' - rho x')^2 / 2 + (c0/4)(x/rho)^2 with rho the second
    coordinate (named y)."""
    x, y = ex.sym("x"), ex.sym("y")
    vx, vy = ex.sym("vx"), ex.sym("vy")
    return ((x * vy - y * vx) ** 2 / 2
            + ex.const(Fraction(c0, 4)) * x * x * ex.pow_(y, Fraction(-2)))


def lewis_system_symbolic(c0=Fraction(2)):
    """Joint system x'' = -psi^2 x, rho'' = -psi^2 rho + c0/(2 rho^3) with
    psi^2 an opaque function of t."""
    psisq, psisqd = ex.sym("psisq"), ex.sym("psisqd")
    x, y = ex.sym("x"), ex.sym("y")
    accel = [ex.const(-1) * psisq * x,
             ex.const(-1) * psisq * y
             + ex.const(Fraction(c0, 2)) * ex.pow_(y, Fraction(-3))]
    return DynamicalSystem(2, accel, derivation={"psisq": psisqd},
                           label="lewis")


def lewis_system_numeric(c0=Fraction(2)):
    """psi^2(t) = 1 + sin(t)/10 sampled numerically."""
    psisq = ex.const(1) + ex.sin_(ex.sym("t")) / 10
    x, y = ex.sym("x"), ex.sym("y")
    accel = [ex.const(-1) * psisq * x,
             ex.const(-1) * psisq * y
             + ex.const(Fraction(c0, 2)) * ex.pow_(y, Fraction(-3))]
    return DynamicalSystem(2, accel, label="lewis-numeric")


def bd_quintessence_check(tol=1e-10, t_span=(1.0, 5.0), samples=200):
    """psi'' + 15 psi'/t + psi^2 = 0: the exact solution psi = 24/t^2.

    Returns the symbolic residuals and the numeric tracking error of the
    integrated solution started from the exact initial data at t0 = 1.
    """
    t = ex.sym("t")
    x, vx = ex.sym("x"), ex.sym("vx")
    accel = ex.const(-15) * ex.pow_(t, Fraction(-1)) * vx - x * x
    system = DynamicalSystem(1, [accel], label="bd-quintessence")
    psi = ex.const(24) * ex.pow_(t, Fraction(-2))
    dpsi = ex.differentiate(psi, "t")
    resid = ex.differentiate(dpsi, "t") \
        + ex.const(15) * ex.pow_(t, Fraction(-1)) * dpsi + psi * psi
    exact_zero = ex.is_zero(resid)
    # residual of c/t^2 is (c^2 - 24 c) t^-4
    c = ex.sym("c")
    psic = c * ex.pow_(t, Fraction(-2))
    dpsic = ex.differentiate(psic, "t")
    residc = ex.differentiate(dpsic, "t") \
        + ex.const(15) * ex.pow_(t, Fraction(-1)) * dpsic + psic * psic
    expected = (c * c - 24 * c) * ex.pow_(t, Fraction(-4))
    family_ok = ex.is_zero(residc - expected)
    traj = integrate(system, [24.0, -48.0], t_span, tol=tol, samples=samples)
    errs = [abs(s[0] - 24.0 / (tt * tt)) for tt, s in
            zip(traj.times, traj.states)]
    return {"exact_residual_zero": exact_zero,
            "family_residual_matches": family_ok,
            "tracking_error": float(max(errs)),
            "pass": exact_zero and family_ok and max(errs) <= 1e-6}
