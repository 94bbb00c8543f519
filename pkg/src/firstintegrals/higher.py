"""Cubic first integrals on the plane and m-th order geodesic integrals.

The cubic conditions chain a third-order Killing tensor, a symmetric
two-tensor, a vector and a scalar; time degrees n = 0, 1, 2 are supported.
The exponential cubic family is a lambda-eigenproblem like the quadratic
one.  Geodesic integrals of any supported order come from iterated
symmetrized covariant derivatives.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from . import expr as ex
from .autonomous import ConditionSystem, euler_antiderivative, quad_form, \
    vec_dot, vec_dot_v, vec_dot_row
from .damped import SpectralResult, _sym_grad, _vector_ansatz
from .dynamics import DynamicalSystem, FirstIntegral, QNAMES, VNAMES
from .geometry import (COORDS, DiagonalMetric, SymTensorField, UnsupportedOrder,
                       kt_basis, monomial_grid, reducible_kt_generator,
                       sorted_indices, sym_cov_derivative)
from .linalg import eval_param_rows, nullspace, spectral_roots
from .poly import Poly


def _param_split(parametric, params, dim, rank_):
    """One tensor per parameter from a parameter-linear component table."""
    out = []
    for p in params:
        comp = {}
        for idx, pol in parametric.components.items():
            part = pol.split({p}).get(((p, 1),))
            if part is not None and not part.is_zero():
                comp[idx] = part
        out.append(SymTensorField(dim, rank_, comp))
    return out


def generator_tensor_pairs(dim, m):
    """(L, L_(...;.)) pairs for the rank-(m-1) generator family."""
    gen, generated = reducible_kt_generator(dim, m)
    from .geometry import _generator_components
    params = _generator_components(dim, m)[1]
    Ls = _param_split(gen, params, dim, m - 1)
    Ds = _param_split(generated, params, dim, m)
    return list(zip(Ls, Ds)), params


def cubic_form(T, dim):
    """T_ijk v^i v^j v^k."""
    out = Poly()
    for idx, p in T.components.items():
        counts = {}
        for i in idx:
            counts[i] = counts.get(i, 0) + 1
        mult = factorial(3)
        for c in counts.values():
            mult //= factorial(c)
        mono = Poly.const(mult)
        for i in idx:
            mono = mono * Poly.var(VNAMES[i])
        out = out + p * mono
    return out


def sym2_form(T, dim):
    return quad_form(T, dim)


def rank3_contract(C, W, dim):
    """(C W)_ij = C_ijk W^k as a symmetric 2-tensor."""
    comp = {}
    for i in range(dim):
        for j in range(i, dim):
            val = Poly()
            for k in range(dim):
                val = val + C[tuple(sorted((i, j, k)))] * W[k]
            comp[(i, j)] = val
    return SymTensorField(dim, 2, comp)


def rank2_contract(T, W, dim):
    comp = {}
    for i in range(dim):
        val = Poly()
        for k in range(dim):
            val = val + T[(i, k)] * W[k]
        comp[(i,)] = val
    return SymTensorField(dim, 1, comp)


def _param_combination(elements, prefix):
    params = [f"{prefix}{i}" for i in range(len(elements))]
    dim = elements[0].dim
    rank_ = elements[0].rank
    comp = {}
    for p, el in zip(params, elements):
        for idx, pol in el.components.items():
            comp.setdefault(idx, Poly())
            comp[idx] = comp[idx] + Poly.var(p) * pol
    return SymTensorField(dim, rank_, comp), params


class NonPolynomialPotential(ValueError):
    pass


def cfi_conditions(V, n, vec_degree=3):
    """Cubic-FI condition system on E^2 at time degree n (0, 1 or 2).

    Unknowns: the 10 third-order KT parameters, symmetric two-tensors
    (KT basis at the top degree, generator family below), and polynomial
    vectors; the scalar G is eliminated through its curl.
    """
    dim = 2
    if n not in (0, 1, 2):
        raise UnsupportedOrder("cubic discovery supports n = 0, 1, 2")
    names = COORDS[dim]
    extra = V.symbols() - set(names) - {"rxy"}
    if extra:
        raise NonPolynomialPotential(f"unsupported symbols {sorted(extra)}")
    Q = [V.diff(nm) for nm in names]
    kb3 = kt_basis(2, 3)
    C0, c0p = _param_combination(kb3.elements, "c")
    unknowns = list(c0p)
    gen_pairs, _ = generator_tensor_pairs(2, 3)
    kb2 = kt_basis(2, 2)
    Lt, Ldt = [], []
    for N in range(n + 1):
        if N == n:
            T, ps = _param_combination(kb2.elements, f"S{N}_")
            D = None
        else:
            T, ps = _param_combination([p[0] for p in gen_pairs], f"S{N}_")
            D, _ = _param_combination([p[1] for p in gen_pairs], f"S{N}_")
        Lt.append(T)
        Ldt.append(D)
        unknowns += ps
    Vec = []
    for N in range(n + 1):
        Tv, ps = _vector_ansatz(dim, vec_degree, f"V{N}")
        Vec.append(Tv)
        unknowns += ps
    cs = ConditionSystem(unknowns)
    ix = {u: i for i, u in enumerate(unknowns)}

    def add_tensor(T, tag):
        for idx in sorted(T.components):
            p = T.components[idx]
            if not p.cleared().is_zero():
                cs.add_rows(p, ix, tag)

    CQ = rank3_contract(C0, Q, dim)
    if n == 0:
        add_tensor(_sym_grad(Vec[0], dim) - CQ.scale(3), "L0_(a;b) = 3 C Q")
        _grad_const(cs, ix, vec_dot(Vec[0], Q, dim), names, "L0 Q = s")
        _curl(cs, ix, [2 * rank2_contract(Lt[0], Q, dim)[(a,)] for a in range(dim)],
              names, "curl G")
    elif n == 1:
        add_tensor(_sym_grad(Vec[0], dim) - CQ.scale(3) + Lt[1], "L0 chain")
        add_tensor(_sym_grad(Vec[1], dim) + rank3_contract(Ldt[0], Q, dim).scale(3),
                   "L1 chain")
        _grad_const(cs, ix, vec_dot(Vec[1], Q, dim), names, "L1 Q = s")
        L0Q = vec_dot(Vec[0], Q, dim)
        for a in range(dim):
            row = L0Q.diff(names[a]) - 2 * rank2_contract(Lt[1], Q, dim)[(a,)]
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "(L0 Q)_,a")
        _curl(cs, ix, [2 * rank2_contract(Lt[0], Q, dim)[(a,)] - Vec[1][(a,)]
                       for a in range(dim)], names, "curl G")
    else:
        add_tensor(_sym_grad(Vec[0], dim) - CQ.scale(3) + Lt[1], "L0 chain")
        add_tensor(_sym_grad(Vec[1], dim) + rank3_contract(Ldt[0], Q, dim).scale(3)
                   + Lt[2].scale(2), "L1 chain")
        add_tensor(_sym_grad(Vec[2], dim)
                   + rank3_contract(Ldt[1], Q, dim).scale(Fraction(3, 2)),
                   "L2 chain")
        _grad_const(cs, ix, vec_dot(Vec[2], Q, dim), names, "L2 Q = s")
        L1Q = vec_dot(Vec[1], Q, dim)
        for a in range(dim):
            row = L1Q.diff(names[a]) - 4 * rank2_contract(Lt[2], Q, dim)[(a,)]
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "(L1 Q)_,a")
        L0Q = vec_dot(Vec[0], Q, dim)
        for a in range(dim):
            row = (L0Q.diff(names[a]) - 2 * rank2_contract(Lt[1], Q, dim)[(a,)]
                   + 2 * Vec[2][(a,)])
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "(L0 Q)_,a")
        _curl(cs, ix, [2 * rank2_contract(Lt[0], Q, dim)[(a,)] - Vec[1][(a,)]
                       for a in range(dim)], names, "curl G")
    cs.meta = {"C0": C0, "Lt": Lt, "Ldt": Ldt, "Vec": Vec, "n": n, "Q": Q}
    return cs


def _grad_const(cs, ix, scalar, names, tag):
    for nm in names:
        row = scalar.diff(nm)
        if not row.cleared().is_zero():
            cs.add_rows(row, ix, tag)


def _curl(cs, ix, W, names, tag):
    dim = len(names)
    for a in range(dim):
        for b in range(a + 1, dim):
            row = W[a].diff(names[b]) - W[b].diff(names[a])
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, tag)


def cfi_fis(V, n, vec_degree=3, certify=True):
    """Solve the cubic conditions and emit certified first integrals."""
    dim = 2
    cs = cfi_conditions(V, n, vec_degree)
    system = DynamicalSystem.conservative(dim, ex.from_poly(V))
    out = []
    t = Poly.var("t")
    for vec in cs.nullspace():
        vals = dict(zip(cs.unknowns, vec))
        C0 = cs.meta["C0"].subs_params(vals)
        Lt = [T.subs_params(vals) for T in cs.meta["Lt"]]
        Vev = [T.subs_params(vals) for T in cs.meta["Vec"]]
        Q = cs.meta["Q"]
        Ipoly = cubic_form(C0, dim)
        for N in range(n):
            Ldt = cs.meta["Ldt"][N].subs_params(vals)
            Ipoly = Ipoly - cubic_form(Ldt, dim) * t ** (N + 1) \
                * Fraction(1, N + 1)
        for N in range(n + 1):
            Ipoly = Ipoly + sym2_form(Lt[N], dim) * t ** N
            Ipoly = Ipoly + vec_dot_v(Vev[N], dim) * t ** N
            Ipoly = Ipoly + vec_dot(Vev[N], Q, dim) * t ** (N + 1) \
                * Fraction(1, N + 1)
        W = [2 * rank2_contract(Lt[0], Q, dim)[(a,)] for a in range(dim)]
        if n >= 1:
            W = [w - Vev[1][(a,)] for a, w in enumerate(W)]
        G = euler_antiderivative(W, dim)
        Ipoly = Ipoly + G
        if Ipoly.cleared().is_zero():
            continue
        e = ex.from_poly(Ipoly)
        if certify:
            out.append(FirstIntegral.certified(e, system, order=3,
                                               time_degree=Ipoly.degree("t"),
                                               branch=f"CFI_n{n}"))
        else:
            out.append(FirstIntegral(e, order=3, branch=f"CFI_n{n}"))
    return out


def cfi_exponential(V, vec_degree=3, certify=True, strict=False):
    """Exponential cubic family I = e^(lam t)(-L_(ab;c)vvv + lam L_ab vv
    + lam L_a v + L_a Q^a) via exact rank-drop in lam."""
    dim = 2
    names = COORDS[dim]
    Q = [V.diff(nm) for nm in names]
    gen_pairs, _ = generator_tensor_pairs(2, 3)
    L2, p2 = _param_combination([p[0] for p in gen_pairs], "m")
    D3, _ = _param_combination([p[1] for p in gen_pairs], "m")
    L1, p1 = _vector_ansatz(dim, vec_degree, "w")
    unknowns = p2 + p1
    ix = {u: i for i, u in enumerate(unknowns)}
    mu = Poly.var("mu")
    cs = ConditionSystem(unknowns, parametric=True)
    T = rank3_contract(D3, Q, dim)
    S = _sym_grad(L1, dim)
    for i in range(dim):
        for j in range(i, dim):
            row = mu * S[(i, j)] + 3 * T[(i, j)] + mu ** 2 * L2[(i, j)]
            if not row.cleared().is_zero():
                cs.add_rows(row, ix, "lam L_(a;b) chain", mu="mu")
    LQ = vec_dot(L1, Q, dim)
    for a in range(dim):
        row = LQ.diff(names[a]) - 2 * mu * rank2_contract(L2, Q, dim)[(a,)] \
            + mu ** 2 * L1[(a,)]
        if not row.cleared().is_zero():
            cs.add_rows(row, ix, "(LQ)_,a", mu="mu")
    system = DynamicalSystem.conservative(dim, ex.from_poly(V))
    res = spectral_roots(cs.rows, len(unknowns), full=True, strict=strict)
    out = SpectralResult()
    out.unresolved = res["unresolved"]
    for lam in res["roots"]:
        if lam == 0:
            continue
        rows = eval_param_rows(cs.rows, lam)
        for vec in nullspace(rows, len(unknowns)):
            vals = dict(zip(unknowns, vec))
            L2v = L2.subs_params(vals)
            D3v = D3.subs_params(vals)
            L1v = L1.subs_params(vals)
            base = (-cubic_form(D3v, dim) + lam * sym2_form(L2v, dim)
                    + lam * vec_dot_v(L1v, dim) + vec_dot(L1v, Q, dim))
            if base.cleared().is_zero():
                continue
            e = ex.exp_(ex.const(lam) * ex.sym("t")) * ex.from_poly(base)
            if certify:
                out.append(FirstIntegral.certified(e, system, order=3,
                                                   branch="CFI_exp",
                                                   label=f"CFIe(lam={lam})"))
            else:
                out.append(FirstIntegral(e, order=3, branch="CFI_exp"))
    return out


# -- geodesic m-th order FIs -------------------------------------------------------


def iterated_kt_nullspace(g, rank_, iterations, bounds=None):
    """Tensors whose `iterations`-fold symmetrized covariant derivative
    vanishes, over a polynomial ansatz."""
    dim = g.dim
    names = COORDS[dim]
    if bounds is None:
        deg = rank_ + iterations - 1
        bounds = {n: (0, deg) for n in names}
    grid = monomial_grid(names, bounds)
    idxs = sorted_indices(dim, rank_)
    unknowns = [(idx, tuple(sorted(m.items()))) for idx in idxs for m in grid]
    comps = {}
    psyms = []
    for i, (idx, m) in enumerate(unknowns):
        name = f"@q{i}"
        psyms.append(name)
        comps.setdefault(idx, Poly())
        comps[idx] = comps[idx] + Poly.var(name) * Poly.monomial(1, **dict(m))
    T = SymTensorField(dim, rank_, comps)
    D = T
    for _ in range(iterations):
        D = sym_cov_derivative(D, g)
    pset = set(psyms)
    rows = []
    for J in sorted_indices(dim, rank_ + iterations):
        p = D[J].cleared()
        parts = {}
        for m, c in p.terms.items():
            par = tuple((s, e) for s, e in m if s in pset)
            rest = tuple((s, e) for s, e in m if s not in pset)
            parts.setdefault(rest, {})[par] = c
        for rest, by in sorted(parts.items()):
            row = {}
            for par, c in by.items():
                row[int(par[0][0][2:])] = c
            rows.append(row)
    out = []
    for v in nullspace(rows, len(unknowns)):
        comp = {}
        for val, (idx, m) in zip(v, unknowns):
            if val:
                comp.setdefault(idx, Poly())
                comp[idx] = comp[idx] + Poly.monomial(val, **dict(m))
        out.append(SymTensorField(dim, rank_, comp))
    return out


def velocity_form(T, dim):
    if T.rank == 0:
        return T[()]
    out = Poly()
    for idx, p in T.components.items():
        counts = {}
        for i in idx:
            counts[i] = counts.get(i, 0) + 1
        mult = factorial(T.rank)
        for c in counts.values():
            mult //= factorial(c)
        mono = Poly.const(mult)
        for i in idx:
            mono = mono * Poly.var(VNAMES[i])
        out = out + p * mono
    return out


def geodesic_fis(g, m, bounds=None, certify=True):
    """m-th order geodesic first integrals
    I = sum_{r,b} (-t)^(r-b)/(r-b)! C_(i1..ib;..i_r) v^(i1)..v^(ir)."""
    dim = g.dim
    flat = g.is_flat_euclidean()
    if (flat and m > 4) or (not flat and m > 2) or m < 1:
        raise UnsupportedOrder(f"geodesic order m={m} unsupported for this metric")
    system = DynamicalSystem.geodesic(g)
    t = Poly.var("t")
    out = []
    for b in range(m + 1):
        for T in iterated_kt_nullspace(g, b, m + 1 - b, bounds):
            Ipoly = Poly()
            D = T
            for r in range(b, m + 1):
                term = velocity_form(D, dim)
                sign = (-1) ** (r - b)
                Ipoly = Ipoly + term * t ** (r - b) \
                    * Fraction(sign, factorial(r - b))
                if r < m:
                    D = sym_cov_derivative(D, g)
            if Ipoly.cleared().is_zero():
                continue
            e = ex.from_poly(Ipoly)
            if certify:
                out.append(FirstIntegral.certified(
                    e, system, order=m, time_degree=Ipoly.degree("t"),
                    branch=f"geodesic_b{b}"))
            else:
                out.append(FirstIntegral(e, order=m, branch=f"geodesic_b{b}"))
    return out


# -- Fokas-type catalog ---------------------------------------------------------------


def fokas_v1(c0=Fraction(1), c1=Fraction(1)):
    """V1 = c0 (x^2 + 9 y^2) + c1 y and its cubic integral J1."""
    V = Poly.monomial(c0, x=2) + Poly.monomial(9 * c0, y=2) + Poly.monomial(c1, y=1)
    x, y = Poly.var("x"), Poly.var("y")
    vx, vy = Poly.var("vx"), Poly.var("vy")
    J1 = ((x * vy - y * vx) * vx ** 2
          - Fraction(c1, 18 * c0) * vx ** 3
          + Fraction(c1, 3) * x ** 2 * vx
          + 6 * c0 * x ** 2 * y * vx
          - Fraction(2 * c0, 3) * x ** 3 * vy)
    return V, ex.from_poly(J1)


def fokas_v2_system(k=Fraction(1)):
    """V2 = k (x^2 - y^2)^(-2/3) with cubic integral J2 (eq.Fok6 shape)."""
    x, y = ex.sym("x"), ex.sym("y")
    vx, vy = ex.sym("vx"), ex.sym("vy")
    base = x * x - y * y
    V = ex.const(k) * ex.pow_(base, Fraction(-2, 3))
    system = DynamicalSystem.conservative(2, V, label="fokas-v2")
    J2 = (x * vy - y * vx) * (vy * vy - vx * vx) + 4 * V * (y * vx + x * vy)
    return system, V, J2


def tsiganov_v3(k1, k2, k3, a2, a5):
    """V3 = k1/(a2 y - a5 x)^2 + k2/r + k3 (a2 x + a5 y)/(r (a2 y - a5 x)^2)."""
    x, y = ex.sym("x"), ex.sym("y")
    vx, vy = ex.sym("vx"), ex.sym("vy")
    r = ex.sym("rxy")
    w = ex.const(a2) * y - ex.const(a5) * x
    u = ex.const(a2) * x + ex.const(a5) * y
    V = (ex.const(k1) * ex.pow_(w, Fraction(-2))
         + ex.const(k2) / r
         + ex.const(k3) * u * ex.pow_(w, Fraction(-2)) / r)
    M3 = x * vy - y * vx
    J3 = (M3 * M3 * (ex.const(a2) * vx + ex.const(a5) * vy)
          + 2 * ex.const(k1) * r * r * ex.pow_(w, Fraction(-2))
          * (ex.const(a2) * vx + ex.const(a5) * vy)
          - ex.const(k2) * w / r * M3
          - ex.const(k3) * u / (r * w) * M3
          + ex.const(k3) * r / w * (ex.const(a2) * vy - ex.const(a5) * vx)
          + 2 * ex.const(k3) * u * r * ex.pow_(w, Fraction(-2))
          * (ex.const(a2) * vx + ex.const(a5) * vy))
    return V, J3


def tsiganov_j5(k1, k3, a2, a5):
    """V5 = V3(k2=0) with the additional time-dependent cubic integral J5."""
    V, J3 = tsiganov_v3(k1, Fraction(0), k3, a2, a5)
    x, y = ex.sym("x"), ex.sym("y")
    vx, vy = ex.sym("vx"), ex.sym("vy")
    r = ex.sym("rxy")
    t = ex.sym("t")
    w = ex.const(a2) * y - ex.const(a5) * x
    u = ex.const(a2) * x + ex.const(a5) * y
    M3 = x * vy - y * vx
    J5 = (ex.const(-1) * t * J3
          + u * M3 * M3
          + 2 * ex.const(k1) * r * r * u * ex.pow_(w, Fraction(-2))
          + 2 * ex.const(k3) * r * u * u * ex.pow_(w, Fraction(-2))
          + ex.const(k3) * r)
    return V, J5
