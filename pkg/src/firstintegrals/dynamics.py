"""Dynamical systems, numeric integration, drift measurement and Poisson
brackets.

A DynamicalSystem packages the equations of motion q''^a = F^a(t, q, q') as
exact expressions; symbolic certification of a first integral substitutes
these into dI/dt, numeric work compiles them for scipy's adaptive
Runge-Kutta integrators.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from . import expr as ex
from .geometry import COORDS, DiagonalMetric, christoffel
from .poly import Poly

QNAMES = ("x", "y", "z")
VNAMES = ("vx", "vy", "vz")


class StepFailure(RuntimeError):
    """The integrator stopped before the end of the requested span."""

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class DynamicalSystem:
    """Second order system q''^a = accel^a(t, q, v) with a kinetic metric.

    ``derivation`` declares total time derivatives of opaque function
    symbols (e.g. {"f": fdot, "fdot": fddot}); symbolic certification
    chains through it.
    """

    def __init__(self, dim, accel, metric=None, label="", derivation=None):
        self.dim = dim
        self.accel = list(accel)
        self.metric = metric or DiagonalMetric.euclidean(dim)
        self.label = label
        self.derivation = dict(derivation or {})

    # -- constructors -------------------------------------------------------

    @classmethod
    def conservative(cls, dim, V, metric=None, label=""):
        """q''^a = -Gamma^a_bc v^b v^c - gamma^{ab} dV/dq^b."""
        metric = metric or DiagonalMetric.euclidean(dim)
        gamma = christoffel(metric)
        accel = []
        for a in range(dim):
            acc = ex.const(0)
            dV = ex.differentiate(V, QNAMES[a])
            if not (isinstance(dV, ex.Const) and dV.value == 0):
                ginv = metric.inverse_entry(a)
                acc = acc - ex.from_poly(ginv) * dV
            for b in range(dim):
                for c in range(dim):
                    gam = gamma[a][b][c]
                    if not gam.is_zero():
                        acc = acc - ex.from_poly(
                            gam * Poly.var(VNAMES[b]) * Poly.var(VNAMES[c]))
            accel.append(acc)
        return cls(dim, accel, metric, label)

    @classmethod
    def geodesic(cls, metric, label=""):
        return cls.conservative(metric.dim, ex.const(0), metric, label)

    @classmethod
    def damped(cls, Q, A=None, label=""):
        """q''^a = -Q^a(q) + A^a_b(q) v^b on flat space (Q, A polynomial)."""
        dim = len(Q)
        accel = []
        for a in range(dim):
            p = -Q[a]
            if A is not None:
                for b in range(dim):
                    p = p + A[a][b] * Poly.var(VNAMES[b])
            accel.append(ex.from_poly(p))
        return cls(dim, accel, label=label)

    @classmethod
    def time_forced(cls, omega, Q, metric=None, label=""):
        """q''^a = -Gamma^a_bc v^b v^c - omega(t) Q^a(q)."""
        metric = metric or DiagonalMetric.euclidean(len(Q))
        dim = metric.dim
        gamma = christoffel(metric)
        accel = []
        for a in range(dim):
            acc = -omega * ex._as_expr(Q[a])
            for b in range(dim):
                for c in range(dim):
                    gam = gamma[a][b][c]
                    if not gam.is_zero():
                        acc = acc - ex.from_poly(
                            gam * Poly.var(VNAMES[b]) * Poly.var(VNAMES[c]))
            accel.append(acc)
        return cls(dim, accel, metric, label)

    # -- symbolic side ------------------------------------------------------

    def total_derivative(self, I):
        """dI/dt along the equations of motion (an Expr)."""
        out = ex.differentiate(I, "t")
        for name, rate in self.derivation.items():
            d = ex.differentiate(I, name)
            if not (isinstance(d, ex.Const) and d.value == 0):
                out = out + rate * d
        for a in range(self.dim):
            out = out + ex.sym(VNAMES[a]) * ex.differentiate(I, QNAMES[a])
            out = out + self.accel[a] * ex.differentiate(I, VNAMES[a])
        return out

    def certifies(self, I, relations=None):
        return ex.is_zero(self.total_derivative(I), relations)

    # -- numeric side --------------------------------------------------------

    def rhs(self):
        dim = self.dim
        accel = self.accel

        def f(t, state):
            vals = {"t": t}
            for a in range(dim):
                vals[QNAMES[a]] = state[a]
                vals[VNAMES[a]] = state[dim + a]
            out = np.empty(2 * dim)
            out[:dim] = state[dim:]
            for a in range(dim):
                v = ex.evaluate(accel[a], vals)
                out[dim + a] = v.real
            return out

        return f


class FirstIntegral:
    """A certified first integral I(t, q, v) with provenance metadata."""

    def __init__(self, expression, order=2, time_degree=0, branch="",
                 certificates=None, label="", symbolic_only=False):
        self.expression = expression
        self.order = order
        self.time_degree = time_degree
        self.branch = branch
        self.certificates = list(certificates or [])
        self.label = label
        self.symbolic_only = symbolic_only

    @classmethod
    def certified(cls, expression, system, relations=None, **kw):
        resid = system.total_derivative(expression)
        if not ex.is_zero(resid, relations):
            raise ValueError(
                f"dI/dt does not vanish along the equations of motion: "
                f"{ex.to_prefix(resid)[:400]}")
        fi = cls(expression, **kw)
        fi.certificates.append("dI/dt == 0 along the equations of motion (exact)")
        return fi

    def __call__(self, t, state, dim=None):
        dim = dim or (len(state) // 2)
        vals = {"t": t}
        for a in range(dim):
            vals[QNAMES[a]] = state[a]
            vals[VNAMES[a]] = state[dim + a]
        return ex.evaluate(self.expression, vals)

    def to_json(self):
        return {
            "label": self.label,
            "expression": ex.to_prefix(self.expression),
            "order": self.order,
            "time_degree": self.time_degree,
            "branch": self.branch,
            "certificates": self.certificates,
            "symbolic_only": self.symbolic_only,
        }

    def __repr__(self):
        name = self.label or self.branch or "FI"
        return f"<{name}: {ex.to_prefix(self.expression)}>"


class Trajectory:
    __slots__ = ("times", "states", "meta")

    def __init__(self, times, states, meta=None):
        self.times = np.asarray(times)
        self.states = np.asarray(states)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        self.meta = meta or {}

    @property
    def dim(self):
        return self.states.shape[1] // 2

    def to_csv(self, path, fis=()):
        import csv
        dim = self.dim
        names = [QNAMES[a] for a in range(dim)] + [VNAMES[a] for a in range(dim)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + names + [fi.label or f"I{i}" for i, fi in enumerate(fis)])
            for t, s in zip(self.times, self.states):
                row = [repr(float(t))] + [repr(float(v)) for v in s]
                for fi in fis:
                    row.append(repr(fi(t, s, dim).real))
                w.writerow(row)


def integrate(system, state0, t_span, tol=1e-12, samples=200):
    """Adaptive embedded Runge-Kutta integration with dense sampling.

    Uses scipy's DOP853 (8th order embedded pair) with rtol=atol=tol; raises
    StepFailure if the integrator stops early (singularity approach).
    """
    if not (1e-13 <= tol <= 1e-6):
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    t0, t1 = t_span
    ts = np.linspace(t0, t1, samples)
    sol = solve_ivp(system.rhs(), (t0, t1), np.asarray(state0, dtype=float),
                    method="DOP853", rtol=tol, atol=tol, t_eval=ts,
                    dense_output=False)
    if not sol.success or sol.t[-1] < t1 - 1e-9:
        raise StepFailure(f"integration stopped at t={sol.t[-1] if len(sol.t) else t0}",
                          last_time=sol.t[-1] if len(sol.t) else t0)
    meta = {"tol": tol, "nfev": int(sol.nfev), "method": "DOP853"}
    return Trajectory(sol.t, sol.y.T, meta)


def fi_drift(fi, traj):
    """max over samples of |I(t) - I(t0)| / (1 + |I(t0)|)."""
    dim = traj.dim
    vals = [fi(t, s, dim) for t, s in zip(traj.times, traj.states)]
    ref = vals[0]
    return max(abs(v - ref) for v in vals) / (1 + abs(ref))


# -- Poisson brackets ----------------------------------------------------------


def poisson_bracket(f, g, dim):
    """{f, g} = sum_a (df/dq^a dg/dp_a - df/dp_a dg/dq^a).

    Momenta are identified with the velocity symbols (flat kinetic metric);
    for curved metrics transform with momentum_form first.
    """
    out = ex.const(0)
    for a in range(dim):
        q, p = QNAMES[a], VNAMES[a]
        out = out + ex.differentiate(f, q) * ex.differentiate(g, p)
        out = out - ex.differentiate(f, p) * ex.differentiate(g, q)
    return out


def momentum_form(e, metric):
    """Rewrite velocities as momenta: v^a = p_a / g_aa (diagonal metric).

    The momentum symbols reuse the velocity names, so the result can be fed
    straight into poisson_bracket.
    """
    binds = {}
    for a in range(metric.dim):
        inv = metric.inverse_entry(a)
        binds[VNAMES[a]] = ex.from_poly(inv * Poly.var(VNAMES[a]))
    return ex.substitute(e, binds)


# -- functional independence ---------------------------------------------------


def independent_count(fis, dim, seed=20220513, points=5, threshold=1e-8,
                      box=None, time_value=0.0):
    """Numeric Jacobian rank of the FI family at seeded phase points.

    Rank must agree at every sample point (unanimous vote); returns -1 when
    the vote splits.
    """
    rng = np.random.default_rng(seed)
    lo, hi = box or (0.4, 1.6)
    ranks = []
    for _ in range(points):
        state = rng.uniform(lo, hi, size=2 * dim)
        signs = rng.choice([-1.0, 1.0], size=2 * dim)
        state = state * signs
        # keep coordinates away from the singular loci
        state[:dim] = np.abs(state[:dim]) + 0.1
        vals = {"t": time_value}
        for a in range(dim):
            vals[QNAMES[a]] = state[a]
            vals[VNAMES[a]] = state[dim + a]
        J = np.zeros((len(fis), 2 * dim))
        h = 1e-6
        for i, fi in enumerate(fis):
            for j, name in enumerate([QNAMES[a] for a in range(dim)]
                                     + [VNAMES[a] for a in range(dim)]):
                up = dict(vals)
                dn = dict(vals)
                up[name] += h
                dn[name] -= h
                J[i, j] = (ex.evaluate(fi.expression, up).real
                           - ex.evaluate(fi.expression, dn).real) / (2 * h)
        s = np.linalg.svd(J, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            ranks.append(0)
        else:
            ranks.append(int(np.sum(s > threshold * s[0])))
    if len(set(ranks)) != 1:
        return -1
    return ranks[0]
