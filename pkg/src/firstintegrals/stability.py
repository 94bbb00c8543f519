"""Fixed points, linearization, and the trace-determinant classification of
planar linear systems, with the Brans-Dicke scaling system as the worked
application.

Exact (rational) matrices are classified with exact comparisons; floating
matrices use borderline tolerances |tr|, |Delta| <= 1e-10 (1 + |A|).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .poly import Poly

LABELS = (
    "saddle", "source", "sink", "spiralSource", "spiralSink", "center",
    "starSource", "starSink", "degenerateSource", "degenerateSink",
    "lineOfUnstableFixedPoints", "lineOfStableFixedPoints",
    "uniformMotionLine", "planeOfFixedPoints",
)


class PlanarClass:
    __slots__ = ("label", "trace", "det", "discriminant", "eigenvalues",
                 "eigenvector_count", "hyperbolic")

    def __init__(self, label, trace, det, disc, eigenvalues, evec_count,
                 hyperbolic):
        self.label = label
        self.trace = trace
        self.det = det
        self.discriminant = disc
        self.eigenvalues = eigenvalues
        self.eigenvector_count = evec_count
        self.hyperbolic = hyperbolic

    def to_json(self):
        return {
            "label": self.label,
            "trace": _num(self.trace),
            "det": _num(self.det),
            "discriminant": _num(self.discriminant),
            "eigenvalues": [str(e) for e in self.eigenvalues],
            "eigenvector_count": self.eigenvector_count,
            "hyperbolic": self.hyperbolic,
            "linearization_conclusive": self.hyperbolic,
        }

    def __repr__(self):
        return f"PlanarClass({self.label})"


def _num(x):
    return float(x) if isinstance(x, Fraction) else x


def classify_planar(A):
    """Full planar classification by trace, determinant and discriminant;
    the double-eigenvalue boundary uses the eigenvector-count criterion
    (two eigenvectors iff A is a multiple of the identity)."""
    a, b = A[0]
    c, d = A[1]
    exact = all(isinstance(v, (int, Fraction)) for v in (a, b, c, d))
    if exact:
        a, b, c, d = Fraction(a), Fraction(b), Fraction(c), Fraction(d)
        tol = 0
    else:
        norm = max(abs(float(v)) for v in (a, b, c, d)) or 1.0
        tol = 1e-10 * (1 + norm)
    tr = a + d
    det = a * d - b * c
    disc = tr * tr - 4 * det

    def zero(v):
        return v == 0 if exact else abs(v) <= tol

    if zero(disc):
        lam = tr / 2
        is_scalar = zero(b) and zero(c) and zero(a - d)
        evec_count = 2 if is_scalar else 1
        if zero(tr):
            if is_scalar and zero(a):
                return PlanarClass("planeOfFixedPoints", tr, det, disc,
                                   [0, 0], 2, False)
            return PlanarClass("uniformMotionLine", tr, det, disc, [0, 0],
                               1, False)
        if tr > 0:
            label = "starSource" if evec_count == 2 else "degenerateSource"
        else:
            label = "starSink" if evec_count == 2 else "degenerateSink"
        return PlanarClass(label, tr, det, disc, [lam, lam], evec_count, True)
    if disc > 0:
        root = _sqrt(disc, exact)
        lp, lm = (tr + root) / 2, (tr - root) / 2
        if zero(det):
            if tr > 0:
                return PlanarClass("lineOfUnstableFixedPoints", tr, det, disc,
                                   [lp, 0], 2, False)
            return PlanarClass("lineOfStableFixedPoints", tr, det, disc,
                               [0, lm], 2, False)
        if det < 0:
            return PlanarClass("saddle", tr, det, disc, [lp, lm], 2, True)
        if tr > 0:
            return PlanarClass("source", tr, det, disc, [lp, lm], 2, True)
        return PlanarClass("sink", tr, det, disc, [lp, lm], 2, True)
    # disc < 0: complex pair sigma +- i omega
    sigma = tr / 2
    omega = _sqrt(-disc, exact) / 2
    eig = [complex(float(sigma), float(omega)),
           complex(float(sigma), -float(omega))]
    if zero(tr):
        return PlanarClass("center", tr, det, disc, eig, 2, False)
    if tr > 0:
        return PlanarClass("spiralSource", tr, det, disc, eig, 2, True)
    return PlanarClass("spiralSink", tr, det, disc, eig, 2, True)


def _sqrt(v, exact):
    if exact:
        f = Fraction(v)
        from math import isqrt
        rn, rd = isqrt(f.numerator), isqrt(f.denominator)
        if rn * rn == f.numerator and rd * rd == f.denominator:
            return Fraction(rn, rd)
        return float(v) ** 0.5
    return float(v) ** 0.5


# -- fixed points of polynomial planar systems ----------------------------------------


def fixed_points(rhs, seeds=None, grid=5, box=2.5, tol=1e-12, dedup=1e-8):
    """Zeros of a polynomial vector field by Newton refinement from a grid
    (plus optional seeds); points with |rhs| <= tol, deduplicated."""
    names = ("x", "y", "z")[:len(rhs)]
    dim = len(rhs)
    J = [[rhs[i].diff(names[j]) for j in range(dim)] for i in range(dim)]

    def f(p):
        vals = dict(zip(names, p))
        return np.array([rhs[i].eval(vals).real for i in range(dim)])

    def jac(p):
        vals = dict(zip(names, p))
        return np.array([[J[i][j].eval(vals).real for j in range(dim)]
                         for i in range(dim)])

    starts = [np.array(s, dtype=float) for s in (seeds or [])]
    lin = np.linspace(-box, box, grid)
    starts += [np.array(p) for p in itertools.product(lin, repeat=dim)]
    found = []
    for p in starts:
        p = p.copy()
        ok = False
        for _ in range(60):
            fv = f(p)
            if np.max(np.abs(fv)) <= tol:
                ok = True
                break
            Jv = jac(p)
            try:
                step = np.linalg.solve(Jv, fv)
            except np.linalg.LinAlgError:
                break
            p = p - step
            if not np.all(np.isfinite(p)) or np.max(np.abs(p)) > 1e6:
                break
        if ok:
            if not any(np.max(np.abs(p - q)) <= dedup for q in found):
                found.append(p)
    return sorted((tuple(round(float(v), 12) for v in p) for p in found))


def linearize(rhs, point):
    """Exact Jacobian of the polynomial field evaluated at the point."""
    names = ("x", "y", "z")[:len(rhs)]
    dim = len(rhs)
    exact = all(isinstance(v, (int, Fraction)) for v in point)
    out = []
    for i in range(dim):
        row = []
        for j in range(dim):
            d = rhs[i].diff(names[j])
            if exact:
                row.append(_eval_exact(d, dict(zip(names, point))))
            else:
                row.append(d.eval(dict(zip(names, point))).real)
        out.append(row)
    return out


def _eval_exact(p, vals):
    total = Fraction(0)
    for m, c in p.terms.items():
        v = Fraction(c)
        for s, e in m:
            v *= Fraction(vals[s]) ** e
        total += v
    return total


# -- Brans-Dicke scaling system --------------------------------------------------------


def bd_rhs(n):
    """x' = y, y' = 2(n+3)/(n^2-1) y + 8/((n-1)^2 (n+1)) (x^n - x)."""
    n = int(n)
    if n in (1, -1):
        raise ValueError("n = +-1 is excluded")
    x, y = Poly.var("x"), Poly.var("y")
    cy = Fraction(2 * (n + 3), n * n - 1)
    cx = Fraction(8, (n - 1) ** 2 * (n + 1))
    if n >= 0:
        xn = Poly.monomial(1, x=n)
    else:
        xn = Poly.monomial(1, x=n)  # Laurent power; equilibria away from 0
    return [y, cy * y + cx * (xn - x)]


def bd_equilibria(n):
    pts = [(Fraction(1), Fraction(0))]
    if int(n) % 2 == 1:
        pts.append((Fraction(-1), Fraction(0)))
    if int(n) > 0:
        pts.insert(0, (Fraction(0), Fraction(0)))
    return pts


def bd_scaling_report(n):
    """Classification of every equilibrium of the scaling system."""
    n = int(n)
    rhs = bd_rhs(n)
    report = {}
    for pt in bd_equilibria(n):
        if pt[0] == 0 and n < 2:
            continue
        J = linearize(rhs, pt)
        label = {(Fraction(1), Fraction(0)): "P",
                 (Fraction(-1), Fraction(0)): "Pbar",
                 (Fraction(0), Fraction(0)): "O"}[pt]
        report[label] = classify_planar(J)
    return report


def portrait_csv(rhs, path, box=2.0, grid=6, steps=200, dt=0.02):
    """Trajectory bundle on a grid of initial conditions (fixed step count),
    for external phase-portrait plotting."""
    import csv

    names = ("x", "y")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trajectory", "step", "t", "x", "y"])
        lin = np.linspace(-box, box, grid)
        tid = 0
        for x0 in lin:
            for y0 in lin:
                p = np.array([x0, y0])
                t = 0.0
                for s in range(steps):
                    w.writerow([tid, s, round(t, 6), repr(float(p[0])),
                                repr(float(p[1]))])
                    vals = dict(zip(names, p))
                    try:
                        k1 = np.array([r.eval(vals).real for r in rhs])
                        vals2 = dict(zip(names, p + dt * k1 / 2))
                        k2 = np.array([r.eval(vals2).real for r in rhs])
                        p = p + dt * k2
                        t += dt
                    except Exception:
                        break
                    if not np.all(np.isfinite(p)) or np.max(np.abs(p)) > 1e3:
                        break
                tid += 1
    return path
