"""Exact linear algebra over the rationals (and Gaussian rationals).

Rows are sparse dicts column -> coefficient.  The nullspace routine returns
basis vectors in reduced row-echelon order over the caller's fixed column
ordering, so solver output is deterministic.

For spectral problems M(mu) x = 0 with entries polynomial in a parameter,
determinants of square compressions are computed exactly by evaluation at
rational points plus Lagrange interpolation; candidate eigenvalues are the
rational roots of the gcd of several compressions, each re-verified by exact
rank drop.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .scalars import GaussianRational


def _rows_copy(rows):
    return [dict(r) for r in rows if r]


def rref(rows, ncols):
    """Reduced row echelon form.  Returns (pivots, reduced rows)."""
    rows = _rows_copy(rows)
    pivots = []
    reduced = []
    for col in range(ncols):
        pr = None
        for i, r in enumerate(rows):
            if r.get(col):
                pr = i
                break
        if pr is None:
            continue
        row = rows.pop(pr)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        nxt = []
        for r in rows:
            f = r.get(col)
            if f:
                out = dict(r)
                for c, v in row.items():
                    n = out.get(c, 0) - f * v
                    if n == 0:
                        out.pop(c, None)
                    else:
                        out[c] = n
                if out:
                    nxt.append(out)
            else:
                nxt.append(r)
        rows = nxt
        for prev in reduced:
            f = prev.get(col)
            if f:
                for c, v in row.items():
                    n = prev.get(c, 0) - f * v
                    if n == 0:
                        prev.pop(c, None)
                    else:
                        prev[c] = n
        reduced.append(dict(row))
        pivots.append(col)
    return pivots, reduced


def rank(rows, ncols):
    return len(rref(rows, ncols)[0])


def nullspace(rows, ncols):
    """Basis of the solution space of the homogeneous system, one vector per
    free column, in increasing free-column order.  Vectors are lists."""
    pivots, reduced = rref(rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for prow, pcol in zip(reduced, pivots):
            coef = prow.get(fc)
            if coef:
                v[pcol] = -coef
        basis.append(v)
    return basis


def solve_particular(rows, rhs, ncols):
    """One solution of A x = b, or None.  rows sparse, rhs dense list."""
    aug = []
    for r, b in zip(rows, rhs):
        row = dict(r)
        if b:
            row[ncols] = -b
        aug.append(row)
    pivots, reduced = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for prow, pcol in zip(reduced, pivots):
        x[pcol] = -prow.get(ncols, Fraction(0))
    return x


def in_span(vectors, candidate, ncols):
    """Exact rational membership of candidate in span(vectors)."""
    rows = [{i: v for i, v in enumerate(vec) if v} for vec in vectors]
    base = rank(rows, ncols)
    rows.append({i: v for i, v in enumerate(candidate) if v})
    return rank(rows, ncols) == base


def same_span(vs1, vs2, ncols):
    rows1 = [{i: v for i, v in enumerate(vec) if v} for vec in vs1]
    rows2 = [{i: v for i, v in enumerate(vec) if v} for vec in vs2]
    r1 = rank(rows1, ncols)
    r2 = rank(rows2, ncols)
    rall = rank(rows1 + rows2, ncols)
    return r1 == r2 == rall


# -- univariate polynomials over Q (dense coefficient lists, low->high) --------


def poly_eval(coeffs, x):
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def poly_trim(coeffs):
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def poly_gcd(a, b):
    a = poly_trim(list(a))
    b = poly_trim(list(b))
    while b:
        # a mod b
        a = list(a)
        while len(a) >= len(b) and a:
            f = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] -= f * c
            poly_trim(a)
        a, b = b, a
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def rational_roots(coeffs):
    """All rational roots (with multiplicity collapsed) of a Q-poly."""
    coeffs = poly_trim(list(coeffs))
    if not coeffs:
        return []
    roots = []
    while coeffs and coeffs[0] == 0:
        if 0 not in roots:
            roots.append(Fraction(0))
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return roots
    # integer-primitive form
    from math import gcd, lcm
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g:
        ints = [c // g for c in ints]
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(n):
        out = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.append(d)
                out.append(n // d)
            d += 1
        return sorted(set(out))

    for p in divisors(a0) or [1]:
        for q in divisors(an) or [1]:
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand not in roots and poly_eval(coeffs, cand) == 0:
                    roots.append(cand)
    return sorted(roots)


# -- spectral rank-drop search -----------------------------------------------------


class SpectralSearchInconclusive(RuntimeError):
    """Root isolation for the parametric system failed."""


def _dense_det(mat):
    """Exact determinant: clear rows to integers, then Bareiss."""
    n = len(mat)
    if n == 0:
        return Fraction(1)
    from math import lcm
    scale = 1
    m = []
    for row in mat:
        den = 1
        for v in row:
            den = lcm(den, Fraction(v).denominator)
        scale *= den
        m.append([int(v * den) for v in row])
    det = _bareiss(m)
    return Fraction(det, scale)


def _bareiss(m):
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pr = None
            for i in range(k + 1, n):
                if m[i][k]:
                    pr = i
                    break
            if pr is None:
                return 0
            m[k], m[pr] = m[pr], m[k]
            sign = -sign
        pkk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            ri = m[i]
            rk = m[k]
            for j in range(k + 1, n):
                ri[j] = (pkk * ri[j] - mik * rk[j]) // prev
            ri[k] = 0
        prev = pkk
    return sign * m[n - 1][n - 1]


def _reduce_parametric(rows, ncols):
    """Eliminate unknowns pinned by parameter-free rows; returns
    (reduced parametric rows, n free columns).  Rank drops of the reduced
    system coincide with those of the full system."""
    def is_const(r):
        return all(len(cl) <= 1 for cl in r.values())

    const_rows = [{c: cl[0] for c, cl in r.items() if cl and cl[0]}
                  for r in rows if is_const(r)]
    param_rows = [r for r in rows if not is_const(r)]
    if not const_rows:
        return rows, ncols, None
    pivots, reduced = rref(const_rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    free_ix = {c: i for i, c in enumerate(free)}
    subs = {}
    for prow, pcol in zip(reduced, pivots):
        subs[pcol] = {c: -v for c, v in prow.items() if c != pcol}
    out = []
    for r in param_rows:
        new = {}
        for col, cl in r.items():
            targets = subs.get(col)
            if targets is None:
                dst = new.setdefault(free_ix[col], [])
                for k, c in enumerate(cl):
                    while len(dst) <= k:
                        dst.append(Fraction(0))
                    dst[k] += c
            else:
                for c2, v in targets.items():
                    dst = new.setdefault(free_ix[c2], [])
                    for k, c in enumerate(cl):
                        while len(dst) <= k:
                            dst.append(Fraction(0))
                        dst[k] += c * v
        new = {c: poly_trim(cl) for c, cl in new.items()}
        new = {c: cl for c, cl in new.items() if cl}
        if new:
            out.append(new)
    return out, len(free), (pivots, free)


def spectral_roots(rows_of_polys, ncols, *, n_compressions=8, seed=20220513,
                   max_degree=None, strict=False, full=False):
    """Candidate parameter values where M(mu) loses rank.

    ``rows_of_polys``: sparse rows col -> coefficient list in the parameter.
    Returns sorted rational candidates (each to be re-verified by exact rank
    drop by the caller).  When a non-rational factor with real roots survives
    the compression gcd, it is returned in the ``unresolved`` slot of the
    full result (``full=True``) or raises SpectralSearchInconclusive when
    ``strict`` is set; those eigenvalues exist but cannot be certified
    exactly over the rationals.
    """
    def _result(roots, unresolved=None):
        if unresolved is not None and strict:
            raise SpectralSearchInconclusive(
                f"non-rational factor of degree {len(unresolved)-1} remains")
        if full:
            return {"roots": roots, "unresolved": unresolved}
        return roots

    rows = [r for r in rows_of_polys if r]
    rows, ncols, _lift = _reduce_parametric(rows, ncols)
    nrows = len(rows)
    if ncols == 0:
        return _result([])
    if nrows < ncols:
        return _result([])
    degs = [max((len(c) - 1 for c in r.values()), default=0) for r in rows]
    col_degs = {}
    for r in rows:
        for col, cl in r.items():
            col_degs[col] = max(col_degs.get(col, 0), len(cl) - 1)
    col_bound = sum(col_degs.values())
    rng = random.Random(seed)
    gcd_poly = None
    stable = 0
    for _ in range(n_compressions):
        # random square compression: ncols random combinations of rows
        comp_deg = 0
        comp = []
        for _ in range(ncols):
            weights = [Fraction(rng.randint(-9, 9)) for _ in range(nrows)]
            rowpoly = [dict() for _ in range(max(degs) + 1)]
            for w, r, d in zip(weights, rows, degs):
                if w == 0:
                    continue
                for col, cl in r.items():
                    for k, c in enumerate(cl):
                        if c:
                            rowpoly[k][col] = rowpoly[k].get(col, 0) + w * c
            comp.append(rowpoly)
            comp_deg = max(comp_deg, max((k for k, d_ in enumerate(rowpoly) if d_),
                                         default=0))
        degree_bound = sum(
            max((k for k, d_ in enumerate(rp) if d_), default=0) for rp in comp)
        degree_bound = min(degree_bound, col_bound)
        if max_degree is not None:
            degree_bound = min(degree_bound, max_degree)
        # evaluate det at degree_bound+1 points, interpolate
        xs = [Fraction(i) for i in range(degree_bound + 1)]
        ys = []
        for xv in xs:
            mat = []
            for rp in comp:
                dense = [Fraction(0)] * ncols
                for k, layer in enumerate(rp):
                    if not layer:
                        continue
                    xk = xv ** k
                    for col, c in layer.items():
                        dense[col] += c * xk
                mat.append(dense)
            ys.append(_dense_det(mat))
        det = _lagrange(xs, ys)
        det = poly_trim(det)
        if not det:
            continue
        new_gcd = det if gcd_poly is None else poly_gcd(gcd_poly, det)
        stable = stable + 1 if (gcd_poly is not None and new_gcd == gcd_poly) else 0
        gcd_poly = new_gcd
        if len(gcd_poly) == 1:
            return _result([])
        if stable >= 2:
            break
    if gcd_poly is None:
        # every compression was singular as a polynomial: cannot isolate
        raise SpectralSearchInconclusive(
            "all random compressions identically singular")
    roots = rational_roots(gcd_poly)
    # deflate rational roots; what remains holds any non-rational eigenvalues
    rem = list(gcd_poly)
    for r0 in roots:
        while len(rem) > 1 and poly_eval(rem, r0) == 0:
            out = []
            carry = Fraction(0)
            for c in reversed(rem):
                carry = c + carry * r0
                out.append(carry)
            out.reverse()
            rem = poly_trim(out[1:])
    if len(rem) == 2:
        roots.append(-rem[0] / rem[1])
        rem = []
    unresolved = rem if (len(rem) > 2 and _has_real_root(rem)) else None
    return _result(sorted(set(roots)), unresolved)


def _lagrange(xs, ys):
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        num = [Fraction(1)]
        den = Fraction(1)
        for j in range(n):
            if i == j:
                continue
            num = _times_linear(num, -xs[j])
            den *= xs[i] - xs[j]
        f = ys[i] / den
        for k, c in enumerate(num):
            coeffs[k] += f * c
    return coeffs


def _times_linear(p, c0):
    """p(x) * (x + c0)"""
    out = [Fraction(0)] * (len(p) + 1)
    for i, c in enumerate(p):
        out[i] += c * c0
        out[i + 1] += c
    return out


def _has_real_root(coeffs):
    """Crude check: odd degree always, else sample sign changes numerically."""
    deg = len(coeffs) - 1
    if deg % 2 == 1:
        return True
    import numpy as np
    roots = np.roots([float(c) for c in reversed(coeffs)])
    return any(abs(r.imag) < 1e-9 for r in roots)


def eval_param_rows(rows_of_polys, value):
    """Specialize parametric rows at a rational parameter value."""
    out = []
    for r in rows_of_polys:
        row = {}
        for col, cl in r.items():
            v = poly_eval(cl, value)
            if v:
                row[col] = v
        out.append(row)
    return out
