"""Killing vectors, homothetic vectors and Killing tensor bases of flat space,
plus covariant-derivative machinery for diagonal polynomial metrics.

The E2/E3 bases are hard-wired in the classical parameterizations
(alpha..C for second order in the plane, a1..a10 / a1..a15 for orders three
and four, a1..a20 in space), so catalog cross-references stay literal.  A
generic ansatz solver (kt_nullspace) covers curved diagonal metrics such as
ds^2 = z^2(dx^2+dy^2)+dz^2.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .linalg import nullspace, rank, same_span
from .poly import Poly

COORDS = {1: ("x",), 2: ("x", "y"), 3: ("x", "y", "z")}


class UnsupportedDim(ValueError):
    pass


class UnsupportedOrder(ValueError):
    pass


def sorted_indices(dim, rank_):
    """All nondecreasing index tuples of the given length."""
    return list(itertools.combinations_with_replacement(range(dim), rank_))


class SymTensorField:
    """Totally symmetric tensor with Poly components, canonicalized on sorted
    index tuples."""

    __slots__ = ("dim", "rank", "components")

    def __init__(self, dim, rank_, components=None):
        self.dim = dim
        self.rank = rank_
        comps = {}
        if components:
            for idx, p in components.items():
                key = tuple(sorted(idx))
                if not p.is_zero():
                    comps[key] = comps.get(key, Poly()) + p
        self.components = {k: v for k, v in comps.items() if not v.is_zero()}

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.components.get(tuple(sorted(idx)), Poly())

    def is_zero(self, relations=None):
        return all(p.cleared(relations).is_zero() for p in self.components.values())

    def __add__(self, other):
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = out.get(k, Poly()) + v
        return SymTensorField(self.dim, self.rank, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return SymTensorField(self.dim, self.rank,
                              {k: v * c for k, v in self.components.items()})

    def map(self, fn):
        return SymTensorField(self.dim, self.rank,
                              {k: fn(v) for k, v in self.components.items()})

    def subs_params(self, values):
        return self.map(lambda p: p.subs(values))

    def __repr__(self):
        body = ", ".join(f"{idx}: {p}" for idx, p in sorted(self.components.items()))
        return f"SymTensor(dim={self.dim}, rank={self.rank}, {{{body}}})"

    def to_json(self):
        from .poly import poly_to_json
        return {
            "dim": self.dim,
            "rank": self.rank,
            "components": {"".join(map(str, k)): poly_to_json(v)
                           for k, v in sorted(self.components.items())},
        }


class DiagonalMetric:
    __slots__ = ("dim", "diag")

    def __init__(self, dim, diag=None):
        self.dim = dim
        self.diag = list(diag) if diag is not None else [Poly.const(1)] * dim
        if any(p.is_zero() for p in self.diag):
            raise ValueError("metric diagonal entry is identically zero")

    @classmethod
    def euclidean(cls, dim):
        return cls(dim)

    def is_flat_euclidean(self):
        return all(p == Poly.const(1) for p in self.diag)

    def inverse_entry(self, a):
        """1/g_aa as a Laurent Poly (diagonal entries must be monomials
        unless constant)."""
        p = self.diag[a]
        if len(p.terms) != 1:
            raise ValueError("non-monomial metric entry: cannot invert exactly")
        (m, c), = p.terms.items()
        inv = tuple((s, -e) for s, e in m)
        return Poly({inv: 1 / c})


def christoffel(g):
    """Gamma[a][b][c] as exact (Laurent) Polys; zero table for flat metrics."""
    dim = g.dim
    names = COORDS[dim]
    gamma = [[[Poly() for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
    if g.is_flat_euclidean():
        return gamma
    for a in range(dim):
        inv2 = g.inverse_entry(a) * Fraction(1, 2)
        for b in range(dim):
            for c in range(dim):
                # diagonal metric: only three derivative terms survive
                term = Poly()
                if a == b:
                    term = term + g.diag[a].diff(names[c])
                if a == c:
                    term = term + g.diag[a].diff(names[b])
                if b == c:
                    term = term - g.diag[b].diff(names[a])
                if not term.is_zero():
                    gamma[a][b][c] = inv2 * term
    return gamma


def covariant_derivative(T, g, gamma=None):
    """nabla_b T_{a1..am} (not symmetrized); returns dict (sorted A, b) -> Poly."""
    dim = T.dim
    names = COORDS[dim]
    if gamma is None:
        gamma = christoffel(g)
    out = {}
    for A in sorted_indices(dim, T.rank):
        TA = T[A]
        for b in range(dim):
            val = TA.diff(names[b])
            for pos in range(T.rank):
                for c in range(dim):
                    gam = gamma[c][b][A[pos]]
                    if gam.is_zero():
                        continue
                    idx = list(A)
                    idx[pos] = c
                    val = val - gam * T[tuple(idx)]
            if not val.is_zero():
                out[(A, b)] = val
    return out


def sym_cov_derivative(T, g, gamma=None):
    """Fully symmetrized covariant derivative T_(a1..am;b), rank m+1."""
    dim = T.dim
    nabla = covariant_derivative(T, g, gamma)
    comps = {}
    m1 = T.rank + 1
    for J in sorted_indices(dim, m1):
        total = Poly()
        for k in range(m1):
            A = J[:k] + J[k + 1:]
            b = J[k]
            total = total + nabla.get((tuple(sorted(A)), b), Poly())
        comps[J] = total * Fraction(1, m1)
    return SymTensorField(dim, m1, comps)


def verify_kt(T, g, relations=None):
    """True iff T satisfies the Killing-tensor condition for the metric g."""
    return sym_cov_derivative(T, g).is_zero(relations)


# -- explicit flat-space bases ------------------------------------------------------


def _P(**exps):
    return Poly.monomial(1, **exps)


def kv_hv_basis(dim):
    """Killing vectors and the homothetic vector of E^dim with kind tags."""
    if dim == 1:
        return [
            (SymTensorField(1, 1, {(0,): Poly.const(1)}), "gradientKV"),
            (SymTensorField(1, 1, {(0,): _P(x=1)}), "HV"),
        ]
    if dim == 2:
        return [
            (SymTensorField(2, 1, {(0,): Poly.const(1)}), "gradientKV"),
            (SymTensorField(2, 1, {(1,): Poly.const(1)}), "gradientKV"),
            (SymTensorField(2, 1, {(0,): _P(y=1), (1,): -_P(x=1)}), "nonGradientKV"),
            (SymTensorField(2, 1, {(0,): _P(x=1), (1,): _P(y=1)}), "HV"),
        ]
    if dim == 3:
        rot = [
            {(0,): -_P(y=1), (1,): _P(x=1)},
            {(0,): _P(z=1), (2,): -_P(x=1)},
            {(1,): -_P(z=1), (2,): _P(y=1)},
        ]
        out = [(SymTensorField(3, 1, {(a,): Poly.const(1)}), "gradientKV")
               for a in range(3)]
        out += [(SymTensorField(3, 1, comp), "nonGradientKV") for comp in rot]
        out.append((SymTensorField(3, 1, {(0,): _P(x=1), (1,): _P(y=1),
                                          (2,): _P(z=1)}), "HV"))
        return out
    raise UnsupportedDim(f"dim={dim}")


class KTBasis:
    __slots__ = ("dim", "order", "elements", "parameters")

    def __init__(self, dim, order, elements, parameters):
        self.dim = dim
        self.order = order
        self.elements = elements
        self.parameters = parameters

    def __len__(self):
        return len(self.elements)

    def combine(self, coeffs):
        out = SymTensorField(self.dim, self.order, {})
        for c, el in zip(coeffs, self.elements):
            if c:
                out = out + el.scale(c)
        return out


def kt_space_dimension(n, m):
    """(n+m-1)! (n+m)! / ((n-1)! n! m! (m+1)!) for constant curvature."""
    from math import factorial as f
    return f(n + m - 1) * f(n + m) // (f(n - 1) * f(n) * f(m) * f(m + 1))


def _basis_from_parametric(dim, order, comps, params):
    """Split a parameter-linear component table into one element per parameter."""
    elements = []
    for p in params:
        comp_p = {}
        for idx, poly in comps.items():
            parts = poly.split({p})
            hit = parts.get(((p, 1),))
            if hit is not None and not hit.is_zero():
                comp_p[idx] = hit
        elements.append(SymTensorField(dim, order, comp_p))
    return KTBasis(dim, order, elements, list(params))


def _general_kt_components(dim, m):
    """The paper's general KT component tables, parameter symbols included."""
    v = Poly.var
    x, y, z = _P(x=1), _P(y=1), _P(z=1)
    if (dim, m) == (1, 2):
        return {(0, 0): v("A")}, ["A"]
    if (dim, m) == (2, 2):
        al, be, ga = v("alpha"), v("beta"), v("gamma")
        A, B, C = v("A"), v("B"), v("C")
        return {
            (0, 0): ga * y ** 2 + 2 * al * y + A,
            (0, 1): -ga * x * y - al * x - be * y + C,
            (1, 1): ga * x ** 2 + 2 * be * x + B,
        }, ["alpha", "beta", "gamma", "A", "B", "C"]
    if (dim, m) == (2, 3):
        a = [None] + [v(f"a{i}") for i in range(1, 11)]
        return {
            (0, 0, 0): a[1] * y ** 3 + 3 * a[2] * y ** 2 + 3 * a[3] * y + a[4],
            (0, 0, 1): -a[1] * x * y ** 2 - 2 * a[2] * x * y + a[5] * y ** 2
                       - a[3] * x + a[8] * y + a[9],
            (0, 1, 1): a[1] * x ** 2 * y + a[2] * x ** 2 - 2 * a[5] * x * y
                       - a[8] * x - a[6] * y + a[10],
            (1, 1, 1): -a[1] * x ** 3 + 3 * a[5] * x ** 2 + 3 * a[6] * x + a[7],
        }, [f"a{i}" for i in range(1, 11)]
    if (dim, m) == (2, 4):
        a = [None] + [v(f"a{i}") for i in range(1, 16)]
        h = Fraction(1, 2)
        return {
            (0, 0, 0, 0): a[1] * y ** 4 + a[2] * y ** 3 + a[3] * y ** 2
                          + a[4] * y + a[5],
            (0, 0, 0, 1): -a[1] * x * y ** 3 - Fraction(3, 4) * a[2] * x * y ** 2
                          - a[6] * y ** 3 / 4 - a[3] * x * y * h
                          + a[10] * y ** 2 - a[4] * x / 4
                          + Fraction(3, 2) * a[11] * y + a[12],
            (0, 0, 1, 1): a[1] * x ** 2 * y ** 2 + a[2] * x ** 2 * y * h
                          + a[6] * x * y ** 2 * h + a[3] * x ** 2 / 6
                          - Fraction(4, 3) * a[10] * x * y + a[7] * y ** 2 / 6
                          - a[11] * x - a[13] * y + a[15],
            (0, 1, 1, 1): -a[1] * x ** 3 * y - a[2] * x ** 3 / 4
                          - Fraction(3, 4) * a[6] * x ** 2 * y + a[10] * x ** 2
                          - a[7] * x * y * h + Fraction(3, 2) * a[13] * x
                          - a[8] * y / 4 + a[14],
            (1, 1, 1, 1): a[1] * x ** 4 + a[6] * x ** 3 + a[7] * x ** 2
                          + a[8] * x + a[9],
        }, [f"a{i}" for i in range(1, 16)]
    if (dim, m) == (3, 2):
        a = [None] + [v(f"a{i}") for i in range(1, 21)]
        h = Fraction(1, 2)
        return {
            (0, 0): a[6] * y ** 2 * h + a[1] * z ** 2 * h + a[4] * y * z
                    + a[5] * y + a[2] * z + a[3],
            (0, 1): a[10] * z ** 2 * h - a[6] * x * y * h - a[4] * x * z * h
                    - a[14] * y * z * h - a[5] * x * h - a[15] * y * h
                    + a[16] * z + a[17],
            (0, 2): a[14] * y ** 2 * h - a[4] * x * y * h - a[1] * x * z * h
                    - a[10] * y * z * h - a[2] * x * h + a[18] * y
                    - a[11] * z * h + a[19],
            (1, 1): a[6] * x ** 2 * h + a[7] * z ** 2 * h + a[14] * x * z
                    + a[15] * x + a[12] * z + a[13],
            (1, 2): a[4] * x ** 2 * h - a[14] * x * y * h - a[10] * x * z * h
                    - a[7] * y * z * h - (a[16] + a[18]) * x - a[12] * y * h
                    - a[8] * z * h + a[20],
            (2, 2): a[1] * x ** 2 * h + a[7] * y ** 2 * h + a[10] * x * y
                    + a[11] * x + a[8] * y + a[9],
        }, [f"a{i}" for i in range(1, 21)]
    raise UnsupportedOrder(f"(dim, order) = ({dim}, {m})")


def kt_basis(dim, m):
    """The full KT basis of E^dim at order m, in the paper's parameters."""
    comps, params = _general_kt_components(dim, m)
    return _basis_from_parametric(dim, m, comps, params)


def _generator_components(dim, m):
    v = Poly.var
    x, y, z = _P(x=1), _P(y=1), _P(z=1)
    if (dim, m) == (1, 2):
        return {(0,): v("A") * x + v("a1")}, ["A", "a1"]
    if (dim, m) == (2, 2):
        al, be = v("alpha"), v("beta")
        A, B, C = v("A"), v("B"), v("C")
        a1, a2, a3 = v("a1"), v("a2"), v("a3")
        comps = {
            (0,): -2 * be * y ** 2 + 2 * al * x * y + A * x + (2 * C - a1) * y + a2,
            (1,): -2 * al * x ** 2 + 2 * be * x * y + a1 * x + B * y + a3,
        }
        return comps, ["alpha", "beta", "A", "B", "C", "a1", "a2", "a3"]
    if (dim, m) == (2, 3):
        b = [None] + [v(f"b{i}") for i in range(1, 16)]
        th = Fraction(3, 2)
        comps = {
            (0, 0): 3 * b[2] * x * y ** 2 + 3 * b[5] * y ** 3 + 3 * b[3] * x * y
                    + 3 * (b[10] + b[8]) * y ** 2 + b[4] * x + 3 * b[15] * y + b[12],
            (0, 1): -3 * b[2] * x ** 2 * y - 3 * b[5] * x * y ** 2
                    - th * b[3] * x ** 2 - th * (2 * b[10] + b[8]) * x * y
                    - th * b[6] * y ** 2 + th * (b[9] - b[15]) * x
                    - th * b[11] * y + b[13],
            (1, 1): 3 * b[2] * x ** 3 + 3 * b[5] * x ** 2 * y + 3 * b[10] * x ** 2
                    + 3 * b[6] * x * y + 3 * (b[1] + b[11]) * x + b[7] * y + b[14],
        }
        return comps, [f"b{i}" for i in range(1, 16)]
    if (dim, m) == (2, 4):
        b = [None] + [v(f"b{i}") for i in range(1, 25)]
        comps = {
            (0, 0, 0): b[2] * x * y ** 3 - b[6] * y ** 4 + b[3] * x * y ** 2
                       + 4 * b[22] * y ** 3 + b[4] * x * y + 12 * b[24] * y ** 2
                       + b[5] * x + 24 * b[15] * y + b[16],
            (0, 0, 1): -b[2] * x ** 2 * y ** 2 + b[6] * x * y ** 3
                       - Fraction(2, 3) * b[3] * x ** 2 * y
                       + Fraction(4, 3) * (b[10] - 3 * b[22]) * x * y ** 2
                       + b[7] * y ** 3 / 3 - b[4] * x ** 2 / 3
                       + 2 * (b[11] - 4 * b[24]) * x * y
                       + 2 * (2 * b[20] - b[13]) * y ** 2
                       + 4 * (b[12] / 3 - 2 * b[15]) * x + 24 * b[18] * y + b[19],
            (0, 1, 1): b[2] * x ** 3 * y - b[6] * x ** 2 * y ** 2
                       + b[3] * x ** 3 / 3
                       - Fraction(4, 3) * (2 * b[10] - 3 * b[22]) * x ** 2 * y
                       - Fraction(2, 3) * b[7] * x * y ** 2
                       - 2 * (b[11] - 2 * b[24]) * x ** 2
                       - 2 * (4 * b[20] - b[13]) * x * y - b[8] * y ** 2 / 3
                       + 2 * (b[1] - 12 * b[18]) * x
                       + 4 * (b[14] / 3 - 2 * b[21]) * y + b[23],
            (1, 1, 1): -b[2] * x ** 4 + b[6] * x ** 3 * y
                       + 4 * (b[10] - b[22]) * x ** 3 + b[7] * x ** 2 * y
                       + 12 * b[20] * x ** 2 + b[8] * x * y + 24 * b[21] * x
                       + b[9] * y + b[17],
        }
        return comps, [f"b{i}" for i in range(1, 25)]
    if (dim, m) == (3, 2):
        a = [None] + [v(f"a{i}") for i in range(1, 21)]
        comps = {
            (0,): -a[15] * y ** 2 - a[11] * z ** 2 + a[5] * x * y + a[2] * x * z
                  + 2 * (a[16] + a[18]) * y * z + a[3] * x + 2 * a[4] * y
                  + 2 * a[1] * z + a[6],
            (1,): -a[5] * x ** 2 - a[8] * z ** 2 + a[15] * x * y
                  - 2 * a[18] * x * z + a[12] * y * z + 2 * (a[17] - a[4]) * x
                  + a[13] * y + 2 * a[7] * z + a[14],
            (2,): -a[2] * x ** 2 - a[12] * y ** 2 - 2 * a[16] * x * y
                  + a[11] * x * z + a[8] * y * z + 2 * (a[19] - a[1]) * x
                  + 2 * (a[20] - a[7]) * y + a[9] * z + a[10],
        }
        return comps, [f"a{i}" for i in range(1, 21)]
    raise UnsupportedOrder(f"(dim, order) = ({dim}, {m})")


def reducible_kt_generator(dim, m):
    """(parametric generator of rank m-1, its symmetrized derivative)."""
    comps, params = _generator_components(dim, m)
    gen = SymTensorField(dim, m - 1, comps)
    generated = sym_cov_derivative(gen, DiagonalMetric.euclidean(dim))
    return gen, generated


def generator_vector_basis(dim):
    """Basis of the vector space {L : L_(a;b) is a KT} on flat E^dim,
    as (vector, generated KT) pairs, one per paper parameter."""
    comps, params = _generator_components(dim, 2)
    gen = SymTensorField(dim, 1, comps)
    generated = sym_cov_derivative(gen, DiagonalMetric.euclidean(dim))
    pairs = []
    for p in params:
        vec = SymTensorField(dim, 1, {
            idx: pol.split({p}).get(((p, 1),), Poly())
            for idx, pol in gen.components.items()})
        ktp = SymTensorField(dim, 2, {
            idx: pol.split({p}).get(((p, 1),), Poly())
            for idx, pol in generated.components.items()})
        pairs.append((vec, ktp))
    return pairs, params


# -- covariant E3 form --------------------------------------------------------------


def _eps(i, j, k):
    return {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
            (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.get((i, j, k), 0)


def cra46_family():
    """The covariant 20-parameter order-2 KT family of E^3.

    Lambda_ij = (eps_ikm eps_jln + eps_jkm eps_iln) A^{mn} q^k q^l
                + (B_(i^l eps_j)kl + lam_(i delta_j)k - delta_ij lam_k) q^k
                + D_ij
    with A, D symmetric, B symmetric traceless, lam a vector.
    """
    q = [_P(x=1), _P(y=1), _P(z=1)]
    elements = []
    names = []

    def sym_pairs():
        return [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]

    # A^{mn} part
    for (m, n) in sym_pairs():
        comp = {}
        for i in range(3):
            for j in range(i, 3):
                val = Poly()
                for k in range(3):
                    for l in range(3):
                        c = 0
                        for (mm, nn) in {(m, n), (n, m)}:
                            c += _eps(i, k, mm) * _eps(j, l, nn) \
                                 + _eps(j, k, mm) * _eps(i, l, nn)
                        if c:
                            val = val + Fraction(c) * q[k] * q[l]
                if not val.is_zero():
                    comp[(i, j)] = val
        elements.append(SymTensorField(3, 2, comp))
        names.append(f"A{m+1}{n+1}")
    # B part (traceless symmetric: B33 = -B11 - B22)
    bslots = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)]
    for (p_, q_) in bslots:
        B = [[Fraction(0)] * 3 for _ in range(3)]
        B[p_][q_] = B[q_][p_] = Fraction(1)
        if p_ == q_:
            B[2][2] -= Fraction(1)
        comp = {}
        for i in range(3):
            for j in range(i, 3):
                val = Poly()
                for k in range(3):
                    c = Poly()
                    for l in range(3):
                        e1 = _eps(j, k, l)
                        e2 = _eps(i, k, l)
                        if e1:
                            c = c + B[i][l] * Fraction(e1)
                        if e2:
                            c = c + B[j][l] * Fraction(e2)
                    if not c.is_zero():
                        val = val + c * Fraction(1, 2) * q[k]
                if not val.is_zero():
                    comp[(i, j)] = val
        elements.append(SymTensorField(3, 2, comp))
        names.append(f"B{p_+1}{q_+1}")
    # lambda part
    for s in range(3):
        comp = {}
        for i in range(3):
            for j in range(i, 3):
                val = Poly()
                for k in range(3):
                    c = Fraction(0)
                    if i == s and j == k:
                        c += Fraction(1, 2)
                    if j == s and i == k:
                        c += Fraction(1, 2)
                    if i == j and k == s:
                        c -= 1
                    if c:
                        val = val + c * q[k]
                if not val.is_zero():
                    comp[(i, j)] = val
        elements.append(SymTensorField(3, 2, comp))
        names.append(f"lam{s+1}")
    # D part
    for (m, n) in sym_pairs():
        comp = {(m, n): Poly.const(1)}
        elements.append(SymTensorField(3, 2, comp))
        names.append(f"D{m+1}{n+1}")
    return KTBasis(3, 2, elements, names)


# -- flattening and span utilities ------------------------------------------------------


def tensor_columns(tensors):
    cols = set()
    for T in tensors:
        for idx, p in T.components.items():
            for m in p.terms:
                cols.add((idx, m))
    return sorted(cols)


def tensor_vector(T, columns):
    col_ix = {c: i for i, c in enumerate(columns)}
    v = [Fraction(0)] * len(columns)
    for idx, p in T.components.items():
        for m, c in p.terms.items():
            v[col_ix[(idx, m)]] = c
    return v


def tensors_rank(tensors):
    cols = tensor_columns(tensors)
    rows = [{i: c for i, c in enumerate(tensor_vector(T, cols)) if c}
            for T in tensors]
    return rank(rows, len(cols))


def tensors_same_span(ts1, ts2):
    cols = tensor_columns(list(ts1) + list(ts2))
    v1 = [tensor_vector(T, cols) for T in ts1]
    v2 = [tensor_vector(T, cols) for T in ts2]
    return same_span(v1, v2, len(cols))


def tensor_in_span(tensors, candidate):
    cols = tensor_columns(list(tensors) + [candidate])
    vs = [tensor_vector(T, cols) for T in tensors]
    from .linalg import in_span
    return in_span(vs, tensor_vector(candidate, cols), len(cols))


# -- generic ansatz solver ---------------------------------------------------------------


def monomial_grid(names, bounds, total_degree=None):
    """All monomial exponent dicts within per-variable bounds."""
    ranges = [range(bounds[n][0], bounds[n][1] + 1) for n in names]
    out = []
    for combo in itertools.product(*ranges):
        if total_degree is not None and sum(combo) > total_degree:
            continue
        out.append(dict(zip(names, combo)))
    return out


def kt_nullspace(g, rank_, bounds=None, total_degree=None):
    """Solve the KT condition on a polynomial ansatz; returns basis tensors.

    bounds: {var: (min_exp, max_exp)}; defaults to 0..rank_+2 per coordinate.
    """
    dim = g.dim
    names = COORDS[dim]
    if bounds is None:
        bounds = {n: (0, rank_ + 2) for n in names}
    grid = monomial_grid(names, bounds, total_degree)
    idxs = sorted_indices(dim, rank_)
    unknowns = [(idx, tuple(sorted(m.items()))) for idx in idxs for m in grid]
    u_ix = {u: i for i, u in enumerate(unknowns)}
    # ansatz with one fresh parameter symbol per unknown
    comps = {}
    psyms = []
    for i, (idx, m) in enumerate(unknowns):
        name = f"@c{i}"
        psyms.append(name)
        mono = Poly.monomial(1, **dict(m))
        comps.setdefault(idx, Poly())
        comps[idx] = comps[idx] + Poly.var(name) * mono
    T = SymTensorField(dim, rank_, comps)
    resid = sym_cov_derivative(T, g)
    rows = []
    pset = set(psyms)
    for J in sorted_indices(dim, rank_ + 1):
        p = resid[J].cleared()
        # split residual by non-parameter monomials
        parts = {}
        for m, c in p.terms.items():
            par = tuple((s, e) for s, e in m if s in pset)
            rest = tuple((s, e) for s, e in m if s not in pset)
            parts.setdefault(rest, {})[par] = c
        for rest, by_param in parts.items():
            row = {}
            for par, c in by_param.items():
                assert len(par) == 1 and par[0][1] == 1
                row[int(par[0][0][2:])] = c
            rows.append(row)
    basis = nullspace(rows, len(unknowns))
    out = []
    for v in basis:
        comp = {}
        for val, (idx, m) in zip(v, unknowns):
            if val:
                comp.setdefault(idx, Poly())
                comp[idx] = comp[idx] + Poly.monomial(val, **dict(m))
        out.append(SymTensorField(dim, rank_, comp))
    return out


def gradient_of(scalar_poly, dim):
    names = COORDS[dim]
    return SymTensorField(dim, 1, {(a,): scalar_poly.diff(names[a])
                                   for a in range(dim)})
