"""Sparse exact multivariate (Laurent) polynomials.

Terms map monomials to Fraction / GaussianRational coefficients.  Exponents
are integers and may be negative (Laurent terms); this is what keeps central
potentials k/r^nu and curved-metric Christoffel entries inside one type.

Certain symbols carry an algebraic relation ``s**k = P`` (a polynomial in
other symbols).  The workhorse relations are ``r**2 = x**2+y**2+z**2`` in 3d
and ``rxy**2 = x**2+y**2`` in the plane; zero-testing and differentiation
consult a relations mapping so that e.g. d r/dx = x/r stays in the ring.

Polynomials are immutable after construction; all operations are pure.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import GaussianRational, as_scalar, scalar_to_complex

# Canonical symbol order: t, coordinates, velocities, spectral parameter,
# then auxiliaries alphabetically.  Keeps every serialized form deterministic.
_CANON = {"t": 0, "x": 1, "y": 2, "z": 3, "vx": 4, "vy": 5, "vz": 6, "lam": 7}


def sym_rank(name):
    r = _CANON.get(name)
    if r is not None:
        return (0, r, name)
    return (1, 0, name)


def _mono_mul(m1, m2):
    d = dict(m1)
    for s, e in m2:
        n = d.get(s, 0) + e
        if n:
            d[s] = n
        else:
            d.pop(s, None)
    return tuple(sorted(d.items(), key=lambda p: sym_rank(p[0])))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for m, c in terms.items():
                c = as_scalar(c)
                if c != 0:
                    t[m] = c
        self.terms = t

    # -- constructors --------------------------------------------------------

    @classmethod
    def const(cls, c):
        c = as_scalar(c)
        return cls({(): c}) if c != 0 else cls()

    @classmethod
    def var(cls, name, exp=1):
        if exp == 0:
            return cls.const(1)
        return cls({((name, exp),): Fraction(1)})

    @classmethod
    def monomial(cls, coeff, **exps):
        m = tuple(sorted(((s, e) for s, e in exps.items() if e),
                         key=lambda p: sym_rank(p[0])))
        return cls({m: as_scalar(coeff)})

    # -- basic queries --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        return self.terms.get((), Fraction(0))

    def symbols(self):
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def degree(self, name=None):
        """Total degree, or degree in one symbol (0 for absent symbol)."""
        if not self.terms:
            return 0
        if name is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    def min_exponent(self, name):
        return min((dict(m).get(name, 0) for m in self.terms), default=0)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        for m, c in other.terms.items():
            n = t.get(m, 0) + c
            if n == 0:
                t.pop(m, None)
            else:
                t[m] = n
        p = Poly.__new__(Poly)
        p.terms = t
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Poly.__new__(Poly)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly()
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                n = t.get(m, 0) + c1 * c2
                if n == 0:
                    t.pop(m, None)
                else:
                    t[m] = n
        p = Poly.__new__(Poly)
        p.terms = t
        return p

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = as_scalar(c)
        p = Poly.__new__(Poly)
        p.terms = {m: v / c for m, v in self.terms.items()}
        return p

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Poly power needs a nonnegative integer")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus ---------------------------------------------------------------

    def diff(self, name, relations=None):
        """Exact partial derivative; chain rule through algebraic symbols."""
        relations = STANDARD_RELATIONS if relations is None else relations
        out = {}

        def _acc(m, c):
            if c == 0:
                return
            n = out.get(m, 0) + c
            if n == 0:
                out.pop(m, None)
            else:
                out[m] = n

        for m, c in self.terms.items():
            md = dict(m)
            for s, e in m:
                rest = dict(md)
                if s == name:
                    if e == 1:
                        rest.pop(s)
                    else:
                        rest[s] = e - 1
                    _acc(tuple(sorted(rest.items(), key=lambda p: sym_rank(p[0]))),
                         c * e)
                elif s in relations:
                    k, base = relations[s]
                    dbase = base.diff(name, relations)
                    if dbase.is_zero():
                        continue
                    # d(s**e)/dv = (e/k) * dP/dv * s**(e-k)
                    if e == k:
                        rest.pop(s)
                    else:
                        rest[s] = e - k
                    restm = tuple(sorted(rest.items(), key=lambda p: sym_rank(p[0])))
                    factor = Fraction(e, k) * c
                    for bm, bc in dbase.terms.items():
                        _acc(_mono_mul(restm, bm), factor * bc)
        p = Poly.__new__(Poly)
        p.terms = out
        return p

    # -- relation handling --------------------------------------------------------

    def reduce(self, relations=None):
        """Rewrite s**e -> P**(e//k) * s**(e%k) for every relation symbol (e>=k)."""
        relations = STANDARD_RELATIONS if relations is None else relations
        cur = self
        changed = True
        while changed:
            changed = False
            out = Poly()
            for m, c in cur.terms.items():
                md = dict(m)
                factor = None
                for s, e in m:
                    if s in relations and e >= relations[s][0]:
                        k, base = relations[s]
                        q, rem = divmod(e, k)
                        if rem:
                            md[s] = rem
                        else:
                            md.pop(s)
                        factor = base ** q
                        changed = True
                        break
                rest = Poly({tuple(sorted(md.items(), key=lambda p: sym_rank(p[0]))): c})
                out = out + (rest * factor if factor is not None else rest)
            cur = out
        return cur

    def cleared(self, relations=None):
        """Multiply by positive symbol powers until all exponents are >= 0,
        then reduce.  Zero is preserved (symbols are nonzero on the domain)."""
        relations = STANDARD_RELATIONS if relations is None else relations
        shifts = {}
        for m in self.terms:
            for s, e in m:
                if e < 0:
                    shifts[s] = max(shifts.get(s, 0), -e)
        if not shifts:
            return self.reduce(relations)
        mult = Poly.const(1)
        for s, e in sorted(shifts.items()):
            mult = mult * Poly.var(s, e)
        return (self * mult).reduce(relations)

    def equals_cleared(self, other, relations=None):
        return (self - other).cleared(relations).is_zero()

    # -- substitution / evaluation ---------------------------------------------------

    def subs(self, mapping, relations=None):
        """Simultaneous substitution name -> Poly (or scalar).

        Substituted symbols must occur with nonnegative exponents unless the
        replacement is a plain nonzero scalar or a single Laurent monomial.
        """
        mapping = {k: _as_poly(v) for k, v in mapping.items()}
        out = Poly()
        for m, c in self.terms.items():
            term = Poly({(): c})
            for s, e in m:
                rep = mapping.get(s)
                if rep is None:
                    term = term * Poly.var(s, e)
                elif e >= 0:
                    term = term * rep ** e
                elif len(rep.terms) == 1:
                    (rm, rc), = rep.terms.items()
                    inv = Poly({tuple((rs, -re) for rs, re in rm): 1 / rc})
                    term = term * inv ** (-e)
                else:
                    raise ValueError(
                        f"cannot substitute into negative power of {s}")
            out = out + term
        return out

    def eval(self, values, relations=None):
        """Numeric evaluation; radical symbols default to sqrt/k-th root of
        their relation polynomial when not supplied explicitly."""
        relations = STANDARD_RELATIONS if relations is None else relations
        vals = dict(values)
        need = self.symbols() - set(vals)
        for s in sorted(need):
            if s in relations:
                k, base = relations[s]
                v = base.eval(vals, relations)
                vals[s] = v ** (1.0 / k) if k != 2 else _sqrt(v)
            else:
                raise KeyError(f"no value for symbol {s}")
        total = 0j
        for m, c in self.terms.items():
            v = scalar_to_complex(c)
            for s, e in m:
                v *= vals[s] ** e
            total += v
        return total

    # -- structure ------------------------------------------------------------------

    def split(self, names):
        """Write self = sum coeff(idx) * monomial(idx) over the given symbols.

        Returns {reduced monomial over names: Poly in the remaining symbols}.
        """
        names = set(names)
        out = {}
        for m, c in self.terms.items():
            inner = tuple((s, e) for s, e in m if s in names)
            outer = tuple((s, e) for s, e in m if s not in names)
            out.setdefault(inner, {})[outer] = c
        return {k: Poly(v) for k, v in sorted(out.items())}

    def coefficient(self, names_exps):
        """Coefficient Poly of an exact monomial, e.g. {('x',2),('y',1)}."""
        target = tuple(sorted(names_exps, key=lambda p: sym_rank(p[0])))
        names = {s for s, _ in names_exps}
        return self.split(names).get(target, Poly())

    # -- display ----------------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda mc: (sum(e for _, e in mc[0]),
                                      tuple((sym_rank(s), e) for s, e in mc[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m)
            if isinstance(c, GaussianRational):
                cs = repr(c)
            else:
                cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        s = " + ".join(parts).replace("+ -", "- ")
        return s

    __repr__ = __str__


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return Poly.const(x)
    return NotImplemented


def _sqrt(v):
    c = complex(v)
    return c ** 0.5


# Radial symbols: r is the 3d radius, rxy the planar one.  Odd powers stay
# symbolic; even powers reduce to coordinate polynomials.
STANDARD_RELATIONS = {
    "r": (2, Poly.monomial(1, x=2) + Poly.monomial(1, y=2) + Poly.monomial(1, z=2)),
    "rxy": (2, Poly.monomial(1, x=2) + Poly.monomial(1, y=2)),
}


def poly_parse(text):
    """Parse 'sum of coefficient*monomial' text, e.g. '3/2 x^2 y - z + 1'.

    Grammar: terms split on +/-; each term is an optional rational coefficient
    followed by optional symbol factors 'name' or 'name^int' separated by '*'
    or whitespace.  This is the CLI wire grammar for potentials and metrics.
    """
    import re

    text = text.replace("**", "^").strip()
    if not text:
        return Poly()
    tokens = re.findall(r"[+-]|[A-Za-z_][A-Za-z_0-9]*(?:\^-?\d+)?|\d+/\d+|\d+|\(|\)", text)
    out = Poly()
    sign = 1
    cur = None
    for tok in tokens + ["+"]:
        if tok in "+-":
            if cur is not None:
                out = out + cur * sign
            sign = 1 if tok == "+" else -1
            cur = None
        elif tok in "()":
            raise ValueError("parenthesized input is not supported; expand first")
        elif re.fullmatch(r"\d+/\d+|\d+", tok):
            f = Fraction(tok)
            cur = Poly.const(f) if cur is None else cur * f
        else:
            if "^" in tok:
                name, e = tok.split("^")
                p = Poly.var(name, int(e))
            else:
                p = Poly.var(tok)
            cur = p if cur is None else cur * p
    return out


def poly_to_json(p):
    return [
        {"coeff": _scalar_json(c), "monomial": {s: e for s, e in m}}
        for m, c in p.sorted_terms()
    ]


def poly_from_json(data):
    t = {}
    for item in data:
        m = tuple(sorted(((s, int(e)) for s, e in item["monomial"].items()),
                         key=lambda q: sym_rank(q[0])))
        t[m] = _scalar_from_json(item["coeff"])
    return Poly(t)


def _scalar_json(c):
    if isinstance(c, GaussianRational):
        return {"re": str(c.re), "im": str(c.im)}
    return str(c)


def _scalar_from_json(d):
    if isinstance(d, dict):
        return GaussianRational(Fraction(d["re"]), Fraction(d["im"]))
    return Fraction(d)
