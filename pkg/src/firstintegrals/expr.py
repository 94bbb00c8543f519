"""Closed-form expression layer on top of the polynomial kernel.

An Expr is a tree over: exact constants, symbols, sums, products, powers with
rational exponents, exp, ln, sin, cos, and embedded polynomials.  The layer
supplies exact differentiation, substitution, numeric evaluation, and a
zero-test that works by mapping the expression onto the Laurent-polynomial
ring with algebraic relations (r**2 -> x**2+y**2+z**2, cos**2 -> 1-sin**2,
q-th roots, exponentials as Laurent units).

There is deliberately no general simplifier: products of exponentials merge,
like powers combine, and constants fold, nothing else.
"""

from __future__ import annotations

import cmath
from fractions import Fraction

from .poly import Poly, STANDARD_RELATIONS, sym_rank
from .scalars import GaussianRational, as_scalar, scalar_to_complex


class DomainError(ValueError):
    """Numeric evaluation hit an undefined point (ln of nonpositive, 0**neg)."""


class UnsupportedForm(ValueError):
    """Zero-testing could not reduce the expression to polynomial form."""


class Expr:
    __slots__ = ()

    # arithmetic sugar ------------------------------------------------------

    def __add__(self, other):
        return add(self, _as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(Const(-1), _as_expr(other)))

    def __rsub__(self, other):
        return add(_as_expr(other), mul(Const(-1), self))

    def __mul__(self, other):
        return mul(self, _as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, pow_(_as_expr(other), Fraction(-1)))

    def __rtruediv__(self, other):
        return mul(_as_expr(other), pow_(self, Fraction(-1)))

    def __neg__(self):
        return mul(Const(-1), self)

    def __pow__(self, e):
        return pow_(self, Fraction(e))

    def __eq__(self, other):
        return type(self) is type(other) and self.key() == other.key()

    def __hash__(self):
        return hash((type(self).__name__, self.key()))

    def __repr__(self):
        return to_prefix(self)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = as_scalar(value)

    def key(self):
        return self.value


class Sym(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def key(self):
        return self.name


class PolyLeaf(Expr):
    __slots__ = ("poly",)

    def __init__(self, poly):
        self.poly = poly

    def key(self):
        return frozenset(self.poly.terms.items())


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)

    def key(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)

    def key(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        self.base = base
        self.exp = Fraction(exp)

    def key(self):
        return (self.base, self.exp)


class _Fn(Expr):
    __slots__ = ("arg",)
    name = "?"

    def __init__(self, arg):
        self.arg = arg

    def key(self):
        return self.arg


class Exp(_Fn):
    __slots__ = ()
    name = "exp"


class Ln(_Fn):
    __slots__ = ()
    name = "ln"


class Sin(_Fn):
    __slots__ = ()
    name = "sin"


class Cos(_Fn):
    __slots__ = ()
    name = "cos"


_FN = {"exp": Exp, "ln": Ln, "sin": Sin, "cos": Cos}

ZERO = Const(0)
ONE = Const(1)


def _as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, Poly):
        return from_poly(x)
    return Const(x)


def from_poly(p):
    if p.is_zero():
        return Const(0)
    if p.is_constant():
        return Const(p.constant_value())
    return PolyLeaf(p)


def sym(name):
    return Sym(name)


def const(v):
    return Const(v)


# -- smart constructors (light normalization) ---------------------------------


def _poly_of(e):
    """Poly view of nodes that are exactly polynomial, else None."""
    if isinstance(e, Const):
        return Poly.const(e.value)
    if isinstance(e, Sym):
        return Poly.var(e.name)
    if isinstance(e, PolyLeaf):
        return e.poly
    if isinstance(e, Pow) and e.exp.denominator == 1 and e.exp >= 0:
        b = _poly_of(e.base)
        if b is not None:
            return b ** int(e.exp)
    if isinstance(e, Pow) and e.exp.denominator == 1 and isinstance(e.base, Sym):
        return Poly.var(e.base.name, int(e.exp))
    return None


def add(*terms):
    flat = []
    polysum = Poly()
    for t in terms:
        t = _as_expr(t)
        if isinstance(t, Add):
            sub = list(t.terms)
        else:
            sub = [t]
        for u in sub:
            p = _poly_of(u)
            if p is not None:
                polysum = polysum + p
            else:
                flat.append(u)
    if not polysum.is_zero() or not flat:
        flat.insert(0, from_poly(polysum))
    flat = [f for f in flat if not (isinstance(f, Const) and f.value == 0)]
    if not flat:
        return Const(0)
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def mul(*factors):
    coeff = Fraction(1)
    polyprod = Poly.const(1)
    powers = {}   # base-expr -> exponent Fraction
    exp_arg = None
    order = []
    for f in factors:
        f = _as_expr(f)
        stack = list(f.factors) if isinstance(f, Mul) else [f]
        for u in stack:
            if isinstance(u, Const):
                coeff = coeff * u.value
                continue
            p = _poly_of(u)
            if p is not None and len(p.terms) <= 1:
                polyprod = polyprod * p
                continue
            if isinstance(u, Exp):
                exp_arg = u.arg if exp_arg is None else add(exp_arg, u.arg)
                continue
            if isinstance(u, Pow) and isinstance(u.base, Exp):
                scaled = mul(Const(u.exp), u.base.arg)
                exp_arg = scaled if exp_arg is None else add(exp_arg, scaled)
                continue
            base, e = (u.base, u.exp) if isinstance(u, Pow) else (u, Fraction(1))
            if base not in powers:
                powers[base] = Fraction(0)
                order.append(base)
            powers[base] += e
    if coeff == 0:
        return Const(0)
    out = []
    p = polyprod * coeff
    if p.is_zero():
        return Const(0)
    if not (p.is_constant() and p.constant_value() == 1):
        out.append(from_poly(p))
    for base in order:
        e = powers[base]
        if e == 0:
            continue
        out.append(pow_(base, e))
    if exp_arg is not None:
        earg = exp_arg
        if not (isinstance(earg, Const) and earg.value == 0):
            out.append(Exp(earg))
    if not out:
        return Const(1)
    if len(out) == 1:
        return out[0]
    return Mul(out)


def pow_(base, exp):
    exp = Fraction(exp)
    base = _as_expr(base)
    if exp == 0:
        return Const(1)
    if exp == 1:
        return base
    if isinstance(base, Const):
        if exp.denominator == 1:
            e = int(exp)
            if e >= 0:
                return Const(base.value ** e)
            if base.value == 0:
                raise DomainError("0 to a negative power")
            return Const(1 / (base.value ** (-e)))
        if base.value == 1:
            return Const(1)
        if base.value == 0:
            if exp > 0:
                return Const(0)
            raise DomainError("0 to a negative power")
    if isinstance(base, Pow):
        return pow_(base.base, base.exp * exp)
    if isinstance(base, Exp):
        return Exp(mul(Const(exp), base.arg))
    if isinstance(base, (Sym, PolyLeaf)) and exp.denominator == 1:
        p = _poly_of(base)
        if p is not None and len(p.terms) == 1:
            ((m, c),) = p.terms.items()
            e = int(exp)
            if c == 1 or e > 0:
                newm = tuple((s, v * e) for s, v in m)
                if c == 1:
                    return from_poly(Poly({newm: Fraction(1)}))
                return from_poly(Poly({newm: as_scalar(c) ** e}))
    if isinstance(base, Mul):
        return mul(*[pow_(f, exp) for f in base.factors])
    return Pow(base, exp)


def exp_(arg):
    arg = _as_expr(arg)
    if isinstance(arg, Const) and arg.value == 0:
        return Const(1)
    if isinstance(arg, Ln):
        return arg.arg
    # peel logarithmic terms: exp(a + c ln u) = u^c exp(a)
    terms = arg.terms if isinstance(arg, Add) else (arg,)
    powers = []
    rest = []
    for tm in terms:
        cln = _const_times_ln(tm)
        if cln is not None:
            c, u = cln
            powers.append(pow_(u, c))
        else:
            rest.append(tm)
    if powers:
        inner = add(*rest) if rest else Const(0)
        return mul(*powers, exp_(inner) if rest else Const(1))
    return Exp(arg)


def _const_times_ln(tm):
    """Match c * Ln(u); returns (c, u) or None."""
    if isinstance(tm, Ln):
        return Fraction(1), tm.arg
    if isinstance(tm, Mul):
        lns = [f for f in tm.factors if isinstance(f, Ln)]
        others = [f for f in tm.factors if not isinstance(f, Ln)]
        if len(lns) == 1 and all(isinstance(f, Const) for f in others):
            c = Fraction(1)
            for f in others:
                if isinstance(f.value, GaussianRational):
                    return None
                c *= f.value
            return c, lns[0].arg
    return None


def ln(arg):
    arg = _as_expr(arg)
    if isinstance(arg, Const) and arg.value == 1:
        return Const(0)
    return Ln(arg)


def sin_(arg):
    arg = _as_expr(arg)
    if isinstance(arg, Const) and arg.value == 0:
        return Const(0)
    return Sin(arg)


def cos_(arg):
    arg = _as_expr(arg)
    if isinstance(arg, Const) and arg.value == 0:
        return Const(1)
    return Cos(arg)


def sqrt(arg):
    return pow_(arg, Fraction(1, 2))


# -- differentiation ------------------------------------------------------------


def differentiate(e, name, relations=None):
    """Exact d e / d name.  Total function: symbols absent from e give 0."""
    e = _as_expr(e)
    if isinstance(e, Const):
        return Const(0)
    if isinstance(e, Sym):
        return Const(1 if e.name == name else 0)
    if isinstance(e, PolyLeaf):
        return from_poly(e.poly.diff(name, relations))
    if isinstance(e, Add):
        return add(*[differentiate(t, name, relations) for t in e.terms])
    if isinstance(e, Mul):
        out = []
        fs = e.factors
        for i, f in enumerate(fs):
            df = differentiate(f, name, relations)
            if isinstance(df, Const) and df.value == 0:
                continue
            out.append(mul(*(list(fs[:i]) + [df] + list(fs[i + 1:]))))
        return add(*out) if out else Const(0)
    if isinstance(e, Pow):
        db = differentiate(e.base, name, relations)
        if isinstance(db, Const) and db.value == 0:
            return Const(0)
        return mul(Const(e.exp), pow_(e.base, e.exp - 1), db)
    if isinstance(e, Exp):
        da = differentiate(e.arg, name, relations)
        if isinstance(da, Const) and da.value == 0:
            return Const(0)
        return mul(da, e)
    if isinstance(e, Ln):
        da = differentiate(e.arg, name, relations)
        if isinstance(da, Const) and da.value == 0:
            return Const(0)
        return mul(da, pow_(e.arg, Fraction(-1)))
    if isinstance(e, Sin):
        da = differentiate(e.arg, name, relations)
        if isinstance(da, Const) and da.value == 0:
            return Const(0)
        return mul(da, cos_(e.arg))
    if isinstance(e, Cos):
        da = differentiate(e.arg, name, relations)
        if isinstance(da, Const) and da.value == 0:
            return Const(0)
        return mul(Const(-1), da, sin_(e.arg))
    raise TypeError(f"cannot differentiate {e!r}")


# -- substitution ----------------------------------------------------------------


def substitute(e, bindings):
    """Simultaneous substitution symbol -> Expr/Poly/scalar."""
    bindings = {k: _as_expr(v) for k, v in bindings.items()}
    return _subs(e, bindings)


def _subs(e, b):
    e = _as_expr(e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Sym):
        return b.get(e.name, e)
    if isinstance(e, PolyLeaf):
        hit = {s for s in e.poly.symbols() if s in b}
        if not hit:
            return e
        polybind = {}
        exprbind = {}
        for s in hit:
            p = _poly_of(b[s])
            if p is not None:
                polybind[s] = p
            else:
                exprbind[s] = b[s]
        if not exprbind:
            try:
                return from_poly(e.poly.subs(polybind))
            except ValueError:
                exprbind.update({s: from_poly(p) for s, p in polybind.items()})
                polybind = {}
        # rebuild term by term through Expr arithmetic
        out = Const(0)
        allbind = dict(polybind)
        allbind = {s: from_poly(p) for s, p in allbind.items()}
        allbind.update(exprbind)
        for m, c in e.poly.sorted_terms():
            term = Const(c)
            for s, ex in m:
                rep = allbind.get(s, Sym(s))
                term = mul(term, pow_(rep, Fraction(ex)))
            out = add(out, term)
        return out
    if isinstance(e, Add):
        return add(*[_subs(t, b) for t in e.terms])
    if isinstance(e, Mul):
        return mul(*[_subs(f, b) for f in e.factors])
    if isinstance(e, Pow):
        return pow_(_subs(e.base, b), e.exp)
    if isinstance(e, _Fn):
        ctor = {"exp": exp_, "ln": ln, "sin": sin_, "cos": cos_}[e.name]
        return ctor(_subs(e.arg, b))
    raise TypeError(f"cannot substitute into {e!r}")


# -- numeric evaluation -------------------------------------------------------------


def evaluate(e, values, relations=None):
    """Numeric (complex) evaluation with the given symbol values."""
    e = _as_expr(e)
    if isinstance(e, Const):
        return scalar_to_complex(e.value)
    if isinstance(e, Sym):
        try:
            return complex(values[e.name])
        except KeyError:
            raise KeyError(f"no value for symbol {e.name}") from None
    if isinstance(e, PolyLeaf):
        return e.poly.eval(values, relations)
    if isinstance(e, Add):
        return sum(evaluate(t, values, relations) for t in e.terms)
    if isinstance(e, Mul):
        out = 1 + 0j
        for f in e.factors:
            out *= evaluate(f, values, relations)
        return out
    if isinstance(e, Pow):
        bv = evaluate(e.base, values, relations)
        if bv == 0 and e.exp < 0:
            raise DomainError("0 to a negative power")
        if bv.imag == 0 and bv.real > 0:
            return complex(bv.real ** float(e.exp))
        return bv ** complex(float(e.exp))
    if isinstance(e, Exp):
        return cmath.exp(evaluate(e.arg, values, relations))
    if isinstance(e, Ln):
        v = evaluate(e.arg, values, relations)
        if v == 0:
            raise DomainError("ln of zero")
        if v.imag == 0 and v.real <= 0:
            raise DomainError("ln of nonpositive real")
        return cmath.log(v)
    if isinstance(e, Sin):
        return cmath.sin(evaluate(e.arg, values, relations))
    if isinstance(e, Cos):
        return cmath.cos(evaluate(e.arg, values, relations))
    raise TypeError(f"cannot evaluate {e!r}")


def real_value(e, values, relations=None, tol=1e-12):
    v = evaluate(e, values, relations)
    if abs(v.imag) > tol * (1 + abs(v.real)):
        raise DomainError(f"expected real value, got {v}")
    return v.real


# -- zero-testing by polynomialization ------------------------------------------------


class _PolyContext:
    """Maps functional subexpressions to fresh algebraic symbols."""

    def __init__(self, relations=None):
        self.relations = dict(STANDARD_RELATIONS if relations is None else relations)
        self.cache = {}
        self.counter = 0

    def fresh(self, kind, key, relation=None):
        tag = (kind, key)
        if tag in self.cache:
            return self.cache[tag]
        name = f"@{kind}{self.counter}"
        self.counter += 1
        if relation is not None:
            self.relations[name] = relation
        self.cache[tag] = name
        return name


def _poly_key(p):
    return tuple(sorted(p.terms.items(), key=lambda mc: mc[0]))


def _content_normalize(p):
    """Write p = (a/b) * canon with canon primitive (integer coefficients,
    gcd 1, leading stored coefficient positive); returns (a, b, canon).
    Gaussian coefficients fall back to sign normalization only."""
    from math import gcd, lcm
    items = sorted(p.terms.items(), key=lambda mc: mc[0])
    if any(isinstance(c, GaussianRational) for _, c in items):
        sign, canon = _canonical_sign(p)
        return sign, 1, canon
    num = 0
    den = 1
    for _, c in items:
        num = gcd(num, abs(c.numerator))
        den = lcm(den, c.denominator)
    content = Fraction(num, den)
    if items[0][1] < 0:
        content = -content
    canon = p / content
    return content.numerator, content.denominator, canon


def _canonical_sign(p):
    """(sign, canonical poly): flip so the leading stored term is 'positive'."""
    items = sorted(p.terms.items(), key=lambda mc: mc[0])
    if not items:
        return 1, p
    c = items[0][1]
    if isinstance(c, GaussianRational):
        neg = (c.re < 0) or (c.re == 0 and c.im < 0)
    else:
        neg = c < 0
    if neg:
        return -1, -p
    return 1, p


def to_fraction(e, ctx=None):
    """Convert an Expr to (numerator Poly, denominator Poly) in ctx's ring."""
    ctx = ctx or _PolyContext()
    n, d = _tofrac(_as_expr(e), ctx)
    return n, d, ctx


def _tofrac(e, ctx):
    if isinstance(e, Const):
        return Poly.const(e.value), Poly.const(1)
    if isinstance(e, Sym):
        return Poly.var(e.name), Poly.const(1)
    if isinstance(e, PolyLeaf):
        return e.poly, Poly.const(1)
    if isinstance(e, Add):
        n, d = Poly(), Poly.const(1)
        for t in e.terms:
            tn, td = _tofrac(t, ctx)
            n = n * td + tn * d
            d = d * td
        return n, d
    if isinstance(e, Mul):
        n, d = Poly.const(1), Poly.const(1)
        for f in e.factors:
            fn, fd = _tofrac(f, ctx)
            n = n * fn
            d = d * fd
        return n, d
    if isinstance(e, Pow):
        bn, bd = _tofrac(e.base, ctx)
        p, q = e.exp.numerator, e.exp.denominator
        if q == 1:
            if p >= 0:
                return bn ** p, bd ** p
            return bd ** (-p), bn ** (-p)
        # base**(p/q): u**q = bn * bd**(q-1); base**(1/q) = u / bd
        radicand = (bn * bd ** (q - 1)).reduce(ctx.relations)
        name = ctx.fresh("rt", (_poly_key(radicand), q), (q, radicand))
        u = Poly.var(name)
        if p >= 0:
            return u ** p, bd ** p
        return bd ** (-p), u ** (-p)
    if isinstance(e, Exp):
        from math import gcd
        an, ad = _tofrac(e.arg, ctx)
        an = an.reduce(ctx.relations)
        ad = ad.reduce(ctx.relations)
        if an.is_zero():
            return Poly.const(1), Poly.const(1)
        p1, q1, cn = _content_normalize(an)
        p2, q2, cd = _content_normalize(ad)
        P, Q = p1 * q2, q1 * p2
        if Q < 0:
            P, Q = -P, -Q
        g = gcd(abs(P), Q)
        P, Q = P // g, Q // g
        key = (_poly_key(cn), _poly_key(cd), Q)
        name = ctx.fresh("exp", key)
        if P >= 0:
            return Poly.var(name, P), Poly.const(1)
        return Poly.const(1), Poly.var(name, -P)
    if isinstance(e, (Sin, Cos)):
        an, ad = _tofrac(e.arg, ctx)
        if not ad.is_constant():
            raise UnsupportedForm("trig of a non-polynomial argument")
        arg = (an / ad.constant_value()).reduce(ctx.relations)
        if arg.is_zero():
            return (Poly.const(1) if isinstance(e, Cos) else Poly(),
                    Poly.const(1))
        sign, canon = _canonical_sign(arg)
        key = _poly_key(canon)
        sname = ctx.fresh("sin", key)
        cname = ctx.fresh("cos", key,
                          (2, Poly.const(1) - Poly.var(sname) ** 2))
        if isinstance(e, Cos):
            return Poly.var(cname), Poly.const(1)
        # sin(-a) = -sin(a)
        return Poly.var(sname) * Fraction(sign), Poly.const(1)
    if isinstance(e, Ln):
        an, ad = _tofrac(e.arg, ctx)
        key = (_poly_key(an.reduce(ctx.relations)), _poly_key(ad.reduce(ctx.relations)))
        name = ctx.fresh("ln", key)
        return Poly.var(name), Poly.const(1)
    raise UnsupportedForm(f"cannot polynomialize {e!r}")


def is_zero(e, relations=None):
    """True iff e is identically zero on its domain of definition."""
    e = _as_expr(e)
    if isinstance(e, Const):
        return e.value == 0
    if isinstance(e, PolyLeaf):
        return e.poly.cleared(relations).is_zero()
    ctx = _PolyContext(relations)
    n, _, ctx = to_fraction(e, ctx)
    return n.cleared(ctx.relations).is_zero()


def equal(a, b, relations=None):
    return is_zero(_as_expr(a) - _as_expr(b), relations)


# -- serialization ---------------------------------------------------------------------


def to_prefix(e):
    """Deterministic prefix text form."""
    e = _as_expr(e)
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, GaussianRational):
            return f"(complex {v.re} {v.im})"
        return str(v)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, PolyLeaf):
        terms = []
        for m, c in e.poly.sorted_terms():
            factors = [str(c) if not isinstance(c, GaussianRational)
                       else f"(complex {c.re} {c.im})"]
            factors += [f"(^ {s} {x})" if x != 1 else s for s, x in m]
            terms.append(f"(* {' '.join(factors)})" if len(factors) > 1 else factors[0])
        if not terms:
            return "0"
        return f"(+ {' '.join(terms)})" if len(terms) > 1 else terms[0]
    if isinstance(e, Add):
        return f"(+ {' '.join(to_prefix(t) for t in e.terms)})"
    if isinstance(e, Mul):
        return f"(* {' '.join(to_prefix(f) for f in e.factors)})"
    if isinstance(e, Pow):
        return f"(^ {to_prefix(e.base)} {e.exp})"
    if isinstance(e, _Fn):
        return f"({e.name} {to_prefix(e.arg)})"
    raise TypeError(f"cannot serialize {e!r}")


def from_prefix(text):
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            if "/" in tok or tok.lstrip("-").isdigit():
                return Const(Fraction(tok))
            return Sym(tok)
        op = tokens[pos]
        pos += 1
        args = []
        while tokens[pos] != ")":
            args.append(parse())
        pos += 1
        if op == "+":
            return add(*args)
        if op == "*":
            return mul(*args)
        if op == "^":
            base, ex = args
            return pow_(base, ex.value)
        if op == "complex":
            re, im = args
            return Const(GaussianRational(re.value, im.value))
        if op in _FN:
            return {"exp": exp_, "ln": ln, "sin": sin_, "cos": cos_}[op](args[0])
        raise ValueError(f"unknown operator {op}")

    out = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens in prefix expression")
    return out


def to_json(e):
    e = _as_expr(e)
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, GaussianRational):
            return {"op": "const", "re": str(v.re), "im": str(v.im)}
        return {"op": "const", "value": str(v)}
    if isinstance(e, Sym):
        return {"op": "sym", "name": e.name}
    if isinstance(e, PolyLeaf):
        from .poly import poly_to_json
        return {"op": "poly", "terms": poly_to_json(e.poly)}
    if isinstance(e, Add):
        return {"op": "add", "args": [to_json(t) for t in e.terms]}
    if isinstance(e, Mul):
        return {"op": "mul", "args": [to_json(f) for f in e.factors]}
    if isinstance(e, Pow):
        return {"op": "pow", "base": to_json(e.base), "exp": str(e.exp)}
    if isinstance(e, _Fn):
        return {"op": e.name, "arg": to_json(e.arg)}
    raise TypeError(f"cannot serialize {e!r}")


def from_json(d):
    op = d["op"]
    if op == "const":
        if "re" in d:
            return Const(GaussianRational(Fraction(d["re"]), Fraction(d["im"])))
        return Const(Fraction(d["value"]))
    if op == "sym":
        return Sym(d["name"])
    if op == "poly":
        from .poly import poly_from_json
        return from_poly(poly_from_json(d["terms"]))
    if op == "add":
        return add(*[from_json(a) for a in d["args"]])
    if op == "mul":
        return mul(*[from_json(a) for a in d["args"]])
    if op == "pow":
        return pow_(from_json(d["base"]), Fraction(d["exp"]))
    if op in _FN:
        return {"exp": exp_, "ln": ln, "sin": sin_, "cos": cos_}[op](from_json(d["arg"]))
    raise ValueError(f"unknown op {op}")
