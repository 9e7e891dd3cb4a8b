"""Univariate polynomials over Q(i) and exact arithmetic at algebraic points.

Polynomials are coefficient lists, lowest degree first.  A singular point
whose coordinate is an algebraic (non Gaussian-rational) number is handled
by computing in ``Q(i)[theta]/(m)`` for the irreducible factor ``m``; an
expression that reduces to a constant there has that constant value at
every root of ``m``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .coeffs import GaussRat, ONE, ZERO


# -- univariate polynomial helpers (generic field coefficients) -------------

def ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def pdeg(p) -> int:
    return len(ptrim(p)) - 1


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                  for i in range(n)])


def psub(a, b):
    return padd(a, [-c for c in b])


def pmul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pdivmod(a, b):
    a, b = ptrim(a), ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        c = r[-1] / lead
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[k + i] = r[k + i] - c * y
        r = ptrim(r[:-1]) if r[-1] == 0 else ptrim(r)
    return ptrim(q), r


def pmonic(p):
    p = ptrim(p)
    lead = p[-1]
    return [c / lead for c in p]


def pgcd(a, b):
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a) if a else []


def pderiv(p):
    return ptrim([p[i] * i for i in range(1, len(p))])


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pshift(p, x0):
    """Coefficients of p(x0 + s) in s (Horner/Taylor shift)."""
    out = list(p)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + x0 * out[j + 1]
    return ptrim(out)


def squarefree_parts(p):
    """Yun's algorithm: list of (factor, multiplicity), factors monic."""
    p = pmonic(p)
    if pdeg(p) < 1:
        return []
    out = []
    dp = pderiv(p)
    a = pgcd(p, dp)
    b = pdivmod(p, a)[0]
    c = pdivmod(dp, a)[0]
    d = psub(c, pderiv(b))
    k = 1
    while pdeg(b) > 0:
        a = pgcd(b, d)
        if pdeg(a) > 0:
            out.append((pmonic(a), k))
        b = pdivmod(b, a)[0]
        c = pdivmod(d, a)[0]
        d = psub(c, pderiv(b))
        k += 1
    return out


def factor_gaussian(p):
    """Irreducible factorization over Q(i): list of (monic factor, multiplicity)."""
    import sympy
    from sympy.polys.domains import QQ_I

    p = ptrim([GaussRat.coerce(c) for c in p])
    if pdeg(p) < 1:
        return []
    x = sympy.Symbol("x")
    coeffs = [QQ_I(_mpq(c.re), _mpq(c.im)) for c in reversed(p)]
    poly = sympy.Poly.from_list(coeffs, x, domain=QQ_I)
    _, facs = poly.factor_list()
    out = []
    for f, mult in facs:
        cs = [GaussRat(Fraction(int(c.x.numerator), int(c.x.denominator)),
                       Fraction(int(c.y.numerator), int(c.y.denominator)))
              for c in reversed(f.rep.to_list())]
        out.append((pmonic(cs), mult))
    out.sort(key=lambda fm: (pdeg(fm[0]), [_sortkey(c) for c in fm[0]]))
    return out


def _mpq(q: Fraction):
    from sympy.polys.domains import QQ
    return QQ(q.numerator, q.denominator)


def _sortkey(c):
    c = GaussRat.coerce(c)
    return (c.re, c.im)


def numeric_roots(p):
    """Roots of p as complex numbers, Newton-polished, canonically ordered."""
    p = ptrim(p)
    if pdeg(p) < 1:
        return []
    cs = [complex(c) for c in reversed(p)]
    roots = np.roots(cs)
    dcs = [complex(c) for c in reversed(pderiv(p))]
    out = []
    for r in roots:
        r = complex(r)
        for _ in range(8):
            fr = np.polyval(cs, r)
            dr = np.polyval(dcs, r)
            if dr == 0:
                break
            step = fr / dr
            r -= step
            if abs(step) < 1e-17 * max(1.0, abs(r)):
                break
        out.append(complex(r))
    out.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return out


# -- number fields -----------------------------------------------------------

class NumberField:
    """Q(i)[theta]/(m) for a monic irreducible m of degree >= 2."""

    def __init__(self, modulus):
        self.modulus = pmonic([GaussRat.coerce(c) for c in modulus])
        self.degree = pdeg(self.modulus)
        if self.degree < 1:
            raise ValueError("modulus must have positive degree")
        self._roots = None

    def roots(self):
        if self._roots is None:
            self._roots = numeric_roots(self.modulus)
        return self._roots

    def theta(self):
        if self.degree == 1:
            return AlgNum(self, [-self.modulus[0]])
        return AlgNum(self, [ZERO, ONE])

    def __eq__(self, o):
        return isinstance(o, NumberField) and self.modulus == o.modulus

    def __hash__(self):
        return hash(tuple(self.modulus))

    def __repr__(self):
        return f"NumberField({[str(c) for c in self.modulus]})"


class AlgNum:
    """Element of a NumberField, stored as a reduced coefficient list."""

    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        c = ptrim([GaussRat.coerce(x) for x in coeffs])
        if len(c) > field.degree:
            c = pdivmod(c, field.modulus)[1]
        self.c = tuple(c)

    def _lift(self, o):
        if isinstance(o, AlgNum):
            if o.field != self.field:
                raise ValueError("mixing different number fields")
            return o
        g = GaussRat.coerce(o)
        if g is NotImplemented:
            return g
        return AlgNum(self.field, [g])

    def __add__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return AlgNum(self.field, padd(list(self.c), list(o.c)))

    __radd__ = __add__

    def __neg__(self):
        return AlgNum(self.field, [-x for x in self.c])

    def __sub__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return AlgNum(self.field, pmul(list(self.c), list(o.c)))

    __rmul__ = __mul__

    def inverse(self):
        if not self.c:
            raise ZeroDivisionError("inverse of zero")
        # extended Euclid on (self, modulus)
        r0, r1 = list(self.field.modulus), list(self.c)
        s0, s1 = [], [ONE]
        while pdeg(r1) > 0:
            q, r = pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, psub(s0, pmul(q, s1))
        if not r1:
            raise ZeroDivisionError("element is a zero divisor")
        return AlgNum(self.field, [x / r1[0] for x in s1])

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r, b = AlgNum(self.field, [ONE]), self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        if isinstance(o, AlgNum):
            return self.field == o.field and self.c == o.c
        g = GaussRat.coerce(o)
        if g is NotImplemented:
            return NotImplemented
        return self.c == tuple(ptrim([g]))

    def __hash__(self):
        return hash((self.field, self.c))

    def __bool__(self):
        return bool(self.c)

    def constant(self):
        """The Gaussian rational value if self is constant, else None."""
        if len(self.c) == 0:
            return ZERO
        if len(self.c) == 1:
            return self.c[0]
        return None

    def at(self, root: complex) -> complex:
        return complex(peval([complex(x) for x in self.c], root))

    def trace(self) -> GaussRat:
        """Sum of the conjugates: trace of multiplication by self."""
        d = self.field.degree
        tot = ZERO
        for k in range(d):
            basis = [ZERO] * k + [ONE]
            prod = AlgNum(self.field, pmul(list(self.c), basis))
            tot = tot + (prod.c[k] if k < len(prod.c) else ZERO)
        return tot

    def __complex__(self):
        raise TypeError("an algebraic number has no single complex value; use .at(root)")

    def __repr__(self):
        return "AlgNum(" + " + ".join(f"({x})*θ^{i}" for i, x in enumerate(self.c)) + ")"
