"""Scalar coefficients.

Exact scalars are Gaussian rationals (``GaussRat``) or elements of a finite
extension of Q(i) (see ``coindex.algebraic``).  Float scalars are plain
Python ``complex``.  Series code only relies on ``+ - * /``, ``== 0`` and
``complex()``, so every exact type can flow through it.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class GaussRat:
    """a + b i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def coerce(x):
        if type(x) is GaussRat:
            return x
        if isinstance(x, (int, Rational)):
            return GaussRat(Fraction(x))
        if isinstance(x, str):
            return parse_gauss(x)
        return NotImplemented

    def __add__(self, o):
        o = GaussRat.coerce(o)
        if o is NotImplemented:
            return o
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussRat.coerce(o)
        if o is NotImplemented:
            return o
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = GaussRat.coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussRat.coerce(o)
        if o is NotImplemented:
            return o
        if not self.im and not o.im:
            return GaussRat(self.re * o.re)
        return GaussRat(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self):
        if not self.im:
            if not self.re:
                raise ZeroDivisionError("inverse of zero")
            return GaussRat(1 / self.re)
        d = self.re * self.re + self.im * self.im
        return GaussRat(self.re / d, -self.im / d)

    def __truediv__(self, o):
        o = GaussRat.coerce(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = GaussRat.coerce(o)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r, b = GaussRat(1), self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, o):
        if type(o) is GaussRat:
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Rational)):
            return not self.im and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return GaussRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussRat({format_gauss(self)})"

    def __str__(self):
        return format_gauss(self)


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_gauss(c: GaussRat) -> str:
    """Canonical string, rationals always as p/q: '-1/3', '1/2+3/1i'."""
    if not c.im:
        return _fmt(c.re)
    if not c.re:
        return _fmt(c.im) + "i"
    sign = "+" if c.im > 0 else "-"
    return _fmt(c.re) + sign + _fmt(abs(c.im)) + "i"


def parse_gauss(s: str) -> GaussRat:
    s = s.replace(" ", "")
    if not s.endswith("i"):
        return GaussRat(Fraction(s))
    body = s[:-1]
    # split at the last sign that is not in leading position
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut <= 0:
        return GaussRat(0, Fraction(body or "1"))
    return GaussRat(Fraction(body[:cut]), Fraction(body[cut:]))


def from_parts(num_re: str, den_re: str, num_im: str, den_im: str) -> GaussRat:
    return GaussRat(Fraction(int(num_re), int(den_re)),
                    Fraction(int(num_im), int(den_im)))


def to_parts(c: GaussRat) -> dict:
    c = GaussRat.coerce(c)
    return {"num_re": str(c.re.numerator), "den_re": str(c.re.denominator),
            "num_im": str(c.im.numerator), "den_im": str(c.im.denominator)}


def is_exact(c) -> bool:
    return not isinstance(c, (complex, float))
