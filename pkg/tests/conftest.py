"""Shared builders and an independent sympy oracle for series comparisons."""

from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from coindex.coeffs import GaussRat
from coindex.geometry import build_blowup_family
from coindex.series import MapJet, MultiSeries, poly


def gauss_to_sympy(c):
    c = GaussRat.coerce(c)
    return sp.Rational(c.re.numerator, c.re.denominator) + \
        sp.I * sp.Rational(c.im.numerator, c.im.denominator)


def sympy_to_gauss(x):
    re, im = sp.nsimplify(x).as_real_imag()
    return GaussRat(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def to_sympy(s: MultiSeries, syms):
    return sp.Add(*[gauss_to_sympy(c) * sp.Mul(*[x ** k for x, k in zip(syms, e)])
                    for e, c in s.terms.items()])


def sympy_truncate(expr, syms, order):
    """Terms of total degree <= order of a polynomial expression."""
    p = sp.Poly(sp.expand(expr), *syms)
    return sp.Add(*[c * sp.Mul(*[x ** k for x, k in zip(syms, m)])
                    for m, c in p.terms() if sum(m) <= order])


def var(i, n):
    return MultiSeries.var(i, n)


def quad_pair(n, k, cross=True, scale=1):
    """F_i = s z_i + z_{other}^k (n = 2) or s z_i + z_i^k, G = s z."""
    F, G = [], []
    for i in range(n):
        lin = tuple(1 if j == i else 0 for j in range(n))
        if n == 2 and cross:
            hi = tuple(k if j == 1 - i else 0 for j in range(n))
        else:
            hi = tuple(k if j == i else 0 for j in range(n))
        F.append(poly(n, {lin: scale, hi: 1}))
        G.append(poly(n, {lin: scale}))
    return MapJet(F), MapJet(G)


def blowup(n, k, cross=True, scale=1):
    F, G = quad_pair(n, k, cross, scale)
    return build_blowup_family(n, F, G)


small_rat = st.fractions(min_value=-3, max_value=3, max_denominator=4)
gauss = st.builds(GaussRat, small_rat, small_rat)


@st.composite
def sparse_series(draw, nvars=2, maxdeg=3, max_terms=4, order=None):
    terms = draw(st.dictionaries(
        st.tuples(*[st.integers(0, maxdeg)] * nvars).filter(lambda e: sum(e) <= maxdeg),
        gauss, max_size=max_terms))
    return MultiSeries(nvars, terms, order)
