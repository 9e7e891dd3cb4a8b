"""Truncated sparse multivariate power series.

A ``MultiSeries`` is a finite map from exponent tuples to coefficients
together with a truncation order ``K``: every monomial of weighted degree
``<= K`` is known exactly, nothing is known above it.  ``K = None`` marks an
exact polynomial.

Weights are 0/1 per variable.  The default (all ones) is ordinary total
degree.  Weights ``(1, 0, ..., 0)`` give the filtration by powers of
``(z1)``: coefficients of each power of ``z1`` are then exact polynomials in
the remaining variables, which is how chart-wide data along ``S = {z1=0}``
are carried.

One variable may be declared Laurent (negative exponents allowed); the
weighted degree counts negative exponents with their sign, and products
track precision through the valuations of the factors.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .coeffs import GaussRat, ONE, ZERO, format_gauss, parse_gauss
from . import linalg

INF = math.inf


class SeriesError(ArithmeticError):
    pass


class TruncationLimited(SeriesError):
    """Raised when a question cannot be decided within the truncation order."""


def _omin(*ks):
    vals = [k for k in ks if k is not None]
    return min(vals) if vals else None


def _scalar_mode(c) -> str:
    return "float" if isinstance(c, (complex, float)) else "exact"


def _coerce_scalar(c):
    if isinstance(c, (complex, float)):
        return complex(c)
    if isinstance(c, (int, Fraction)):
        return GaussRat(c)
    return c


class MultiSeries:
    __slots__ = ("nvars", "order", "terms", "weights", "laurent", "mode")

    def __init__(self, nvars: int, terms=None, order=None, weights=None,
                 laurent=None, mode=None):
        self.nvars = nvars
        self.order = order
        self.weights = tuple(weights) if weights is not None else (1,) * nvars
        if len(self.weights) != nvars or any(w not in (0, 1) for w in self.weights):
            raise ValueError("weights must be a 0/1 tuple of length nvars")
        self.laurent = laurent
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
            if c == 0:
                continue
            if any(x < 0 for i, x in enumerate(e) if i != laurent):
                raise ValueError(f"negative exponent in non-Laurent variable: {e}")
            if order is not None and self._wdeg(e) > order:
                continue
            clean[e] = _coerce_scalar(c)
        self.terms = clean
        if mode is None:
            modes = {_scalar_mode(c) for c in clean.values()}
            if len(modes) > 1:
                raise SeriesError("a series never mixes coefficient modes")
            mode = modes.pop() if modes else "exact"
        elif clean and any(_scalar_mode(c) != mode for c in clean.values()):
            raise SeriesError("coefficient mode does not match declared mode")
        self.mode = mode

    # -- construction ---------------------------------------------------------

    def _wdeg(self, e) -> int:
        return sum(w * x for w, x in zip(self.weights, e))

    def _like(self, terms, order="same", weights=None, laurent="same", mode=None):
        return MultiSeries(self.nvars, terms,
                           self.order if order == "same" else order,
                           weights if weights is not None else self.weights,
                           self.laurent if laurent == "same" else laurent,
                           mode or self.mode)

    @staticmethod
    def constant(c, nvars: int, order=None, weights=None, mode=None):
        return MultiSeries(nvars, {(0,) * nvars: c}, order, weights, mode=mode)

    @staticmethod
    def zero(nvars: int, order=None, weights=None, mode="exact"):
        return MultiSeries(nvars, {}, order, weights, mode=mode)

    @staticmethod
    def var(i: int, nvars: int, order=None, weights=None, mode="exact"):
        e = [0] * nvars
        e[i] = 1
        one = 1.0 + 0j if mode == "float" else ONE
        return MultiSeries(nvars, {tuple(e): one}, order, weights, mode=mode)

    @staticmethod
    def monomial(exps: Sequence[int], c=ONE, order=None, weights=None):
        return MultiSeries(len(exps), {tuple(exps): c}, order, weights)

    # -- inspection -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        return self.order is None

    def coefficient(self, exps) -> object:
        exps = tuple(exps)
        if self.order is not None and self._wdeg(exps) > self.order:
            raise TruncationLimited(f"coefficient of {exps} lies beyond truncation order {self.order}")
        return self.terms.get(exps, 0.0j if self.mode == "float" else ZERO)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0.0j if self.mode == "float" else ZERO)

    def wvaluation(self):
        """Minimal weighted degree over stored terms (INF for the zero series)."""
        return min((self._wdeg(e) for e in self.terms), default=INF)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def valuation(self, var: int):
        """Minimum exponent of ``var``; INF when the series is zero."""
        return min((e[var] for e in self.terms), default=INF)

    def valuation_info(self, var: int):
        """(valuation, truncation_limited) for membership questions in (z_var)^k."""
        if not self.terms:
            return INF, self.order is not None
        return self.valuation(var), False

    def variables(self) -> set:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    # -- arithmetic -------------------------------------------------------------

    def _check(self, o: "MultiSeries"):
        if o.nvars != self.nvars:
            raise SeriesError("nvars mismatch")
        if self.terms and o.terms and o.mode != self.mode:
            raise SeriesError("coefficient mode mismatch")
        if o.weights != self.weights:
            raise SeriesError("weight mismatch; use retruncate first")
        if o.laurent != self.laurent and o.laurent is not None and self.laurent is not None:
            raise SeriesError("Laurent variable mismatch")

    def _mode_of(self, o):
        if not self.terms:
            return o.mode
        return self.mode

    def __add__(self, o):
        if not isinstance(o, MultiSeries):
            return self + MultiSeries.constant(o, self.nvars, self.order, self.weights,
                                               mode=self.mode if o != 0 else None)
        self._check(o)
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        lau = self.laurent if self.laurent is not None else o.laurent
        return MultiSeries(self.nvars, terms, _omin(self.order, o.order), self.weights,
                           lau, self._mode_of(o))

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def scale(self, c):
        c = _coerce_scalar(c)
        if c == 0:
            return self._like({})
        return self._like({e: v * c for e, v in self.terms.items()}, mode=_scalar_mode(c)
                          if not self.terms else self.mode)

    def __mul__(self, o):
        if not isinstance(o, MultiSeries):
            return self.scale(o)
        self._check(o)
        va, vb = self.wvaluation(), o.wvaluation()
        cand = []
        if self.order is not None:
            cand.append(self.order + (min(vb, 0) if vb != INF else 0))
        if o.order is not None:
            cand.append(o.order + (min(va, 0) if va != INF else 0))
        order = min(cand) if cand else None
        w = self.weights
        terms: dict = {}
        bt = list(o.terms.items())
        for ea, ca in self.terms.items():
            da = sum(x * y for x, y in zip(w, ea))
            for eb, cb in bt:
                if order is not None and da + sum(x * y for x, y in zip(w, eb)) > order:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                if e in terms:
                    terms[e] = terms[e] + v
                else:
                    terms[e] = v
        lau = self.laurent if self.laurent is not None else o.laurent
        return MultiSeries(self.nvars, terms, order, w, lau, self._mode_of(o))

    def __rmul__(self, o):
        return self.scale(o)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = MultiSeries.constant(1.0 + 0j if self.mode == "float" else ONE,
                                      self.nvars, self.order, self.weights, mode=self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self, order=None):
        """Multiplicative inverse of a unit (nonzero constant, rest of positive weight)."""
        c = self.constant_term()
        if c == 0:
            raise SeriesError("division by non-unit: zero constant term")
        rest = self - MultiSeries.constant(c, self.nvars, None, self.weights, mode=self.mode)
        if rest.terms and rest.wvaluation() < 1:
            raise SeriesError("division by non-unit: weight-0 part is not constant")
        K = _omin(self.order, order)
        if K is None:
            if not rest.terms:
                return MultiSeries.constant(1 / c, self.nvars, None, self.weights, mode=self.mode)
            raise SeriesError("inverse of a non-constant polynomial needs a truncation order")
        inv_c = 1 / c
        r = rest.retruncate(K).scale(-inv_c)
        acc = MultiSeries.constant(inv_c, self.nvars, K, self.weights, mode=self.mode)
        term = acc
        for _ in range(K):
            term = term * r
            if not term.terms:
                break
            acc = acc + term
        return acc

    def div_by_unit(self, b: "MultiSeries", order=None):
        K = _omin(self.order, b.order, order)
        if K is None and len(b.terms) == 1 and b.constant_term() != 0:
            return self.scale(1 / b.constant_term())
        if K is None:
            raise SeriesError("dividing polynomials by a non-constant unit needs an order")
        return self.retruncate(_omin(self.order, K)) * b.inverse(K)

    # -- precision management ----------------------------------------------------

    def retruncate(self, order=None, weights=None):
        """Lower the order and/or switch to dominating weights (w_new >= w_old).

        ``order=None`` keeps the current order."""
        weights = tuple(weights) if weights is not None else self.weights
        if self.order is not None and any(a < b for a, b in zip(weights, self.weights)):
            raise SeriesError("new weights must dominate the old ones")
        if order is None:
            order = self.order
        elif self.order is not None and order > self.order:
            raise TruncationLimited("cannot raise the truncation order")
        return MultiSeries(self.nvars, self.terms, order, weights, self.laurent, self.mode)

    def agrees(self, o: "MultiSeries") -> bool:
        """Equality of all terms known to both series."""
        d = self - o
        return d.is_zero()

    def __eq__(self, o):
        if not isinstance(o, MultiSeries):
            if o == 0:
                return self.is_zero()
            return NotImplemented
        return (self.nvars == o.nvars and self.terms == o.terms)

    __hash__ = None

    # -- calculus and ideal operations ---------------------------------------------

    def divide_by_var_power(self, var: int, k: int):
        if k == 0:
            return self
        if self.laurent != var and self.valuation(var) < k:
            raise SeriesError(f"insufficient valuation in variable {var} to divide by power {k}")
        terms = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[var] -= k
            terms[tuple(e2)] = c
        order = None if self.order is None else self.order - k * self.weights[var]
        return self._like(terms, order=order)

    def mul_var_power(self, var: int, k: int):
        terms = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[var] += k
            terms[tuple(e2)] = c
        order = None if self.order is None else self.order + k * self.weights[var]
        return self._like(terms, order=order)

    def restrict(self, var: int = 0):
        """Set ``var`` to zero."""
        terms = {e: c for e, c in self.terms.items() if e[var] == 0}
        order = self.order
        if order is not None and all(w == 0 for i, w in enumerate(self.weights) if i != var):
            order = None
        return self._like(terms, order=order)

    def restrict_to_S(self):
        return self.restrict(0)

    def partial(self, var: int):
        terms = {}
        for e, c in self.terms.items():
            if e[var] == 0:
                continue
            e2 = list(e)
            e2[var] -= 1
            terms[tuple(e2)] = c * e[var]
        order = None if self.order is None else self.order - self.weights[var]
        return self._like(terms, order=order)

    def coefficient_in(self, var: int, k: int):
        """The coefficient of var^k, as a series in the same variable set (var absent)."""
        terms = {}
        for e, c in self.terms.items():
            if e[var] == k:
                e2 = list(e)
                e2[var] = 0
                terms[tuple(e2)] = c
        order = self.order
        if order is not None:
            order = order - k * self.weights[var]
            if all(w == 0 for i, w in enumerate(self.weights) if i != var):
                order = None if order >= 0 else -1
        return self._like(terms, order=order)

    def drop_var(self, var: int):
        """Remove a variable that does not occur."""
        if any(e[var] for e in self.terms):
            raise SeriesError(f"variable {var} still occurs")
        terms = {e[:var] + e[var + 1:]: c for e, c in self.terms.items()}
        w = self.weights[:var] + self.weights[var + 1:]
        lau = self.laurent
        if lau is not None:
            lau = None if lau == var else (lau - 1 if lau > var else lau)
        order = self.order
        if order is not None and not any(w):
            order = None
        return MultiSeries(self.nvars - 1, terms, order, w, lau, self.mode)

    def insert_var(self, var: int, weight: int = 1):
        terms = {e[:var] + (0,) + e[var:]: c for e, c in self.terms.items()}
        w = self.weights[:var] + (weight,) + self.weights[var:]
        lau = self.laurent
        if lau is not None and lau >= var:
            lau += 1
        return MultiSeries(self.nvars + 1, terms, self.order, w, lau, self.mode)

    # -- composition ------------------------------------------------------------------

    def compose(self, args: Sequence["MultiSeries"]):
        """Substitute ``args[i]`` for variable i (Taylor substitution)."""
        if len(args) != self.nvars:
            raise SeriesError("composition needs one argument per variable")
        m = args[0].nvars
        aw = args[0].weights
        for a in args:
            if a.nvars != m or a.weights != aw:
                raise SeriesError("composition arguments must share nvars and weights")
        if self.laurent is not None and any(e[self.laurent] < 0 for e in self.terms):
            raise SeriesError("composition of a Laurent outer series is not supported")
        order = _omin(*(a.order for a in args))
        if self.order is not None:
            vmin = INF
            for i, a in enumerate(args):
                if self.weights[i] == 0:
                    continue
                v = a.wvaluation()
                if v < 1:
                    raise SeriesError(
                        "argument with nonzero constant term in a truncated outer series")
                vmin = min(vmin, v)
            if vmin != INF:
                order = _omin(order, (self.order + 1) * vmin - 1)
        mode = self.mode if self.terms else args[0].mode
        for a in args:
            if a.terms and a.mode != mode:
                raise SeriesError("coefficient mode mismatch in composition")
        one = 1.0 + 0j if mode == "float" else ONE
        unit = MultiSeries.constant(one, m, order, aw, mode=mode)
        cache = [[unit] for _ in range(self.nvars)]

        def power(i, k):
            c = cache[i]
            while len(c) <= k:
                c.append(c[-1] * args[i].retruncate(order) if order is not None else c[-1] * args[i])
            return c[k]

        acc = MultiSeries.zero(m, order, aw, mode=mode)
        terms = {}
        for e, c in sorted(self.terms.items()):
            prod = unit
            for i, k in enumerate(e):
                if k:
                    prod = prod * power(i, k)
                    if not prod.terms:
                        break
            for ee, cc in prod.terms.items():
                v = cc * c
                terms[ee] = terms[ee] + v if ee in terms else v
        acc = MultiSeries(m, terms, order, aw, mode=mode)
        return acc

    def recenter(self, point: Sequence):
        """Translate so that ``point`` becomes the origin: s(x + point)."""
        args = []
        for i, p in enumerate(point):
            x = MultiSeries.var(i, self.nvars, None, self.weights, mode=self.mode)
            if p != 0:
                x = x + MultiSeries.constant(p, self.nvars, None, self.weights, mode=self.mode)
            args.append(x)
        shifted = [i for i, p in enumerate(point) if p != 0]
        if self.order is not None and any(self.weights[i] for i in shifted):
            raise TruncationLimited("cannot recenter a truncated series in a graded variable")
        out = MultiSeries(self.nvars, self.terms, None, self.weights, self.laurent, self.mode)
        res = out.compose(args)
        return res.retruncate(self.order) if self.order is not None else res

    def evaluate(self, point: Sequence):
        """Value of a polynomial (or truncated jet, as a polynomial) at a point."""
        acc = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * (x ** k)
            acc = acc + v
        return acc

    # -- coefficient domain ---------------------------------------------------------------

    def map_coeffs(self, fn, mode=None):
        return MultiSeries(self.nvars, {e: fn(c) for e, c in self.terms.items()},
                           self.order, self.weights, self.laurent, mode or self.mode)

    def to_float(self):
        return self.map_coeffs(complex, mode="float")

    # -- serialization -------------------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for e, c in sorted(self.terms.items()):
            if self.mode == "float":
                terms.append({"exponents": list(e), "coeff": [c.real, c.imag]})
            else:
                c = GaussRat.coerce(c)
                if c is NotImplemented:
                    raise SeriesError("only Gaussian-rational series serialize exactly")
                terms.append({"exponents": list(e), "coeff": {
                    "num_re": str(c.re.numerator), "den_re": str(c.re.denominator),
                    "num_im": str(c.im.numerator), "den_im": str(c.im.denominator)}})
        return {"nvars": self.nvars, "order": self.order, "weights": list(self.weights),
                "laurent": self.laurent, "mode": self.mode, "terms": terms}

    @staticmethod
    def from_json(d: dict) -> "MultiSeries":
        terms = {}
        for t in d["terms"]:
            c = t["coeff"]
            if isinstance(c, list):
                v = complex(c[0], c[1])
            else:
                v = GaussRat(Fraction(int(c["num_re"]), int(c["den_re"])),
                             Fraction(int(c["num_im"]), int(c["den_im"])))
            terms[tuple(t["exponents"])] = v
        return MultiSeries(d["nvars"], terms, d.get("order"), d.get("weights"),
                           d.get("laurent"), d.get("mode"))

    # -- display ---------------------------------------------------------------------------

    def __repr__(self):
        return f"MultiSeries({self.pretty()}, order={self.order})"

    def pretty(self, names=None) -> str:
        names = names or [f"z{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0])):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            cs = str(c) if not isinstance(c, complex) else repr(c)
            parts.append(f"({cs})" + ("*" + mono if mono else ""))
        return " + ".join(parts)


def poly(nvars: int, terms: dict, weights=None) -> MultiSeries:
    """Exact polynomial from {exponents: coefficient}; coefficients may be ints,
    Fractions, GaussRat or strings like '1/2' or '1/3+1/1i'."""
    conv = {}
    for e, c in terms.items():
        if isinstance(c, str):
            c = parse_gauss(c)
        conv[tuple(e)] = c
    return MultiSeries(nvars, conv, None, weights)


# -- map jets ---------------------------------------------------------------------------------

class MapJet:
    """An n-tuple of series in n variables (a map germ or chart map)."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[MultiSeries]):
        comps = list(components)
        if not comps:
            raise ValueError("empty map")
        n = comps[0].nvars
        for c in comps:
            if c.nvars != n:
                raise ValueError("components must share nvars")
        self.components = tuple(comps)

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def order(self):
        return _omin(*(c.order for c in self.components))

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    @staticmethod
    def identity(n: int, order=None, weights=None, mode="exact") -> "MapJet":
        return MapJet(MultiSeries.var(i, n, order, weights, mode) for i in range(n))

    def compose(self, inner: "MapJet") -> "MapJet":
        """self ∘ inner."""
        return MapJet(c.compose(inner.components) for c in self.components)

    def retruncate(self, order=None, weights=None) -> "MapJet":
        return MapJet(c.retruncate(order, weights) for c in self.components)

    def linear_part(self):
        n = self.nvars
        mat = []
        for c in self.components:
            row = []
            for k in range(n):
                e = [0] * n
                e[k] = 1
                row.append(c.terms.get(tuple(e), ZERO))
            mat.append(row)
        return mat

    def jacobian(self):
        return [[c.partial(k) for k in range(self.nvars)] for c in self.components]

    def recenter(self, point, image_point=None) -> "MapJet":
        """Germ at ``point`` in coordinates centred at point and at image_point."""
        comps = [c.recenter(point) for c in self.components]
        if image_point is not None:
            comps = [c - MultiSeries.constant(q, c.nvars, None, c.weights, mode=c.mode)
                     if q != 0 else c for c, q in zip(comps, image_point)]
        return MapJet(comps)

    def __eq__(self, o):
        return isinstance(o, MapJet) and self.components == o.components

    __hash__ = None

    def agrees(self, o: "MapJet") -> bool:
        return all(a.agrees(b) for a, b in zip(self.components, o.components))

    def __repr__(self):
        return "MapJet(" + ", ".join(c.pretty() for c in self.components) + ")"


def series_arith(a: MultiSeries, b: MultiSeries, op: str) -> MultiSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div_by_unit":
        return a.div_by_unit(b)
    raise ValueError(f"unknown op {op!r}")


def series_compose(outer: MultiSeries, args: MapJet) -> MultiSeries:
    return outer.compose(list(args))


def z1_valuation(s: MultiSeries, var: int = 0):
    return s.valuation(var)


def divide_by_var_power(s: MultiSeries, var: int, k: int) -> MultiSeries:
    return s.divide_by_var_power(var, k)


def restrict_to_S(s: MultiSeries) -> MultiSeries:
    return s.restrict(0)


def coefficient(s: MultiSeries, exponent):
    return s.coefficient(exponent)


def partial(s: MultiSeries, var: int) -> MultiSeries:
    return s.partial(var)


def is_linear(m: MapJet) -> bool:
    return all(sum(e) == 1 for c in m for e in c.terms) and all(c.order is None for c in m)


def invert_map_jet(m: MapJet, order=None) -> MapJet:
    """Local inverse of a map germ fixing the origin."""
    n = m.n
    if m.nvars != n:
        raise SeriesError("map must be square")
    for c in m:
        if c.constant_term() != 0:
            raise SeriesError("map jet must fix the origin")
    lin = m.linear_part()
    try:
        linv = linalg.inverse(lin)
    except ZeroDivisionError:
        raise SeriesError("singular linear part") from None
    w = m[0].weights
    mode = m[0].mode
    if is_linear(m):
        return MapJet(MultiSeries(n, {tuple(1 if j == k else 0 for j in range(n)): linv[i][k]
                                      for k in range(n)}, None, w, mode=mode) for i in range(n))
    K = _omin(m.order, order)
    if K is None:
        raise SeriesError("inverting a nonlinear polynomial map needs a truncation order")
    if any(x != 1 for x in w):
        raise SeriesError("map inversion works in total-degree truncation")
    ident = MapJet.identity(n, K, w, mode)
    # nonlinear part N = m - L
    lin_series = [MultiSeries(n, {tuple(1 if j == k else 0 for j in range(n)): lin[i][k]
                                  for k in range(n)}, K, w, mode=mode) for i in range(n)]
    nonlin = MapJet((m[i].retruncate(K) - lin_series[i]) for i in range(n))

    def apply_linv(vec):
        return [sum((vec[k].scale(linv[i][k]) for k in range(n)),
                    MultiSeries.zero(n, K, w, mode)) for i in range(n)]

    psi = MapJet(apply_linv(list(ident)))
    for _ in range(K):
        npsi = nonlin.compose(psi)
        nxt = MapJet(apply_linv([ident[i] - npsi[i] for i in range(n)]))
        if nxt == psi:
            break
        psi = nxt
    return psi


# -- matrices of series -------------------------------------------------------------------------

def series_det(mat):
    n = len(mat)
    if n == 0:
        return None
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * series_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def series_matrix_inverse(mat, order):
    """Inverse of a square matrix of series whose constant part is invertible."""
    n = len(mat)
    dinv = series_det(mat).inverse(order)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if n == 1:
                cof = MultiSeries.constant(ONE, mat[0][0].nvars, order, mat[0][0].weights,
                                           mode=mat[0][0].mode)
            else:
                minor = [row[:j] + row[j + 1:] for k, row in enumerate(mat) if k != i]
                cof = series_det(minor)
                if (i + j) % 2:
                    cof = -cof
            adj[j][i] = cof
    return [[adj[i][j] * dinv for j in range(n)] for i in range(n)]


def to_univariate_list(s: MultiSeries, var: int = 0):
    """Coefficient list (lowest first) of a polynomial in a single variable."""
    if s.order is not None:
        raise SeriesError("expected an exact polynomial")
    others = [i for i in range(s.nvars) if i != var]
    for e in s.terms:
        if any(e[i] for i in others):
            raise SeriesError("polynomial involves more than one variable")
    d = max((e[var] for e in s.terms), default=-1)
    out = [ZERO] * (d + 1)
    for e, c in s.terms.items():
        out[e[var]] = c
    return out


def from_univariate_list(coeffs, nvars: int = 1, var: int = 0) -> MultiSeries:
    terms = {}
    for k, c in enumerate(coeffs):
        e = [0] * nvars
        e[var] = k
        terms[tuple(e)] = c
    return MultiSeries(nvars, terms, None)


def laurent_quotient(num: MultiSeries, den: MultiSeries, order: int) -> MultiSeries:
    """Univariate num/den as a Laurent series, exact through degree ``order``."""
    if num.nvars != 1 or den.nvars != 1:
        raise SeriesError("laurent_quotient is univariate")
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    k = den.valuation(0)
    unit = den.divide_by_var_power(0, k) if k else den
    K = order + k
    n = num.retruncate(K) if num.order is None or num.order >= K else num
    q = n * unit.inverse(K)
    q = MultiSeries(1, q.terms, q.order, q.weights, laurent=0, mode=q.mode)
    return q.divide_by_var_power(0, k)


def formal_residue_1var(s: MultiSeries, var: int = 0):
    if s.laurent is not None and s.laurent != var:
        raise SeriesError("residue variable must be the Laurent variable")
    e = [0] * s.nvars
    e[var] = -1
    return s.terms.get(tuple(e), 0.0j if s.mode == "float" else ZERO)


# -- exact polynomial division ---------------------------------------------------------------------

def _lead(p: MultiSeries):
    return max(p.terms)  # lex order on exponent tuples


def poly_divmod(a: MultiSeries, b: MultiSeries):
    """Multivariate division of exact polynomials by a single divisor (lex order)."""
    if a.order is not None or b.order is not None:
        raise SeriesError("polynomial division needs exact polynomials")
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    lb = _lead(b)
    cb = b.terms[lb]
    q = {}
    r = {}
    work = dict(a.terms)
    while work:
        e = max(work)
        c = work[e]
        if all(x >= y for x, y in zip(e, lb)):
            d = tuple(x - y for x, y in zip(e, lb))
            f = c / cb
            q[d] = q[d] + f if d in q else f
            for eb, c2 in b.terms.items():
                ee = tuple(x + y for x, y in zip(d, eb))
                v = work.get(ee, ZERO) - f * c2
                if v == 0:
                    work.pop(ee, None)
                else:
                    work[ee] = v
        else:
            r[e] = c
            del work[e]
    n = a.nvars
    return (MultiSeries(n, q, None, a.weights, mode=a.mode),
            MultiSeries(n, r, None, a.weights, mode=a.mode))


def divide_exact(a: MultiSeries, y: MultiSeries, k: int = 1, order=None) -> MultiSeries:
    """a / y^k, certified.

    A monomial y is handled by exponent shifts.  With ``order`` given the
    division happens in the local series ring: y must be a variable power
    times a unit there.  Otherwise both are exact polynomials and the
    remainder must vanish.
    """
    for _ in range(k):
        a = _divide_once(a, y, order)
    return a


def _divide_once(a: MultiSeries, y: MultiSeries, order=None) -> MultiSeries:
    if y.is_zero():
        raise ZeroDivisionError("division by zero")
    if len(y.terms) == 1:
        (e, c), = y.terms.items()
        q = a
        for var, k in enumerate(e):
            if k:
                if q.valuation(var) < k:
                    raise SeriesError("division failure: insufficient valuation")
                q = q.divide_by_var_power(var, k)
        return q.scale(1 / c)
    if order is not None or a.order is not None or y.order is not None:
        for var in sorted(y.variables()):
            v = y.valuation(var)
            if v < 1:
                continue
            rest = y.divide_by_var_power(var, v)
            if rest.constant_term() == 0:
                continue
            if a.valuation(var) < v:
                raise SeriesError("division failure: insufficient valuation")
            q = a.divide_by_var_power(var, v)
            K = _omin(q.order, rest.order, order)
            return q.div_by_unit(rest, K)
        raise SeriesError("divisor is not a variable power times a unit")
    q, r = poly_divmod(a, y)
    if not r.is_zero():
        raise SeriesError("division failure: nonzero remainder")
    return q


def y_valuation(a: MultiSeries, y: MultiSeries, limit: int = 64):
    """Largest k with y^k | a (INF for a = 0)."""
    if a.is_zero():
        return INF
    k = 0
    while k < limit:
        try:
            a = _divide_once(a, y)
        except (SeriesError, TruncationLimited):
            return k
        if a.is_zero():
            return INF
        k += 1
    return k


# -- rational maps --------------------------------------------------------------------------------

class RationalMap:
    """Map whose components are quotients of exact polynomials."""

    def __init__(self, components):
        comps = []
        for c in components:
            if isinstance(c, MultiSeries):
                c = (c, MultiSeries.constant(ONE, c.nvars))
            num, den = c
            if num.order is not None or den.order is not None:
                raise SeriesError("rational map components must be exact polynomials")
            if den.is_zero():
                raise ZeroDivisionError("zero denominator in rational map")
            comps.append((num, den))
        self.components = tuple(comps)
        self.nvars = comps[0][0].nvars

    def __len__(self):
        return len(self.components)

    def defined_at(self, point) -> bool:
        return all(den.evaluate(point) != 0 for _, den in self.components)

    def evaluate(self, point):
        out = []
        for num, den in self.components:
            d = den.evaluate(point)
            if d == 0:
                raise ZeroDivisionError(f"rational map undefined at {point}")
            out.append(num.evaluate(point) / d)
        return tuple(out)

    def germ(self, point, order: int):
        """(MapJet centred at point and at its image, image point), total-degree order."""
        image = self.evaluate(point)
        comps = []
        for (num, den), q in zip(self.components, image):
            n = num.recenter(point)
            d = den.recenter(point)
            s = n.div_by_unit(d, order) if len(d.terms) != 1 or d.constant_term() == 0 \
                else n.retruncate(order).scale(1 / d.constant_term())
            if q != 0:
                s = s - MultiSeries.constant(q, s.nvars, order, s.weights, mode=s.mode)
            comps.append(s.retruncate(order))
        return MapJet(comps), image

    def as_series(self, order: int, weights) -> MapJet:
        """Expansion valid along the whole hyperplane: denominators must be units
        for the given weights (e.g. nonzero constant at z1=0 for I_S-adic weights)."""
        comps = []
        for num, den in self.components:
            n = num.retruncate(None, weights)
            d = den.retruncate(None, weights)
            if len(d.terms) == 1 and d.constant_term() != 0:
                comps.append(n.scale(1 / d.constant_term()).retruncate(order))
            else:
                comps.append(n.div_by_unit(d, order))
        return MapJet(comps)

    def is_polynomial(self) -> bool:
        return all(len(d.terms) == 1 and d.constant_term() != 0 for _, d in self.components)

    def polynomial_map(self) -> MapJet:
        if not self.is_polynomial():
            raise SeriesError("rational map is not polynomial")
        return MapJet(n.scale(1 / d.constant_term()) for n, d in self.components)

    def to_json(self):
        return [{"num": n.to_json()["terms"], "den": d.to_json()["terms"]} for n, d in self.components]

    def __repr__(self):
        return "RationalMap(" + ", ".join(f"({n.pretty()})/({d.pretty()})" for n, d in self.components) + ")"
