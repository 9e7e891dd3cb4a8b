"""Localized residues: Grothendieck residues, phi(H) on matrix jets, and the
Baum-Bott / Camacho-Sad / Lehmann-Suwa type formulas built on them.

All Gamma-cycle integrals are normalized by (1/2 pi i)^m, so the algebraic
residue of the standard positively oriented torus is what every formula
returns.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

import numpy as np

from . import linalg
from .algebraic import numeric_roots, pdeg, pdivmod, pgcd, ptrim
from .coeffs import GaussRat, ONE, ZERO
from .series import (INF, MapJet, MultiSeries, SeriesError, TruncationLimited, divide_exact,
                     formal_residue_1var, from_univariate_list, laurent_quotient,
                     to_univariate_list, y_valuation)


class ResidueError(ValueError):
    pass


class HypothesisError(ResidueError):
    """The requested formula does not apply to the given pair."""


# -- symmetric polynomials ----------------------------------------------------------------------------

class SymmetricPolynomialSpec:
    """Integer polynomial in the elementary symmetric functions e_1, e_2, ...

    ``terms`` maps exponent tuples (a_1, ..., a_m) of e_1^a_1 ... e_m^a_m to
    integer coefficients.
    """

    def __init__(self, terms: dict, label: str | None = None):
        clean = {}
        m = max((len(e) for e in terms), default=0)
        for e, c in terms.items():
            if c == 0:
                continue
            e = tuple(e) + (0,) * (m - len(e))
            clean[e] = clean.get(e, 0) + int(c)
        while m and all(e[m - 1] == 0 for e in clean):
            m -= 1
            clean = {e[:m]: c for e, c in clean.items()}
        self.terms = clean
        self.arity = m
        self.label = label or self._format()

    @staticmethod
    def parse(text: str) -> "SymmetricPolynomialSpec":
        """Parse sums of monomials such as 'e1^2', 'e2', 'e1^2 - 2*e2', '3*e1*e2'."""
        src = text.replace(" ", "")
        if not src:
            raise ValueError("empty phi")
        tokens = re.findall(r"[+-]?[^+-]+", src)
        terms = {}
        for tok in tokens:
            sign = -1 if tok.startswith("-") else 1
            tok = tok.lstrip("+-")
            coeff = 1
            powers = {}
            for factor in tok.split("*"):
                mm = re.fullmatch(r"e(\d+)(?:\^(\d+))?", factor)
                if mm:
                    i = int(mm.group(1))
                    if i < 1:
                        raise ValueError(f"bad generator {factor!r}")
                    powers[i] = powers.get(i, 0) + int(mm.group(2) or 1)
                elif re.fullmatch(r"\d+", factor):
                    coeff *= int(factor)
                else:
                    raise ValueError(f"cannot parse phi factor {factor!r}")
            m = max(powers, default=0)
            e = tuple(powers.get(i, 0) for i in range(1, m + 1))
            terms[e] = terms.get(e, 0) + sign * coeff
        return SymmetricPolynomialSpec(terms, text.strip())

    def weighted_degrees(self) -> set:
        return {sum((i + 1) * a for i, a in enumerate(e)) for e in self.terms}

    def check_degree(self, d: int):
        degs = self.weighted_degrees()
        if degs and degs != {d}:
            raise ValueError(f"phi={self.label} is not weighted-homogeneous of degree {d}")

    def is_even_under_sign(self) -> bool:
        return all(d % 2 == 0 for d in self.weighted_degrees())

    def evaluate(self, values):
        """phi at e_i = values[i-1] (any ring elements)."""
        acc = None
        for e, c in sorted(self.terms.items()):
            t = None
            for i, a in enumerate(e):
                if a:
                    p = values[i] ** a
                    t = p if t is None else t * p
            if t is None:
                t = ONE
            t = t * c if not isinstance(t, MultiSeries) else t.scale(c)
            acc = t if acc is None else acc + t
        return acc if acc is not None else ZERO

    def evaluate_top(self, chern, n: int) -> Fraction:
        """phi(c_1, ..., c_m) read in degree n-1 of Q[h]/h^n."""
        self.check_degree(n - 1)
        tot = Fraction(0)
        for e, c in self.terms.items():
            v = Fraction(c)
            for i, a in enumerate(e):
                ci = chern[i + 1] if i + 1 < len(chern) else Fraction(0)
                v *= ci ** a
            tot += v
        return tot

    def _format(self):
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"e{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a)
            parts.append(f"{c}*{mono}" if c != 1 else mono)
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"SymmetricPolynomialSpec({self.label!r})"


def elementary_symmetric(matrix, m=None):
    """e_1..e_m of the eigenvalues via Newton identities on traces of powers."""
    size = len(matrix)
    m = size if m is None else m
    if m > size:
        raise ValueError("arity exceeds matrix size")
    powers = [matrix]
    for _ in range(1, m):
        prev = powers[-1]
        powers.append([[sum_list(prev[i][k] * matrix[k][j] for k in range(size))
                        for j in range(size)] for i in range(size)])
    p = [sum_list(P[i][i] for i in range(size)) for P in powers]
    e = [None] * (m + 1)
    for k in range(1, m + 1):
        acc = None
        for i in range(1, k + 1):
            term = p[i - 1] if k == i else e[k - i] * p[i - 1]
            term = term if i % 2 == 1 else -term
            acc = term if acc is None else acc + term
        e[k] = _scale(acc, Fraction(1, k))
    return e[1:]


def sum_list(it):
    acc = None
    for x in it:
        acc = x if acc is None else acc + x
    return acc


def _scale(x, q):
    if isinstance(x, MultiSeries):
        return x.scale(GaussRat(q))
    return x * GaussRat(q)


def phi_eval(phi: SymmetricPolynomialSpec, matrix, sign: int = -1):
    size = len(matrix)
    if any(len(r) != size for r in matrix):
        raise ValueError("matrix must be square")
    if phi.arity > size:
        raise ValueError(f"phi uses e_{phi.arity} but the matrix has size {size}")
    e = elementary_symmetric(matrix, phi.arity) if phi.arity else []
    vals = [(_scale(x, Fraction(sign ** (i + 1)))) for i, x in enumerate(e)]
    out = phi.evaluate(vals)
    if not isinstance(out, MultiSeries) and size and isinstance(matrix[0][0], MultiSeries):
        s0 = matrix[0][0]
        out = MultiSeries.constant(out, s0.nvars, s0.order, s0.weights, mode=s0.mode)
    return out


# -- Grothendieck residues ------------------------------------------------------------------------------

def _monomials(m: int, maxdeg: int):
    out = []
    for d in range(maxdeg + 1):
        for combo in combinations_with_replacement(range(m), d):
            e = [0] * m
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def _need(s: MultiSeries, deg: int):
    if s.order is not None and s.order < deg:
        raise TruncationLimited(f"need terms through degree {deg}, series known to {s.order}")


def _in_span_check(dens, c: int, m: int):
    """Does the span of z^b f_k (mod degree > c) contain every degree-c monomial?"""
    mons = _monomials(m, c)
    index = {e: i for i, e in enumerate(mons)}
    rows = []
    for f in dens:
        _need(f, c)
        for b in mons:
            row = [ZERO] * len(mons)
            nz = False
            for e, v in f.terms.items():
                ee = tuple(x + y for x, y in zip(e, b))
                if sum(ee) <= c:
                    row[index[ee]] = v
                    nz = True
            if nz:
                rows.append(row)
    return rows, mons, index


def _membership(rows, mons, index, targets):
    """For each target monomial, is it in the row space (mod degree > c)?"""
    if not rows:
        return [False] * len(targets)
    ncols = len(mons)
    # solve x^T R = target  <=>  R^T x = target
    rt = [[rows[r][col] for r in range(len(rows))] for col in range(ncols)]
    bs = []
    for t in targets:
        b = [ZERO] * ncols
        b[index[t]] = ONE
        bs.append(b)
    sols = linalg.solve_many(rt, bs)
    return [s is not None for s in sols]


def regularity_index(dens, max_c: int = 40):
    """Smallest c with m^c contained in the ideal (Nakayama test), or None."""
    m = dens[0].nvars
    if all(f.order is None for f in dens):
        # m^mu lies in the ideal, and mu is at most the Bezout number
        bound = 1
        for f in dens:
            bound *= max(f.degree(), 1)
        max_c = min(max_c, bound)
    for c in range(1, max_c + 1):
        rows, mons, index = _in_span_check(dens, c, m)
        top = [e for e in mons if sum(e) == c]
        if all(_membership(rows, mons, index, top)):
            return c
    return None


def local_algebra_dimension(dens, max_c: int = 40) -> int:
    """dim C[[z]]/(dens) at the origin (finite for an isolated zero)."""
    if any(f.constant_term() != 0 for f in dens):
        return 0
    c = regularity_index(dens, max_c)
    if c is None:
        raise ResidueError("non-isolated zero: the ideal contains no power of the maximal ideal")
    rows, mons, _ = _in_span_check(dens, c, dens[0].nvars)
    return len(mons) - linalg.rank(rows)


@dataclass
class TransformationData:
    exponents: tuple
    matrix: list
    order: int


def _transformation_matrix(dens, d, N):
    """Solve z_j^{d_j} = sum_k a_jk f_k modulo degree >= N."""
    m = len(dens)
    for f in dens:
        _need(f, N - 1)
    mons = _monomials(m, N - 1)
    index = {e: i for i, e in enumerate(mons)}
    # unknown (k, monomial b): coefficient of z^b in a_jk
    unknowns = [(k, b) for k in range(m) for b in mons]
    cols = []
    for k, b in unknowns:
        col = [ZERO] * len(mons)
        for e, v in dens[k].terms.items():
            ee = tuple(x + y for x, y in zip(e, b))
            if sum(ee) < N:
                col[index[ee]] = col[index[ee]] + v
        cols.append(col)
    A = [[cols[u][r] for u in range(len(unknowns))] for r in range(len(mons))]
    bs = []
    for j in range(m):
        target = [0] * m
        target[j] = d[j]
        b = [ZERO] * len(mons)
        b[index[tuple(target)]] = ONE
        bs.append(b)
    sols = linalg.solve_many(A, bs)
    if any(s is None for s in sols):
        return None
    w = dens[0].weights
    mode = dens[0].mode
    mat = []
    for j in range(m):
        row = []
        for k in range(m):
            terms = {}
            for u, (kk, b) in enumerate(unknowns):
                if kk == k and sols[j][u] != 0:
                    terms[b] = sols[j][u]
            row.append(MultiSeries(m, terms, N - 1, w, mode=mode))
        mat.append(row)
    return mat


def _residue_from(num, mat, d):
    from .series import series_det
    top = tuple(x - 1 for x in d)
    deg = sum(top)
    det = series_det(mat) if len(mat) > 1 else mat[0][0]
    _need(num, deg)
    prod = num.retruncate(deg) if num.order is None or num.order > deg else num
    prod = prod * det.retruncate(deg)
    return prod.terms.get(top, ZERO)


def grothendieck_residue(numerator: MultiSeries, denominators, point=None, details=False):
    """Res_p [ numerator dz / (f_1 ... f_m) ] by the transformation law."""
    dens = list(denominators)
    m = len(dens)
    if m == 0:
        raise ValueError("need at least one denominator")
    for f in dens:
        if f.nvars != m:
            raise ValueError("number of denominators must equal the number of variables")
    num = numerator
    if point is not None and any(x != 0 for x in point):
        num = num.recenter(point)
        dens = [f.recenter(point) for f in dens]
    if any(f.constant_term() != 0 for f in dens):
        return (ZERO, None) if details else ZERO
    if m == 1:
        f = dens[0]
        v = f.valuation(0)
        if v == INF:
            raise ResidueError("non-isolated zero: denominator vanishes identically")
        unit = f.divide_by_var_power(0, v)
        _need(num, v - 1)
        vals = []
        for extra in (0, 1):
            K = v - 1 + extra
            if unit.order is not None and unit.order < K:
                if extra == 0:
                    raise TruncationLimited("denominator known to too low an order")
                vals.append(vals[0])
                break
            g = num.retruncate(K) if num.order is None or num.order >= K else num
            q = g * unit.inverse(K)
            vals.append(q.terms.get((v - 1,), ZERO))
        if vals[0] != vals[1]:
            raise ResidueError("residue unstable under truncation escalation")
        info = TransformationData((v,), [[unit]], v)
        return (vals[0], info) if details else vals[0]
    c = regularity_index(dens)
    if c is None:
        raise ResidueError("non-isolated zero: the ideal contains no power of the maximal ideal")
    rows, mons, index = _in_span_check(dens, c, m)
    d = []
    for j in range(m):
        for k in range(1, c + 1):
            e = [0] * m
            e[j] = k
            if _membership(rows, mons, index, [tuple(e)])[0]:
                d.append(k)
                break
    N = c + sum(x - 1 for x in d) + 1
    results = []
    for D in (N, N + 1):
        mat = _transformation_matrix(dens, d, D)
        if mat is None:
            raise ResidueError("membership system not solvable at the certified order")
        results.append(_residue_from(num, mat, d))
    if results[0] != results[1]:
        raise ResidueError("residue unstable under truncation escalation D -> D+1")
    info = TransformationData(tuple(d), mat, N)
    return (results[0], info) if details else results[0]


def jacobian_det(components):
    m = len(components)
    mat = [[c.partial(k) for k in range(m)] for c in components]
    from .series import series_det
    return series_det(mat)


def multiplicity_by_residue(components, point=None):
    comps = list(components)
    if point is not None and any(x != 0 for x in point):
        comps = [c.recenter(point) for c in comps]
    return grothendieck_residue(jacobian_det(comps), comps)


# -- numeric oracle ---------------------------------------------------------------------------------

@dataclass
class NumericResidue:
    value: complex
    error: float
    nodes: int


def _eval_float(s: MultiSeries, pt):
    acc = 0j
    for e, c in s.terms.items():
        v = complex(c)
        for x, k in zip(pt, e):
            if k:
                v *= x ** k
        acc += v
    return acc


def contour_residue_numeric(numerator: MultiSeries, denominators, point, radius: float,
                            tol: float = 1e-13, max_nodes: int = 1 << 14) -> NumericResidue:
    """Trapezoidal rule on circles |z_j - p_j| = radius (torus for m >= 2)."""
    dens = list(denominators)
    m = len(dens)
    p = [complex(x) for x in point]
    if m >= 2:
        for f in dens:
            if len(f.terms) != 1:
                raise ResidueError("numeric oracle for m >= 2 needs monomial denominators")
    else:
        f = dens[0]
        if f.order is None:
            cs = to_univariate_list(f)
            for r in numeric_roots([complex(c) for c in cs]) if pdeg(cs) >= 1 else []:
                d = abs(r - p[0])
                if 1e-7 < d <= radius:
                    raise ResidueError("contour radius encloses a second zero")

    def integrate(nodes):
        thetas = np.exp(2j * np.pi * np.arange(nodes) / nodes)
        total = 0j
        for idx in product(range(nodes), repeat=m):
            pt = [p[j] + radius * thetas[idx[j]] for j in range(m)]
            val = _eval_float(numerator, pt)
            for f in dens:
                val /= _eval_float(f, pt)
            for j in range(m):
                val *= radius * thetas[idx[j]]
            total += val
        return total / nodes ** m

    nodes = 32 if m == 1 else 16
    prev = integrate(nodes)
    while True:
        nodes *= 2
        cur = integrate(nodes)
        err = abs(cur - prev)
        scale = max(1.0, abs(cur))
        if err <= tol * scale or nodes >= (max_nodes if m == 1 else 256):
            return NumericResidue(complex(cur), float(err + 1e-15 * scale), nodes)
        prev = cur


# -- rational residue sums ---------------------------------------------------------------------------

def rational_residue_sum(p, q):
    """Sum of residues of p/q dt over all finite zeros of q (= -Res at infinity)."""
    p = ptrim([GaussRat.coerce(c) for c in p])
    q = ptrim([GaussRat.coerce(c) for c in q])
    if not q:
        raise ZeroDivisionError("q = 0")
    if pdeg(pgcd(p, q)) > 0:
        raise ResidueError("p and q have a common factor")
    if not p:
        return ZERO
    dp, dq = len(p) - 1, len(q) - 1
    # expansion at infinity: coefficient of t^{-1} of p/q
    quo, rem = pdivmod(p, q)
    rem = ptrim(rem)
    if not rem or len(rem) - 1 != dq - 1:
        return ZERO
    return rem[-1] / q[-1]


# -- residue values -------------------------------------------------------------------------------------

@dataclass
class ResidueValue:
    formula_family: str
    point: object
    value: object
    method: str = "exact"
    error_bound: float | None = None
    notes: dict = field(default_factory=dict)


def _s_germ(s: MultiSeries, point, drop_first=True):
    """A function on S (first chart variable absent) recentred and reduced to S-variables."""
    r = s.restrict(0)
    if point is not None and any(x != 0 for x in point):
        r = r.recenter(point)
    r = r.drop_var(0) if drop_first else r
    full = (1,) * r.nvars
    if r.order is None:
        return MultiSeries(r.nvars, r.terms, None, full, mode=r.mode)
    return r.retruncate(None, full)


def _point_of(point):
    """Chart coordinates of a point of S (a SingularPoint carries only its S-coordinates)."""
    return tuple(getattr(point, "chart_point", point))


def _gen_components(pa, variant):
    n = pa.n
    h_s = [pa.h[j].restrict(0) for j in range(1, n)]
    if variant == "split_nu1":
        return [pa.dfg_factor * c for c in h_s]
    return h_s


def _check_variant(pa, variant):
    if variant == "tangential":
        if not pa.tangential:
            raise HypothesisError("tangential variant needs a tangential pair")
    elif variant == "split":
        if pa.nu <= 1:
            raise HypothesisError("split variant needs nu > 1")
    elif variant == "split_nu1":
        if pa.nu != 1:
            raise HypothesisError("split_nu1 variant needs nu = 1")
    else:
        raise ValueError(f"unknown variant {variant!r}")


def hessian_matrix(pa, full: bool, variant="generic"):
    """(dh^j/dz^k)|_S with j,k = 2..n, or 1..n when full."""
    n = pa.n
    rng = range(n) if full else range(1, n)
    comps = list(pa.h)
    if variant == "nu1":
        one = MultiSeries.constant(ONE, pa.h[0].nvars, None, pa.h[0].weights, mode=pa.h[0].mode)
        comps = [(one + pa.h[0]) * c for c in comps]
    return [[comps[j].partial(k).restrict(0) for k in rng] for j in rng]


def formula_integrand(pa, family: str, phi=None, sign: int = -1):
    """(numerator, denominators) on S, in the S-variables, for a smooth-S formula."""
    n = pa.n
    if family in ("cs1", "cs2", "cs3"):
        if family == "cs1":
            _check_variant(pa, "tangential")
            base, dens = pa.ell1, _gen_components(pa, "tangential")
        elif family == "cs2":
            _check_variant(pa, "split")
            base, dens = pa.k1, _gen_components(pa, "split")
        else:
            _check_variant(pa, "split_nu1")
            base, dens = pa.k1, _gen_components(pa, "split_nu1")
        num = base ** (n - 1) if n > 2 else base
    elif family in ("bb", "bb1"):
        phi.check_degree(n - 1)
        if family == "bb1":
            if pa.nu != 1:
                raise HypothesisError("Baum-Bott nu1 formula needs nu = 1")
            H = hessian_matrix(pa, False, "nu1")
            dens = _gen_components(pa, "split_nu1")
        else:
            if not pa.tangential and pa.nu == 1:
                raise HypothesisError("generic Baum-Bott formula needs a tangential pair or nu > 1")
            H = hessian_matrix(pa, False)
            dens = _gen_components(pa, "tangential")
        num = phi_eval(phi, H, sign)
    elif family == "ls1":
        phi.check_degree(n - 1)
        if pa.nu <= 1:
            raise HypothesisError("Lehmann-Suwa formula needs nu > 1")
        if not pa.tangential:
            raise HypothesisError("Lehmann-Suwa formula needs a tangential pair")
        num = phi_eval(phi, hessian_matrix(pa, True), sign)
        dens = _gen_components(pa, "tangential")
    else:
        raise ValueError(f"unknown formula family {family!r}")
    return _s_germ(num, None), [_s_germ(c, None) for c in dens]


def _at_point(pa, family, point, phi=None, sign=-1):
    num, dens = formula_integrand(pa, family, phi, sign)
    p = _point_of(point)
    return grothendieck_residue(num, dens, p[1:])


_CS_FAMILY = {"tangential": "cs1", "split": "cs2", "split_nu1": "cs3"}


def residue_cs_smooth(pa, gen, point, variant: str = "tangential") -> ResidueValue:
    if variant not in _CS_FAMILY:
        raise ValueError(f"unknown variant {variant!r}")
    family = _CS_FAMILY[variant]
    return ResidueValue(family, point, _at_point(pa, family, point))


def residue_bb(pa, gen, phi: SymmetricPolynomialSpec, point, variant: str = "generic",
               sign: int = -1) -> ResidueValue:
    if variant not in ("generic", "nu1"):
        raise ValueError(f"unknown variant {variant!r}")
    family = "bb1" if variant == "nu1" else "bb"
    val = _at_point(pa, family, point, phi, sign)
    return ResidueValue(family, point, val, notes={"phi": phi.label, "sign": sign})


def residue_ls(pa, phi: SymmetricPolynomialSpec, point, variant: str = "ls1", sign: int = -1,
               vfield=None) -> ResidueValue:
    if variant == "ls1":
        val = _at_point(pa, "ls1", point, phi, sign)
        return ResidueValue("ls1", point, val, notes={"phi": phi.label, "sign": sign})
    if variant == "ls2":
        if vfield is None:
            raise ValueError("ls2 needs a SingularVectorField")
        V = vfield
        n = len(V.coeffs)
        phi.check_degree(n - 1)
        if V.nu <= 1:
            raise HypothesisError("Lehmann-Suwa formula needs nu > 1")
        V = _vfield_at(V, point)
        _require_smooth_chart(V)
        Y = [[c.partial(k).restrict(0) for k in range(n)] for c in V.coeffs]
        num = _s_germ(phi_eval(phi, Y, sign), None)
        dens = [_s_germ(c, None) for c in V.coeffs[1:]]
        val = grothendieck_residue(num, dens)
        return ResidueValue("ls2", point, val, notes={"phi": phi.label, "sign": sign})
    raise ValueError(f"unknown variant {variant!r}")


def _vfield_at(V, point, order: int = 8):
    p = _point_of(point) if point is not None else None
    if p is None or not any(x != 0 for x in p):
        return V
    return V.at(p, V.local_order or order)


def _require_smooth_chart(V):
    """The vector field must be a germ at the origin with y = u1 * unit."""
    y = V.y
    if y.constant_term() != 0:
        raise ResidueError("y must vanish at the point")
    if y.valuation(0) != 1:
        raise HypothesisError("unsupported singular-S case: y is not u1 times a unit here")
    if y.divide_by_var_power(0, 1).constant_term() == 0:
        raise HypothesisError("unsupported singular-S case: y is not u1 times a unit here")


def residue_cs_singular_vfield(V, point=None, branch=None) -> ResidueValue:
    """Camacho-Sad residue from the singular-S vector field (formula on S or on a branch)."""
    if not V.tangential:
        raise HypothesisError("the singular-S formula needs a tangential pair")
    if V.nu <= 1:
        raise HypothesisError("the singular-S vector-field formula needs nu > 1")
    V = _vfield_at(V, point)
    n = len(V.coeffs)
    y = V.y
    vy = sum_list(V.coeffs[i] * y.partial(i) for i in range(n))
    try:
        ratio = divide_exact(vy, y, 1, order=V.local_order)
    except SeriesError as exc:
        raise ResidueError(f"cancellation failure: {exc}") from None
    if branch is not None:
        if n != 2:
            raise HypothesisError("branch evaluation is available for n = 2 only")
        return ResidueValue("cs7", point,
                            _branch_residue(ratio, V.coeffs[1], branch))
    _require_smooth_chart(V)
    num = _s_germ(ratio ** (n - 1) if n > 2 else ratio, None)
    dens = [_s_germ(c, None) for c in V.coeffs[1:]]
    return ResidueValue("cs7", point, grothendieck_residue(num, dens))


def _branch_residue(num: MultiSeries, den: MultiSeries, branch: MapJet):
    """Residue at s=0 of num(b(s)) / den(b(s)) * d(u2 o b)/ds."""
    bcomps = list(branch)
    N = num.compose(bcomps)
    D = den.compose(bcomps)
    du = bcomps[1].partial(0)
    if D.is_zero():
        raise ResidueError("denominator vanishes identically along the branch")
    v = D.valuation(0)
    integrand = N * du
    # the s^{-1} coefficient needs the integrand through degree v - 1
    if integrand.order is not None and integrand.order < v - 1:
        raise TruncationLimited("branch pullback known to too low an order")
    return formal_residue_1var(laurent_quotient(integrand, D, 0), 0)


def _pullback_pair(f: MapJet, g: MapJet, order=None) -> MapJet:
    from .series import invert_map_jet, is_linear
    if is_linear(g):
        return invert_map_jet(g).compose(f)
    return invert_map_jet(g, order).compose(f)


def residue_cs_singular_branch(f: MapJet, g: MapJet, y: MultiSeries, branch: MapJet,
                               variant: str = "cs4", order=None) -> ResidueValue:
    """Camacho-Sad residue at a (possibly singular) point of S = {y=0}, n = 2."""
    if f.n != 2:
        raise HypothesisError("branch formulas are for n = 2")
    bc = list(branch)
    if not y.compose(bc).is_zero():
        raise ResidueError("y does not vanish along the branch")
    P = _pullback_pair(f, g, order)
    d = [P[j] - MultiSeries.var(j, 2, None, P[j].weights, mode=P[j].mode) for j in range(2)]
    nu = min(y_valuation(x, y) for x in d)
    if nu == INF or nu < 1:
        raise HypothesisError("f and g do not coincide along S")
    A = y.compose(list(P)) - y
    B = d[1]
    try:
        if variant == "cs4":
            num = divide_exact(A, y, nu + 1, order)
            den = divide_exact(B, y, nu, order)
            val = _branch_residue(num, den, branch)
        elif variant in ("cs5", "cs6"):
            if variant == "cs5" and nu <= 1:
                raise HypothesisError("cs5 needs nu > 1")
            if variant == "cs6" and nu != 1:
                raise HypothesisError("cs6 needs nu = 1")
            b = divide_exact(A, y, nu, order)
            den = divide_exact(B, y, nu, order) * y.partial(0)
            if variant == "cs6":
                one = MultiSeries.constant(ONE, 2, None, b.weights, mode=b.mode)
                den = den * (one + b)
            val = _branch_residue(b.partial(0), den, branch)
        else:
            raise ValueError(f"unknown variant {variant!r}")
    except SeriesError as exc:
        raise ResidueError(f"cancellation failure: {exc}") from None
    return ResidueValue(variant, None, val, notes={"nu": nu})
