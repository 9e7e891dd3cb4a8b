"""Foliations on S induced by a pair: generators, extensions, singular points,
cocycle checks and the vector field used at singular points of S."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .algebraic import AlgNum, NumberField, factor_gaussian, numeric_roots
from .coeffs import GaussRat, ONE, ZERO
from .coincidence import (CoincidenceError, PairAnalysis, analyze, germ_at, special_pullback,
                          transition_germ)
from .residues import ResidueError, grothendieck_residue, jacobian_det
from .series import (INF, MapJet, MultiSeries, SeriesError, TruncationLimited, divide_exact,
                     invert_map_jet, is_linear, to_univariate_list, y_valuation)

VARIANTS = ("tangential", "split", "split_nu1")


class FoliationError(ValueError):
    pass


def _check_admissible(pa: PairAnalysis, variant: str):
    if variant not in VARIANTS:
        raise FoliationError(f"unknown variant {variant!r}")
    if variant == "tangential" and not pa.tangential:
        raise FoliationError("tangential variant needs a tangential pair")
    if variant == "split_nu1" and pa.nu != 1:
        raise FoliationError("split_nu1 variant needs nu = 1")


def _on_S(s: MultiSeries) -> MultiSeries:
    """Restriction to S as a series in the S-variables (total-degree weights)."""
    r = s.restrict(0).drop_var(0)
    full = (1,) * r.nvars
    if r.order is None:
        return MultiSeries(r.nvars, r.terms, None, full, mode=r.mode)
    return r.retruncate(None, full)


def _one_like(s: MultiSeries) -> MultiSeries:
    return MultiSeries.constant(ONE, s.nvars, None, s.weights, mode=s.mode)


# -- generators and extensions ---------------------------------------------------------------------

@dataclass(frozen=True)
class FoliationGenerator:
    variant: str
    components: tuple      # coefficients of d/dz2..d/dzn, series on S
    nu: int
    chart: int = 0

    @property
    def n(self) -> int:
        return len(self.components) + 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


@dataclass(frozen=True)
class LocalExtension:
    variant: str
    coeffs: tuple          # full ambient vector-field jet in chart coordinates
    nu: int
    chart: int = 0


def local_generator(pa: PairAnalysis, variant: str = "tangential", chart: int = 0):
    _check_admissible(pa, variant)
    comps = [_on_S(c) for c in pa.h[1:]]
    if variant == "split_nu1":
        factor = _on_S(pa.dfg_factor)
        comps = [factor * c for c in comps]
    gen = FoliationGenerator(variant, tuple(comps), pa.nu, chart)
    if gen.is_zero():
        raise FoliationError("the induced foliation vanishes identically")
    return gen


def local_extension(pa: PairAnalysis, variant: str = "tangential", chart: int = 0):
    _check_admissible(pa, variant)
    if variant == "tangential":
        coeffs = tuple(pa.h)
    else:
        first = pa.k1.mul_var_power(0, 1)
        rest = list(pa.h[1:])
        if variant == "split_nu1":
            rest = [pa.dfg_factor * c for c in rest]
        coeffs = (first,) + tuple(rest)
    return LocalExtension(variant, coeffs, pa.nu, chart)


def _factor_power(variant: str, nu: int) -> int:
    return 1 if variant == "split_nu1" else nu


# -- cocycle checks ------------------------------------------------------------------------------------

@dataclass
class CocycleResult:
    passed: bool
    details: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def _s_germ_of(s: MultiSeries, point_s, order: int) -> MultiSeries:
    g = s.recenter(point_s) if any(x != 0 for x in point_s) else s
    full = (1,) * g.nvars
    if g.order is None:
        return MultiSeries(g.nvars, g.terms, order, full, mode=g.mode)
    return g.retruncate(order, full)


def generator_cocycle_check(genU: FoliationGenerator, genV: FoliationGenerator, transition,
                            samples, order: int = 5) -> CocycleResult:
    """X-hat = (1/a|_S)^p X on the overlap, p = nu (or 1 for split_nu1)."""
    p = _factor_power(genU.variant, genU.nu)
    n = genU.n
    details = []
    for pt in samples:
        tg = transition_germ(transition, pt, order + 1)
        tau_S = [_on_S(c) for c in tg.tau]
        a_S = _on_S(tg.a)
        ainv = a_S.inverse(order) ** p
        X = [_s_germ_of(c, pt[1:], order) for c in genU.components]
        Xh = [_s_germ_of(c, tg.image[1:], order) for c in genV.components]
        Xh_tau = [c.compose(tau_S[1:]) for c in Xh]
        for k in range(1, n):
            push = None
            for j in range(1, n):
                term = tau_S[k].partial(j - 1) * X[j - 1]
                push = term if push is None else push + term
            diff = (Xh_tau[k - 1] - ainv * push).retruncate(order - 1)
            if not diff.is_zero():
                details.append({"point": pt, "component": k + 1, "defect": diff})
    return CocycleResult(not details, details)


@dataclass
class CocycleDefect:
    T_part: list
    V_part: list
    residual: list
    valuations: list

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residual)


def _split_by_z1_degree(s: MultiSeries, below: int):
    lo = {e: c for e, c in s.terms.items() if e[0] < below}
    hi = {e: c for e, c in s.terms.items() if e[0] >= below}
    return (MultiSeries(s.nvars, lo, s.order, s.weights, mode=s.mode),
            MultiSeries(s.nvars, hi, s.order, s.weights, mode=s.mode))


def decompose_defect(defect, t_order: int) -> CocycleDefect:
    """Split a vector-field jet into T_{t_order} + V_2 + residual."""
    T, V, R, vals = [], [], [], []
    for k, d in enumerate(defect):
        low, high = _split_by_z1_degree(d, 2)
        V.append(high)
        vals.append(d.valuation(0))
        if k == 0:
            T.append(MultiSeries.zero(d.nvars, d.order, d.weights, d.mode))
            R.append(low)
        else:
            bad, ok = _split_by_z1_degree(low, t_order)
            T.append(ok)
            R.append(bad)
    return CocycleDefect(T, V, R, vals)


def extension_cocycle_check(extU: LocalExtension, extV: LocalExtension, transition, samples,
                            regime: str = "tangential", order: int = 5):
    """Defect X-hat - (1/a)^p X in hat coordinates, classified as T_k + V_2."""
    if regime not in ("tangential", "comfortable"):
        raise FoliationError(f"unknown regime {regime!r}")
    if regime == "tangential" and extU.variant != "tangential":
        raise FoliationError("tangential regime needs tangential extensions")
    if regime == "comfortable" and extU.variant == "tangential":
        raise FoliationError("comfortable regime needs split extensions")
    nu = extU.nu
    p = _factor_power(extU.variant, nu)
    t_order = nu if regime == "tangential" else 1
    n = len(extU.coeffs)
    out = []
    for pt in samples:
        tg = transition_germ(transition, pt, order + 1)
        jac = tg.tau.jacobian()
        X = [germ_at(c, pt, order) for c in extU.coeffs]
        Xh = [germ_at(c, tg.image, order) for c in extV.coeffs]
        Xh_tau = [c.compose(list(tg.tau)) for c in Xh]
        ainv = tg.a.inverse(order) ** p
        defect = []
        for k in range(n):
            push = None
            for j in range(n):
                term = jac[k][j] * X[j]
                push = term if push is None else push + term
            defect.append((Xh_tau[k] - ainv * push).retruncate(order - 1))
        dec = decompose_defect(defect, t_order)
        out.append({"point": pt, "defect": dec, "passed": dec.passed})
    return CocycleResult(all(d["passed"] for d in out), out)


# -- atlas properties ---------------------------------------------------------------------------------

def atlas_property_check(atlas, prop: str = "adapted", order: int = 4) -> CocycleResult:
    """Jet-level membership checks on every overlap sample."""
    if prop not in ("adapted", "splitting", "comfortable"):
        raise FoliationError(f"unknown property {prop!r}")
    details = []
    for key in sorted(atlas.overlap_samples):
        tau = atlas.transitions.get(key)
        if tau is None:
            continue
        for pt in atlas.overlap_samples[key]:
            if not tau.defined_at(pt):
                continue
            tg_map, image = tau.germ(pt, order)
            ok = image[0] == 0
            a = None
            if ok:
                try:
                    a = tg_map[0].divide_by_var_power(0, 1)
                    ok = a.constant_term() != 0
                except SeriesError:
                    ok = False
            if not ok:
                details.append({"overlap": key, "point": pt, "failed": "adapted"})
                continue
            if prop in ("splitting", "comfortable"):
                for i in range(1, len(tg_map)):
                    if not tg_map[i].partial(0).restrict(0).is_zero():
                        details.append({"overlap": key, "point": pt, "failed": "splitting",
                                        "component": i + 1})
            if prop == "comfortable":
                if not tg_map[0].partial(0).partial(0).restrict(0).is_zero():
                    details.append({"overlap": key, "point": pt, "failed": "comfortable"})
    return CocycleResult(not details, details)


# -- singular points ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularPoint:
    chart: int
    coords: tuple               # coordinates on S (GaussRat, or AlgNum for algebraic points)
    multiplicity: int
    field: NumberField | None = None
    root_index: int | None = None
    approx: tuple = ()

    @property
    def chart_point(self) -> tuple:
        return (ZERO,) + tuple(self.coords)

    @property
    def is_rational(self) -> bool:
        return self.field is None

    def sort_key(self):
        if self.field is None:
            return (self.chart, 0, tuple((c.re, c.im) for c in self.coords), ())
        mod = tuple((c.re, c.im) for c in self.field.modulus)
        return (self.chart, 1, (len(mod),) + mod, (self.root_index,))

    def label(self) -> str:
        if self.field is None:
            return "(" + ", ".join(str(c) for c in self.coords) + ")"
        approx = ", ".join(f"{z.real:.6g}{z.imag:+.6g}i" for z in self.approx)
        return f"root {self.root_index} of {self.field!r} ~ ({approx})"


def _in_lower_chart(atlas, chart: int, point) -> bool:
    for other in atlas.chart_ids():
        if other >= chart:
            continue
        tau = atlas.transitions.get((chart, other))
        if tau is not None and tau.defined_at(point):
            return True
    return False


def _univariate(c: MultiSeries):
    try:
        return to_univariate_list(c)
    except SeriesError:
        raise FoliationError("n = 2 singular-point search needs polynomial generators") from None


def _points_n2(gen: FoliationGenerator):
    coeffs = _univariate(gen.components[0])
    pts = []
    for fac, mult in factor_gaussian(coeffs):
        if len(fac) == 2:
            root = -fac[0] / fac[1]
            pts.append(SingularPoint(gen.chart, (root,), mult, approx=(complex(root),)))
        else:
            K = NumberField(fac)
            th = K.theta()
            for idx, r in enumerate(K.roots()):
                pts.append(SingularPoint(gen.chart, (th,), mult, K, idx, (r,)))
    return pts


def _separable_points(gen: FoliationGenerator):
    """Product of root sets when component k involves only S-variable k."""
    m = len(gen.components)
    per = []
    for k, c in enumerate(gen.components):
        if c.order is not None or c.variables() - {k}:
            return None
        lst = to_univariate_list(c, k)
        roots = []
        for fac, mult in factor_gaussian(lst):
            if len(fac) != 2:
                return None
            roots.append(-fac[0] / fac[1])
        per.append(roots)
    if m == 0:
        return []
    return [tuple(p) for p in product(*per)]


def _vanishes(gen: FoliationGenerator, coords) -> bool:
    return all(c.evaluate(coords) == 0 for c in gen.components)


def find_singular_points(generators: dict, atlas=None, candidates=None, dedupe: bool = True):
    """Zeros of the generator components across charts, in canonical order.

    ``generators`` maps chart id -> FoliationGenerator.  For n >= 3 the points
    come from ``candidates`` (chart id -> list of S-coordinates) or from a
    separable system."""
    found = []
    for chart in sorted(generators):
        gen = generators[chart]
        if gen.is_zero():
            raise FoliationError("the induced foliation vanishes identically")
        if gen.n == 2:
            pts = _points_n2(gen)
        else:
            cand = None if candidates is None else candidates.get(chart)
            if cand is None:
                cand = _separable_points(gen)
                if cand is None:
                    raise FoliationError("n >= 3 needs candidate singular points for chart "
                                         f"{chart}")
            pts = []
            for c in cand:
                c = tuple(GaussRat.coerce(x) for x in c)
                if not _vanishes(gen, c):
                    raise FoliationError(f"candidate {c} in chart {chart} is not a zero")
                mult = local_multiplicity(gen, c)
                pts.append(SingularPoint(chart, c, mult, approx=tuple(complex(x) for x in c)))
        for p in pts:
            if dedupe and atlas is not None and _in_lower_chart(atlas, chart, p.chart_point):
                continue
            found.append(p)
    return sorted(found, key=SingularPoint.sort_key)


def local_multiplicity(gen: FoliationGenerator, point) -> int:
    """Jacobian residue of the generator components at an isolated zero."""
    coords = getattr(point, "coords", point)
    comps = list(gen.components)
    if any(x != 0 for x in coords):
        comps = [c.recenter(coords) for c in comps]
    full = (1,) * comps[0].nvars
    comps = [MultiSeries(c.nvars, c.terms, c.order, full, mode=c.mode) if c.order is None else c
             for c in comps]
    val = grothendieck_residue(jacobian_det(comps), comps)
    if isinstance(val, AlgNum):
        val = val.constant()
    if val is None or not isinstance(val, GaussRat) or val.im != 0 \
            or val.re.denominator != 1 or val.re <= 0:
        raise ResidueError(f"multiplicity {val} is not a positive integer")
    return int(val.re)


# -- vector field along a possibly singular S ------------------------------------------------------

@dataclass
class SingularVectorField:
    """Coefficients (v o f - v o g) / y^nu in chart coordinates u."""
    coeffs: tuple
    y: MultiSeries
    nu: int
    tangential: bool
    pullback: MapJet
    local_order: int | None = None

    def at(self, point, order: int) -> "SingularVectorField":
        """The same field as a germ at ``point`` (a point of S) in total degree."""
        def loc(s, shift=True):
            g = s.recenter(point) if shift and any(x != 0 for x in point) else s
            full = (1,) * g.nvars
            if g.order is None:
                return MultiSeries(g.nvars, g.terms, order, full, mode=g.mode)
            return g.retruncate(min(order, g.order), full)
        if self.y.evaluate(point) != 0:
            raise FoliationError("point is not on S")
        pb = MapJet(loc(c, False) for c in self.pullback.recenter(point, point))
        return SingularVectorField(tuple(loc(c) for c in self.coeffs), loc(self.y), self.nu,
                                   self.tangential, pb, order)


def build_singular_vfield(f: MapJet, g: MapJet, y: MultiSeries, order=None):
    """The vector field (v^j o f - v^j o g)/y^nu for a pair coinciding on {y = 0}."""
    if is_linear(g):
        pb = invert_map_jet(g).compose(f)
    else:
        if order is None:
            raise FoliationError("nonlinear g needs a truncation order")
        pb = invert_map_jet(g.retruncate(order), order).compose(f)
    if not y.compose(list(pb)).is_zero() and y_valuation(y.compose(list(pb)), y) < 1:
        raise FoliationError("the pair does not preserve S")
    n = pb.n
    diffs = [pb[j] - MultiSeries.var(j, n, None, pb[j].weights, mode=pb[j].mode)
             for j in range(n)]
    nu = min(y_valuation(d, y) for d in diffs)
    if nu == INF:
        raise FoliationError("f = g: the pair is excluded")
    if nu < 1:
        raise FoliationError("f and g do not coincide along S")
    try:
        coeffs = tuple(divide_exact(d, y, nu, order) for d in diffs)
    except SeriesError as exc:
        raise FoliationError(f"division failure: {exc}") from None
    vy = None
    for j in range(n):
        t = coeffs[j] * y.partial(j)
        vy = t if vy is None else vy + t
    tangential = vy.is_zero() or y_valuation(vy, y) >= 1
    return SingularVectorField(coeffs, y, int(nu), tangential, pb, order)


def adapted_chart_extension(V: SingularVectorField, chart_j: int, order: int = 6):
    """Extension X^j in the chart z = (y, u without u^j) at the origin, and the chart map."""
    n = len(V.coeffs)
    y = V.y
    dy = y.partial(chart_j)
    if dy.constant_term() == 0:
        raise FoliationError(f"dy/du^{chart_j + 1} is not a unit at the point")
    zeta = MapJet([y.retruncate(order) if y.order is None or y.order > order else y] +
                  [MultiSeries.var(i, n, order, y.weights, mode=y.mode)
                   for i in range(n) if i != chart_j])
    zinv = invert_map_jet(zeta, order)
    pbz = zeta.compose(V.pullback.retruncate(order)).compose(zinv)
    pa = analyze(pbz)
    if pa.nu != V.nu:
        raise FoliationError("order of coincidence differs in the adapted chart")
    return LocalExtension("tangential" if pa.tangential else "split", tuple(pa.h), pa.nu,
                          chart_j), zeta, zinv


def vfield_consistency_check(V: SingularVectorField, chart_j: int, point=None,
                             order: int = 6, extension=None) -> CocycleResult:
    """V = X^j + V_nu in the chart (y, u without u^j) at a point of S."""
    if point is not None:
        V = V.at(point, order)
    n = len(V.coeffs)
    ext, zeta, zinv = adapted_chart_extension(V, chart_j, order)
    if extension is not None:
        ext = extension
    jac = zeta.jacobian()
    pushed = []
    for k in range(n):
        acc = None
        for j in range(n):
            t = jac[k][j] * V.coeffs[j]
            acc = t if acc is None else acc + t
        pushed.append(acc.compose(list(zinv)))
    details = []
    K = order - 1 - V.nu
    for k in range(n):
        d = (pushed[k] - ext.coeffs[k]).retruncate(K)
        low = {e: c for e, c in d.terms.items() if e[0] < V.nu}
        if low:
            details.append({"component": k + 1, "defect": MultiSeries(d.nvars, low, K)})
    return CocycleResult(not details, details)
