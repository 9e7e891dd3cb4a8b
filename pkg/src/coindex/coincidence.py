"""Order of coincidence and canonical section data of a map pair along S = {z1 = 0}."""

from __future__ import annotations

from dataclasses import dataclass, field

from .coeffs import ONE
from .series import (INF, MapJet, MultiSeries, SeriesError, TruncationLimited,
                     invert_map_jet, is_linear, series_matrix_inverse)


class CoincidenceError(ValueError):
    pass


@dataclass(frozen=True)
class PairAnalysis:
    nu: int
    h: tuple
    tangential: bool
    ell1: MultiSeries | None
    h1_0: MultiSeries
    k1: MultiSeries
    dfg_factor: MultiSeries
    certified: bool = True
    notes: tuple = field(default=())

    @property
    def n(self) -> int:
        return len(self.h)

    @property
    def order(self):
        return self.h[0].order

    def restricted(self):
        """h^j|_S for all j (as series in the chart variables)."""
        return tuple(c.restrict(0) for c in self.h)


def _graded_in_z1(s: MultiSeries) -> bool:
    return s.weights[0] == 1 and not any(s.weights[1:])


def special_pullback(f: MapJet, g: MapJet, order=None) -> MapJet:
    """g^{-1} ∘ f for germs (or chart maps) agreeing along S = {z1 = 0}."""
    if f.n != g.n:
        raise CoincidenceError("f and g have different dimensions")
    if is_linear(g):
        ginv = invert_map_jet(g)
        if f[0].weights != ginv[0].weights:
            ginv = ginv.retruncate(None, f[0].weights)
    else:
        try:
            ginv = invert_map_jet(g, order=order)
        except SeriesError as exc:
            raise CoincidenceError(f"g is not locally invertible: {exc}") from None
    pb = ginv.compose(f)
    if order is not None and (pb.order is None or pb.order > order):
        pb = pb.retruncate(order)
    n = pb.n
    for j in range(n):
        d = pb[j] - MultiSeries.var(j, pb.nvars, None, pb[j].weights, mode=pb[j].mode)
        if d.valuation(0) < 1:
            raise CoincidenceError("f|_S differs from g|_S")
    return pb


def differences(pullback: MapJet):
    return [pullback[j] - MultiSeries.var(j, pullback.nvars, None, pullback[j].weights,
                                          mode=pullback[j].mode)
            for j in range(pullback.n)]


def order_of_coincidence(pullback: MapJet) -> int:
    vals = [d.valuation(0) for d in differences(pullback)]
    finite = [v for v in vals if v != INF]
    if not finite:
        if pullback.order is None:
            raise CoincidenceError("f = g: the pair is excluded")
        raise TruncationLimited("all differences vanish to the truncation order")
    return int(min(finite))


def canonical_coefficients(pullback: MapJet, nu: int) -> PairAnalysis:
    diffs = differences(pullback)
    try:
        h = tuple(d.divide_by_var_power(0, nu) for d in diffs)
    except SeriesError as exc:
        raise CoincidenceError(f"division failure, inconsistent nu: {exc}") from None
    if all(c.restrict(0).is_zero() for c in h):
        raise CoincidenceError("canonical section vanishes identically on S; nu is inconsistent "
                               "or the truncation order is too low")
    h1 = h[0]
    tangential = h1.valuation(0) >= 1
    ell1 = h1.divide_by_var_power(0, 1) if tangential else None
    h1_0 = h1.restrict(0)
    k1 = (h1 - h1_0).divide_by_var_power(0, 1)
    one = MultiSeries.constant(ONE, h1.nvars, None, h1.weights, mode=h1.mode)
    dfg = one + h1_0
    certified = all(_graded_in_z1(c) or c.order is None for c in pullback)
    return PairAnalysis(nu, h, tangential, ell1, h1_0, k1, dfg, certified)


def analyze(pullback: MapJet) -> PairAnalysis:
    return canonical_coefficients(pullback, order_of_coincidence(pullback))


def is_tangential(pa: PairAnalysis) -> bool:
    return pa.h[0].valuation(0) >= 1


# -- local germs of chart-wide data ------------------------------------------------------------------

def germ_at(s: MultiSeries, point, order: int) -> MultiSeries:
    """Germ of a chart-wide series at a point of S, in total-degree truncation."""
    if point[0] != 0:
        raise ValueError("germs are taken at points of S (first coordinate 0)")
    g = s.recenter(point)
    full = (1,) * s.nvars
    if g.order is None:
        return g.retruncate(order, full) if g.weights == full else \
            MultiSeries(g.nvars, g.terms, order, full, mode=g.mode)
    if g.order < order:
        raise TruncationLimited(f"series known to order {g.order}, {order} requested")
    return g.retruncate(order, full)


def analysis_germ(pa: PairAnalysis, point, order: int) -> PairAnalysis:
    """Recentre a chart-wide analysis at a point of S."""
    h = tuple(germ_at(c, point, order) for c in pa.h)
    ell1 = germ_at(pa.ell1, point, order - 1) if pa.ell1 is not None else None
    return PairAnalysis(pa.nu, h, pa.tangential,
                        ell1.retruncate(order - 1) if ell1 is not None else None,
                        germ_at(pa.h1_0, point, order), germ_at(pa.k1, point, order - 1),
                        germ_at(pa.dfg_factor, point, order), pa.certified)


@dataclass
class TransitionGerm:
    """Local data of an adapted transition at a sample point."""
    tau: MapJet
    image: tuple
    a: MultiSeries
    jinv: list


def transition_germ(transition, point, order: int) -> TransitionGerm:
    tau, image = transition.germ(point, order)
    if image[0] != 0:
        raise CoincidenceError("transition does not map S to S")
    try:
        a = tau[0].divide_by_var_power(0, 1)
    except SeriesError:
        raise CoincidenceError("transition not adapted: z1-hat is not divisible by z1") from None
    if a.constant_term() == 0:
        raise CoincidenceError("transition not adapted: a is not a unit")
    jac = tau.jacobian()
    jinv = series_matrix_inverse(jac, order - 1)
    return TransitionGerm(tau, image, a, jinv)


def common_order(order, *analyses):
    known = [pa.order for pa in analyses if pa.order is not None]
    cap = min(known) if known else 6
    return cap if order is None else min(order, cap)


@dataclass
class GlueReport:
    passed: bool
    defects: list

    def __bool__(self):
        return self.passed


def glue_check_canonical_section(paU: PairAnalysis, paV: PairAnalysis, transition,
                                 sample_points, order=None) -> GlueReport:
    """Compare h (chart U) with the pushforward of h-hat (chart V) modulo I_S."""
    order = common_order(order, paU, paV)
    nu = paU.nu
    n = paU.n
    defects = []
    for p in sample_points:
        tg = transition_germ(transition, p, order)
        hU = [germ_at(c, p, order) for c in paU.h]
        hV = [germ_at(c, tg.image, order) for c in paV.h]
        hV_tau = [c.compose(list(tg.tau)) for c in hV]
        anu = tg.a ** nu
        for k in range(n):
            acc = None
            for j in range(n):
                term = hV_tau[j] * anu * tg.jinv[k][j]
                acc = term if acc is None else acc + term
            diff = (acc - hU[k]).restrict(0)
            if not diff.is_zero():
                defects.append({"point": p, "component": k + 1, "defect": diff})
    return GlueReport(not defects, defects)


def local_order_of_coincidence(f, g, point, order: int = 8) -> int:
    """nu of the germs of two chart maps (RationalMap) at a point of S."""
    fg, fq = f.germ(point, order)
    gg, gq = g.germ(point, order)
    if tuple(fq) != tuple(gq):
        raise CoincidenceError("f(p) != g(p)")
    return order_of_coincidence(special_pullback(fg, gg, order))
