"""Atlases with exact rational transitions, the blow-up family, and Chern-class targets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .coeffs import GaussRat, ONE, ZERO
from .series import (MapJet, MultiSeries, RationalMap, SeriesError, invert_map_jet,
                     is_linear, _omin)
from .coincidence import CoincidenceError, PairAnalysis, analyze, special_pullback


class GeometryError(ValueError):
    pass


@dataclass
class ChartSpec:
    id: int
    nvars: int
    adapted: bool = True
    hypersurface: MultiSeries | None = None   # generator of I_S; None means z1


@dataclass
class AtlasSpec:
    n: int
    charts: list
    transitions: dict = field(default_factory=dict)       # (i, j) -> RationalMap
    overlap_samples: dict = field(default_factory=dict)   # (i, j) -> [points]
    compact: bool = False
    family: str = "user"

    def chart_ids(self):
        return [c.id for c in self.charts]

    def overlaps(self):
        return sorted(self.transitions)


@dataclass
class PairSpec:
    f: dict            # chart -> RationalMap into chart target[chart]
    g: dict
    target: dict       # chart -> target chart id
    family: str = "user"
    F: MapJet | None = None
    G: MapJet | None = None


@dataclass(frozen=True)
class CharacteristicTarget:
    which: str
    value: GaussRat
    provenance: str


# -- blow-up of C^n at the origin ---------------------------------------------------------------------

def _blowdown(n: int, i: int):
    """z(x) for chart i: z_i = u, z_j = u t_j (t in order of j != i); exact polynomials."""
    u = MultiSeries.var(0, n)
    others = [j for j in range(n) if j != i]
    z = [None] * n
    z[i] = u
    for pos, j in enumerate(others):
        z[j] = u * MultiSeries.var(pos + 1, n)
    return z


def chart_homogeneous(n: int, i: int, t) -> tuple:
    """Homogeneous coordinates of the S-point with chart-i coordinates t."""
    out = [None] * n
    out[i] = ONE
    for pos, j in enumerate(j for j in range(n) if j != i):
        out[j] = t[pos]
    return tuple(out)


def homogeneous_to_chart(n: int, i: int, hom):
    hi = hom[i]
    if hi == 0:
        return None
    return tuple(hom[j] / hi for j in range(n) if j != i)


def lift_map(P: MapJet, i: int, k: int) -> RationalMap:
    """Lift of a polynomial map P (P(0)=0) from blow-up chart i to chart k."""
    n = P.n
    z = _blowdown(n, i)
    Pz = [c.compose(z) for c in P]
    N = [c.divide_by_var_power(0, 1) for c in Pz]
    comps = [(Pz[k], MultiSeries.constant(ONE, n))]
    for j in range(n):
        if j != k:
            comps.append((N[j], N[k]))
    return RationalMap(comps)


def blowup_transition(n: int, i: int, k: int) -> RationalMap:
    """Chart i -> chart k on the blow-up (k != i)."""
    return lift_map(MapJet.identity(n), i, k)


def _dominant(col):
    best = 0
    for r in range(1, len(col)):
        if GaussRat.coerce(col[r]).abs2() > GaussRat.coerce(col[best]).abs2():
            best = r
    return best


_SAMPLE_VALUES = [Fraction(2), Fraction(-3), Fraction(1, 2), Fraction(5, 3), Fraction(-2, 7)]


def _blowup_samples(n: int, i: int, k: int, count: int = 3):
    """Sample S-points of chart i lying in chart k."""
    pts = []
    vals = _SAMPLE_VALUES
    for s in range(count):
        t = []
        for pos in range(n - 1):
            t.append(GaussRat(vals[(s + 2 * pos) % len(vals)], Fraction(s % 2, 3)))
        pts.append((ZERO,) + tuple(t))
    return pts


def build_blowup_family(n: int, F: MapJet, G: MapJet, samples: int = 3):
    """Blow-up of C^n at 0 with the lifts of the pair (F, G)."""
    if F.n != n or G.n != n:
        raise GeometryError("F and G must have n components")
    for P in (F, G):
        for c in P:
            if c.order is not None:
                raise GeometryError("F and G must be polynomial maps")
            if c.constant_term() != 0:
                raise GeometryError("F(0) and G(0) must vanish")
    A = F.linear_part()
    if A != G.linear_part():
        raise GeometryError("dF_0 != dG_0: the lifts disagree on the exceptional divisor")
    from .linalg import det
    if det(A) == 0:
        raise GeometryError("degenerate linear part")
    charts = [ChartSpec(i, n) for i in range(n)]
    transitions = {}
    overlap_samples = {}
    for i in range(n):
        for k in range(n):
            if i != k:
                transitions[(i, k)] = blowup_transition(n, i, k)
                overlap_samples[(i, k)] = _blowup_samples(n, i, k, samples)
    atlas = AtlasSpec(n, charts, transitions, overlap_samples, compact=True, family="blowup")
    target = {i: _dominant([A[r][i] for r in range(n)]) for i in range(n)}
    f = {i: lift_map(F, i, target[i]) for i in range(n)}
    g = {i: lift_map(G, i, target[i]) for i in range(n)}
    pair = PairSpec(f, g, target, "blowup", F, G)
    return atlas, pair


def blowup_base_pullback(F: MapJet, G: MapJet, order=None) -> MapJet:
    """Phi = G^{-1} ∘ F on C^n (exact when G is linear)."""
    if is_linear(G):
        return invert_map_jet(G).compose(F)
    if order is None:
        raise GeometryError("nonlinear G needs a truncation order")
    ginv = invert_map_jet(G.retruncate(order), order)
    return ginv.compose(F.retruncate(order))


def chart_pullback(atlas: AtlasSpec, pair: PairSpec, chart: int, order: int) -> MapJet:
    """g^{-1}∘f on a whole chart, as I_S-adic series (z1-graded, order ``order``)."""
    n = atlas.n
    weights = (1,) + (0,) * (n - 1)
    if pair.family == "blowup":
        phi = blowup_base_pullback(pair.F, pair.G, order + 2)
        z = [c.retruncate(None, weights) for c in _blowdown(n, chart)]
        Pz = [c.compose(z) for c in phi]
        M = [c.divide_by_var_power(0, 1) for c in Pz]
        K = _omin(order, *(m.order for m in M))
        comps = []
        for j in range(n):
            if j == chart:
                continue
            comps.append(M[j].div_by_unit(M[chart], K))
        u_comp = Pz[chart] if Pz[chart].order is None else Pz[chart]
        pb = MapJet([u_comp.retruncate(K)] + comps)
        return pb
    f = pair.f[chart].as_series(order, weights)
    g = pair.g[chart]
    if not g.is_polynomial():
        raise GeometryError("chart-wide analysis needs g polynomial in each chart")
    gp = g.polynomial_map()
    if not is_linear(gp):
        raise GeometryError("chart-wide analysis of a user atlas needs g linear in each chart")
    if pair.target.get(chart, chart) != chart:
        raise GeometryError("user atlas pairs must map each chart into itself")
    return special_pullback(f, gp.retruncate(None, weights), order)


def chart_analysis(atlas: AtlasSpec, pair: PairSpec, chart: int, order=None) -> PairAnalysis:
    """PairAnalysis over a whole chart, with the default order 2*nu+4 unless given."""
    K = order or 6
    while True:
        pb = chart_pullback(atlas, pair, chart, K)
        try:
            pa = analyze(pb)
        except SeriesError:
            if K > 64:
                raise
            K *= 2
            continue
        except CoincidenceError as exc:
            if "truncation" in str(exc) and K <= 64:
                K *= 2
                continue
            raise
        if order is None and K < 2 * pa.nu + 4:
            K = 2 * pa.nu + 4
            continue
        return pa


# -- checks --------------------------------------------------------------------------------------

@dataclass
class CheckResult:
    passed: bool
    details: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def verify_pair_consistency(atlas: AtlasSpec, pair: PairSpec, order: int = 4) -> CheckResult:
    """f and g agree across overlaps (conjugation by transitions) at the sample points."""
    details = []
    for (i, k), pts in sorted(atlas.overlap_samples.items()):
        for name, m in (("f", pair.f), ("g", pair.g)):
            ti, tk = pair.target[i], pair.target[k]
            for p in pts:
                tau = atlas.transitions.get((i, k))
                if tau is None or not tau.defined_at(p):
                    continue
                try:
                    mi_germ, q = m[i].germ(p, order)
                    lhs_map = atlas.transitions[(ti, tk)] if ti != tk else None
                    if lhs_map is not None:
                        tg, _ = lhs_map.germ(q, order)
                        lhs = tg.compose(mi_germ)
                    else:
                        lhs = mi_germ
                    tau_germ, pk = tau.germ(p, order)
                    mk_germ, _ = m[k].germ(pk, order)
                    rhs = mk_germ.compose(tau_germ)
                    ok = lhs.agrees(rhs)
                except (ZeroDivisionError, SeriesError) as exc:
                    ok = False
                    details.append({"overlap": (i, k), "map": name, "point": p, "error": str(exc)})
                    continue
                if not ok:
                    details.append({"overlap": (i, k), "map": name, "point": p,
                                    "error": "conjugation mismatch"})
    # g must be a local biholomorphism along S
    from .linalg import det
    for (i, k), pts in sorted(atlas.overlap_samples.items()):
        for p in pts:
            gg, _ = pair.g[i].germ(p, 2)
            if det(gg.linear_part()) == 0:
                details.append({"chart": i, "point": p, "error": "Jacobian of g vanishes"})
    return CheckResult(not details, details)


def verify_atlas(atlas: AtlasSpec, order: int = 4) -> CheckResult:
    """Adaptedness on overlaps and the cocycle condition on sampled triple overlaps."""
    details = []
    for (i, k), pts in sorted(atlas.overlap_samples.items()):
        tau = atlas.transitions[(i, k)]
        for p in pts:
            tg, img = tau.germ(p, order)
            if img[0] != 0:
                details.append({"overlap": (i, k), "point": p, "error": "S not preserved"})
                continue
            try:
                a = tg[0].divide_by_var_power(0, 1)
                if a.constant_term() == 0:
                    raise SeriesError("a not a unit")
            except SeriesError:
                details.append({"overlap": (i, k), "point": p, "error": "not adapted"})
            for j in atlas.chart_ids():
                if j in (i, k) or (k, j) not in atlas.transitions or (i, j) not in atlas.transitions:
                    continue
                t2 = atlas.transitions[(k, j)]
                if not t2.defined_at(img) or not atlas.transitions[(i, j)].defined_at(p):
                    continue
                g2, _ = t2.germ(img, order)
                direct, _ = atlas.transitions[(i, j)].germ(p, order)
                if not g2.compose(tg).agrees(direct):
                    details.append({"triple": (i, k, j), "point": p, "error": "cocycle mismatch"})
    return CheckResult(not details, details)


# -- Chern classes on P^{n-1} ------------------------------------------------------------------------

def _ring_mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if i + j < n:
                    out[i + j] += x * y
    return out


def _ring_inv(a, n):
    # a[0] must be 1
    out = [Fraction(0)] * n
    out[0] = Fraction(1) / a[0]
    for k in range(1, n):
        s = sum(a[i] * out[k - i] for i in range(1, k + 1) if i < len(a))
        out[k] = -s / a[0]
    return out


def _ring_pow(a, e, n):
    r = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for _ in range(e):
        r = _ring_mul(r, a, n)
    return r


def total_chern(n: int, bundle: str, nu: int = 1):
    """Total Chern class as a list in Q[h]/h^n (S = P^{n-1}, N_S = O(-1))."""
    one_plus_h = [Fraction(1), Fraction(1)] + [Fraction(0)] * (n - 2)
    tangent = _ring_pow(one_plus_h, n, n)
    normal = [Fraction(1), Fraction(-1)] + [Fraction(0)] * (n - 2)
    normal_nu = [Fraction(1), Fraction(-nu)] + [Fraction(0)] * (n - 2)
    if bundle == "TS":
        return tangent
    if bundle == "TM":
        return _ring_mul(tangent, normal, n)
    if bundle == "TS-N^nu":
        return _ring_mul(tangent, _ring_inv(normal_nu, n), n)
    if bundle == "TM-N^nu":
        return _ring_mul(_ring_mul(tangent, normal, n), _ring_inv(normal_nu, n), n)
    raise ValueError(f"unknown bundle {bundle!r}")


def chern_expand(family: str, which: str, phi=None, nu: int = 1, n: int = 2,
                 user_value=None) -> CharacteristicTarget:
    """Exact right-hand side of the index identities on the blow-up family."""
    if family != "blowup":
        if user_value is None:
            raise GeometryError("unsupported family without a user-supplied target")
        return CharacteristicTarget(which, GaussRat.coerce(user_value), "user-supplied")
    if which == "cs":
        val = Fraction(-1) ** (n - 1)
    elif which in ("bb", "ls"):
        if phi is None:
            raise GeometryError("phi required for bb/ls targets")
        c = total_chern(n, "TS-N^nu" if which == "bb" else "TM-N^nu", nu)
        val = phi.evaluate_top(c, n)
    elif which == "zeros":
        # c_{n-1}(TS ⊗ N^{-nu}) = sum_i c_i(TS) (nu h)^{n-1-i}
        c = total_chern(n, "TS")
        val = sum((c[i] * Fraction(nu) ** (n - 1 - i) for i in range(n)), Fraction(0))
    else:
        raise ValueError(f"unknown target {which!r}")
    return CharacteristicTarget(which, GaussRat(val), "builtin-closed-form")
