from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from coindex.coeffs import GaussRat, ONE
from coindex.coincidence import analyze
from coindex.foliation import (build_singular_vfield, find_singular_points, local_generator)
from coindex.geometry import chart_analysis
from coindex.residues import (HypothesisError, ResidueError, SymmetricPolynomialSpec,
                              contour_residue_numeric, formula_integrand, grothendieck_residue,
                              jacobian_det, phi_eval, rational_residue_sum, residue_bb,
                              residue_cs_singular_branch, residue_cs_singular_vfield,
                              residue_cs_smooth, residue_ls)
from coindex.series import MapJet, MultiSeries, poly

from conftest import blowup, gauss, var

F = Fraction
z1, z2 = var(0, 2), var(1, 2)
one2 = MultiSeries.constant(ONE, 2)
t = var(0, 1)
one1 = MultiSeries.constant(ONE, 1)
E1, E1SQ, E2 = (SymmetricPolynomialSpec.parse(x) for x in ("e1", "e1^2", "e2"))
Q = lambda a, b=1: GaussRat(F(a, b))


def setup(n, k, cross=True, variant="tangential"):
    atlas, pair = blowup(n, k, cross)
    pas = {c: chart_analysis(atlas, pair, c) for c in atlas.chart_ids()}
    gens = {c: local_generator(pa, variant, c) for c, pa in pas.items()}
    return atlas, pas, gens, find_singular_points(gens, atlas)


# -- Grothendieck residues --------------------------------------------------------------------

def test_grothendieck_examples():
    a, b = var(0, 2), var(1, 2)
    assert grothendieck_residue(a, [a ** 2, b]) == ONE
    assert grothendieck_residue(one2, [a + b ** 2, b]) == ONE
    assert grothendieck_residue((a * b ** 2).scale(6), [a ** 2, b ** 3]) == Q(6)
    assert grothendieck_residue(jacobian_det([a ** 2, b ** 3]), [a ** 2, b ** 3]) == Q(6)


def test_grothendieck_non_isolated():
    a, b = var(0, 2), var(1, 2)
    with pytest.raises(ResidueError):
        grothendieck_residue(one2, [a * b, a * b])


@settings(max_examples=40, deadline=None)
@given(gauss, gauss, gauss, gauss, gauss, gauss)
def test_simple_zero_reduction(p0, p1, a, b, c, d):
    # at a simple zero the residue is num(p)/det(Jac)(p)
    if a * d - b * c == 0:
        return
    x, y = var(0, 2), var(1, 2)
    f1 = x.scale(a) + y.scale(b) + x * y
    f2 = x.scale(c) + y.scale(d) + x ** 2
    num = MultiSeries.constant(p0, 2) + x.scale(p1)
    assert grothendieck_residue(num, [f1, f2]) == p0 / (a * d - b * c)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 3), st.integers(0, 3), gauss)
def test_monomial_residue_is_coefficient_extraction(d1, d2, i, j, c):
    x, y = var(0, 2), var(1, 2)
    num = (x ** i * y ** j).scale(c)
    expected = c if (i, j) == (d1 - 1, d2 - 1) else 0
    assert grothendieck_residue(num, [x ** d1, y ** d2]) == expected


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), gauss, gauss)
def test_local_algebra_dimension_by_jacobian(d1, d2, a, b):
    x, y = var(0, 2), var(1, 2)
    f1 = x ** d1 + (x * y).scale(a)
    f2 = y ** d2 + (x ** 2).scale(b) * y
    # monomial ideal has dimension d1*d2; lower-order perturbation by mixed terms
    from coindex.residues import local_algebra_dimension
    dim = local_algebra_dimension([x ** d1, y ** d2])
    assert dim == d1 * d2
    assert grothendieck_residue(jacobian_det([x ** d1, y ** d2]), [x ** d1, y ** d2]) == d1 * d2


def test_univariate_residue_matches_sympy():
    tt = sp.symbols("t")
    for p, q, root in [(tt ** 2, 1 - tt ** 3, 1), (tt ** 3, 1 - tt ** 4, -1), (1 + tt, tt ** 2 - 4, 2)]:
        ref = sp.residue(p / q, tt, root)
        pp = sp.Poly(p, tt).all_coeffs()[::-1]
        qq = sp.Poly(q, tt).all_coeffs()[::-1]
        num = MultiSeries(1, {(k,): GaussRat(F(int(c))) for k, c in enumerate(pp)})
        den = MultiSeries(1, {(k,): GaussRat(F(int(c))) for k, c in enumerate(qq)})
        got = grothendieck_residue(num, [den], (GaussRat(root),))
        assert got == GaussRat(F(int(ref.p), int(ref.q)))


# -- numeric oracle ------------------------------------------------------------------------------------

def test_contour_examples():
    r = contour_residue_numeric(t ** 2, [one1 - t ** 3], [1], 0.3)
    assert abs(r.value + 1 / 3) <= 1e-10
    r = contour_residue_numeric(one1, [t], [0], 0.5)
    assert abs(r.value - 1) <= 1e-12
    x, y = var(0, 2), var(1, 2)
    r = contour_residue_numeric(x, [x ** 2, y], [0, 0], 0.5)
    assert abs(r.value - 1) <= 1e-12


def test_contour_rejects_second_zero():
    with pytest.raises(ResidueError):
        contour_residue_numeric(one1, [t ** 2 - one1], [1], 2.5)


# -- phi and Newton identities ---------------------------------------------------------------------

def _diag(*vals):
    n = len(vals)
    return [[GaussRat(vals[i]) if i == j else GaussRat(0) for j in range(n)] for i in range(n)]


def test_phi_eval_examples():
    assert phi_eval(E1SQ, _diag(-1, -1), -1) == 4
    assert phi_eval(E2, _diag(2, 5), 1) == 10
    assert phi_eval(E1, [[GaussRat(0), ONE], [GaussRat(0), GaussRat(0)]]) == 0
    with pytest.raises(ValueError):
        phi_eval(E2, _diag(1))


@settings(max_examples=40, deadline=None)
@given(st.lists(gauss, min_size=3, max_size=3), st.sampled_from([1, -1]))
def test_phi_eval_matches_charpoly(vals, sign):
    m = sp.Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]]) + sp.diag(*[
        sp.Rational(v.re.numerator, v.re.denominator) + sp.I * sp.Rational(v.im.numerator, v.im.denominator)
        for v in vals])
    mat = [[GaussRat(0)] * 3 for _ in range(3)]
    for i in range(3):
        mat[i][i] = vals[i]
        if i < 2:
            mat[i][i + 1] = ONE
    lam = sp.symbols("lam")
    cp = sp.Poly((lam * sp.eye(3) - sign * m).det(), lam).all_coeffs()
    e1, e2, e3 = -cp[1], cp[2], -cp[3]
    for text, ref in (("e1", e1), ("e2", e2), ("e3", e3), ("e1^3 - 2*e1*e2", e1 ** 3 - 2 * e1 * e2)):
        got = phi_eval(SymmetricPolynomialSpec.parse(text), mat, sign)
        re, im = sp.expand(ref).as_real_imag()
        assert got == GaussRat(F(int(re.p), int(re.q)), F(int(im.p), int(im.q)))


def test_phi_parse_and_degree():
    phi = SymmetricPolynomialSpec.parse("e1^2 - 2*e2")
    phi.check_degree(2)
    assert phi.is_even_under_sign()
    assert not E1.is_even_under_sign()
    with pytest.raises(ValueError):
        SymmetricPolynomialSpec.parse("e1 + e2").check_degree(1)
    with pytest.raises(ValueError):
        SymmetricPolynomialSpec.parse("x1")


# -- smooth S formulas -----------------------------------------------------------------------------------

def test_cs_quadratic_points():
    _, pas, gens, pts = setup(2, 2)
    assert len(pts) == 3
    for p in pts:
        v = residue_cs_smooth(pas[p.chart], gens[p.chart], p).value
        assert v == Q(-1, 3)


def test_cs_single_chart_split_examples():
    pa = analyze(MapJet([z1 + z1 ** 2, z2 + z1 * z2]))
    gen = local_generator(pa, "split_nu1")
    assert residue_cs_smooth(pa, gen, (0, 0), "split_nu1").value == ONE
    pa = analyze(MapJet([z1 + z1 ** 2 * z2, z2 + z1 ** 2 * z2 ** 2]))
    assert pa.nu == 2 and pa.k1.is_zero()
    gen = local_generator(pa, "split")
    assert residue_cs_smooth(pa, gen, (0, 0), "split").value == 0


@pytest.mark.parametrize("k,value", [(3, Q(-1, 4)), (4, Q(-1, 5))])
def test_cs_higher_nu(k, value):
    _, pas, gens, pts = setup(2, k)
    assert len(pts) == k + 1
    for p in pts:
        assert residue_cs_smooth(pas[p.chart], gens[p.chart], p).value == value


def test_bb_n3_values():
    _, pas, gens, pts = setup(3, 2, cross=False)
    vals = {}
    for p in pts:
        if p.chart == 0:
            key = tuple(int(c.re) for c in p.coords)
            vals[key] = residue_bb(pas[0], gens[0], E1SQ, p, sign=1).value
    assert vals == {(0, 0): 4, (0, 1): 0, (1, 0): 0, (1, 1): 4}
    e1sq = sorted(int(residue_bb(pas[p.chart], gens[p.chart], E1SQ, p, sign=1).value.re)
                  for p in pts)
    assert e1sq == [0, 0, 0, 4, 4, 4, 4]
    for p in pts:
        assert residue_bb(pas[p.chart], gens[p.chart], E2, p, sign=1).value == 1


def test_bb_even_phi_is_sign_blind():
    _, pas, gens, pts = setup(3, 2, cross=False)
    for p in pts:
        for phi in (E1SQ, E2):
            a = residue_bb(pas[p.chart], gens[p.chart], phi, p, sign=1).value
            b = residue_bb(pas[p.chart], gens[p.chart], phi, p, sign=-1).value
            assert a == b


@pytest.mark.parametrize("k,value", [(3, Q(3, 4)), (4, Q(4, 5))])
def test_ls_values_flip_with_sign(k, value):
    _, pas, gens, pts = setup(2, k)
    for p in pts:
        plus = residue_ls(pas[p.chart], E1, p, sign=1).value
        minus = residue_ls(pas[p.chart], E1, p, sign=-1).value
        assert plus == value and minus == -value


def test_ls_rejects_nu_one():
    _, pas, _, pts = setup(2, 2)
    with pytest.raises(HypothesisError):
        residue_ls(pas[0], E1, pts[0])


def test_rational_residue_sum_examples():
    assert rational_residue_sum([0, 0, 1], [1, 0, 0, -1]) == -1
    assert rational_residue_sum([0, 0, 0, 1], [1, 0, 0, 0, -1]) == -1
    assert rational_residue_sum([1], [0, 1]) == 1
    with pytest.raises(ResidueError):
        rational_residue_sum([1, 1], [1, 2, 1])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_chart_sum_equals_residue_at_infinity(k):
    _, pas, gens, pts = setup(2, k)
    num, dens = formula_integrand(pas[0], "cs1")
    from coindex.series import to_univariate_list
    p = to_univariate_list(num.retruncate(None) if num.order is None else
                           MultiSeries(1, num.terms))
    q = to_univariate_list(MultiSeries(1, dens[0].terms))
    assert rational_residue_sum(p, q) == -1


@pytest.mark.parametrize("k", [2, 3, 4])
def test_numeric_oracle_agrees(k):
    _, pas, gens, pts = setup(2, k)
    for p in pts:
        num, dens = formula_integrand(pas[p.chart], "cs1")
        exact = residue_cs_smooth(pas[p.chart], gens[p.chart], p).value
        exact = exact.constant() if hasattr(exact, "constant") else exact
        r = contour_residue_numeric(num, dens, [p.approx[0]], 0.3)
        assert abs(r.value - complex(exact)) <= 1e-10


# -- singular S formulas ------------------------------------------------------------------------------------

CUSP_Y = poly(2, {(0, 2): 1, (3, 0): -1})
CUSP_BRANCH = MapJet([poly(1, {(2,): 1}), poly(1, {(3,): 1})])


def cusp_pair(lam=1):
    f = MapJet([z1 + CUSP_Y * z2.scale(2), z2 + CUSP_Y * (z1 ** 2).scale(3)])
    lin = MapJet([z1.scale(lam), z2.scale(lam)])
    return lin.compose(f), lin


@pytest.mark.parametrize("lam", [1, 2, -3])
def test_cusp_cs4_and_cs6_vanish(lam):
    f, g = cusp_pair(lam)
    assert residue_cs_singular_branch(f, g, CUSP_Y, CUSP_BRANCH, "cs4").value == 0
    assert residue_cs_singular_branch(f, g, CUSP_Y, CUSP_BRANCH, "cs6").value == 0
    with pytest.raises(HypothesisError):
        residue_cs_singular_branch(f, g, CUSP_Y, CUSP_BRANCH, "cs5")


def test_branch_must_lie_on_S():
    f, g = cusp_pair()
    bad = MapJet([poly(1, {(1,): 1}), poly(1, {(1,): 1})])
    with pytest.raises(ResidueError):
        residue_cs_singular_branch(f, g, CUSP_Y, bad, "cs4")


SMOOTH_BRANCH = MapJet([poly(1, {}), poly(1, {(1,): 1})])


@pytest.mark.parametrize("f,variants,value", [
    # l1 = 1, h2 = z2
    (MapJet([z1 + z1 ** 2, z2 + z1 * z2]), ("cs4", "cs6"), Q(1)),
    # l1 = 1 + z2, h2 = 3 z2
    (MapJet([z1 + z1 ** 2 * (z2 + one2), z2 + z1 * z2.scale(3)]), ("cs4", "cs6"), Q(1, 3)),
    # nu = 2, l1 = z2^2 + 2, h2 = z2^2 + 5 z2
    (MapJet([z1 + z1 ** 3 * (z2 ** 2 + one2.scale(2)), z2 + z1 ** 2 * (z2 ** 2 + z2.scale(5))]),
     ("cs4", "cs5"), Q(2, 5)),
    # l1 = z2^2, h2 = z2 - z2^3: zero residue
    (MapJet([z1 + z1 ** 2 * z2 ** 2, z2 + z1 * (z2 - z2 ** 3)]), ("cs4", "cs6"), Q(0)),
])
def test_branch_formulas_match_cs1(f, variants, value):
    pa = analyze(f)
    gen = local_generator(pa)
    cs1 = residue_cs_smooth(pa, gen, (0, 0)).value
    assert cs1 == value
    for v in variants:
        assert residue_cs_singular_branch(f, MapJet.identity(2), z1, SMOOTH_BRANCH, v).value == cs1


def test_cs7_and_ls2_match_on_nu2_family():
    f = MapJet([z1 + z1 ** 3 * (z2 + one2), z2 + z1 ** 2 * z2.scale(3)])
    V = build_singular_vfield(f, MapJet.identity(2), z1)
    pa = analyze(f)
    gen = local_generator(pa)
    assert residue_cs_singular_vfield(V, (0, 0)).value == residue_cs_smooth(pa, gen, (0, 0)).value
    assert residue_cs_singular_vfield(V, (0, 0), SMOOTH_BRANCH).value == Q(1, 3)
    for sign in (1, -1):
        assert residue_ls(pa, E1, (0, 0), "ls2", sign, vfield=V).value == \
            residue_ls(pa, E1, (0, 0), "ls1", sign).value


def test_cs7_rejects_nu_one_and_non_tangential():
    f = MapJet([z1 + z1 ** 2 * z2 ** 2, z2 + z1 * (z2 - z2 ** 3)])
    V = build_singular_vfield(f, MapJet.identity(2), z1)
    with pytest.raises(HypothesisError):
        residue_cs_singular_vfield(V, (0, 0))
    g = MapJet([z1 + z1 ** 2 * z2, z2 + z1 ** 2])
    V = build_singular_vfield(g, MapJet.identity(2), z1)
    with pytest.raises(HypothesisError):
        residue_cs_singular_vfield(V, (0, 0))
