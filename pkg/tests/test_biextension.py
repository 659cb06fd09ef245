import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chabauty.biextension import (
    BiextPoint,
    EndoContext,
    KappaContext,
    Leg,
    biext_add,
    build_Qij,
    kappa_point,
    kappa_point_direct,
    kappa_poly,
    kappa_z_poly,
    phi,
    rho_N,
    scalar_leg,
)
from chabauty.errors import DimensionMismatch, LegMismatch, MissingFixture
from chabauty.heights import HeightTable
from chabauty.jacobian import EndoData, MWVector
from chabauty.padic_core import PadicNumber

P = 7
K = 6
elems = st.integers(-(P**K), P**K).map(lambda n: PadicNumber.from_int(P, n, K))
vecs = st.tuples(elems, elems)


@settings(max_examples=1000)
@given(vecs, vecs, vecs, vecs, elems, elems, elems, elems)
def test_the_two_group_laws_are_compatible(x1, x2, y1, y2, h1, h2, h3, h4):
    a = BiextPoint(x1, y1, h1)
    b = BiextPoint(x2, y1, h2)
    c = BiextPoint(x1, y2, h3)
    d = BiextPoint(x2, y2, h4)
    lhs = biext_add(biext_add(a, b, Leg.FIRST), biext_add(c, d, Leg.FIRST), Leg.SECOND)
    rhs = biext_add(biext_add(a, c, Leg.SECOND), biext_add(b, d, Leg.SECOND), Leg.FIRST)
    assert lhs.equals(rhs)


@given(vecs, vecs, elems, st.integers(-20, 20))
def test_scalar_multiples_match_repeated_addition(x, y, h, n):
    a = BiextPoint(x, y, h)
    for leg in Leg:
        acc = scalar_leg(a, 0, leg)
        for _ in range(abs(n)):
            acc = biext_add(acc, scalar_leg(a, 1 if n > 0 else -1, leg), leg)
        assert acc.equals(scalar_leg(a, n, leg))


def test_partial_laws_insist_on_a_shared_leg():
    one, two = PadicNumber.from_int(P, 1, 4), PadicNumber.from_int(P, 2, 4)
    a = BiextPoint((one, one), (one, one), one)
    b = BiextPoint((two, one), (two, one), one)
    with pytest.raises(LegMismatch):
        biext_add(a, b, Leg.FIRST)
    with pytest.raises(LegMismatch):
        biext_add(a, b, Leg.SECOND)
    with pytest.raises(DimensionMismatch):
        BiextPoint((one,), (one, one), one)


def test_neutral_element_of_the_first_law():
    e = (PadicNumber.from_int(P, 3, 4), PadicNumber.from_int(P, 5, 4))
    a = BiextPoint(e, e, PadicNumber.from_int(P, 9, 4))
    assert biext_add(BiextPoint.neutral_first(e), a, Leg.FIRST).equals(a)


def test_rho_needs_mordell_weil_coordinates():
    one = PadicNumber.from_int(P, 1, 4)
    with pytest.raises(MissingFixture):
        rho_N(BiextPoint((one,), (one,), one), HeightTable(P))


# ---------------------------------------------------------------------------
# a random rank 2 context with a bilinear height table


ENDO = EndoData(((-1, 2), (2, 1)), MWVector((-11, -8)), 1, ((1, -2), (-2, -1)))


def _context(heights, logs, e_base, kernel):
    table = HeightTable(P)
    for (a, b), v in zip([(i, j) for i in ("G1", "G2") for j in ("fG1", "fG2", "c")], heights):
        table.set(a, b, PadicNumber.from_int(P, v, K))
    log_map = {"G1": tuple(PadicNumber.from_int(P, 7 * v, K) for v in logs[:2]),
               "G2": tuple(PadicNumber.from_int(P, 7 * v, K) for v in logs[2:])}
    return KappaContext(P, 2, 2, ("G1", "G2"), log_map, e_base, kernel, (EndoContext(ENDO, ("fG1", "fG2"), "c"),), table)


ints = st.integers(-(P**4), P**4)
small = st.integers(-4, 4)


@settings(max_examples=40)
@given(
    st.lists(ints, min_size=6, max_size=6),
    st.lists(ints, min_size=4, max_size=4),
    st.tuples(small, small),
    st.tuples(small, small, small, small),
    st.tuples(small, small),
)
def test_kappa_from_prs_equals_the_direct_point(heights, logs, e_base, kmat, n):
    ctx = _context(heights, logs, e_base, (kmat[:2], kmat[2:]))
    via_prs, direct = kappa_point(ctx, n), kappa_point_direct(ctx, n)
    assert via_prs.equals(direct)
    assert rho_N(via_prs, ctx.table).is_zero()


@pytest.mark.parametrize("i", [1, 2])
@pytest.mark.parametrize("j", [0, 1, 2])
def test_rho_vanishes_on_every_qij(example, i, j):
    ctx = example.kappa_context((0, 6))
    assert rho_N(build_Qij(ctx, i, j), ctx.table).is_zero()


@given(st.tuples(st.integers(-30, 30), st.integers(-30, 30)))
def test_rho_vanishes_on_kappa_of_the_example(example, n):
    ctx = example.kappa_context((0, 6))
    pt = kappa_point(ctx, n)
    assert pt.equals(kappa_point_direct(ctx, n))
    assert rho_N(pt, ctx.table).is_zero()


def test_kappa_mod_p_of_the_example(example):
    kap = kappa_poly(example.kappa_context((0, 6)), 1)
    assert kap.shape_ok()
    names = ["n1", "n2"]
    # n1, -n1 - 2 n2, -3 n1^2 - n1 n2 - n1 + n2 - 1 reduced mod 7
    want = [{(1, 0): 1}, {(1, 0): 6, (0, 1): 5}, {(2, 0): 4, (1, 1): 6, (1, 0): 6, (0, 1): 1, (0, 0): 6}]
    for f, terms in zip(kap.entries, want):
        assert {m: f.coefficient(m) for m in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]} == {
            m: terms.get(m, 0) for m in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        }, f.format(names)


def test_kappa_reductions_are_consistent(example):
    ctx = example.kappa_context((0, 6))
    fine = kappa_poly(ctx, 3)
    assert fine.reduce(2) == kappa_poly(ctx, 2)
    assert fine.reduce(1) == kappa_poly(ctx, 1)


def test_kappa_z_coefficient_table(example):
    raw = kappa_z_poly(example.kappa_context((0, 6)), 4)
    table = example.fixtures["expected"]["kappa_z"]["coefficients"]
    assert len(table) == 18
    for entry in table:
        assert raw[entry["coordinate"]].coefficient(tuple(entry["monomial"])) == entry["value"] % 7**4, entry


def test_phi_agrees_with_the_fitted_polynomials(example):
    ctx = example.kappa_context((0, 6))
    kap = kappa_poly(ctx, 2)
    for n in [(0, 0), (1, 3), (-2, 5), (4, 4)]:
        assert phi(kappa_point(ctx, n), ctx, 2) == tuple(v % 49 for v in kap.evaluate(n))
    with pytest.raises(DimensionMismatch):
        phi([], ctx, 2)


def test_context_validates_shapes(example):
    ctx = example.kappa_context((0, 6))
    with pytest.raises(DimensionMismatch):
        KappaContext(P, 2, 3, ctx.generator_labels, ctx.logs, ctx.e_base, ctx.e_kernel, ctx.endos, ctx.table)
    with pytest.raises(MissingFixture):
        KappaContext(P, 2, 2, ("G1", "G3"), ctx.logs, ctx.e_base, ctx.e_kernel, ctx.endos, ctx.table)
