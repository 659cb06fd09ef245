import random
from fractions import Fraction

import pytest
from class_group_oracle import (
    CURVES,
    affine_points,
    involution,
    is_principal,
    mumford_from,
    verify_random_operations,
)
from hypothesis import given
from hypothesis import strategies as st

from chabauty.jacobian import (
    CurvePoint,
    EndoData,
    HyperellipticModel,
    MumfordDivisor,
    MWVector,
    OddModelChange,
    cantor_add,
    cantor_compose,
    disk_center,
    disk_point,
    divisor_multiple,
    mw_apply_endo,
    mw_change_basis,
    split_divisor,
)
from chabauty.padic_core import PadicNumber, PadicPoly

X67 = HyperellipticModel((1, 1, 0, 1), (0, -1, 0, 0, 0, 1))


@pytest.mark.parametrize("model,p", CURVES)
def test_oracle_distinguishes_principal_divisors(model, p):
    pts = affine_points(model, p)
    assert not is_principal([pts[0]], p)
    a = pts[0]
    assert is_principal([a, involution(model, a, p)] if involution(model, a, p) != a else [], p)


@pytest.mark.parametrize("model,p", CURVES)
def test_cantor_against_class_group_oracle(model, p):
    assert verify_random_operations(model, p, 500) == []


@pytest.mark.parametrize("model,p", CURVES)
def test_negation_and_identity(model, p):
    rng = random.Random(1)
    pts = affine_points(model, p)
    for _ in range(50):
        s = rng.sample(pts, 2)
        if s[0][0] == s[1][0]:
            continue
        d = mumford_from(model, s, p)
        assert cantor_add(d, d.negate())[0].is_zero()
        assert cantor_add(d, MumfordDivisor.zero(model, p, 1))[0].same_class_as(d)


@pytest.mark.parametrize("model,p", CURVES)
def test_divisor_multiple_agrees_with_repeated_addition(model, p):
    rng = random.Random(2)
    pts = affine_points(model, p)
    for _ in range(20):
        d = mumford_from(model, rng.sample(pts, 1), p)
        acc = d
        for n in range(2, 8):
            acc = cantor_add(acc, d)[0]
            assert divisor_multiple(d, n)[0].same_class_as(acc)


# ---------------------------------------------------------------------------
# the X0(67)+ model over Q_7


def test_discriminant_and_good_reduction():
    assert X67.discriminant() == 2**12 * 67**2
    assert X67.has_good_reduction(7)
    assert not X67.has_good_reduction(67)
    assert X67.genus == 2


def test_reduction_has_nine_points():
    affine = affine_points(X67, 7)
    assert len(affine) == 7
    # at infinity y^2 + y = 0 in the chart y / x^3
    assert len([t for t in range(7) if (t * t + t) % 7 == 0]) == 2


@pytest.mark.parametrize("x,y", [(0, -1), (0, 0), (-1, 0), (-1, 1), (1, 0), (1, -3)])
def test_named_points_lie_on_the_curve(x, y):
    assert X67.contains(CurvePoint.from_rational(7, x, y, 10))


def test_points_with_denominators():
    r = CurvePoint.from_rational(7, Fraction(1, 2), Fraction(-3, 8), 8)
    ir = CurvePoint.from_rational(7, Fraction(1, 2), Fraction(-10, 8), 8)
    assert X67.contains(r) and X67.contains(ir)
    assert r.residue() == ir.residue() == (4, 4)
    assert X67.involution(r) == ir


@given(st.integers(0, 7**4 - 1))
def test_disk_points_stay_in_their_disk(nu):
    center = disk_center(7, 0, 6, 10)
    pt = disk_point(X67, center, PadicNumber.from_int(7, 7 * nu, 10), 10)
    assert X67.contains(pt)
    assert pt.residue() == (0, 6)


def test_odd_model_constants():
    ch = OddModelChange.build(X67, 4, 7, 8)
    assert ch.beta.to_int() % 343 == 4 + 3 * 7 + 4 * 49
    assert ch.c0.to_int() % 343 == 5 + 3 * 7 + 3 * 49
    assert ch.target.is_imaginary


def test_odd_model_change_maps_points_onto_the_target():
    ch = OddModelChange.build(X67, 4, 7, 12)
    center = disk_center(7, 0, 6, 12)
    for nu in range(100):
        pt = disk_point(X67, center, PadicNumber.from_int(7, 7 * nu, 12), 12)
        img = ch.forward(pt)
        assert ch.target.contains(img)
        assert ch.backward(img) == pt


def test_d_p1_doubling_on_the_odd_model(example):
    d = example.mumford("D_P1")
    assert d.is_valid()
    semi, _ = cantor_compose(d, d)
    m = 7**8
    assert [c.to_int() % m for c in semi.v.coeffs] == [x % m for x in (-1649234, 1999391, 73804, -462222)]
    red, _ = divisor_multiple(d, 2)
    assert [c.to_int() % m for c in red.u.coeffs] == [x % m for x in (297368 * 7, 1977884, 1)]
    pts = split_divisor(red, 8)
    assert sorted((q.x.to_int() % m, q.y.to_int() % m) for q in pts) == sorted(
        [(469610 * 7 % m, -15018865 % m), (499647 % m, -14480684 % m)]
    )


def test_poly_monic_requirement():
    with pytest.raises(ValueError):
        MumfordDivisor(X67, PadicPoly(7, [1, 2], 4), PadicPoly(7, [0], 4))


def test_endomorphism_vectors():
    endo = EndoData(((-1, 2), (2, 1)), MWVector((-11, -8)), 1, ((1, -2), (-2, -1)))
    assert endo.trace_zero()
    assert tuple(mw_apply_endo(endo, MWVector((1, 0)))) == (-1, 2)
    assert tuple(mw_change_basis(((-3, 7), (7, 4)), MWVector((1, 0)))) == (-3, 7)
