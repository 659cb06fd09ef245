"""Acceptance run for the X0(67)+ example at p = 7.

Each test reproduces one criterion, checks its runtime, and logs a
PASS/FAIL line.  Run ``pytest tests/test_acceptance.py -m acceptance`` to
see only these; the lines are repeated in the terminal summary.
"""

import random
from fractions import Fraction

import pytest
from acceptance_log import criterion
from class_group_oracle import CURVES, verify_random_operations
from synthetic import profile_poly, random_system, synthetic_disk

from chabauty.biextension import (
    BiextPoint,
    Leg,
    biext_add,
    build_Qij,
    kappa_point,
    kappa_poly,
    kappa_z_poly,
    rho_N,
)
from chabauty.disk import (
    eliminate_embedding,
    embed_disk,
    profiles_for,
    refine_higher_disk,
    solve_disk,
)
from chabauty.errors import MissingFixture, SingularJacobian
from chabauty.heights import (
    BilinearOracle,
    SignedDivisor,
    linear_equivalence_correction,
    psi_of_section,
)
from chabauty.jacobian import cantor_compose, divisor_multiple
from chabauty.padic_core import (
    MultiPoly,
    PadicNumber,
    PadicPoly,
    enumerate_residues,
    hensel_lift_multivariate,
    hensel_lift_univariate,
    profile_violations,
)

pytestmark = pytest.mark.acceptance

P = 7
NAMES_N = ["n1", "n2"]


def _poly(terms, k=1, r=2):
    return MultiPoly(P, k, r, terms)


@pytest.fixture(scope="module")
def disk1(example):
    return example.with_precision(1).disk_context((0, 6))


def _unit_multiple(f, g):
    return any(f == g * c for c in range(1, P))


def test_criterion_1_embedding(disk1):
    with criterion(1, "embedding mod 7 is (2 nu, 0, 6 - nu)", 1.0):
        emb = embed_disk(disk1, 1)
        got = [[c.to_int() % P for c in poly.coeffs] + [0] * (2 - len(poly.coeffs)) for poly in emb.coords]
        assert got == [[0, 2], [0, 0], [6, 6]]


def test_criterion_2_elimination(disk1):
    with criterion(2, "elimination g1 = x2, g2 = x1 + 2 x3 + 2 up to units", 1.0):
        elim = eliminate_embedding(embed_disk(disk1, 1), 1)
        want = [_poly({(0, 1, 0): 1}, r=3), _poly({(1, 0, 0): 1, (0, 0, 1): 2, (0, 0, 0): 2}, r=3)]
        assert len(elim) == 2
        assert all(_unit_multiple(g, w) for g, w in zip(elim, want))


# kappa_Z mod 7^4 as displayed: coordinate, monomial, value
KAPPA_Z_DISPLAY = [
    (0, (1, 0), 399), (0, (0, 1), 1372), (0, (0, 0), 623),
    (1, (1, 0), 1267), (1, (0, 1), 35), (1, (0, 0), 1274),
    (2, (1, 0), 2345), (2, (0, 1), 2170),
    (3, (1, 0), 1204), (3, (0, 1), 168), (3, (0, 0), 714),
    (4, (2, 0), 1351), (4, (1, 1), 1463), (4, (1, 0), 875), (4, (0, 1), 350), (4, (0, 0), 1365),
]


def test_criterion_3_kappa(example):
    with criterion(3, "kappa mod 7 and the kappa_Z table mod 7^4", 1.0):
        ctx = example.kappa_context((0, 6))
        kap = kappa_poly(ctx, 1)
        want = [
            _poly({(1, 0): 1}),
            _poly({(1, 0): -1, (0, 1): -2}),
            _poly({(2, 0): -3, (1, 1): -1, (1, 0): -1, (0, 1): 1, (0, 0): -1}),
        ]
        assert [f.format(NAMES_N) for f in kap.entries] == [w.format(NAMES_N) for w in want]
        raw = kappa_z_poly(ctx, 4)
        bad = [(c, m, v, raw[c].coefficient(m)) for c, m, v in KAPPA_Z_DISPLAY if raw[c].coefficient(m) != v]
        assert not bad


def test_criterion_4_solver(example, disk1):
    with criterion(4, "composed system, zeros {(0,0),(1,3)}, finite, two candidates", 1.0):
        elim = eliminate_embedding(embed_disk(disk1, 1), 1)
        rep = solve_disk(elim, kappa_poly(disk1.kappa, 1), 1, model=example.model, center=disk1.center)
        want = [_poly({(1, 0): -1, (0, 1): -2}), _poly({(2, 0): 1, (1, 1): -2, (1, 0): -1, (0, 1): 2})]
        assert all(a == b for a, b in zip(rep.composed, want))
        assert sorted(rep.mod_p_solutions) == [(0, 0), (1, 3)]
        assert rep.finite is True
        pts = {(c.point.x.to_int() % 49, c.point.y.to_int() % 49) for c in rep.candidates}
        assert (0, 48) in pts
        assert sorted((x, y % 7) for x, y in pts) == [(0, 6), (28, 6)]


@pytest.mark.xfail(raises=MissingFixture, strict=True, reason="psi sections at nu = 4 and nu = 11 are not in the bundle")
def test_criterion_5_higher_disk(example, disk1):
    with criterion(5, "higher disk at P4: torsor (5,1,5), x = 224, y = 342 mod 7^3", 1.0):
        elim = eliminate_embedding(embed_disk(disk1, 1), 1)
        rep = solve_disk(elim, kappa_poly(disk1.kappa, 1), 1, model=example.model, center=disk1.center)
        start = next(c for c in rep.candidates if c.n == (1, 3))
        refined = refine_higher_disk(disk1, start, kappa_poly(disk1.kappa, 2), 1)
        assert len(refined) == 1
        (c,) = refined
        assert c.torsor == (5, 1, 5)
        assert c.point.x.to_int() % 343 == 4 * 7 + 4 * 49
        assert c.point.y.to_int() % 343 == 6 + 6 * 7 + 6 * 49


@pytest.mark.xfail(raises=MissingFixture, strict=True, reason="no sampling data for the disk over (4, 4)")
def test_criterion_6_degenerate_disk(example):
    with criterion(6, "degenerate disk over (4,4) has finiteness flag false", 1.0):
        ctx = example.with_precision(1).disk_context((4, 4))
        rep = solve_disk(eliminate_embedding(embed_disk(ctx, 1), 1), kappa_poly(ctx.kappa, 1), 1)
        assert rep.finite is False


def test_criterion_7_height_pipeline(example, disk1):
    with criterion(7, "psi(P0) = 6*7, psi(P1) = 5*7 mod 49, log g_P0 = 7 mod 49", 1.0):
        s = disk1.sampler
        p0, p1, b = example.point("P"), example.point({"disk": [0, -1], "nu": 1}), example.point("b")
        psi0 = psi_of_section(p0, s.sections[0][0], example.oracle, None, s.base, s.change)
        psi1 = psi_of_section(p1, s.sections[1][0], example.oracle, None, s.base, s.change)
        assert psi0.to_int() % 49 == 6 * 7
        assert psi1.to_int() % 49 == 5 * 7
        corr = linear_equivalence_correction(example.function("g_P0"), SignedDivisor.of((1, p0), (-1, b)))
        assert corr.to_int() % 49 == 7


def test_criterion_8_cantor(example):
    with criterion(8, "doubling D_P1 mod 7^8 and 500 oracle-checked operations per small curve", 30.0):
        d = example.mumford("D_P1")
        m = P**8
        semi, _ = cantor_compose(d, d)
        assert [c.to_int() % m for c in semi.v.coeffs] == [x % m for x in (-1649234, 1999391, 73804, -462222)]
        red, _ = divisor_multiple(d, 2)
        assert [c.to_int() % m for c in red.u.coeffs] == [x % m for x in (297368 * 7, 1977884, 1)]
        for model, p in CURVES:
            assert verify_random_operations(model, p, 500) == []


def test_criterion_9_properties(example):
    with criterion(9, "biextension, rho, bilinearity, profile and precision properties", 60.0):
        rng = random.Random(9)

        def elem():
            return PadicNumber.from_int(P, rng.randrange(-(P**6), P**6), 6)

        def vec():
            return (elem(), elem())

        for _ in range(1000):
            x1, x2, y1, y2 = vec(), vec(), vec(), vec()
            a, b = BiextPoint(x1, y1, elem()), BiextPoint(x2, y1, elem())
            c, d = BiextPoint(x1, y2, elem()), BiextPoint(x2, y2, elem())
            lhs = biext_add(biext_add(a, b, Leg.FIRST), biext_add(c, d, Leg.FIRST), Leg.SECOND)
            rhs = biext_add(biext_add(a, c, Leg.SECOND), biext_add(b, d, Leg.SECOND), Leg.FIRST)
            assert lhs.equals(rhs)

        ctx = example.kappa_context((0, 6))
        q_points = [build_Qij(ctx, i, j) for i in (1, 2) for j in (0, 1, 2)]
        for pt in q_points:
            assert rho_N(pt, ctx.table).is_zero()
        for i in (0, 3):
            assert rho_N(biext_add(q_points[i], q_points[i + 1], Leg.SECOND), ctx.table).is_zero()
        for n in enumerate_residues(5, 2):
            assert rho_N(kappa_point(ctx, [x - 2 for x in n]), ctx.table).is_zero()

        labels = ["A", "B", "C"]
        form = {(u, v): Fraction(rng.randrange(-99, 99), rng.randrange(1, 9)) for u in labels for v in labels if u <= v}
        orc = BilinearOracle(form, lambda key: key, P, 8)
        for _ in range(200):
            da, db, dc = (SignedDivisor(tuple((rng.randrange(-5, 5), lab) for lab in labels)) for _ in range(3))
            assert orc.height(da + db, dc) == orc.height(da, dc) + orc.height(db, dc)
            assert orc.height(da, db) == orc.height(db, da)

        emb1 = embed_disk(example.with_precision(1).disk_context((0, 6)), 1)
        for poly, prof in zip(emb1.coords, profiles_for(ctx)):
            assert profile_violations(poly, prof, 1) == []
        for _ in range(10):
            coords = [profile_poly(rng, 2, i == 2) for i in range(3)]
            emb2 = embed_disk(synthetic_disk(example, coords, 2), 2)
            for poly, prof in zip(emb2.coords, profiles_for(ctx)):
                assert profile_violations(poly, prof, 2) == []
            coarse = embed_disk(synthetic_disk(example, coords, 1), 1)
            assert all(a.reduce(1) == b for a, b in zip(emb2.coords, coarse.coords))
            fine_elim, coarse_elim = eliminate_embedding(emb2, 2), eliminate_embedding(emb2, 1)
            assert all(f.reduce(1) == g for f, g in zip(fine_elim, coarse_elim))

        k3 = kappa_poly(ctx, 3)
        assert k3.reduce(2) == kappa_poly(ctx, 2) and k3.reduce(1) == kappa_poly(ctx, 1)
        for _ in range(200):
            x, y = elem(), elem()
            for op in (lambda u, v: u + v, lambda u, v: u * v):
                assert op(x, y).reduce(5) == op(x.reduce(5), y.reduce(5))


def test_criterion_10_hensel(example):
    with criterion(10, "sqrt 2 = 108, beta and c0 mod 7^3, 50 lifts match exhaustive search", 10.0):
        assert hensel_lift_univariate(PadicPoly(P, [-2, 0, 1], 3), 3, 3).to_int() % 343 == 108
        ch = example.change
        assert ch.beta.to_int() % 343 == 4 + 3 * 7 + 4 * 49
        assert ch.c0.to_int() % 343 == 5 + 3 * 7 + 3 * 49
        rng = random.Random(10)
        checked = 0
        while checked < 50:
            r = rng.choice([1, 2])
            system, x0 = random_system(rng, r, P)
            try:
                lifted = hensel_lift_multivariate(system, x0, 2)
            except SingularJacobian:
                continue
            brute = [
                x for x in enumerate_residues(49, r)
                if all(f.evaluate(x) % 49 == 0 for f in system) and all((a - b) % P == 0 for a, b in zip(x, x0))
            ]
            assert brute == [tuple(c.to_int() % 49 for c in lifted)]
            checked += 1
