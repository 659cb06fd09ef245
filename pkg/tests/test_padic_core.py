import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from synthetic import random_system

from chabauty.errors import (
    DegreeBoundExceeded,
    DivisionByZero,
    InsufficientSamples,
    NoRoot,
    NotAUnit,
    SingularJacobian,
    SingularRoot,
)
from chabauty.padic_core import (
    MultiPoly,
    PadicNumber,
    PadicPoly,
    ProfileKind,
    ValuationProfile,
    enumerate_residues,
    hensel_lift_multivariate,
    hensel_lift_univariate,
    interpolate_poly_mod_pk,
    iwasawa_log,
    iwasawa_log_qp,
    padic,
    poly_roots_qp,
    profile_violations,
    solve_linear_mod,
    valuation,
)

P = 7
K = 8
nonzero = st.integers(-10**6, 10**6).filter(lambda n: n != 0)
fractions = st.builds(Fraction, nonzero, st.integers(1, 10**4))


def agrees(x: PadicNumber, q: Fraction, k: int) -> bool:
    """x and the rational q agree modulo p^k."""
    return (x - PadicNumber.from_rational(x.prime, q, x.precision)).reduce(k).is_zero()


@given(fractions, fractions)
def test_ring_operations_match_rational_arithmetic(a, b):
    x, y = padic(P, a, K + 6), padic(P, b, K + 6)
    assert agrees(x + y, a + b, K)
    assert agrees(x - y, a - b, K)
    assert agrees(x * y, a * b, K)
    assert agrees(x / y, a / b, K)


@given(fractions)
def test_valuation_and_digits_round_trip(a):
    x = padic(P, a, 12)
    assert x.valuation == valuation(a, P)
    assert PadicNumber.from_json(x.to_json()) == x
    assert PadicNumber.from_digits(P, x.digits(), x.valuation).precision == x.precision


def test_from_digits_sets_absolute_precision():
    x = PadicNumber.from_digits(P, [5, 1, 4], 1)
    assert x.valuation == 1 and x.precision == 4
    assert x.to_int() == 5 * 7 + 7**2 + 4 * 7**3


def test_precision_is_capped_by_the_least_precise_operand():
    x = PadicNumber.from_int(P, 3, 5)
    y = PadicNumber.from_int(P, 2, 9)
    assert (x + y).precision == 5
    assert (x * PadicNumber.from_int(P, 7, 9)).precision == 5


@given(fractions, fractions, st.integers(2, 7))
def test_truncated_inputs_agree_at_reported_precision(a, b, m):
    full = [padic(P, a, 10), padic(P, b, 10)]
    cut = [x.reduce(min(m, x.precision)) for x in full]
    for op in (lambda u, v: u + v, lambda u, v: u - v, lambda u, v: u * v):
        coarse = op(*cut)
        assert (op(*full) - coarse).reduce(coarse.precision).is_zero()


@given(st.lists(st.tuples(st.integers(1, 10**6), st.integers(1, 10**6)), min_size=200, max_size=200))
def test_iwasawa_log_is_a_homomorphism_on_units(pairs):
    for a, b in pairs:
        u, v = padic(P, a * P + 1, 6) * (a % 6 + 1), padic(P, b * P + 3, 6)
        assert (iwasawa_log(u * v) - iwasawa_log(u) - iwasawa_log(v)).is_zero()


def test_division_of_units_mod_49():
    q = PadicNumber.from_int(P, 4, 2) / PadicNumber.from_int(P, 9, 2)
    assert q.precision == 2
    assert q.to_int() == 4 * pow(9, -1, 49) % 49 == 44


def test_division_by_zero_raises():
    with pytest.raises(DivisionByZero):
        PadicNumber.from_int(P, 1, 4) / PadicNumber.zero(P, 4)


def test_negative_valuations_are_representable():
    x = padic(P, Fraction(1, 49), 4)
    assert x.valuation == -2
    assert (x * 49).reduce(4) == PadicNumber.from_int(P, 1, 4)


def _log_by_limit(q: Fraction, k: int) -> int:
    """Independent oracle: log x = lim (x^(p^n) - 1) / p^n for x = 1 mod p."""
    m = P ** (k + 4)
    u = q.numerator * pow(q.denominator, -1, m) % m
    u = pow(u, P - 1, m)  # now 1 mod p; divide by p - 1 at the end
    n = k + 1
    big = P ** (k + 4 + n)
    un = pow(q.numerator * pow(q.denominator, -1, big) % big, (P - 1) * P**n, big)
    val = ((un - 1) % big) // P**n
    return val * pow(P - 1, -1, P**k) % P**k


@given(st.integers(1, 10**5).filter(lambda n: n % P), st.integers(1, 10**5).filter(lambda n: n % P))
def test_iwasawa_log_matches_limit_formula(a, b):
    q = Fraction(a, b)
    assert iwasawa_log(padic(P, q, 6)).to_int() % P**6 == _log_by_limit(q, 6)


def test_iwasawa_log_of_four_ninths():
    # log g_P0(P)/g_P0(b) = log(4/9) = 7 mod 49
    value = iwasawa_log_qp(padic(P, Fraction(4, 9), 10))
    assert value.to_int() % 49 == 7
    assert value.to_int() % P**10 == _log_by_limit(Fraction(4, 9), 10)


def test_iwasawa_log_kills_p_and_is_a_homomorphism():
    a, b = padic(P, 7 * 3, 9), padic(P, Fraction(5, 2), 9)
    assert iwasawa_log_qp(PadicNumber.from_int(P, 7, 9)).is_zero()
    assert (iwasawa_log_qp(a * b) - iwasawa_log_qp(a) - iwasawa_log_qp(b)).reduce(8).is_zero()


def test_iwasawa_log_rejects_non_units():
    with pytest.raises(NotAUnit):
        iwasawa_log(PadicNumber.from_int(P, 14, 5))


def test_sqrt_two_in_z7():
    root = hensel_lift_univariate(PadicPoly(P, [-2, 0, 1], 3), 3, 3)
    assert root.to_int() % 343 == 108


def test_hensel_univariate_errors():
    f = PadicPoly(P, [-2, 0, 1], 5)
    with pytest.raises(NoRoot):
        hensel_lift_univariate(f, 1, 5)
    with pytest.raises(SingularRoot):
        hensel_lift_univariate(PadicPoly(P, [0, 0, 1], 5), 0, 5)


@given(st.lists(st.integers(0, P - 1), min_size=1, max_size=4, unique=True))
def test_roots_of_split_polynomials(roots):
    f = PadicPoly(P, [1], 6)
    for r in roots:
        f = f * PadicPoly(P, [-r, 1], 6)
    found = poly_roots_qp(f, 6)
    assert sorted(x.to_int() % P**6 for x in found) == sorted(roots)


def test_poly_roots_reports_non_split():
    assert not poly_roots_qp(PadicPoly(P, [1, 0, 1], 4), 4)


def test_multivariate_hensel_matches_exhaustive_search():
    rng = random.Random(20261014)
    checked = 0
    while checked < 50:
        r = rng.choice([1, 2, 3])
        system, x0 = random_system(rng, r, P)
        try:
            lifted = hensel_lift_multivariate(system, x0, 2)
        except SingularJacobian:
            continue
        got = tuple(c.to_int() % 49 for c in lifted)
        brute = [
            x for x in enumerate_residues(49, r)
            if all(f.evaluate(x) % 49 == 0 for f in system) and all((a - b) % P == 0 for a, b in zip(x, x0))
        ]
        assert brute == [got]
        checked += 1


def test_multivariate_hensel_singular_jacobian():
    x = MultiPoly.variable(P, 3, 2, 0)
    y = MultiPoly.variable(P, 3, 2, 1)
    with pytest.raises(SingularJacobian):
        hensel_lift_multivariate([x * x, y], [0, 0], 3)


def test_solve_linear_mod_against_brute_force():
    rng = random.Random(5)
    for _ in range(30):
        mat = [[rng.randrange(49) for _ in range(2)] for _ in range(2)]
        if (mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]) % P == 0:
            continue
        rhs = [rng.randrange(49) for _ in range(2)]
        sol = solve_linear_mod(mat, rhs, P, 2)
        assert [(mat[i][0] * sol[0] + mat[i][1] * sol[1] - rhs[i]) % 49 for i in range(2)] == [0, 0]


@given(st.lists(st.integers(-500, 500), min_size=1, max_size=5), st.lists(st.integers(-500, 500), min_size=1, max_size=5))
def test_multipoly_composition_is_evaluation(cf, cg):
    f = MultiPoly.from_padic_poly(PadicPoly(P, cf, 3), 3)
    g = MultiPoly.from_padic_poly(PadicPoly(P, cg, 3), 3)
    h = f.compose([g])
    for t in range(10):
        assert h.evaluate([t]) == f.evaluate([g.evaluate([t])])


@pytest.mark.parametrize("kind", list(ProfileKind))
@pytest.mark.parametrize("k", [1, 2, 3])
def test_interpolation_recovers_profile_bounded_polynomials(kind, k):
    profile = ValuationProfile(kind)
    d = profile.degree_bound(k, P)
    rng = random.Random(k)
    coeffs = [rng.randrange(P**k)]
    for n in range(1, d + 1):
        lb = profile.lower_bound(n, P)
        coeffs.append(rng.randrange(P**k) * P ** max(lb, 0) % P**k)
    f = PadicPoly(P, coeffs, k)
    samples = [(x, f(x).to_int()) for x in range(d + 2)]
    fit = interpolate_poly_mod_pk(samples, profile, k, P)
    assert [c % P**k for c in fit.to_ints()] == [c % P**k for c in f.to_ints()][: len(fit.coeffs)]
    assert profile_violations(fit, profile, k) == []


def test_interpolation_needs_enough_samples_and_detects_excess_degree():
    profile = ValuationProfile(ProfileKind.EMBEDDING_FIRST_G)
    with pytest.raises(InsufficientSamples):
        interpolate_poly_mod_pk([(0, 0)], profile, 1, P)
    with pytest.raises(DegreeBoundExceeded):
        interpolate_poly_mod_pk([(0, 0), (1, 1), (2, 4)], profile, 1, P)


def test_embedding_degree_bounds_for_small_precision():
    assert ValuationProfile(ProfileKind.EMBEDDING_FIRST_G).degree_bound(1, P) == 1
    assert ValuationProfile(ProfileKind.EMBEDDING_HEIGHT).degree_bound(1, P) == 1
