import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticezeta import moments as mo

CS = (Fraction(3, 5), Fraction(3, 4), Fraction(1), Fraction(2))
DELTAS = (0.5, 1.0, 2.0)


def test_mean_goldens():
    assert mo.mean_truncated(1.0, 1.0) == pytest.approx(1.0)
    assert mo.mean_truncated(1.0, 4.0) == pytest.approx(0.25)


def test_mean_monotone_in_c_at_unit_delta():
    values = [mo.mean_truncated(c, 1.0) for c in (0.6, 1.0, 2.0, 8.0, 64.0)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-2  # 1/(2c-1) -> 0


def test_mean_domain_errors():
    with pytest.raises(ValueError):
        mo.mean_truncated(0.5, 1.0)
    with pytest.raises(ValueError):
        mo.mean_truncated(1.0, 0.0)


def test_variance_limit_goldens():
    assert mo.variance_limit(1.0, 1.0) == pytest.approx(2.0 / 3.0)
    assert mo.variance_limit(0.75, 1.0) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.6, max_value=3.0),
    st.floats(min_value=0.1, max_value=8.0),
)
def test_variance_delta_scaling(c, delta):
    scaled = mo.variance_limit(c, delta)
    base = mo.variance_limit(c, 1.0)
    assert scaled == pytest.approx(delta ** (1 - 4 * c) * base, rel=1e-12)


def test_variance_series_n50():
    p = mo.FiniteNParams(n=50, c=1.0, delta=1.0, tol=1e-8)
    assert mo.variance_exact(p) == pytest.approx(2.0 / 3.0, abs=1e-6)


def test_variance_series_exceeds_leading_term():
    p = mo.FiniteNParams(n=10, c=1.0, delta=1.0)
    leading = 2.0 / (mo.zeta_direct(10) * 3.0)
    assert mo.variance_exact(p) > leading


def test_variance_series_monotone_to_limit():
    values = [
        mo.variance_exact(mo.FiniteNParams(n, 1.0, 1.0, tol=1e-10))
        for n in (10, 20, 50, 100)
    ]
    # decreasing toward the limit; the last two agree to float precision
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[0] > values[-1]
    assert values[-1] == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_variance_series_domain():
    with pytest.raises(ValueError):
        mo.FiniteNParams(n=2, c=1.0, delta=1.0)


def test_zeta_direct_known_values():
    # direct summation: the n=2 case needs 1/tol terms, so keep tol loose there
    assert mo.zeta_direct(2, tol=1e-5) == pytest.approx(math.pi**2 / 6, abs=1e-4)
    assert mo.zeta_direct(4) == pytest.approx(math.pi**4 / 90, abs=1e-11)
    assert mo.zeta_direct(12) == pytest.approx(1.000246086553308, abs=2e-12)


def test_poisson_moment_first_is_mean():
    for c in (0.6, 1.0, 2.0):
        for d in DELTAS:
            assert mo.poisson_moment(1, c, d) == pytest.approx(
                mo.mean_truncated(c, d), rel=1e-14
            )


def test_poisson_moment_k2_golden():
    # two partitions of {1,2}: singleton pair and the merged block
    assert mo.poisson_moment(2, 1.0, 1.0) == pytest.approx(5.0 / 3.0, rel=1e-14)
    # and it decomposes as mean^2 + variance
    assert mo.poisson_moment(2, 1.0, 1.0) == pytest.approx(
        mo.mean_truncated(1.0, 1.0) ** 2 + mo.variance_limit(1.0, 1.0), rel=1e-14
    )


def test_poisson_moment_k3_equals_limit_moment():
    assert mo.poisson_moment(3, 1.0, 1.0) == pytest.approx(
        mo.limit_moment(3, 1.0, 1.0), rel=1e-13
    )


def test_limit_moment_k1_is_mean():
    for c in (0.6, 1.0, 2.0):
        assert mo.limit_moment(1, c, 1.0) == pytest.approx(
            mo.mean_truncated(c, 1.0), rel=1e-14
        )


def test_limit_moment_k2_hand_value():
    # compositions of 2: (2) gives 2 * 1/3, (1,1) gives 1
    assert mo.limit_moment(2, 1.0, 1.0) == pytest.approx(2.0 / 3.0 + 1.0, rel=1e-14)


@pytest.mark.parametrize("k", range(1, 7))
def test_bijection_identity_exact(k):
    for c in CS:
        assert mo.poisson_moment_exact(k, c) == mo.limit_moment_exact(k, c)


@pytest.mark.parametrize("k", range(1, 7))
def test_bijection_identity_float(k):
    for c in CS:
        for d in DELTAS:
            a = mo.poisson_moment(k, float(c), d)
            b = mo.limit_moment(k, float(c), d)
            assert abs(a - b) <= 1e-12 * abs(b)


def test_mixed_moment_reductions():
    # single exponent reduces to the mean; equal exponents collapse
    assert mo.poisson_mixed_moment([0.8], 2.0) == pytest.approx(
        mo.mean_truncated(0.8, 2.0), rel=1e-14
    )
    assert mo.poisson_mixed_moment([1.0, 1.0], 1.0) == pytest.approx(
        mo.poisson_moment(2, 1.0, 1.0), rel=1e-14
    )
    assert mo.limit_mixed_moment([1.0, 1.0], 1.0) == pytest.approx(
        mo.limit_moment(2, 1.0, 1.0), rel=1e-14
    )


def test_mixed_bijection_identity_exact():
    from itertools import combinations_with_replacement

    pool = (Fraction(3, 5), Fraction(3, 4), Fraction(1), Fraction(3, 2))
    for length in range(1, 6):
        for gammas in combinations_with_replacement(pool, length):
            assert mo.poisson_mixed_moment_exact(gammas) == (
                mo.limit_mixed_moment_exact(gammas)
            )


def test_mixed_moment_example_pair():
    a = mo.poisson_mixed_moment([0.75, 1.0], 1.0)
    b = mo.limit_mixed_moment([0.75, 1.0], 1.0)
    assert a == pytest.approx(b, rel=1e-13)


def test_mixed_moment_requires_nondecreasing():
    with pytest.raises(ValueError):
        mo.poisson_mixed_moment([1.0, 0.75], 1.0)


def test_variance_identity_exact():
    for c in CS:
        mean = mo.mean_truncated_exact(c)
        lhs = mo.limit_moment_exact(2, c) - mean * mean
        assert lhs == mo.variance_limit_exact(c)


def test_variance_identity_float():
    for c in (0.6, 1.0, 2.0):
        lhs = mo.limit_moment(2, c, 1.0) - mo.mean_truncated(c, 1.0) ** 2
        assert lhs == pytest.approx(mo.variance_limit(c, 1.0), rel=1e-14)


def test_moment_ratio_bound_golden():
    ratio, bound = mo.moment_ratio_bound(1, 1.0, 1.0)
    assert ratio == pytest.approx(5.0 / 6.0, rel=1e-13)
    assert bound == pytest.approx(1.5, rel=1e-13)
    assert ratio <= bound


@pytest.mark.parametrize("k", range(1, 8))
def test_moment_ratio_bounded(k):
    ratio, bound = mo.moment_ratio_bound(k, 1.0, 1.0)
    assert ratio <= bound


def test_moment_ratio_bounded_other_params():
    ratio, bound = mo.moment_ratio_bound(2, 1.0, 2.0)
    assert ratio <= bound


def test_tail_mean_goldens():
    assert mo.tail_mean(1.0, 1.0) == pytest.approx(1.0)
    assert mo.tail_mean(1.0, 100.0) == pytest.approx(0.01)
    assert mo.tail_mean(1.0, 1e12) < 1e-11


def test_windowed_moment_converges_to_full():
    full = mo.poisson_moment(2, 1.0, 1.0)
    widening = [mo.poisson_moment(2, 1.0, 1.0, upper=y) for y in (10, 100, 10000)]
    gaps = [abs(full - w) for w in widening]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_windowed_mean_closed_form():
    assert mo.mean_truncated(1.0, 1.0, upper=200.0) == pytest.approx(1 - 1 / 200.0)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=5),
    st.floats(min_value=0.55, max_value=3.0),
    st.floats(min_value=0.25, max_value=4.0),
)
def test_moments_positive(k, c, delta):
    assert mo.poisson_moment(k, c, delta) > 0
    assert mo.limit_moment(k, c, delta) > 0


def test_power_sum_algebra():
    a = mo.PowerSum.single(Fraction(1, 2), Fraction(1, 3))
    b = mo.PowerSum.single(Fraction(1, 2), Fraction(1, 3))
    assert (a + b) == mo.PowerSum.single(1, Fraction(1, 3))
    assert (a - b) == mo.PowerSum()
    prod = a * b
    assert prod == mo.PowerSum.single(Fraction(1, 4), Fraction(2, 3))
    assert prod.evaluate(8.0) == pytest.approx(0.25 * 8.0 ** (2 / 3), rel=1e-13)
