from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lkm3.errors import ExponentError, OutOfTruncation, ZeroSeries
from lkm3.exactseries import QSeries, delta, divisor_sum, e4, e6, eta, eta_cubed, sigma1


def pentagonal(order):
    """Euler: prod (1 - q^n) = sum (-1)^k q^{k(3k-1)/2} over all integers k."""
    out = {}
    for k in range(-order, order + 1):
        e = k * (3 * k - 1) // 2
        if e < order:
            out[e] = (-1) ** k
    return out


def brute_product(order, power):
    c = [0] * order
    c[0] = 1
    for n in range(1, order):
        for _ in range(power):
            for k in range(order - 1, n - 1, -1):
                c[k] -= c[k - n]
    return c


def test_difference_of_squares():
    a = QSeries({0: 1, 1: 1}, 10) * QSeries({0: 1, 1: -1}, 10)
    assert a.terms == {Fraction(0): 1, Fraction(2): -1}


def test_mul_by_zero():
    assert (QSeries({0: 1, 1: 3}, 5) * QSeries({}, 5)).is_zero()


def test_geometric_inverse():
    inv = QSeries({0: 1, 1: -1}, 8).inverse()
    assert inv.terms == {Fraction(k): 1 for k in range(8)}


def test_inverse_monomial():
    inv = QSeries({Fraction(1, 24): 1}, 3).inverse()
    assert inv.terms == {Fraction(-1, 24): 1}


def test_inverse_of_delta_leading_term():
    inv = delta(6).inverse()
    assert inv.valuation() == -1 and inv[-1] == 1 and inv[0] == 24


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroSeries):
        QSeries({}, 4).inverse()


def test_query_beyond_truncation():
    with pytest.raises(OutOfTruncation):
        QSeries({0: 1}, 2)[2]
    assert QSeries({0: 1}, 2)[1] == 0


def test_bad_denominator():
    with pytest.raises(ExponentError):
        QSeries({Fraction(1, 5): 1}, 2)


def test_eta_pentagonal():
    N = 40
    e = eta(N + Fraction(1, 24))
    want = {Fraction(k) + Fraction(1, 24): c for k, c in pentagonal(N).items()}
    assert e.terms == want


def test_e4_e6_divisor_sums():
    assert e4(3)[1] == 240 and e4(3)[2] == 240 * 9
    assert e6(3)[1] == -504 and e6(3)[2] == -504 * 33


def test_delta_brute_force():
    c = brute_product(12, 24)
    d = delta(12)
    for n in range(1, 12):
        assert d[n] == c[n - 1]
    assert d[1] == 1 and d[2] == -24


def test_delta_identities_to_q50():
    N = 50
    assert e4(N) ** 3 - e6(N) ** 2 == delta(N).scalar_mul(1728)
    assert (eta(N) ** 24).truncate(N) == delta(N)
    assert (eta(N) ** 3).truncate(N) == eta_cubed(N)


@pytest.mark.parametrize("k,s", [(1, 1), (6, 12), (7, 8), (12, 28)])
def test_sigma1(k, s):
    assert sigma1(k) == s


def test_divisor_sum_power():
    assert divisor_sum(4, 3) == 1 + 8 + 64


def test_records_roundtrip():
    a = eta(5)
    assert QSeries.from_records(a.to_records()) == a


coeffs = st.integers(-5, 5)
series = st.builds(
    lambda cs, v: QSeries({Fraction(v + i, 24): c for i, c in enumerate(cs)}, Fraction(v + 60, 24)),
    st.lists(coeffs, min_size=1, max_size=8),
    st.integers(-30, 30),
)
unit_series = st.builds(
    lambda cs, v, u: QSeries({Fraction(v, 24): u, **{Fraction(v + 1 + i, 24): c for i, c in enumerate(cs)}}, Fraction(v + 48, 24)),
    st.lists(coeffs, max_size=8),
    st.integers(-24, 24),
    st.sampled_from([1, -1]),
)


@settings(max_examples=60, deadline=None)
@given(series, series, series)
def test_mul_assoc_comm(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


@settings(max_examples=60, deadline=None)
@given(unit_series)
def test_inverse_roundtrip(a):
    one = a * a.inverse()
    assert one.terms == {Fraction(0): 1}
    assert one.trunc_order > 0
