from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lkm3.errors import SolveFailed
from lkm3.linalg import rank_mod_p, rational_reconstruct, solve_unique, solve_unique_fractions


def test_simple_system():
    assert solve_unique([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]


def test_integer_solution_is_int():
    x = solve_unique([[1, 0], [0, 1], [1, 1]], [2, 3, 5])
    assert x == [2, 3] and all(type(v) is int for v in x)


def test_underdetermined():
    with pytest.raises(SolveFailed):
        solve_unique([[1, 1], [2, 2]], [1, 2])
    with pytest.raises(SolveFailed):
        solve_unique([[1, 1]], [1])


def test_inconsistent():
    with pytest.raises(SolveFailed):
        solve_unique([[1, 1], [1, 1]], [1, 2])
    with pytest.raises(SolveFailed):
        solve_unique_fractions([[1, 1], [1, 1]], [1, 2])


def test_rational_entries():
    rows = [[Fraction(1, 3), 1], [1, Fraction(-1, 7)]]
    assert solve_unique(rows, [1, 0]) == solve_unique_fractions(rows, [1, 0])


def test_huge_entries():
    big = 10**40 + 7
    rows = [[big, 1], [1, big]]
    assert solve_unique(rows, [1, 2]) == solve_unique_fractions(rows, [1, 2])


def test_rational_reconstruct():
    m = 1000003 * 1000033
    a = (3 * pow(7, -1, m)) % m
    assert rational_reconstruct(a, m) == Fraction(3, 7)


def test_rank_mod_p():
    assert rank_mod_p([[1, 2], [2, 4]], 101) == 1
    assert rank_mod_p([[1, 2], [3, 4]], 101) == 2


square = st.integers(1, 6).flatmap(
    lambda n: st.tuples(
        st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=n, max_size=n + 3),
        st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=30), min_size=n, max_size=n),
    )
)


@settings(max_examples=100, deadline=None)
@given(square)
def test_against_fraction_oracle(data):
    rows, x = data
    rhs = [sum(Fraction(a) * v for a, v in zip(r, x)) for r in rows]
    try:
        want = solve_unique_fractions(rows, rhs)
    except SolveFailed:
        with pytest.raises(SolveFailed):
            solve_unique(rows, rhs)
        return
    assert want == x
    assert solve_unique(rows, rhs) == want
