from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lkm3.errors import NonPrimitive, NotARoot
from lkm3.hyperlattice import (
    cartan_matrix,
    check_weyl_vector,
    class_of,
    classes_match_table,
    discriminant,
    gram_matrix,
    interior_point,
    is_root,
    orbit,
    pair,
    pair2t,
    positive_real_root,
    reflect,
)

P1 = [(1, 2, 0), (0, -1, 0), (-1, 0, 1)]
HALF = (Fraction(1, 2),) * 3


def test_pairing():
    assert pair2t(1, (1, 2, 0), (-1, 0, 1)) == -2
    assert pair(1, (0, 1, 0), (0, 1, 0)) == Fraction(1, 2)
    assert pair(3, (4, 5, 6), (0, 0, 0)) == 0


def test_discriminant():
    assert discriminant(1, (-1, 0, 1)) == 4
    assert discriminant(2, (0, -1, 0)) == 1
    assert discriminant(5, (0, 0, 0)) == 0


def test_is_root():
    assert is_root(1, (-1, 0, 1)) and is_root(1, (0, 1, 0))
    assert not is_root(2, (0, 3, 0))
    assert not is_root(1, (1, 0, 1))


def test_reflect():
    assert reflect(1, (0, -1, 0), (1, 2, 0)) == (1, -2, 0)
    assert reflect(1, (1, 2, 0), (0, -1, 0)) == (1, 1, 0)
    assert reflect(4, (0, 1, 0), (0, 1, 0)) == (0, -1, 0)
    with pytest.raises(NotARoot):
        reflect(2, (0, 3, 0), (1, 0, 0))


def test_non_root_breaks_integrality():
    # the reflection formula in (0,3,0) at t=2 leaves the lattice
    c = Fraction(2 * pair2t(2, (0, 1, 0), (0, 3, 0)), pair2t(2, (0, 3, 0), (0, 3, 0)))
    assert c.denominator != 1


def test_class_of():
    c = class_of(12, (1, 8, 1))
    assert (c.discriminant, c.l_residue) == (16, 8)
    assert class_of(1, (-1, 0, 1)) == class_of(1, (1, 2, 0))
    with pytest.raises(NonPrimitive):
        class_of(1, (2, 4, 0))


def test_classes_match_table(ds):
    assert all(row[-1] for row in classes_match_table(ds))


def test_orbit_finite():
    o = orbit(1, [(1, 2, 0), (-1, 0, 1)], [(0, -1, 0)], 6)
    assert o.vectors == [(0, -1, 0), (0, 1, 1), (1, 1, 0)] and o.closed
    assert orbit(1, [(1, 2, 0)], [(0, -1, 0)], 0).vectors == [(0, -1, 0)]


def test_orbit_dinfinity(ds):
    rows = ds.index(4).chamber.pm0_rows
    sizes = []
    for w in (2, 4, 6):
        o = orbit(4, [rows[0], rows[2]], [rows[1]], w)
        assert not o.closed
        assert {discriminant(4, v) for v in o} == {1}
        sizes.append(len(o))
    assert sizes[0] < sizes[1] < sizes[2]


def test_cartan():
    assert cartan_matrix(1, P1) == [[2, -1, -1], [-4, 2, 0], [-1, 0, 2]]
    A = cartan_matrix(1, [(0, -1, 0), (1, 1, 0), (0, 1, 1)])
    assert all(A[i][j] == (2 if i == j else -2) for i in range(3) for j in range(3))
    assert cartan_matrix(3, [(0, 1, 0)]) == [[2]]
    with pytest.raises(NotARoot):
        cartan_matrix(1, [(1, 0, 1)])


def test_gram_reproduces_tables(ds):
    for t in ds.indices:
        ch = ds.index(t).chamber
        assert gram_matrix(t, ch.pm0_rows) == [list(r) for r in ch.gram]


def test_chamber_cartans_are_generalized(ds):
    for t in ds.indices:
        A = cartan_matrix(t, ds.index(t).chamber.pm0_rows)
        for i, row in enumerate(A):
            assert row[i] == 2
            assert all(isinstance(x, int) and x <= 0 for j, x in enumerate(row) if j != i)


def test_weyl_vector():
    assert check_weyl_vector(1, HALF, [(0, -1, 0), (1, 1, 0)])
    assert not check_weyl_vector(1, (0, 0, 0), [(0, -1, 0)])


def test_positive_real_root():
    assert positive_real_root(1, P1, (0, -1, 0))
    assert not positive_real_root(1, P1, (0, 1, 0))
    assert not positive_real_root(2, P1, (0, 3, 0))


def test_interior_point():
    x = interior_point(1, P1)
    assert all(pair(1, x, a) < 0 for a in P1)


vec = st.tuples(st.integers(-6, 6), st.integers(-12, 12), st.integers(-6, 6))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([1, 2, 3, 4, 8, 9, 12, 16, 36]), vec, vec)
def test_reflection_properties(t, a, x):
    if not is_root(t, a):
        return
    y = reflect(t, a, x)
    assert reflect(t, a, y) == x
    assert discriminant(t, y) == discriminant(t, x)
    assert all(isinstance(c, int) for c in y)
    assert reflect(t, a, a) == tuple(-c for c in a)


def test_interior_points_of_all_chambers(ds):
    for t in ds.indices:
        rows = ds.index(t).chamber.pm0_rows
        x = interior_point(t, rows)
        assert pair(t, x, x) < 0
        assert all(pair(t, x, a) < 0 for a in rows)
