from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lkm3.errors import IndexMismatch, OutOfTruncation, WeightMismatch
from lkm3.exactseries import delta, e4
from lkm3.jacobiforms import (
    JacobiFourier,
    NormClass,
    coeff,
    eisenstein_jacobi,
    generators,
    jf_add,
    jf_div_by_power_of_delta,
    jf_mul,
    jf_pow,
    jf_scalar,
    modular,
    norm_of,
    phi_weak_generators,
    q0_part,
    rescale_elliptic,
    theta_odd,
    weak_space,
)

H = Fraction(1, 2)


@pytest.fixture(scope="module")
def g():
    return generators(6)


def test_theta_leading_terms():
    th = theta_odd(3)
    assert (th.weight, th.index) == (H, H)
    assert th.coeff(Fraction(1, 8), H) == 1
    assert th.coeff(Fraction(1, 8), -H) == -1
    assert th.q_valuation() == Fraction(1, 8)


def test_theta_triple_product_brute_force():
    # q^{1/8} (r^{1/2} - r^{-1/2}) prod (1 - q^n r)(1 - q^n r^-1)(1 - q^n) to q^{1/8 + 4}
    N = 4
    poly = {(0, Fraction(1, 2)): 1, (0, Fraction(-1, 2)): -1}
    for n in range(1, N):
        for dl in (1, -1, 0):
            new = dict(poly)
            for (a, l), c in poly.items():
                if a + n < N:
                    key = (a + n, l + dl)
                    new[key] = new.get(key, 0) - c
            poly = {k: v for k, v in new.items() if v}
    th = theta_odd(N)
    for (a, l), c in poly.items():
        assert th.coeff(a + Fraction(1, 8), l) == c
    assert len(th) == len(poly)


def test_phim2_q0_part(g):
    assert g["phim2_1"].row(0) == {-1: 1, 0: -2, 1: 1}
    assert (g["phim2_1"].weight, g["phim2_1"].index) == (-2, 1)


@pytest.mark.parametrize("name,mid", [("phi0_1", 10), ("phi0_2", 4), ("phi0_3", 2), ("phi0_4", 1)])
def test_phi0_q0_contracts(g, name, mid):
    f = g[name]
    assert f.row(0) == {-1: 1, 0: mid, 1: 1}
    assert f.weight == 0 and f.is_integral()


def test_phi_weak_generators_keys():
    assert sorted(phi_weak_generators(3)) == ["phi0_1", "phi0_2", "phi0_3", "phi0_4", "phim2_1"]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_eisenstein_jacobi_holomorphic(m):
    e = eisenstein_jacobi(m, 4)
    assert e.row(0) == {0: 1}
    assert (e.weight, e.index) == (4, m)
    assert e.min_norm() >= 0
    assert e.is_integral()


def test_e41_recipe(g):
    f = jf_div_by_power_of_delta(modular(e4(7), 4) ** 2 * g["E4_1"], 1) - g["phi0_1"].scalar(57)
    assert f.row(-1) == {0: 1}
    assert f.row(0) == {-2: 1, -1: -1, 0: 60, 1: -1, 2: 1}


def test_e42_recipe(g):
    f = (
        jf_div_by_power_of_delta(modular(e4(7), 4) ** 2 * g["E4_2"], 1)
        - (g["phi0_1"] ** 2).scalar(14)
        + g["phi0_2"].scalar(216)
    )
    assert f.row(-1) == {0: 1} and f.row(0) == {0: 24}


def test_ring_arithmetic(g):
    f = jf_add(jf_pow(g["phi0_1"], 2), jf_scalar(g["phi0_2"], -21))
    assert q0_part(f) == {-2: 1, -1: -1, 0: 18, 1: -1, 2: 1}
    zero = JacobiFourier({}, 0, 1, 6)
    assert jf_mul(g["phi0_1"], zero).is_zero()
    p = jf_mul(g["phi0_2"], g["phi0_2"])
    assert (p.index, p.weight) == (4, 0)


def test_add_mismatch(g):
    with pytest.raises(IndexMismatch):
        g["phi0_1"] + g["phi0_2"]
    with pytest.raises(WeightMismatch):
        g["phi0_1"] + g["E4_1"]


def test_div_by_delta(g):
    d = modular(delta(6), 12)
    one = jf_div_by_power_of_delta(d, 1)
    assert one.terms == {(0, 0): 1}
    f = jf_div_by_power_of_delta(g["E4_1"], 1)
    assert f.q_valuation() == g["E4_1"].q_valuation() - 1


def test_rescale(g):
    f = rescale_elliptic(g["phi0_2"], 2)
    assert f.row(0) == {-2: 1, 0: 4, 2: 1} and f.index == 8
    assert rescale_elliptic(g["phi0_4"], 2).index == 16
    assert rescale_elliptic(g["phi0_1"], 1) == g["phi0_1"]


def test_coeff_queries(g):
    assert coeff(g["phi0_1"], 0, 1) == 1
    assert coeff(g["phi0_1"], 0, 7) == 0
    assert norm_of(g["phi0_1"], 1, 3) == 4 - 9
    with pytest.raises(OutOfTruncation):
        coeff(g["phi0_1"], 6, 0)


def test_norm_of_t36(basis):
    assert norm_of(basis(36).forms[0], 5, 27) == -9


def test_ring_sanity(g):
    f = g["phim2_1"] ** 2 * modular(e4(6), 4)
    assert (f.weight, f.index) == (0, 2) and f.is_integral()


def test_norm_class_canonical():
    c = NormClass.of(12, 1, 8)
    assert c == NormClass.of(12, 1, -8) == NormClass.of(12, 5, 16)
    assert c.l_residue == 8 and c.discriminant == 16
    assert NormClass.from_discriminant(36, 9, 27).representative() == (5, 27)


def test_records_roundtrip(g):
    f = g["phi0_3"]
    assert JacobiFourier.from_records(f.to_records()) == f


def test_weak_space_dimension():
    # J^weak_{0,1} is spanned by phi0_1
    labels = [lab for lab, _ in weak_space(0, 1, 3)]
    assert len(labels) == 1


def test_bases_even_norm_invariant(basis, ds):
    for t in ds.indices:
        for f in basis(t).forms:
            assert f.is_even() and f.is_norm_invariant()


def test_min_norm_matches_brackets(basis, ds):
    for t in ds.indices:
        printed = min(
            (4 * t * ln.q - l * l for p in ds.index(t).printed for ln in p.lines for l in ln.coeffs),
            default=0,
        )
        assert min(f.min_norm() for f in basis(t).forms) == printed


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_products_of_generators_norm_invariant(cs):
    g = generators(4)
    f = g["phi0_1"].scalar(cs[0]) * g["phi0_2"] + (g["phi0_1"] ** 3).scalar(cs[1]) + g["phi0_3"].scalar(cs[2])
    f = f + g["phi0_1"].scalar(cs[3]) * g["phi0_1"] * g["phi0_1"] + g["phi0_3"].scalar(cs[4])
    assert f.is_even() and f.is_norm_invariant()
