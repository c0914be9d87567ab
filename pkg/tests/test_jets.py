import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigmasurf.errors import BranchCut, DivisionBySingularJet, OrderExhausted, PoleAtBase, ShapeMismatch
from sigmasurf.jets import (
    BiJet,
    RationalFunction,
    jet_combine,
    jet_conj,
    jet_deriv,
    jet_from_rational,
    jet_pow_complex,
)

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def random_jet(seed: int, order: int = 4, base=0.3 - 0.2j) -> BiJet:
    r = np.random.default_rng(seed)
    c = r.normal(size=(order + 1, order + 1)) + 1j * r.normal(size=(order + 1, order + 1))
    c[0, 0] += 3.0
    return BiJet(c, base)


def expected(order, entries):
    c = np.zeros((order + 1, order + 1), dtype=complex)
    for (a, b), v in entries.items():
        c[a, b] = v
    return c


# -- jet_from_rational ------------------------------------------------------


def test_square_at_one():
    j = jet_from_rational(RationalFunction.polynomial([0, 0, 1]), 1.0, 2)
    np.testing.assert_allclose(j.coeffs, expected(2, {(0, 0): 1, (1, 0): 2, (2, 0): 1}), atol=1e-15)


def test_geometric_series():
    j = jet_from_rational(RationalFunction((1,), (1, 1)), 0.0, 2)
    np.testing.assert_allclose(j.coeffs, expected(2, {(0, 0): 1, (1, 0): -1, (2, 0): 1}), atol=1e-15)


def test_pole_at_base():
    with pytest.raises(PoleAtBase):
        jet_from_rational(RationalFunction((1,), (0, 1)), 0.0, 2)


@given(cplx)
def test_value_matches_direct_evaluation(z):
    spec = RationalFunction((1 - 2j, 0.5, 0.3j, 1.0), (2.0, -0.1j, 0.4))
    direct = spec(z)
    j = jet_from_rational(spec, z, 3)
    assert abs(j.value - direct) <= 1e-13 * max(1.0, abs(direct))


def test_batched_base_points(rng):
    z = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    spec = RationalFunction((1, 2, 3))
    j = jet_from_rational(spec, z, 2)
    assert j.shape == (3, 4)
    np.testing.assert_allclose(j.coeff(1, 0), 2 + 6 * z, rtol=1e-14)


# -- jet_combine ------------------------------------------------------------


def test_mul_xi_xibar():
    j = jet_combine("mul", BiJet.variable(0.0, 2), BiJet.conj_variable(0.0, 2))
    np.testing.assert_allclose(j.coeffs, expected(2, {(1, 1): 1}), atol=1e-15)


def test_div_geometric_in_two_variables():
    one = BiJet.constant(1.0, 0.0, 2)
    den = one - BiJet.variable(0.0, 2) * BiJet.conj_variable(0.0, 2)
    j = jet_combine("div", one, den)
    np.testing.assert_allclose(j.coeffs, expected(2, {(0, 0): 1, (1, 1): 1}), atol=1e-15)


def test_div_by_singular_jet():
    with pytest.raises(DivisionBySingularJet):
        jet_combine("div", BiJet.constant(1.0, 0.0, 2), BiJet.variable(0.0, 2))


def test_mismatched_order_rejected():
    with pytest.raises(ShapeMismatch):
        jet_combine("add", BiJet.variable(0.0, 2), BiJet.variable(0.0, 3))


def test_mismatched_base_rejected():
    with pytest.raises(ShapeMismatch):
        jet_combine("add", BiJet.variable(0.0, 2), BiJet.variable(1.0, 2))


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_product_rule(s1, s2):
    a, b = random_jet(s1), random_jet(s2)
    for which in ("xi", "xibar"):
        lhs = jet_deriv(a * b, which)
        rhs = jet_deriv(a, which) * b.truncate(3) + a.truncate(3) * jet_deriv(b, which)
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_division_inverse(s1, s2):
    a, b = random_jet(s1), random_jet(s2)
    back = jet_combine("mul", jet_combine("div", a, b), b)
    scale = np.abs(a.coeffs).max()
    np.testing.assert_allclose(back.coeffs, a.coeffs, atol=1e-12 * scale)


# -- derivatives and conjugation ---------------------------------------------


def test_deriv_of_square():
    j = jet_deriv(jet_from_rational(RationalFunction.polynomial([0, 0, 1]), 0.0, 2), "xi")
    assert j.order == 1
    np.testing.assert_allclose(j.coeffs, expected(1, {(1, 0): 2}), atol=1e-15)


def test_xibar_derivative_of_holomorphic_vanishes():
    j = jet_from_rational(RationalFunction((1, 2, 3), (1, 0.5)), 0.2 + 0.1j, 4)
    assert np.abs(jet_deriv(j, "xibar").coeffs).max() == 0


def test_order_exhausted():
    with pytest.raises(OrderExhausted):
        BiJet.constant(1.0, 0.0, 0).d_xi()


@given(st.integers(0, 10_000))
def test_wirtinger_conjugation(seed):
    a = random_jet(seed)
    np.testing.assert_allclose(jet_deriv(jet_conj(a), "xi").coeffs, jet_conj(jet_deriv(a, "xibar")).coeffs, atol=1e-14)


def test_conj_of_variable():
    np.testing.assert_allclose(jet_conj(BiJet.variable(0.0, 2)).coeffs, BiJet.conj_variable(0.0, 2).coeffs)


@given(st.integers(0, 10_000))
def test_conj_involution(seed):
    a = random_jet(seed)
    np.testing.assert_array_equal(jet_conj(jet_conj(a)).coeffs, a.coeffs)


def test_conj_of_real_symmetric_jet():
    c = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 0.0], [3.0, 0.0, 0.0]])
    a = BiJet(c, 0.0)
    np.testing.assert_array_equal(jet_conj(a).coeffs, a.coeffs)


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_conj_is_multiplicative(s1, s2):
    a, b = random_jet(s1), random_jet(s2)
    np.testing.assert_allclose(jet_conj(a * b).coeffs, (jet_conj(a) * jet_conj(b)).coeffs, atol=1e-12)


# -- complex powers ----------------------------------------------------------


def test_power_at_one():
    s = np.exp(1j * np.pi / 3)
    j = jet_pow_complex(BiJet.variable(1.0, 2), s)
    assert abs(j.value - 1) < 1e-15
    assert abs(j.coeff(1, 0) - s) < 1e-15


def test_integer_power_matches_product():
    a = BiJet.constant(1.0, 0.3, 3) + BiJet.variable(0.3, 3)
    np.testing.assert_allclose(jet_pow_complex(a, 2).coeffs, (a * a).coeffs, atol=1e-14)


def test_power_on_branch_cut():
    with pytest.raises(BranchCut):
        jet_pow_complex(BiJet.constant(-1.0, 0.0, 2), 0.5)


@given(st.integers(0, 10_000))
def test_log_exp_round_trip(seed):
    a = random_jet(seed)
    if a.value.real <= 0:
        a = a + 10.0
    np.testing.assert_allclose(a.log().exp().coeffs, a.coeffs, atol=1e-11 * np.abs(a.coeffs).max())
