import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_points
from sigmasurf.errors import InvalidDimension, NullVector, TowerDepthExceeded
from sigmasurf.jets import BiJet, RationalFunction
from sigmasurf.model import (
    HolomorphicVectorSpec,
    charge_and_action,
    covariant_data,
    el_residual,
    j_invariants,
    metric_density,
    norm2,
    p_minus_apply,
    p_plus_apply,
    projector_full,
    projector_rank1,
    tower,
    tower_all,
    vector_from_values,
    veronese_vector,
)

S2 = np.sqrt(2.0)
F3 = veronese_vector(3)


def nonharmonic(base=1.0, order=3):
    """The vector ``(1, xi + 2 xibar, 0)``, not a sigma-model solution."""
    x, xb = BiJet.variable(base, order), BiJet.conj_variable(base, order)
    one = BiJet.constant(1.0, base, order)
    return BiJet.stack([one, x + 2.0 * xb, one * 0.0])


def random_polynomial_spec(seed, N, degree=None):
    r = np.random.default_rng(seed)
    degree = N if degree is None else degree
    return HolomorphicVectorSpec(
        tuple(RationalFunction.polynomial(r.normal(size=degree) + 1j * r.normal(size=degree)) for _ in range(N))
    )


# -- Veronese ---------------------------------------------------------------


@pytest.mark.parametrize(
    "N, coeffs",
    [
        (2, [1, 1]),
        (3, [1, S2, 1]),
        (4, [1, np.sqrt(3), np.sqrt(3), 1]),
    ],
)
def test_veronese_components(N, coeffs):
    f = veronese_vector(N)
    for r, (comp, c) in enumerate(zip(f.components, coeffs)):
        expected = np.zeros(r + 1, complex)
        expected[r] = c
        np.testing.assert_allclose(comp.num, expected, atol=1e-15)


def test_veronese_needs_two_components():
    with pytest.raises(InvalidDimension):
        veronese_vector(1)


# -- P+ and the tower ---------------------------------------------------------


def test_p_plus_on_constant_vector():
    v = vector_from_values([1.0, 2.0 - 1j, 0.5], order=2)
    assert np.abs(p_plus_apply(v).coeffs).max() == 0


def test_p_plus_veronese_at_one_direction():
    w = p_plus_apply(F3.jet(1.0, 2)).value
    target = np.array([-S2, 0.0, S2])
    assert np.linalg.matrix_rank(np.stack([w, target]), tol=1e-12) == 1


def test_p_plus_veronese_closed_form(rng):
    # P+ f = sqrt(2)/(1+|xi|^2) (-sqrt(2) xibar, 1 - |xi|^2, sqrt(2) xi)
    for xi in random_points(rng, 10):
        w = p_plus_apply(F3.jet(xi, 2)).value
        r = abs(xi) ** 2
        target = S2 / (1 + r) * np.array([-S2 * np.conj(xi), 1 - r, S2 * xi])
        np.testing.assert_allclose(w, target, atol=1e-13)


def test_tower_at_i_direction():
    w = tower(F3, 1, 1j, order=2).value
    target = np.array([-S2 * (-1j), 0.0, S2 * 1j])
    assert abs(np.vdot(target, w)) / (np.linalg.norm(w) * np.linalg.norm(target)) == pytest.approx(1.0, abs=1e-12)


def test_third_application_vanishes():
    v = F3.jet(0.4 - 0.3j, 4)
    for _ in range(3):
        v = p_plus_apply(v)
    assert np.abs(v.value).max() < 1e-12


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_tower_nilpotent(N, rng):
    f = veronese_vector(N)
    v = f.jet(random_points(rng, 4), N + 1)
    for _ in range(N):
        v = p_plus_apply(v)
    assert np.abs(v.value).max() < 1e-10


def test_tower_k0_is_f():
    np.testing.assert_array_equal(tower(F3, 0, 0.3j, 3).coeffs, F3.jet(0.3j, 3).coeffs)


def test_tower_depth_checked():
    with pytest.raises(TowerDepthExceeded):
        tower(F3, 3, 0.0)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_tower_orthogonality(N, rng):
    f = random_polynomial_spec(N, N)
    vs = tower_all(f, random_points(rng, 25, 0.7), N + 1)
    for i in range(N):
        for j in range(i + 1, N):
            ip = np.einsum("...i,...i->...", np.conj(vs[i].value), vs[j].value)
            assert np.abs(ip).max() < 1e-10


def test_p_minus_mirrors_p_plus(rng):
    for xi in random_points(rng, 5):
        v = F3.jet(xi, 3)
        a = p_plus_apply(v).value
        b = p_minus_apply(v.conj()).value
        np.testing.assert_allclose(b, np.conj(a), atol=1e-13)


# -- projectors ------------------------------------------------------------


def test_full_projector_at_origin():
    np.testing.assert_allclose(projector_full(F3.jet(0.0, 2)).value, np.diag([0, 1, 1]), atol=1e-15)


def test_rank1_projector_of_v1_at_origin():
    np.testing.assert_allclose(projector_rank1(tower(F3, 1, 0.0, 3)).value, np.diag([0, 1, 0]), atol=1e-15)


def test_rank1_of_constant_vector():
    p = projector_rank1(vector_from_values([1.0, 0.0, 0.0], base=0.5, order=2))
    np.testing.assert_allclose(p.value, np.diag([1, 0, 0]))
    assert np.abs(p.d_xi().coeffs).max() == 0


@given(st.integers(0, 10_000))
def test_projectors_idempotent(seed):
    r = np.random.default_rng(seed)
    v = vector_from_values(r.normal(size=4) + 1j * r.normal(size=4), order=1)
    for p in (projector_full(v).value, projector_rank1(v).value):
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, p.conj().T, atol=1e-15)
    assert np.trace(projector_full(v).value).real == pytest.approx(3.0)


def test_full_projector_trace_cp2(rng):
    p = projector_full(F3.jet(random_points(rng, 10), 1)).value
    np.testing.assert_allclose(np.trace(p, axis1=-2, axis2=-1), 2.0, atol=1e-13)


def test_null_vector_rejected():
    with pytest.raises(NullVector):
        projector_full(vector_from_values([0.0, 0.0], order=1))


# -- Euler-Lagrange, J, covariant data ------------------------------------------


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_el_residual_vanishes_on_tower(N, rng):
    f = random_polynomial_spec(10 + N, N)
    z = random_points(rng, 5, 0.6)
    for k in range(N):
        v = tower(f, k, z, order=k + 2)
        assert el_residual(projector_full(v)).max() < 1e-10
        assert el_residual(projector_rank1(v)).max() < 1e-10


def test_el_residual_nonharmonic():
    assert el_residual(projector_full(nonharmonic())) > 1e-3


@pytest.mark.parametrize("k", [0, 1, 2])
def test_j_vanishes_on_cp2_tower(k, rng):
    J, Jb = j_invariants(tower(F3, k, random_points(rng, 10), order=k + 1))
    assert np.abs(J).max() < 1e-12 and np.abs(Jb).max() < 1e-12


def test_j_nonharmonic():
    J, _ = j_invariants(nonharmonic())
    assert abs(J) > 1e-3


def test_covariant_data_constant_vector():
    A, Dz = covariant_data(vector_from_values([1.0, 0.0, 0.0], order=1))
    assert abs(A) == 0 and np.abs(Dz).max() == 0


@given(st.integers(0, 10_000))
def test_covariant_data_properties(seed):
    f = random_polynomial_spec(seed, 3)
    r = np.random.default_rng(seed)
    v = f.jet(complex(*r.normal(size=2)) * 0.5, 2)
    A, Dz = covariant_data(v)
    z = v.value / np.sqrt(norm2(v).value.real)
    assert abs(np.vdot(z, Dz)) < 1e-12
    # in complex coordinates anti-Hermiticity reads A_xibar = -conj(A_xi),
    # so the gauge field along any real direction is pure imaginary
    zj = v / norm2(v).sqrt()[..., None]
    A_bar = (zj.truncate(1).conj() * zj.d_xibar()).sum(axis=-1).value
    assert abs(A_bar + np.conj(A)) < 1e-12
    assert abs((A + A_bar).real) < 1e-12


# -- metric density and charge --------------------------------------------------


@pytest.mark.parametrize("k, factor", [(0, 1.0), (1, 2.0)])
def test_metric_density_cp2(k, factor, rng):
    z = random_points(rng, 10)
    g = metric_density(tower(F3, k, z, order=k + 1)).value.real
    np.testing.assert_allclose(g, factor / (1 + np.abs(z) ** 2) ** 2, rtol=1e-12)


@pytest.mark.parametrize("k, Q", [(0, 1.0), (1, 2.0), (2, 1.0)])
def test_charge_cp2(k, Q):
    rep = charge_and_action(F3, k)
    assert rep.Q == pytest.approx(Q, abs=1e-6)
    assert rep.action_energy == pytest.approx(2 * np.pi * Q, abs=1e-6)
    assert rep.Q_refinement_error < 1e-8


@pytest.mark.parametrize("N", [2, 4, 5])
def test_charge_veronese(N):
    # int g12 = (N-1)/2 * int (1+|xi|^2)^-2 dx dy = (N-1) pi / 2
    assert charge_and_action(veronese_vector(N), 0).Q == pytest.approx((N - 1) / 2, abs=1e-6)


def test_charge_rejects_low_order():
    with pytest.raises(ValueError):
        charge_and_action(F3, 0, quad_order=4)
