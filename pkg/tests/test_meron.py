import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from conftest import random_points
from sigmasurf.errors import BranchCut, InputError, SeedAtCriticalPoint, ZeroOfF
from sigmasurf.geometry import metric
from sigmasurf.immersion import integrate_one_form, polyline, sun_coordinates, to_cp2_frame
from sigmasurf.jets import RationalFunction
from sigmasurf.meron import (
    MeronSpec,
    meron_curvature,
    meron_jets,
    meron_metric,
    meron_radius,
    meron_solution,
    meron_vector_jet,
    polynomial_roots,
    quad_diff_report,
    trace_trajectory,
    winding_number,
)
from sigmasurf.model import commutator, cpn_residual, projector_full

F_XI = RationalFunction.polynomial([0, 1])
F_QUAD = RationalFunction.polynomial([0, -1, 1])  # xi (xi - 1)


def off_cut_points(F, rng, n):
    z = random_points(rng, 3 * n) + 0.5
    keep = [x for x in z if abs(F(x)) > 1e-2 and not (abs(F(x).imag) < 1e-3 and F(x).real < 0)]
    return np.array(keep[:n])


# -- solutions ----------------------------------------------------------------


@pytest.mark.parametrize("branch", [1, -1])
def test_unit_modulus(branch, rng):
    spec = MeronSpec(F_QUAD, 0.7 + 0.4j, branch)
    w1, w2 = meron_solution(spec, off_cut_points(F_QUAD, rng, 20))
    np.testing.assert_allclose(np.abs(w1), 1, atol=1e-12)
    np.testing.assert_allclose(np.abs(w2), 1, atol=1e-12)


def test_real_positive_F_gives_w1_one():
    w1, _ = meron_solution(MeronSpec(F_XI), 2.0)
    assert w1 == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("branch", [1, -1])
def test_cp2_equations_hold(branch, rng):
    spec = MeronSpec(F_QUAD, 0.7 + 0.4j, branch)
    w = meron_jets(spec, off_cut_points(F_QUAD, rng, 20), 2)
    assert cpn_residual(w).max() < 1e-9


def test_cp2_equations_fail_off_resonance(rng):
    spec = MeronSpec(F_QUAD, 0.7 + 0.4j, psi=np.pi / 4)
    w = meron_jets(spec, off_cut_points(F_QUAD, rng, 5), 2)
    assert cpn_residual(w).min() > 1e-3


def test_zero_and_cut_rejected():
    with pytest.raises(ZeroOfF):
        meron_solution(MeronSpec(F_QUAD), 1.0)
    with pytest.raises(BranchCut):
        meron_solution(MeronSpec(F_XI), -2.0)


@pytest.mark.parametrize("kwargs", [{"c": 0}, {"branch": 2}])
def test_spec_validation(kwargs):
    with pytest.raises(InputError):
        MeronSpec(F_XI, **kwargs)


def test_spec_json_round_trip():
    spec = MeronSpec(F_QUAD, 0.3 - 2j, -1)
    assert MeronSpec.from_json(spec.to_json()) == spec


# -- radius vector ----------------------------------------------------------------


def test_radius_matches_table(rng):
    spec = MeronSpec(F_QUAD, 0.7 + 0.4j, 1)
    z = off_cut_points(F_QUAD, rng, 20)
    np.testing.assert_allclose(meron_radius(spec, z), O.meron_radius_table(F_QUAD(z), spec.c).real, atol=1e-13)


@pytest.mark.parametrize("branch", [1, -1])
def test_radius_circle_relations(branch, rng):
    X = meron_radius(MeronSpec(F_QUAD, 0.7 + 0.4j, branch), off_cut_points(F_QUAD, rng, 20))
    for a, b in [(0, 1), (4, 6), (5, 7)]:
        np.testing.assert_allclose(X[:, a] ** 2 + X[:, b] ** 2, 1 / 27, atol=1e-10)


def test_radius_at_one_for_linear_F():
    X = meron_radius(MeronSpec(F_XI), 1.0)
    assert X[4] == pytest.approx(-1 / (3 * np.sqrt(3)), abs=1e-15)
    assert abs(X[6]) < 1e-15


def test_radius_only_for_resonant_angles():
    with pytest.raises(InputError):
        meron_radius(MeronSpec(F_XI, psi=np.pi / 4), 1.0)


@pytest.mark.parametrize("branch", [1, -1])
def test_radius_is_weierstrass_integral(branch):
    spec = MeronSpec(F_QUAD, 0.7 + 0.4j, branch)

    def form(z):
        p = projector_full(meron_vector_jet(spec, z, 1))
        dp, dbp, q = p.d_xi(), p.d_xibar(), p.truncate(0)
        return (-1j * commutator(dp, q)).value, (1j * commutator(dbp, q)).value

    a, b = 2 + 1j, 1.5 + 0.6j
    val, _ = integrate_one_form(form, polyline([a, b]))
    diff = to_cp2_frame(sun_coordinates(val))
    np.testing.assert_allclose(diff, meron_radius(spec, b) - meron_radius(spec, a), atol=1e-9)


# -- metric -------------------------------------------------------------------------


def test_metric_linear_F():
    assert meron_metric(MeronSpec(F_XI), 1.0).g12 == pytest.approx(1 / 3, abs=1e-15)
    z = 0.4 + 1.1j
    assert meron_metric(MeronSpec(F_XI), z).g12 == pytest.approx(1 / (3 * abs(z) ** 2), rel=1e-14)


@pytest.mark.parametrize("branch", [1, -1])
def test_metric_flat_and_consistent(branch, rng):
    spec = MeronSpec(F_QUAD, 0.7 + 0.4j, branch)
    z = off_cut_points(F_QUAD, rng, 50)
    assert np.abs(meron_curvature(spec, z)).max() < 1e-9
    g = metric(meron_vector_jet(spec, z, 1)).g12
    np.testing.assert_allclose(g, meron_metric(spec, z).g12, rtol=1e-9)


# -- roots and residues --------------------------------------------------------------


def test_report_quadratic():
    rep = quad_diff_report(F_QUAD)
    poles = sorted(rep.finite_poles, key=lambda p: p[0].real)
    assert [z for z, _ in poles] == pytest.approx([0, 1], abs=1e-14)
    assert [r for _, r in poles] == [1, 1]
    assert rep.residue_at_infinity == -2
    assert sorted(c.perimeter for c in rep.cylinders) == pytest.approx([2 * np.pi, 2 * np.pi, 4 * np.pi], abs=1e-12)
    assert rep.zeros == pytest.approx([0.5], abs=1e-12)


def test_report_linear():
    rep = quad_diff_report(F_XI)
    assert len(rep.finite_poles) == 1
    z, r = rep.finite_poles[0]
    assert abs(z) < 1e-15 and r == 1
    assert rep.residue_at_infinity == -1


def test_report_rational():
    # F = xi^2 (xi - 1) / (1 + xi^3)
    rep = quad_diff_report(RationalFunction((0, 0, -1, 1), (1, 0, 0, 1)))
    res = {round(z.real, 6) + 1j * round(z.imag, 6): r for z, r in rep.finite_poles}
    assert res[0j] == 2 and res[1 + 0j] == 1
    assert sum(1 for r in res.values() if r == -1) == 3
    assert rep.residue_at_infinity == 0


@given(st.integers(0, 10_000))
def test_residue_sum_vanishes(seed):
    r = np.random.default_rng(seed)
    F = RationalFunction.polynomial(r.normal(size=4) + 1j * r.normal(size=4))
    assert abs(quad_diff_report(F).residue_sum()) < 1e-12


def test_multiple_root():
    roots = polynomial_roots(np.polynomial.polynomial.polyfromroots([0.5, 0.5, 0.5, 2.0]))
    assert sorted((round(z.real, 6), m) for z, m in roots) == [(0.5, 3), (2.0, 1)]


def test_near_coincident_roots():
    # below sqrt(eps) a pair is indistinguishable from an exact double root
    merged = polynomial_roots(np.polynomial.polynomial.polyfromroots([1.0, 1.0 + 1e-10]))
    assert [m for _, m in merged] == [2]
    split = polynomial_roots(np.polynomial.polynomial.polyfromroots([1.0, 1.0 + 1e-5]))
    assert sorted(z.real for z, _ in split) == pytest.approx([1.0, 1.0 + 1e-5], abs=1e-11)


# -- trajectories -----------------------------------------------------------------


def test_circle_closes():
    tr = trace_trajectory(F_XI, 1.0)
    assert tr.closed and tr.period_error < 1e-6
    np.testing.assert_allclose(np.abs(tr.points), 1.0, atol=1e-9)
    assert tr.perimeter == pytest.approx(2 * np.pi, abs=1e-4)


def test_loop_around_single_pole():
    tr = trace_trajectory(F_QUAD, 0.1)
    assert tr.closed
    assert winding_number(tr.points, 0.0) != 0
    assert winding_number(tr.points, 1.0) == 0
    assert tr.perimeter == pytest.approx(2 * np.pi, abs=1e-4)
    assert tr.max_drift < 1e-6


def test_loop_around_both_poles():
    tr = trace_trajectory(F_QUAD, 2.0)
    assert tr.closed
    assert abs(winding_number(tr.points, 0.0)) == 1 and abs(winding_number(tr.points, 1.0)) == 1
    assert tr.perimeter == pytest.approx(4 * np.pi, abs=1e-4)


def test_trajectory_invariant():
    tr = trace_trajectory(F_QUAD, 0.3 + 0.2j)
    lnF = np.log(np.abs(F_QUAD(tr.points)))
    assert np.ptp(lnF) < 1e-6


def test_seed_at_critical_point():
    with pytest.raises(SeedAtCriticalPoint):
        trace_trajectory(F_QUAD, 0.5)


def test_trajectory_deterministic():
    a = trace_trajectory(F_QUAD, 0.1, max_steps=500)
    b = trace_trajectory(F_QUAD, 0.1, max_steps=500)
    np.testing.assert_array_equal(a.points, b.points)
    assert a.stop_reason == "max_steps"
