"""Self-verification suite: one check per acceptance criterion.

Each check returns a :class:`CriterionResult` carrying the worst measured
deviation next to its tolerance.  The suite is deterministic (fixed seeds).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import pi, sqrt
from typing import Callable

import numpy as np

from . import geometry, immersion, meron, model
from .jets import RationalFunction


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.number:2d} {self.title}: measured {self.measured:.3e} "
            f"(tol {self.tolerance:.1e}) {self.detail}".rstrip()
        )


def _points(n: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return scale * (rng.normal(size=n) + 1j * rng.normal(size=n))


def _grid(n: int = 20, lo: float = -2.0, hi: float = 2.0) -> np.ndarray:
    x = np.linspace(lo, hi, n)
    return (x[None, :] + 1j * x[:, None]).ravel()


def _result(number, title, worst, tol, detail="", ok=None) -> CriterionResult:
    passed = bool(worst < tol) if ok is None else bool(ok)
    return CriterionResult(number, title, passed, float(worst), float(tol), detail)


def c01_veronese_metric() -> CriterionResult:
    worst = 0.0
    for N in range(2, 7):
        z = _points(50, 100 + N)
        g12 = geometry.metric(model.tower(model.veronese_vector(N), 0, z, order=1)).g12
        worst = max(worst, float(np.abs(2 * g12 * (1 + np.abs(z) ** 2) ** 2 - (N - 1)).max()))
    return _result(1, "Veronese metric 2 g12 (1+|xi|^2)^2 = N-1", worst, 1e-9)


def c02_curvature() -> CriterionResult:
    worst = 0.0
    for N in range(2, 7):
        z = _points(20, 200 + N)
        K = geometry.gaussian_curvature(model.tower(model.veronese_vector(N), 0, z, order=3))
        worst = max(worst, float(np.abs(K - 4 / (N - 1)).max()))
    f = model.veronese_vector(3)
    z = _points(20, 210)
    worst = max(worst, float(np.abs(geometry.gaussian_curvature(model.tower(f, 0, z, order=3)) - 2).max()))
    worst = max(worst, float(np.abs(geometry.gaussian_curvature(model.tower(f, 1, z, order=4)) - 1).max()))
    return _result(2, "Gaussian curvature 4/(N-1), CP^2 holomorphic 2, mixed 1", worst, 1e-8)


def c03_vanishing_J() -> CriterionResult:
    worst = 0.0
    for N in range(2, 6):
        f = model.veronese_vector(N)
        z = _points(25, 300 + N)
        for k in range(N):
            J, Jb = model.j_invariants(model.tower(f, k, z, order=k + 1))
            worst = max(worst, float(np.abs(J).max()), float(np.abs(Jb).max()))
    return _result(3, "J = 0 for all tower members", worst, 1e-10)


def c04_euler_lagrange() -> CriterionResult:
    worst = 0.0
    for N in range(2, 6):
        f = model.veronese_vector(N)
        z = _points(25, 400 + N)
        for k in range(N):
            v = model.tower(f, k, z, order=k + 2)
            worst = max(worst, float(model.el_residual(model.projector_full(v)).max()))
            worst = max(worst, float(model.el_residual(model.projector_rank1(v)).max()))
    return _result(4, "Euler-Lagrange residual, full and rank-1 projectors", worst, 1e-10)


def _affine_residual(X: np.ndarray) -> np.ndarray:
    return (
        4 * (X[..., 0] ** 2 + X[..., 1] ** 2 + X[..., 2] ** 2)
        + 2 / sqrt(3) * X[..., 3]
        + X[..., 4] ** 2 + X[..., 5] ** 2 + X[..., 6] ** 2 + X[..., 7] ** 2
    )


def c05_affine_sphere() -> CriterionResult:
    z = _grid()
    X = immersion.cp2_radius_holomorphic(sqrt(2) * z, z**2)
    # second route: calibrated su(3) coordinates of the closed-form immersion
    f = model.veronese_vector(3)
    Xcf = immersion.immersion_closed_form(model.projector_full(f.jet(z, 0)))
    Y = immersion.to_cp2_frame(immersion.sun_coordinates(Xcf) - immersion.cp2_origin_coordinates())
    worst = max(float(np.abs(_affine_residual(X)).max()), float(np.abs(_affine_residual(Y)).max()))
    agree = float(np.abs(X - Y).max())
    return _result(5, "affine sphere residual (holomorphic CP^2)", worst, 1e-12,
                   f"formula vs calibrated closed form {agree:.1e}", ok=worst < 1e-12 and agree < 1e-12)


def c06_ellipsoid() -> CriterionResult:
    f = model.veronese_vector(3)
    z = _grid()
    z = z[np.abs(z) > 1e-12]
    # 8 panels per path piece already converge to rounding; the refinement
    # certificate inside cp2_radius_mixed still guards the result
    X = immersion.cp2_radius_mixed(f, z, segments=8)
    ell = X[:, 0] ** 2 + X[:, 1] ** 2 + (sqrt(2) * X[:, 2] - 1 / sqrt(2)) ** 2 - 0.5
    rel = [
        np.abs(X[:, 5]), np.abs(X[:, 7]),
        np.abs(X[:, 0] + X[:, 6]), np.abs(X[:, 1] - X[:, 4]),
        np.abs(X[:, 3] - sqrt(3) * X[:, 2]),
    ]
    worst = max(float(np.abs(ell).max()), max(float(r.max()) for r in rel))
    return _result(6, "mixed CP^2 ellipsoid and coordinate relations", worst, 1e-7)


def c07_charge() -> CriterionResult:
    f = model.veronese_vector(3)
    r0 = model.charge_and_action(f, 0)
    r1 = model.charge_and_action(f, 1)
    worst = max(abs(r0.Q - 1), abs(r1.Q - 2), abs(r0.action_energy - 2 * pi))
    return _result(7, "topological charge Q=1, Q=2, action 2 pi", worst, 1e-6,
                   f"Q0={r0.Q:.9f} Q1={r1.Q:.9f} S0={r0.action_energy:.9f}")


def c08_line_integral() -> CriterionResult:
    f = model.veronese_vector(3)
    ends = _points(10, 800)
    x0 = immersion.immersion_closed_form(model.projector_full(f.jet(0.0, 0)))
    worst = 0.0
    for e in ends:
        xi = immersion.immersion_line_integral(f, 0, 0.0, e)
        xc = immersion.immersion_closed_form(model.projector_full(f.jet(e, 0))) - x0
        worst = max(worst, float(np.abs(xi - xc).max()))
    paths = [[0, 1 + 1j], [0, 1, 1 + 1j], [0, 1j, 1 + 1j], [0, -0.5 + 0.7j, 1.3 + 0.2j, 1 + 1j]]
    for k in (0, 1):
        vals = [immersion.immersion_path_integral(f, k, p) for p in paths]
        worst = max(worst, max(float(np.abs(v - vals[0]).max()) for v in vals[1:]))
    return _result(8, "closed form vs line integral; path independence", worst, 1e-8)


def c09_kml() -> CriterionResult:
    worst = 0.0
    for N in (3, 4):
        f = model.veronese_vector(N)
        z = _points(25, 900 + N)
        for k in range(N):
            p = model.projector_full(model.tower(f, k, z, order=k + 2))
            km = immersion.k_matrices(p)
            dbp = p.d_xibar().value
            worst = max(worst, float(np.abs(km.K - km.M - km.L).max()))
            worst = max(worst, float(np.abs(km.M - km.L - dbp).max()))
            rm, rl = immersion.ml_conservation_residuals(p)
            worst = max(worst, float(rm.max()), float(rl.max()))
            if k == 0:
                worst = max(worst, float(np.abs(km.K - dbp).max()))
    return _result(9, "K = M + L, M - L = dbar P, conservation, K = dbar P (holomorphic)", worst, 1e-10)


def c10_mean_curvature() -> CriterionResult:
    f = model.veronese_vector(3)
    H0 = geometry.mean_curvature(f, 0, 0.0, epsilon=-1)
    worst = float(np.abs(H0 - 4j * np.diag([-1.0, 1.0, 0.0])).max())
    z = _points(25, 1000)
    for k in range(3):
        H = geometry.mean_curvature(f, k, z)
        worst = max(worst, float(np.abs(np.trace(H, axis1=-2, axis2=-1)).max()))
    return _result(10, "H(0) = 4i diag(-1,1,0); tr H = 0", worst, 1e-10)


def c11_tower() -> CriterionResult:
    f = model.veronese_vector(3)
    z = _points(25, 1100)
    v = f.jet(z, 4)
    vs = [v]
    for _ in range(3):
        vs.append(model.p_plus_apply(vs[-1]))
    worst = float(np.abs(vs[3].value).max())
    vals = [x.truncate(0).value for x in vs[:3]]
    for i in range(3):
        for j in range(3):
            if i != j:
                ip = np.sum(np.conj(vals[i]) * vals[j], axis=-1)
                worst = max(worst, float(np.abs(ip).max()))
    return _result(11, "P+^3 f = 0 and tower orthogonality", worst, 1e-10)


def c12_discrepancy() -> CriterionResult:
    f = model.veronese_vector(3)
    z = _grid(9)
    full = immersion.immersion_from_anchor(f, 1, z, anchor=1.0)
    X = immersion.to_cp2_frame(immersion.sun_coordinates(full))
    Y = immersion.sun_coordinates(immersion.projector_surface(f, 1, z))
    rx, ry = immersion.coordinate_rank(X), immersion.coordinate_rank(Y)
    gx, gy = immersion.gram_spectrum(X), immersion.gram_spectrum(Y)
    gap = float(np.abs(gx - gy).max() / max(gx.max(), gy.max()))
    ok = rx == 3 and ry == 5 and gap > 1e-3
    return _result(12, "coordinate ranks 3 vs 5, Gram spectra differ", gap, 1e-3,
                   f"ranks {rx} and {ry}; spectrum gap must exceed tol", ok=ok)


def c13_meron() -> CriterionResult:
    F = RationalFunction.polynomial([0.0, -1.0, 1.0])
    z = _points(20, 1300) + 0.3
    checks: dict[str, float] = {}
    bad = []
    for branch in (1, -1):
        spec = meron.MeronSpec(F, 0.7 + 0.4j, branch)
        w = meron.meron_jets(spec, z, 2)
        checks[f"|w|-1 b{branch}"] = float(np.abs(np.abs(w.value) - 1).max())
        checks[f"residual b{branch}"] = float(model.cpn_residual(w).max())
        X = meron.meron_radius(spec, z)
        for a, b in ((0, 1), (4, 6), (5, 7)):
            checks[f"X{a+1}^2+X{b+1}^2 b{branch}"] = float(np.abs(X[:, a] ** 2 + X[:, b] ** 2 - 1 / 27).max())
        checks[f"curvature b{branch}"] = float(np.abs(meron.meron_curvature(spec, z)).max())
    off = meron.MeronSpec(F, 0.7 + 0.4j, 1, psi=pi / 4)
    off_res = float(model.cpn_residual(meron.meron_jets(off, z, 2)).min())
    if not off_res > 1e-3:
        bad.append("psi=pi/4 residual too small")
    tol = {"|w|": 1e-12, "residual": 1e-9, "X": 1e-10, "curvature": 1e-9}
    for name, val in checks.items():
        limit = next(v for k, v in tol.items() if name.startswith(k))
        if not val < limit:
            bad.append(f"{name}={val:.1e}")
    rep = meron.quad_diff_report(F)
    residues = sorted([r.real for _, r in rep.finite_poles] + [rep.residue_at_infinity.real])
    if residues != [-2.0, 1.0, 1.0]:
        bad.append(f"residues {residues}")
    per = sorted(c.perimeter for c in rep.cylinders)
    per_err = float(np.abs(np.array(per) - np.array([2 * pi, 2 * pi, 4 * pi])).max()) if len(per) == 3 else 1.0
    if not per_err < 1e-12:
        bad.append(f"perimeters {per}")
    traj = meron.trace_trajectory(RationalFunction.polynomial([0.0, 1.0]), 1.0)
    if not (traj.closed and traj.period_error < 1e-6):
        bad.append(f"circle closed={traj.closed} period_error={traj.period_error:.1e}")
    worst = max(list(checks.values()) + [per_err, traj.period_error if traj.closed else 1.0])
    detail = "; ".join(bad) if bad else f"psi=pi/4 residual {off_res:.2f}, period_error {traj.period_error:.1e}"
    return _result(13, "meron suite", worst, 1e-9, detail, ok=not bad)


def c14_notes() -> CriterionResult:
    return CriterionResult(14, "qualitative cylinder picture (covered by 13, no assertion)", True, 0.0, 0.0)


CRITERIA: list[Callable[[], CriterionResult]] = [
    c01_veronese_metric,
    c02_curvature,
    c03_vanishing_J,
    c04_euler_lagrange,
    c05_affine_sphere,
    c06_ellipsoid,
    c07_charge,
    c08_line_integral,
    c09_kml,
    c10_mean_curvature,
    c11_tower,
    c12_discrepancy,
    c13_meron,
    c14_notes,
]


def run_criterion(check: Callable[[], CriterionResult]) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        res = check()
    except Exception as exc:  # a crash is a failure, reported not raised
        number = CRITERIA.index(check) + 1 if check in CRITERIA else 0
        res = CriterionResult(number, check.__name__, False, float("nan"), float("nan"),
                              f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_all() -> list[CriterionResult]:
    return [run_criterion(c) for c in CRITERIA]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines)
