"""Scale-invariant (meron) CP^2 solutions and the trajectory structure of ``(F'/F) dxi``.

For ``sigma = exp(i psi)`` with ``psi = +-pi/3``

    w1 = F / conj(F),    w2 = (c / conj(c)) F**sigma / conj(F)**conj(sigma),

both of unit modulus.  The induced metric ``(2/3) |F'/F|^2 dxi dxibar`` is flat,
and its trajectories are the curves along which ``Re((F'/F) dxi) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import cmath
from math import log, pi, sqrt
from typing import Sequence

import numpy as np

from .errors import (
    BranchCut,
    ClusteredRoots,
    InputError,
    RootFindingFailure,
    SeedAtCriticalPoint,
    StepTooLarge,
    ZeroOfF,
)
from .geometry import MetricSample, curvature_of_density
from .jets import BiJet, RationalFunction, jet_from_rational

SQRT3 = sqrt(3.0)
ZERO_TOL = 1e-14
CLUSTER_TOL = 1e-8
# a centroid counts as an exact multiple root when every lower derivative
# vanishes to this relative accuracy
MULTIPLE_ROOT_TOL = 1e-12
DRIFT_LIMIT = 1e-4


@dataclass(frozen=True)
class MeronSpec:
    F: RationalFunction
    c: complex = 1.0 + 0j
    branch: int = 1
    psi: float | None = None  # overrides branch; only meaningful for checks

    def __post_init__(self):
        if self.F.is_zero():
            raise InputError("F must not be identically zero")
        if self.c == 0:
            raise InputError("c must be nonzero")
        if self.branch not in (1, -1):
            raise InputError("branch must be +1 or -1")
        object.__setattr__(self, "c", complex(self.c))

    @property
    def angle(self) -> float:
        return self.branch * pi / 3 if self.psi is None else float(self.psi)

    @property
    def sigma(self) -> complex:
        return complex(np.exp(1j * self.angle))

    def to_json(self) -> dict:
        return {"F": self.F.to_json(), "c": [self.c.real, self.c.imag], "branch": self.branch}

    @classmethod
    def from_json(cls, obj: dict) -> "MeronSpec":
        try:
            F = RationalFunction.from_json(obj["F"])
            c = obj.get("c", [1.0, 0.0])
            return cls(F, complex(float(c[0]), float(c[1])), int(obj.get("branch", 1)))
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"malformed meron block: {exc}") from None


def _check_F(values: np.ndarray, scale: float = 1.0) -> None:
    if np.any(np.abs(values) <= ZERO_TOL * scale):
        raise ZeroOfF("F vanishes (or has a pole) at the evaluation point")
    if np.any((values.imag == 0) & (values.real < 0)):
        raise BranchCut("F is on the negative real axis (principal branch cut)")


def _F_values(spec: MeronSpec, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    den = np.polynomial.polynomial.polyval(xi, spec.F.den)
    if np.any(np.abs(den) <= ZERO_TOL):
        raise ZeroOfF("pole of F at the evaluation point")
    F = spec.F(xi)
    _check_F(F)
    return F


def meron_jets(spec: MeronSpec, xi, order: int) -> BiJet:
    """Jet of ``(w1, w2)``, entry shape ``(..., 2)``."""
    _F_values(spec, xi)
    F = jet_from_rational(spec.F, xi, order)
    Fb = F.conj()
    sigma = spec.sigma
    w1 = F / Fb
    w2 = F.power(sigma) / Fb.power(np.conj(sigma)) * (spec.c / np.conj(spec.c))
    return BiJet.stack([w1, w2], axis=-1)


def meron_vector_jet(spec: MeronSpec, xi, order: int) -> BiJet:
    """``(1, w1, w2)`` as a vector jet."""
    w = meron_jets(spec, xi, order)
    one = BiJet.constant(np.ones(w.shape[:-1]), w.base, order)
    return BiJet.stack([one, w[..., 0], w[..., 1]], axis=-1)


def meron_solution(spec: MeronSpec, xi) -> tuple[np.ndarray | complex, np.ndarray | complex]:
    F = _F_values(spec, xi)
    Fb = np.conj(F)
    s = spec.sigma
    w1 = F / Fb
    w2 = (spec.c / np.conj(spec.c)) * F**s / Fb ** np.conj(s)
    if np.ndim(w1) == 0:
        return complex(w1), complex(w2)
    return w1, w2


def meron_radius(spec: MeronSpec, xi) -> np.ndarray:
    """Closed-form X1..X8, shape ``(..., 8)``.

    ``ln F`` is principal; the components are continuous off the cut.  The
    displayed formula holds for ``psi = pi/3``; on the ``psi = -pi/3`` branch
    every component except X3 changes sign so that differences keep matching
    the Weierstrass integral of ``(1, w1, w2)``.
    """
    if abs(abs(spec.angle) - pi / 3) > 1e-12:
        raise InputError("closed-form radius vector exists only for psi = +-pi/3")
    F = _F_values(spec, xi)
    Fb = np.conj(F)
    s, sb = spec.sigma, np.conj(spec.sigma)
    c, cb = spec.c, np.conj(spec.c)
    aF = np.abs(F)
    pre = aF ** (-2 * s) / (6 * SQRT3 * abs(c) ** 2)
    e = aF ** (4j * s.imag)
    lnF, lnFb = np.log(F), np.log(Fb)
    X = [
        1j * pre * (cb**2 * F - c**2 * Fb * e),
        -pre * (cb**2 * F + c**2 * Fb * e),
        (sb * lnF + s * lnFb) / 3,
        -(1j * sb * lnF - 1j * s * lnFb) / 3,
        -(F**2 + Fb**2) / (6 * SQRT3 * aF**2),
        pre * (cb**2 * Fb + c**2 * F * e),
        1j * (F**2 - Fb**2) / (6 * SQRT3 * aF**2),
        1j * pre * (cb**2 * Fb - c**2 * F * e),
    ]
    out = np.stack([np.real(x) for x in X], axis=-1)
    if spec.angle < 0:
        out = out * _NEGATIVE_BRANCH_SIGNS
    return out


_NEGATIVE_BRANCH_SIGNS = np.array([-1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0])


def _log_derivative_jet(F: RationalFunction, xi, order: int) -> BiJet:
    L = F.logarithmic_derivative()
    return jet_from_rational(L, xi, order)


def meron_metric_jet(spec: MeronSpec, xi, order: int = 2) -> BiJet:
    """``g12 = |F'/F|^2 / 3`` as a jet."""
    _F_values(spec, xi)
    L = _log_derivative_jet(spec.F, xi, order)
    return L * L.conj() * (1.0 / 3.0)


def meron_metric(spec: MeronSpec, xi) -> MetricSample:
    g = meron_metric_jet(spec, xi, 0).value.real
    g = g.item() if np.ndim(g) == 0 else g
    return MetricSample(0j, g, 0j)


def meron_curvature(spec: MeronSpec, xi) -> np.ndarray | float:
    k = curvature_of_density(meron_metric_jet(spec, xi, 2))
    return k.item() if np.ndim(k) == 0 else k


# ---------------------------------------------------------------------------
# roots, residues, cylinders


def _poly_scale(coeffs: np.ndarray, z: complex) -> float:
    return float(np.sum(np.abs(coeffs) * np.abs(z) ** np.arange(len(coeffs)))) or 1.0


def _newton_polish(coeffs: np.ndarray, z: complex) -> complex:
    d = np.polynomial.polynomial.polyder(coeffs)
    p = np.polynomial.polynomial.polyval(z, coeffs)
    dp = np.polynomial.polynomial.polyval(z, d)
    if dp == 0:
        return z
    z1 = z - p / dp
    p1 = np.polynomial.polynomial.polyval(z1, coeffs)
    return z1 if abs(p1) <= abs(p) else z


def polynomial_roots(coeffs: Sequence[complex]) -> list[tuple[complex, int]]:
    """Distinct roots with multiplicities of an ascending-coefficient polynomial.

    Companion-matrix eigenvalues, one Newton polish each.  Nearby eigenvalues
    are merged only when the centroid of the unpolished group is an exact
    multiple root (all lower derivatives vanish there to working accuracy);
    otherwise two roots closer than ``CLUSTER_TOL`` raise
    :class:`ClusteredRoots`.  Roots much closer than ``sqrt(eps)`` cannot be
    told apart from an exact multiple root and are merged.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size == 0:
        raise InputError("zero polynomial has no isolated roots")
    out: list[tuple[complex, int]] = []
    # exact roots at the origin
    nz = 0
    while nz < c.size - 1 and c[nz] == 0:
        nz += 1
    if nz:
        out.append((0j, nz))
    c = c[nz:]
    if c.size <= 1:
        return out
    eig = np.linalg.eigvals(np.polynomial.polynomial.polycompanion(c))
    if not np.all(np.isfinite(eig)):
        raise RootFindingFailure("companion eigenvalues are not finite")
    scale = max(1.0, float(np.abs(eig).max()))
    # group eigenvalues that look like one perturbed multiple root
    # an m-fold root splits into eigenvalues ~ eps**(1/m) apart
    loose = 1e-3 * scale
    unused = list(range(len(eig)))
    while unused:
        i = unused.pop(0)
        group = [i]
        for j in list(unused):
            if any(abs(eig[j] - eig[g]) < loose for g in group):
                group.append(j)
                unused.remove(j)
        if len(group) == 1:
            out.append((complex(_newton_polish(c, eig[i])), 1))
            continue
        m = len(group)
        centre = complex(np.mean(eig[group]))
        derivs = [c]
        for _ in range(m - 1):
            derivs.append(np.polynomial.polynomial.polyder(derivs[-1]))
        exact = all(
            abs(np.polynomial.polynomial.polyval(centre, d)) <= MULTIPLE_ROOT_TOL * _poly_scale(np.abs(d), centre)
            for d in derivs
        )
        if exact:
            out.append((centre, m))
            continue
        # Newton is only trusted away from multiple roots
        pts = np.array([_newton_polish(c, z) for z in eig[group]])
        sep = min(abs(a - b) for k, a in enumerate(pts) for b in pts[k + 1:])
        if sep < CLUSTER_TOL * scale:
            raise ClusteredRoots(f"roots closer than {CLUSTER_TOL:g} near {centre}")
        out.extend((complex(z), 1) for z in pts)
    for z, _ in out:
        if abs(np.polynomial.polynomial.polyval(z, c)) > 1e-6 * _poly_scale(c, z) and z != 0:
            raise RootFindingFailure(f"root {z} does not satisfy the polynomial")
    return out


@dataclass
class Cylinder:
    pole: complex | None  # None is the point at infinity
    residue: complex
    perimeter: float


@dataclass
class QuadDiffReport:
    finite_poles: list[tuple[complex, complex]]
    residue_at_infinity: complex
    zeros: list[complex]
    cylinders: list[Cylinder]

    def residue_sum(self) -> complex:
        return sum((r for _, r in self.finite_poles), 0j) + self.residue_at_infinity


def _merge(points: list[tuple[complex, int]], tol: float) -> list[tuple[complex, int]]:
    merged: list[list] = []
    for z, m in points:
        for entry in merged:
            if abs(entry[0] - z) < tol * max(1.0, abs(z)):
                entry[1] += m
                break
        else:
            merged.append([z, m])
    return [(z, m) for z, m in merged if m != 0]


def quad_diff_report(F: RationalFunction) -> QuadDiffReport:
    """Poles (with residues), zeros and cylinders of ``(F'/F) dxi``."""
    if F.is_zero():
        raise InputError("F must not be identically zero")
    num, den = F.num, F.den
    zeros_F = polynomial_roots(num) if num.size > 1 else []
    poles_F = polynomial_roots(den) if den.size > 1 else []
    signed = [(z, m) for z, m in zeros_F] + [(z, -m) for z, m in poles_F]
    poles = _merge(signed, 1e-9)
    deg = (num.size - 1) - (den.size - 1)
    res_inf = complex(-deg)
    finite = [(complex(z), complex(m)) for z, m in poles]

    W = np.polynomial.polynomial.polysub(
        np.polynomial.polynomial.polymul(np.polynomial.polynomial.polyder(num), den),
        np.polynomial.polynomial.polymul(num, np.polynomial.polynomial.polyder(den)),
    )
    W = np.trim_zeros(np.asarray(W, dtype=complex), "b")
    crit: list[complex] = []
    if W.size > 1:
        # roots of N'D - ND' that are not roots of N or D are zeros of F'/F
        all_roots = [z for z, _ in zeros_F] + [z for z, _ in poles_F]
        for z, m in polynomial_roots(W):
            if any(abs(z - r) < 1e-7 * max(1.0, abs(r)) for r in all_roots):
                continue
            crit.extend([complex(z)] * m)

    cylinders = [Cylinder(z, r, 2 * pi * abs(r)) for z, r in finite]
    if res_inf != 0:
        cylinders.append(Cylinder(None, res_inf, 2 * pi * abs(res_inf)))
    return QuadDiffReport(finite, res_inf, crit, cylinders)


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    seed: complex
    points: np.ndarray
    closed: bool
    period_error: float
    step: float = 0.0
    stop_reason: str = ""
    perimeter: float = 0.0
    max_drift: float = 0.0
    cut_crossings: int = 0
    extra: dict = field(default_factory=dict)


class _Scalar:
    """Horner evaluation of a rational function at one complex point."""

    def __init__(self, r: RationalFunction):
        self.num = [complex(c) for c in r.num[::-1]]
        self.den = [complex(c) for c in r.den[::-1]]

    @staticmethod
    def _horner(cs, z):
        acc = 0j
        for c in cs:
            acc = acc * z + c
        return acc

    def __call__(self, z: complex) -> complex:
        return self._horner(self.num, z) / self._horner(self.den, z)


def _field(L, z: complex) -> complex:
    """Unit-speed direction ``i conj(L) / |L|`` (same path as ``i conj(L)``)."""
    val = complex(L(z))
    a = abs(val)
    if a == 0 or not np.isfinite(a):
        raise SeedAtCriticalPoint(f"direction field degenerate at {z}")
    return 1j * np.conj(val) / a


def _hermite(p0, p1, d0, d1, h, t):
    t2, t3 = t * t, t * t * t
    return (
        (2 * t3 - 3 * t2 + 1) * p0
        + (t3 - 2 * t2 + t) * h * d0
        + (-2 * t3 + 3 * t2) * p1
        + (t3 - t2) * h * d1
    )


def _segment_distance(a: complex, b: complex, z: complex) -> tuple[float, float]:
    """Distance from ``z`` to the line through ``a, b`` and the projection parameter."""
    ab = b - a
    if ab == 0:
        return abs(a - z), 0.0
    t = ((z - a) * ab.conjugate()).real / abs(ab) ** 2
    return abs(a + t * ab - z), t


def critical_points(F: RationalFunction) -> list[complex]:
    rep = quad_diff_report(F)
    return [z for z, _ in rep.finite_poles] + list(rep.zeros)


def default_step(F: RationalFunction, seed: complex) -> float:
    crit = critical_points(F)
    if not crit:
        return 1e-3 * max(1.0, abs(seed))
    return 1e-3 * min(abs(seed - z) for z in crit)


def trace_trajectory(
    F: RationalFunction,
    seed: complex,
    step: float | None = None,
    max_steps: int = 200_000,
) -> Trajectory:
    """Trace the trajectory of ``Re((F'/F) dxi) = 0`` through ``seed`` with RK4.

    The path is parametrized by Euclidean arc length (fixed step).  The
    invariant ``Re int (F'/F) dxi = ln|F(xi)| - ln|F(seed)|`` is checked
    exactly at every step; the omega-length ``int |F'/F| |dxi|`` is
    accumulated with Simpson's rule on the Hermite interpolant.
    """
    seed = complex(seed)
    L = _Scalar(F.logarithmic_derivative())
    Fs = _Scalar(F)
    crit = critical_points(F)
    for z in crit:
        if abs(seed - z) <= ZERO_TOL * max(1.0, abs(z)):
            raise SeedAtCriticalPoint(f"seed {seed} is the critical point {z}")
    if step is None:
        step = default_step(F, seed)
    if step <= 0:
        raise InputError("step must be positive")
    guard = 10 * step
    for z in crit:
        if abs(seed - z) <= guard:
            raise SeedAtCriticalPoint(f"seed {seed} within {guard:g} of critical point {z}")
    F0 = Fs(seed)
    if abs(F0) <= ZERO_TOL:
        raise SeedAtCriticalPoint(f"F vanishes at seed {seed}")
    ln0 = np.log(abs(F0))
    arg_prev = np.angle(F0)

    h = step
    pts = [seed]
    z, d = seed, _field(L, seed)
    perimeter = 0.0
    max_drift = 0.0
    cuts = 0
    closed = False
    period_error = float("inf")
    reason = "max_steps"
    for n in range(1, max_steps + 1):
        k1 = d
        k2 = _field(L, z + 0.5 * h * k1)
        k3 = _field(L, z + 0.5 * h * k2)
        k4 = _field(L, z + h * k3)
        z1 = z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        d1 = _field(L, z1)
        Fz = Fs(z1)
        drift = abs(log(abs(Fz)) - ln0)
        max_drift = max(max_drift, drift)
        if drift > DRIFT_LIMIT:
            raise StepTooLarge(f"invariant drift {drift:.2e} at step {n}; reduce the step")
        arg = cmath.phase(Fz)
        if abs(arg - arg_prev) > pi:
            cuts += 1
        arg_prev = arg

        if n > 10:
            dist, tproj = _segment_distance(z, z1, seed)
            if dist < 0.5 * h and 0.0 <= tproj <= 1.0:
                # locate the closest approach on the cubic interpolant
                ts = np.linspace(0.0, 1.0, 201)
                curve = _hermite(z, z1, d, d1, h, ts)
                idx = int(np.argmin(np.abs(curve - seed)))
                lo, hi = float(ts[max(idx - 1, 0)]), float(ts[min(idx + 1, 200)])
                for _ in range(60):
                    m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
                    if abs(_hermite(z, z1, d, d1, h, m1) - seed) < abs(_hermite(z, z1, d, d1, h, m2) - seed):
                        hi = m2
                    else:
                        lo = m1
                tc = 0.5 * (lo + hi)
                period_error = float(abs(_hermite(z, z1, d, d1, h, tc) - seed))
                perimeter += _simpson_length(L, z, z1, d, d1, h, tc)
                pts.append(complex(_hermite(z, z1, d, d1, h, tc)))
                closed = True
                reason = "closed"
                break
        perimeter += _simpson_length(L, z, z1, d, d1, h, 1.0)
        pts.append(z1)
        z, d = z1, d1
        if any(abs(z - c) <= guard for c in crit):
            reason = "critical_point"
            break
    return Trajectory(
        seed=seed,
        points=np.array(pts),
        closed=closed,
        period_error=period_error if closed else float("nan"),
        step=h,
        stop_reason=reason,
        perimeter=perimeter,
        max_drift=max_drift,
        cut_crossings=cuts,
    )


def _simpson_length(L, z0, z1, d0, d1, h, t) -> float:
    """``int |L| ds`` over the first fraction ``t`` of one unit-speed step."""
    zm = _hermite(z0, z1, d0, d1, h, 0.5 * t)
    ze = _hermite(z0, z1, d0, d1, h, t)
    return float(h * t / 6 * (abs(L(complex(z0))) + 4 * abs(L(complex(zm))) + abs(L(complex(ze)))))


def winding_number(points: np.ndarray, z0: complex) -> int:
    """Winding number of a closed polyline about ``z0``."""
    pts = np.asarray(points, dtype=complex)
    ang = np.angle(pts - z0)
    total = np.sum(np.angle(np.exp(1j * np.diff(np.append(ang, ang[0])))))
    return int(round(total / (2 * pi)))
