"""Induced metric, Christoffel symbols, curvature and second fundamental form.

The immersion is ``X = eps * i * P + const`` for (anti)holomorphic tower
members and ``dX = -i[dP, P] dxi + i[dbarP, P] dxibar`` in general, so every
quantity here is a trace or product of projector jets.  The first
fundamental form is ``g11 dxi^2 + 2 g12 dxi dxibar + g22 dxibar^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateMetric, OrderExhausted, PoleAtBase
from .jets import BiJet
from .model import (
    HolomorphicVectorSpec,
    commutator,
    el_residual,
    inhomogeneous,
    j_invariants,
    metric_density,
    norm2,
    projector_full,
    tower,
)

DEGENERATE_TOL = 1e-14


@dataclass
class MetricSample:
    g11: complex
    g12: complex
    g22: complex


class Christoffel(NamedTuple):
    G1_11: complex
    G2_11: complex
    G1_22: complex
    G2_22: complex
    G1_12: complex = 0j
    G2_12: complex = 0j


@dataclass
class GeometryReport:
    xi: complex
    metric: MetricSample
    christoffel: Christoffel
    gaussian: float
    second_form_coeffs: tuple[np.ndarray, np.ndarray, np.ndarray]
    mean_curvature: np.ndarray
    J: complex
    el_residual: float


def _scalar(a):
    a = np.asarray(a)
    return a.item() if a.ndim == 0 else a


def metric(v: BiJet) -> MetricSample:
    """``g11 = -J``, ``g22 = -Jbar`` and ``g12 = tr(dP dbarP) / 2``."""
    if v.order < 1:
        raise OrderExhausted("metric needs jet order >= 1")
    J, Jbar = j_invariants(v)
    g12 = metric_density(v).value.real
    return MetricSample(_scalar(-J), _scalar(g12), _scalar(-Jbar))


def metric_g12_from_vector(v: BiJet) -> np.ndarray:
    """Second route to ``g12`` that never forms derivatives of ``P``.

    ``2 g12 = [dbar(v^dag) P dv + d(v^dag) P dbar v] / |v|^2`` with
    ``dbar(v^dag) = (dv)^dag``; for holomorphic ``v`` only the first term
    survives.
    """
    if v.order < 1:
        raise OrderExhausted("metric needs jet order >= 1")
    p = projector_full(v).truncate(0).value
    n2 = norm2(v.truncate(0)).value.real
    dv, dbv = v.d_xi().truncate(0).value, v.d_xibar().truncate(0).value
    t1 = np.einsum("...i,...ij,...j->...", np.conj(dv), p, dv)
    t2 = np.einsum("...i,...ij,...j->...", np.conj(dbv), p, dbv)
    return ((t1 + t2) / (2.0 * n2)).real


def _trace_product(a: BiJet, b: BiJet) -> np.ndarray:
    return np.einsum("...ij,...ji->...", a.value, b.value)


def _projector_derivatives(p: BiJet):
    if p.order < 2:
        raise OrderExhausted("need projector jet order >= 2")
    dp, dbp = p.d_xi(), p.d_xibar()
    return dp, dbp, dp.d_xi(), dbp.d_xibar(), dp.d_xibar()


def _metric_trace(dp: BiJet, dbp: BiJet) -> np.ndarray:
    tr = _trace_product(dp, dbp).real
    if np.any(tr < DEGENERATE_TOL):
        raise DegenerateMetric("tr(dP dbarP) vanishes: branch point of the immersion")
    return tr


def christoffel(p: BiJet) -> Christoffel:
    """Christoffel symbols of the second kind; mixed ones vanish identically."""
    dp, dbp, ddp, dbdbp, _ = _projector_derivatives(p)
    tr = _metric_trace(dp, dbp)
    return Christoffel(
        _scalar(_trace_product(ddp, dbp) / tr),
        _scalar(_trace_product(ddp, dp) / tr),
        _scalar(_trace_product(dbdbp, dbp) / tr),
        _scalar(_trace_product(dbdbp, dp) / tr),
    )


def curvature_of_density(g: BiJet) -> np.ndarray:
    """``-dd-bar ln g / g`` for a conformal factor jet ``g`` (order >= 2)."""
    if g.order < 2:
        raise OrderExhausted("curvature needs the metric jet to order >= 2")
    g0 = g.value.real
    if np.any(g0 < DEGENERATE_TOL):
        raise DegenerateMetric("conformal factor vanishes")
    lap = g.log().d_xi().d_xibar().value.real
    return -lap / g0


def gaussian_curvature(v: BiJet) -> np.ndarray | float:
    """Gaussian curvature of the induced metric of the vector jet ``v``."""
    if v.order < 3:
        raise OrderExhausted("Gaussian curvature needs vector jet order >= 3")
    return _scalar(curvature_of_density(metric_density(v)))


def second_fundamental_form(p: BiJet, epsilon: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients of ``dxi^2``, ``dxi dxibar`` and ``dxibar^2`` in II."""
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    dp, dbp, ddp, dbdbp, dbdp = _projector_derivatives(p)
    tr = _metric_trace(dp, dbp)[..., None, None]
    g1_11 = _trace_product(ddp, dbp)[..., None, None] / tr
    g2_11 = _trace_product(ddp, dp)[..., None, None] / tr
    g1_22 = _trace_product(dbdbp, dbp)[..., None, None] / tr
    g2_22 = _trace_product(dbdbp, dp)[..., None, None] / tr
    d1, db1 = dp.value, dbp.value
    c = epsilon * 1j
    ii20 = c * (ddp.value - g1_11 * d1 - g2_11 * db1)
    ii11 = c * 2.0 * dbdp.value
    ii02 = c * (dbdbp.value - g1_22 * d1 - g2_22 * db1)
    return ii20, ii11, ii02


def mean_curvature_from_projector(p: BiJet, epsilon: int = 1) -> np.ndarray:
    """``H = 2 dd-bar X / g12`` for the closed-form immersion ``eps * i * P``.

    The factor 2 is the metric trace of II against ``2 g12 dxi dxibar``.
    """
    _, ii11, _ = second_fundamental_form(p, epsilon)
    dp, dbp = p.d_xi(), p.d_xibar()
    g12 = 0.5 * _metric_trace(dp, dbp)
    return ii11 / g12[..., None, None]


def mean_curvature(f: HolomorphicVectorSpec, k: int, base, epsilon: int = 1) -> np.ndarray:
    """Mean curvature matrix of the tower surface ``V_k``.

    ``dd-bar X`` is taken from the integrand, ``d(i[dbarP, P])``, which is
    exact for every ``k``; ``epsilon`` flips the orientation of ``X``.
    """
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    v = tower(f, k, base, order=k + 2)
    p = projector_full(v)
    dp, dbp = p.d_xi(), p.d_xibar()
    q = p.truncate(dp.order)
    ddx = epsilon * (1j * commutator(dbp, q)).d_xi().value
    g12 = 0.5 * _metric_trace(dp.truncate(0), dbp.truncate(0))
    return 2.0 * ddx / g12[..., None, None]


def energy_density(f: HolomorphicVectorSpec, base) -> np.ndarray | float:
    """``u = ln((|dw1|^2 + |dw2|^2 + |w2 dw1 - w1 dw2|^2) / A^2)`` for CP^2."""
    if f.N != 3:
        raise ValueError("energy density formula is specific to CP^2")
    v = f.jet(base, 1)
    v0 = np.abs(v.value[..., 0])
    if np.any(v0 <= 1e-14 * np.sqrt(norm2(v).value.real)):
        raise PoleAtBase("inhomogeneous coordinates undefined at base")
    w = inhomogeneous(v)
    dw = w.d_xi().value
    w0 = w.value
    A = 1.0 + np.sum(np.abs(w0) ** 2, axis=-1)
    num = (
        np.abs(dw[..., 0]) ** 2
        + np.abs(dw[..., 1]) ** 2
        + np.abs(w0[..., 1] * dw[..., 0] - w0[..., 0] * dw[..., 1]) ** 2
    )
    return _scalar(np.log(num / A**2))


def geometry_report(f: HolomorphicVectorSpec, k: int, base: complex, epsilon: int = 1) -> GeometryReport:
    """Everything above at one point, for the tower member ``V_k``."""
    v = tower(f, k, complex(base), order=k + 3)
    p = projector_full(v)
    g = metric(v)
    if g.g12 < DEGENERATE_TOL:
        raise DegenerateMetric(f"degenerate metric at xi={base}")
    J, _ = j_invariants(v)
    return GeometryReport(
        xi=complex(base),
        metric=g,
        christoffel=christoffel(p),
        gaussian=float(gaussian_curvature(v)),
        second_form_coeffs=second_fundamental_form(p, epsilon),
        mean_curvature=mean_curvature(f, k, complex(base), epsilon),
        J=complex(J),
        el_residual=float(el_residual(p)),
    )
