"""Fixed-node integration over the whole plane using two stereographic charts.

Chart 1 is the disk ``|xi| <= R``; chart 2 covers ``|xi| > R`` through
``xi = 1/eta`` with Jacobian ``|eta|**-4``.  Each chart is integrated in polar
coordinates with a tensor Gauss-Legendre rule (composite in both radius and
angle).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import QuadratureDivergence


@dataclass(frozen=True)
class QuadratureScheme:
    order: int = 16
    chart_radius: float = 1.0
    subdivisions: int = 2
    angle_offset: float = 0.0

    def __post_init__(self):
        if self.order < 4:
            raise ValueError("quadrature order must be >= 4")
        if self.subdivisions < 1:
            raise ValueError("subdivisions must be >= 1")
        if self.chart_radius <= 0:
            raise ValueError("chart radius must be positive")


def composite_gauss_legendre(a: float, b: float, order: int, pieces: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, pieces + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _disk_rule(radius: float, scheme: QuadratureScheme, order: int) -> tuple[np.ndarray, np.ndarray]:
    r, wr = composite_gauss_legendre(0.0, radius, order, scheme.subdivisions)
    t, wt = composite_gauss_legendre(0.0, 2 * np.pi, order, 2 * scheme.subdivisions)
    t = t + scheme.angle_offset
    points = r[:, None] * np.exp(1j * t)[None, :]
    weights = (r * wr)[:, None] * wt[None, :]
    return points.ravel(), weights.ravel()


def _integrate_once(density: Callable[[np.ndarray], np.ndarray], scheme: QuadratureScheme, order: int) -> float:
    R = scheme.chart_radius
    z1, w1 = _disk_rule(R, scheme, order)
    inner = np.sum(np.asarray(density(z1), dtype=float) * w1)
    eta, w2 = _disk_rule(1.0 / R, scheme, order)
    outer = np.sum(np.asarray(density(1.0 / eta), dtype=float) * w2 / np.abs(eta) ** 4)
    return float(inner + outer)


def integrate_plane(density: Callable[[np.ndarray], np.ndarray], scheme: QuadratureScheme | None = None) -> tuple[float, float]:
    """Integrate a real density over the plane.

    Returns ``(value, refinement_error)`` where the error is the difference
    between the rule at ``order`` and at ``2 * order`` points per axis; the
    finer value is returned.
    """
    scheme = scheme or QuadratureScheme()
    coarse = _integrate_once(density, scheme, scheme.order)
    fine = _integrate_once(density, scheme, 2 * scheme.order)
    err = abs(fine - coarse)
    if not np.isfinite(fine) or err > 1e-4 * max(abs(fine), 1e-300):
        raise QuadratureDivergence(f"refinement error {err:.3e} too large for value {fine:.6e}")
    return fine, err


def rotated(scheme: QuadratureScheme, angle: float) -> QuadratureScheme:
    return replace(scheme, angle_offset=scheme.angle_offset + angle)
