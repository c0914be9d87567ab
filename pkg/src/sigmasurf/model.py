"""CP^{N-1} solutions: Veronese vectors, the P+ raising tower and projectors.

Vectors are kept unnormalized throughout; the projector only depends on the
complex line, so the U(1) gauge never has to be fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, pi, sqrt
from typing import Sequence

import numpy as np

from .errors import (
    InvalidDimension,
    NullVector,
    OrderExhausted,
    QuadratureDivergence,
    TowerDepthExceeded,
)
from .jets import BiJet, RationalFunction, jet_from_rational

JetVector = BiJet  # entry shape (..., N)
ProjectorJet = BiJet  # entry shape (..., N, N)

_NULL_TOL = 1e-28


@dataclass(frozen=True)
class HolomorphicVectorSpec:
    """The holomorphic vector ``f(xi)`` with rational components."""

    components: tuple[RationalFunction, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 2:
            raise InvalidDimension(f"need N >= 2 components, got {len(comps)}")
        if all(c.is_zero() for c in comps):
            raise InvalidDimension("all components are identically zero")
        object.__setattr__(self, "components", comps)

    @property
    def N(self) -> int:
        return len(self.components)

    def __call__(self, xi) -> np.ndarray:
        return np.stack([c(np.asarray(xi, dtype=complex)) for c in self.components], axis=-1)

    def jet(self, base, order: int) -> JetVector:
        return BiJet.stack([jet_from_rational(c, base, order) for c in self.components], axis=-1)


@dataclass
class ChargeActionReport:
    Q: float
    action_energy: float
    quadrature_order: int
    charts_used: int
    Q_refinement_error: float = 0.0
    action_refinement_error: float = 0.0


def veronese_vector(N: int) -> HolomorphicVectorSpec:
    """Component r is sqrt(C(N-1, r)) * xi**r."""
    if N < 2:
        raise InvalidDimension(f"Veronese vector needs N >= 2, got {N}")
    comps = []
    for r in range(N):
        coeffs = [0.0] * r + [sqrt(comb(N - 1, r))]
        comps.append(RationalFunction.polynomial(coeffs))
    return HolomorphicVectorSpec(tuple(comps))


def norm2(v: JetVector) -> BiJet:
    """``v^dagger v`` as a (real-valued) jet."""
    return (v.conj() * v).sum(axis=-1)


def _check_nonnull(n2: BiJet) -> None:
    if np.any(np.abs(n2.value) <= _NULL_TOL):
        raise NullVector("vector vanishes at the base point")


def _raise(v: JetVector, derivative) -> JetVector:
    if v.order < 1:
        raise OrderExhausted("raising operator needs jet order >= 1")
    n2 = norm2(v)
    _check_nonnull(n2)
    dv = derivative(v)
    m = dv.order
    vt = v.truncate(m)
    coef = (vt.conj() * dv).sum(axis=-1) / n2.truncate(m)
    return dv - vt * coef[..., None]


def p_plus_apply(v: JetVector) -> JetVector:
    """``P+ v = d v - v (v^dag d v) / (v^dag v)``; costs one jet order."""
    return _raise(v, BiJet.d_xi)


def p_minus_apply(v: JetVector) -> JetVector:
    """Antiholomorphic mirror of :func:`p_plus_apply` (dbar in place of d)."""
    return _raise(v, BiJet.d_xibar)


def required_order(k: int) -> int:
    return k + 3


def tower(f: HolomorphicVectorSpec, k: int, base, order: int | None = None) -> JetVector:
    """``V_k = P+^k f`` as a jet of order ``order - k``."""
    if k < 0 or k >= f.N:
        raise TowerDepthExceeded(f"tower depth k={k} must satisfy 0 <= k <= N-1 = {f.N - 1}")
    order = required_order(k) if order is None else order
    if order < k:
        raise OrderExhausted(f"order {order} too small for tower depth {k}")
    v = f.jet(base, order)
    for _ in range(k):
        v = p_plus_apply(v)
    return v


def tower_all(f: HolomorphicVectorSpec, base, order: int) -> list[JetVector]:
    """``[V_0, ..., V_{N-1}]``, each truncated to the common order ``order - N + 1``."""
    vs = [f.jet(base, order)]
    for _ in range(f.N - 1):
        vs.append(p_plus_apply(vs[-1]))
    m = vs[-1].order
    return [v.truncate(m) for v in vs]


def projector_rank1(v: JetVector) -> ProjectorJet:
    """``v v^dag / (v^dag v)``."""
    n2 = norm2(v)
    _check_nonnull(n2)
    return v.outer(v.conj()) / n2[..., None, None]


def projector_full(v: JetVector) -> ProjectorJet:
    """Rank N-1 projector ``I - v v^dag / (v^dag v)``."""
    N = v.shape[-1]
    return np.eye(N) - projector_rank1(v)


def commutator(a: BiJet, b: BiJet) -> BiJet:
    return a @ b - b @ a


def _lower(p: BiJet, q: BiJet) -> tuple[BiJet, BiJet]:
    m = min(p.order, q.order)
    return p.truncate(m), q.truncate(m)


def el_residual(p: ProjectorJet) -> np.ndarray:
    """Frobenius norm of ``d[dbar P, P] + dbar[d P, P]`` at the base point(s)."""
    if p.order < 2:
        raise OrderExhausted("Euler-Lagrange residual needs jet order >= 2")
    dp, dbp = p.d_xi(), p.d_xibar()
    q = p.truncate(dp.order)
    expr = commutator(dbp, q).d_xi() + commutator(dp, q).d_xibar()
    return np.linalg.norm(expr.value, axis=(-2, -1))


def j_invariants(v: JetVector) -> tuple[np.ndarray, np.ndarray]:
    """``J = (d v^dag) P (d v) / |v|^2`` and ``Jbar`` (dbar in place of d)."""
    if v.order < 1:
        raise OrderExhausted("J needs jet order >= 1")
    p = projector_full(v).truncate(v.order - 1)
    n2 = norm2(v).truncate(v.order - 1)
    dv, dbv = v.d_xi(), v.d_xibar()
    # d(v^dag) = conj(dbar v), dbar(v^dag) = conj(d v)
    j = (dbv.conj() * p.matvec(dv)).sum(axis=-1) / n2
    jbar = (dv.conj() * p.matvec(dbv)).sum(axis=-1) / n2
    return j.value, jbar.value


def covariant_data(v: JetVector) -> tuple[np.ndarray, np.ndarray]:
    """Gauge field ``A = z^dag d z`` and ``D z = d z - A z`` for ``z = v/|v|``."""
    if v.order < 1:
        raise OrderExhausted("covariant derivative needs jet order >= 1")
    n2 = norm2(v)
    _check_nonnull(n2)
    z = v / n2.sqrt()[..., None]
    dz = z.d_xi()
    z0 = z.truncate(dz.order)
    a = (z0.conj() * dz).sum(axis=-1)
    dcov = dz - z0 * a[..., None]
    return a.value, dcov.value


def metric_density(v: JetVector) -> BiJet:
    """``g12 = tr(d P dbar P) / 2`` as a jet one order below ``v``."""
    p = projector_full(v)
    return (p.d_xi() @ p.d_xibar()).trace() * 0.5


def cpn_residual(w: BiJet) -> np.ndarray:
    """Residual of the CP^{N-1} equations in inhomogeneous coordinates.

    ``w`` has entry shape ``(..., N-1)`` and jet order >= 2.  Returns the max
    modulus over the N-1 equations (the conjugate equations are the complex
    conjugates of these for real-analytic ``w``).
    """
    if w.order < 2:
        raise OrderExhausted("CP^{N-1} residual needs jet order >= 2")
    dw, dbw = w.d_xi(), w.d_xibar()
    ddw = dw.d_xibar()
    m = ddw.order
    w0, dw, dbw = w.truncate(m), dw.truncate(m), dbw.truncate(m)
    wbar = w0.conj()
    A = 1.0 + (wbar * w0).sum(axis=-1)
    n = w.shape[-1]
    eqs = []
    for i in range(n):
        term = ddw[..., i] - 2.0 * wbar[..., i] * dw[..., i] * dbw[..., i] / A
        for j in range(n):
            if j == i:
                continue
            term = term - wbar[..., j] * (dw[..., i] * dbw[..., j] + dbw[..., i] * dw[..., j]) / A
        eqs.append(np.abs(term.value))
    return np.max(np.stack(eqs, axis=-1), axis=-1)


def inhomogeneous(v: JetVector) -> BiJet:
    """``w_i = v_i / v_0`` (only defined where ``v_0 != 0``)."""
    return v[..., 1:] / v[..., 0][..., None]


def charge_and_action(f: HolomorphicVectorSpec, k: int, quad_order: int = 16, subdivisions: int = 2) -> ChargeActionReport:
    """Topological charge ``(1/pi) int g12 dx dy`` and ``int tr(dP dbarP) dx dy``."""
    from .quadrature import QuadratureScheme, integrate_plane

    if quad_order < 8:
        raise ValueError("quad_order must be >= 8")
    if k < 0 or k >= f.N:
        raise TowerDepthExceeded(f"tower depth k={k} out of range for N={f.N}")

    def g12(xi):
        v = tower(f, k, xi, order=k + 1)
        return metric_density(v).value.real

    scheme = QuadratureScheme(order=quad_order, subdivisions=subdivisions)
    total, err = integrate_plane(g12, scheme)
    if not np.isfinite(total):
        raise QuadratureDivergence("non-finite metric integral")
    return ChargeActionReport(
        Q=total / pi,
        action_energy=2.0 * total,
        quadrature_order=quad_order,
        charts_used=2,
        Q_refinement_error=err / pi,
        action_refinement_error=2.0 * err,
    )


def vector_from_values(values: Sequence, base=0.0, order: int = 0) -> JetVector:
    """Constant jet vector, mostly useful in tests."""
    return BiJet.constant(np.asarray(values, dtype=complex), base, order)
