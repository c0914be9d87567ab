"""Generalized Weierstrass immersion into su(N).

The closed matrix 1-form ``dX = A dxi + B dxibar`` with
``A = -i[dP, P]`` and ``B = i[dbarP, P]`` is integrated along explicit paths
with composite Gauss-Legendre.  For (anti)holomorphic solutions the integral
collapses to ``eps * i * ((1-N)/N I + P)``, which serves as an oracle.

Real coordinates come from a generalized Gell-Mann basis ``T_a`` with
``tr(T_a T_b) = 2 delta_ab``; for su(3) an orthogonal calibration maps them onto
the X1..X8 ordering used by the explicit CP^2 formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import NonConvergent, NotAntiHermitian, OrderExhausted, PathThroughSingularity, TowerDepthExceeded
from .jets import BiJet
from .model import (
    HolomorphicVectorSpec,
    commutator,
    inhomogeneous,
    norm2,
    p_plus_apply,
    projector_full,
    projector_rank1,
    tower,
)
from .quadrature import composite_gauss_legendre

SQRT2 = sqrt(2.0)
SQRT3 = sqrt(3.0)

DEFAULT_SEGMENTS = 32
DEFAULT_NODES = 8
MIXED_ANCHOR = 1.0 + 0j


# ---------------------------------------------------------------------------
# su(N) basis and coordinates


def su_generators(N: int) -> np.ndarray:
    """Generalized Gell-Mann matrices, shape ``(N*N - 1, N, N)``.

    Order: for each column ``k = 1..N-1``, the symmetric and antisymmetric
    pair for every row ``j < k``, then the diagonal generator of level ``k``.
    For N = 3 this is the usual lambda_1..lambda_8.
    """
    gens = []
    for k in range(1, N):
        for j in range(k):
            s = np.zeros((N, N), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((N, N), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            gens += [s, a]
        d = np.zeros((N, N), dtype=complex)
        d[np.arange(k), np.arange(k)] = 1.0
        d[k, k] = -k
        gens.append(d * sqrt(2.0 / (k * (k + 1))))
    return np.array(gens)


@dataclass(frozen=True)
class SuNBasis:
    N: int

    @property
    def generators(self) -> np.ndarray:
        return _generators_cached(self.N)

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        return sun_coordinates(x, self)

    def element(self, coords: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`coordinates`: ``sum_a c_a i T_a``."""
        return 1j * np.tensordot(np.asarray(coords, dtype=float), self.generators, axes=([-1], [0]))


@lru_cache(maxsize=None)
def _generators_cached(N: int) -> np.ndarray:
    g = su_generators(N)
    g.setflags(write=False)
    return g


def check_sun(x: np.ndarray, tol: float = 1e-11) -> None:
    x = np.asarray(x)
    herm = np.abs(x + np.conj(np.swapaxes(x, -1, -2))).max()
    tr = np.abs(np.trace(x, axis1=-2, axis2=-1)).max()
    scale = max(1.0, float(np.abs(x).max()))
    if herm > tol * scale or tr > tol * scale:
        raise NotAntiHermitian(f"not traceless anti-Hermitian (herm {herm:.2e}, trace {tr:.2e})")


@dataclass(frozen=True)
class SuNElement:
    """A traceless anti-Hermitian matrix (validated on construction)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotAntiHermitian(f"expected a square matrix, got shape {m.shape}")
        check_sun(m)
        object.__setattr__(self, "matrix", m)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    def coordinates(self) -> np.ndarray:
        return sun_coordinates(self.matrix, SuNBasis(self.N), check=False)


@dataclass(frozen=True)
class ImmersionSample:
    xi: complex
    X: SuNElement
    coords: np.ndarray

    @classmethod
    def from_matrix(cls, xi: complex, x: np.ndarray) -> "ImmersionSample":
        el = SuNElement(x)
        return cls(complex(xi), el, el.coordinates())


def sun_coordinates(x: np.ndarray, basis: SuNBasis | None = None, check: bool = True) -> np.ndarray:
    """``c_a = <x, i T_a> = -1/2 tr(x i T_a)`` for every matrix in ``x``."""
    x = np.asarray(x, dtype=complex)
    basis = basis or SuNBasis(x.shape[-1])
    if check:
        check_sun(x)
    # tr(x T_a) = sum_ij x_ij (T_a)_ji
    tr = np.einsum("...ij,aji->...a", x, basis.generators)
    return (-0.5 * 1j * tr).real


@lru_cache(maxsize=1)
def cp2_frame() -> np.ndarray:
    """Orthogonal 8x8 map from Gell-Mann coordinates to the X1..X8 convention.

    Solved once by orthogonal Procrustes on random ``(w1, w2)`` samples of the
    explicit holomorphic radius vector against the closed-form immersion
    ``i(P - 2/3 I)`` of ``f = (1, w1, w2)`` (translated so ``w = 0`` maps to
    the origin).  Raises if the fit is not exact.
    """
    rng = np.random.default_rng(20240607)
    w = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
    v = np.concatenate([np.ones((20, 1)), w], axis=1)
    gm = sun_coordinates(_closed_form_values(v, 1.0)) - cp2_origin_coordinates()
    target = cp2_radius_holomorphic(w[:, 0], w[:, 1])
    u, _, vt = np.linalg.svd(target.T @ gm)
    frame = u @ vt
    residual = np.abs(gm @ frame.T - target).max()
    if residual > 1e-12:
        raise RuntimeError(f"su(3) frame calibration failed, residual {residual:.2e}")
    frame.setflags(write=False)
    return frame


def cp2_origin_coordinates() -> np.ndarray:
    return sun_coordinates(_closed_form_values(np.array([1.0, 0.0, 0.0]), 1.0))


def to_cp2_frame(coords: np.ndarray) -> np.ndarray:
    """Gell-Mann coordinates (or differences of them) -> X1..X8."""
    return np.asarray(coords) @ cp2_frame().T


# Translations taking ``to_cp2_frame(sun_coordinates(immersion_tower_formula))``
# to the tabulated CP^2 surfaces: zero integration constants in the explicit
# holomorphic radius vector (k = 0) and the mixed Veronese radius vector (k = 1).
CP2_TABULATED_OFFSETS = {
    0: np.array([0.0, 0.0, 0.0, -1.0 / np.sqrt(3.0), 0.0, 0.0, 0.0, 0.0]),
    1: np.array([0.0, 0.0, 0.5, np.sqrt(3.0) / 2.0, 0.0, 0.0, 0.0, 0.0]),
}


def cp2_tabulated_coordinates(X: np.ndarray, k: int) -> np.ndarray:
    """X1..X8 of tower-formula immersion values, with the tabulated constants.

    Depths without a tabulated surface (k = 2) are returned untranslated.
    """
    coords = to_cp2_frame(sun_coordinates(X, check=False))
    return coords + CP2_TABULATED_OFFSETS.get(k, 0.0)


# ---------------------------------------------------------------------------
# K, M, L


class KMatrices(NamedTuple):
    K: np.ndarray
    K_dag: np.ndarray
    M: np.ndarray
    L: np.ndarray


def k_matrices(p: BiJet) -> KMatrices:
    """Values of ``K = [dbarP, P]``, ``K^dag = -[dP, P]``, ``M``, ``L``."""
    if p.order < 1:
        raise OrderExhausted("K matrices need jet order >= 1")
    dp, dbp = p.d_xi(), p.d_xibar()
    q = p.truncate(dp.order)
    N = p.shape[-1]
    eye = np.eye(N)
    K = commutator(dbp, q).value
    K_dag = -commutator(dp, q).value
    M = ((eye - q) @ dbp).value
    L = -(dbp @ (eye - q)).value
    return KMatrices(K, K_dag, M, L)


def ml_conservation_residuals(p: BiJet) -> tuple[np.ndarray, np.ndarray]:
    """Frobenius norms of ``dM - dbar M^dag`` and ``dL - dbar L^dag``."""
    if p.order < 2:
        raise OrderExhausted("conservation check needs jet order >= 2")
    dp, dbp = p.d_xi(), p.d_xibar()
    q = p.truncate(dp.order)
    eye = np.eye(p.shape[-1])
    M = (eye - q) @ dbp
    L = -(dbp @ (eye - q))
    rm = M.d_xi() - M.H.d_xibar()
    rl = L.d_xi() - L.H.d_xibar()
    norm = lambda j: np.linalg.norm(j.value, axis=(-2, -1))
    return norm(rm), norm(rl)


def conservation_check_ml(f: HolomorphicVectorSpec, k: int, base) -> tuple[np.ndarray, np.ndarray]:
    v = tower(f, k, base, order=k + 2)
    return ml_conservation_residuals(projector_full(v))


# ---------------------------------------------------------------------------
# closed form


def _closed_form_values(v: np.ndarray, epsilon: float) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    N = v.shape[-1]
    n2 = np.sum(np.abs(v) ** 2, axis=-1)[..., None, None]
    P = np.eye(N) - v[..., :, None] * np.conj(v[..., None, :]) / n2
    return epsilon * 1j * ((1 - N) / N * np.eye(N) + P)


def immersion_closed_form(p: BiJet | np.ndarray, epsilon: int = 1) -> np.ndarray:
    """``X = eps * i * ((1-N)/N I + P)`` for a full projector (jet or value)."""
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    P = p.value if isinstance(p, BiJet) else np.asarray(p, dtype=complex)
    N = P.shape[-1]
    return epsilon * 1j * ((1 - N) / N * np.eye(N) + P)


def immersion_tower_formula(f: HolomorphicVectorSpec, k: int, xi) -> np.ndarray:
    """Algebraic representative of the tower immersion.

    ``X_k = -i (2 sum_{j<k} P_j + P_k) + i (2k+1)/N I`` with ``P_j`` the rank-one
    projectors of ``V_j``.  Its differential is the Weierstrass 1-form, so
    it agrees with the line integral up to a constant; for ``k = 0`` it is the
    ``eps = +1`` closed form.
    """
    if k < 0 or k >= f.N:
        raise TowerDepthExceeded(f"k={k} out of range for N={f.N}")
    xi = np.asarray(xi, dtype=complex)
    N = f.N
    out = np.zeros(xi.shape + (N, N), dtype=complex)
    v = f.jet(xi, k)
    for j in range(k + 1):
        pj = projector_rank1(v.truncate(0)).value
        out -= 1j * (1.0 if j == k else 2.0) * pj
        if j < k:
            v = p_plus_apply(v)
    return out + 1j * (2 * k + 1) / N * np.eye(N)


# ---------------------------------------------------------------------------
# paths and 1-form integration


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def point(self, t):
        return self.start + (self.end - self.start) * t

    def velocity(self, t):
        return np.full(np.shape(t), self.end - self.start, dtype=complex)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, t):
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return self.center + self.radius * np.exp(1j * th)

    def velocity(self, t):
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)


PathPiece = Segment | Arc


def polyline(vertices: Sequence[complex]) -> list[Segment]:
    vs = [complex(v) for v in vertices]
    return [Segment(a, b) for a, b in zip(vs[:-1], vs[1:]) if a != b]


OneForm = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _integrate_pieces(form: OneForm, pieces: Sequence[PathPiece], segments: int, nodes: int) -> np.ndarray | None:
    t, w = composite_gauss_legendre(0.0, 1.0, nodes, segments)
    total = None
    for piece in pieces:
        xi = piece.point(t)
        dxi = piece.velocity(t)
        A, B = form(xi)
        extra = (1,) * (A.ndim - 1)
        wt = w.reshape((-1,) + extra)
        contrib = np.sum(wt * (A * dxi.reshape((-1,) + extra) + B * np.conj(dxi).reshape((-1,) + extra)), axis=0)
        total = contrib if total is None else total + contrib
    return total


def integrate_one_form(
    form: OneForm,
    pieces: Sequence[PathPiece],
    segments: int = DEFAULT_SEGMENTS,
    nodes: int = DEFAULT_NODES,
    tol: float = 1e-6,
) -> tuple[np.ndarray, float]:
    """Integrate ``A dxi + B dxibar`` along ``pieces``.

    ``form(xi)`` returns ``(A, B)`` with the node axis first.  The rule is
    run with ``segments`` and ``2 * segments`` panels; the finer value is
    returned together with the difference.
    """
    if segments < 1 or nodes < 4:
        raise ValueError("need segments >= 1 and nodes >= 4")
    if not pieces:
        return None, 0.0
    coarse = _integrate_pieces(form, pieces, segments, nodes)
    fine = _integrate_pieces(form, pieces, 2 * segments, nodes)
    err = float(np.abs(fine - coarse).max())
    if not np.all(np.isfinite(fine)):
        raise PathThroughSingularity("integrand is not finite along the path")
    if err > tol:
        raise NonConvergent(f"refinement changed the integral by {err:.3e}")
    return fine, err


def weierstrass_form(f: HolomorphicVectorSpec, k: int) -> OneForm:
    """``xi -> (-i[dP, P], i[dbarP, P])`` for the full projector of ``V_k``."""

    def form(xi):
        v = tower(f, k, xi, order=k + 1)
        n2 = norm2(v).value.real
        if np.any(n2 <= 1e-24):
            raise PathThroughSingularity("tower vector vanishes on the path")
        p = projector_full(v)
        dp, dbp = p.d_xi(), p.d_xibar()
        q = p.truncate(0)
        return (-1j * commutator(dp, q)).value, (1j * commutator(dbp, q)).value

    return form


def _zero(N: int) -> np.ndarray:
    return np.zeros((N, N), dtype=complex)


def immersion_path_integral(
    f: HolomorphicVectorSpec,
    k: int,
    path: Sequence[PathPiece] | Sequence[complex],
    segments: int = DEFAULT_SEGMENTS,
    nodes: int = DEFAULT_NODES,
) -> np.ndarray:
    """Weierstrass integral along a path (pieces, or a list of vertices)."""
    pieces = list(path)
    if pieces and not isinstance(pieces[0], (Segment, Arc)):
        pieces = polyline(pieces)
    value, _ = integrate_one_form(weierstrass_form(f, k), pieces, segments, nodes)
    return _zero(f.N) if value is None else value


def immersion_line_integral(
    f: HolomorphicVectorSpec,
    k: int,
    start: complex,
    end: complex,
    segments: int = DEFAULT_SEGMENTS,
    nodes_per_segment: int = DEFAULT_NODES,
) -> np.ndarray:
    """``X(end) - X(start)`` along the straight segment."""
    return immersion_path_integral(f, k, [start, end], segments, nodes_per_segment)


def immersion_from_anchor(
    f: HolomorphicVectorSpec,
    k: int,
    points: np.ndarray,
    anchor: complex = 0.0,
    segments: int = DEFAULT_SEGMENTS,
    nodes: int = DEFAULT_NODES,
) -> np.ndarray:
    """``X(xi) - X(anchor)`` for many endpoints at once (straight paths).

    Returns an array of shape ``points.shape + (N, N)``.
    """
    points = np.asarray(points, dtype=complex)
    flat = points.ravel()
    form = weierstrass_form(f, k)

    def run(seg):
        tt, ww = composite_gauss_legendre(0.0, 1.0, nodes, seg)
        xi = anchor + (flat[None, :] - anchor) * tt[:, None]
        A, B = form(xi)
        d = (flat - anchor)[None, :, None, None]
        return np.sum(ww[:, None, None, None] * (A * d + B * np.conj(d)), axis=0)

    coarse = run(segments)
    fine = run(2 * segments)
    err = float(np.abs(fine - coarse).max()) if flat.size else 0.0
    if not np.all(np.isfinite(fine)):
        raise PathThroughSingularity("integrand is not finite along some path")
    if err > 1e-6:
        raise NonConvergent(f"refinement changed the integral by {err:.3e}")
    return fine.reshape(points.shape + (f.N, f.N))


# ---------------------------------------------------------------------------
# explicit CP^2 formulas


def cp2_radius_holomorphic(w1, w2) -> np.ndarray:
    """Eight real components for a holomorphic CP^2 solution, shape ``(..., 8)``."""
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    a1, a2 = np.abs(w1) ** 2, np.abs(w2) ** 2
    A = 2.0 * (1.0 + a1 + a2)
    c1, c2 = np.conj(w1), np.conj(w2)
    comps = [
        (w1 * c2 + c1 * w2) / A,
        1j * (w1 * c2 - c1 * w2) / A,
        (a1 - a2) / A,
        -SQRT3 * (a1 + a2) / A,
        -1j * (w1 - c1) / A,
        -1j * (w2 - c2) / A,
        -(w1 + c1) / A,
        -(w2 + c2) / A,
    ]
    return np.stack([np.real(c) for c in comps], axis=-1)


def cp2_mixed_radius_reference(xi) -> np.ndarray:
    """Explicit radius vector of the mixed Veronese surface (an ellipsoid)."""
    xi = np.asarray(xi, dtype=complex)
    x, y = xi.real, xi.imag
    D = 1.0 + x * x + y * y
    z = np.zeros_like(x)
    return np.stack([SQRT2 * x / D, SQRT2 * y / D, 1 / D, SQRT3 / D, SQRT2 * y / D, z, -SQRT2 * x / D, z], axis=-1)


def cp2_weierstrass_coefficients(w: BiJet) -> np.ndarray:
    """dxi-coefficients ``a_j`` of the eight real 1-forms ``a_j dxi + c.c.``.

    ``w`` is the jet of ``(w1, w2)`` (entry shape ``(..., 2)``, order >= 1).
    Returns shape ``(..., 8)``.
    """
    if w.order < 1:
        raise OrderExhausted("need jet order >= 1 for the 1-forms")
    dw = w.d_xi().value
    dwb = w.conj().d_xi().value  # d(conj w)
    w = w.value
    w1, w2 = w[..., 0], w[..., 1]
    d1, d2 = dw[..., 0], dw[..., 1]
    e1, e2 = dwb[..., 0], dwb[..., 1]
    c1, c2 = np.conj(w1), np.conj(w2)
    m1, m2 = np.abs(w1) ** 2, np.abs(w2) ** 2
    A2 = 2.0 * (1.0 + m1 + m2) ** 2
    a = [
        (w2**2 - w1**2) * (c1 * e2 - c2 * e1) - (c2**2 - c1**2) * (w1 * d2 - w2 * d1)
        - w2 * e1 + c2 * d1 - w1 * e2 + c1 * d2,
        1j * ((w1**2 + w2**2) * (c2 * e1 - c1 * e2) + (c1**2 + c2**2) * (w2 * d1 - w1 * d2)
              + w2 * e1 + c2 * d1 - w1 * e2 - c1 * d2),
        w2 * e2 - w1 * e1 - c2 * d2 + c1 * d1 + 2 * m1 * (w2 * e2 - c2 * d2) - 2 * m2 * (w1 * e1 - c1 * d1),
        SQRT3 * (w1 * e1 + w2 * e2 - c1 * d1 - c2 * d2),
        -1j * ((1 + c1**2 + m2) * d1 + (1 + w1**2 + m2) * e1 + (w2 * e2 - c2 * d2) * (w1 - c1)),
        -1j * ((1 + c2**2 + m1) * d2 + (1 + w2**2 + m1) * e2 + (w1 * e1 - c1 * d1) * (w2 - c2)),
        (1 - w1**2 + m2) * e1 - (1 - c1**2 + m2) * d1 + (c2 * d2 - w2 * e2) * (w1 + c1),
        (1 - w2**2 + m1) * e2 - (1 - c2**2 + m1) * d2 + (c1 * d1 - w1 * e1) * (w2 + c2),
    ]
    return np.stack(a, axis=-1) / A2[..., None]


def cp2_radius_mixed(
    f: HolomorphicVectorSpec,
    xi,
    segments: int = DEFAULT_SEGMENTS,
    nodes: int = DEFAULT_NODES,
    anchor: complex = MIXED_ANCHOR,
    anchor_value: np.ndarray | None = None,
) -> np.ndarray:
    """Integrate the eight explicit real 1-forms for the mixed solution ``P+ f``.

    The inhomogeneous coordinates ``w_i = (V_1)_i / (V_1)_0`` are singular
    where ``(V_1)_0 = 0`` (``xi = 0`` for the Veronese vector), so each path
    runs along the circle ``|xi| = |anchor|`` and then radially.  The
    integration constant is fixed by ``anchor_value`` (default: the explicit
    ellipsoid at the anchor).  ``xi`` may be an array; the result has shape
    ``xi.shape + (8,)``.
    """
    if f.N != 3:
        raise ValueError("explicit 1-forms exist for CP^2 only")
    xi = np.asarray(xi, dtype=complex)
    flat = xi.ravel()
    near = np.abs(flat) < 1e-6
    if np.any(near):
        raise PathThroughSingularity(f"xi = {complex(flat[near][0])} is at the pole of the mixed coordinates")
    if anchor_value is None:
        anchor_value = cp2_mixed_radius_reference(anchor)
    r0, th0 = abs(anchor), float(np.angle(anchor))
    dth = (np.angle(flat) - th0 + np.pi) % (2 * np.pi) - np.pi
    mid = r0 * np.exp(1j * (th0 + dth))

    def coefficients(z):
        v = tower(f, 1, z, order=2)
        v0 = np.abs(v.value[..., 0])
        if np.any(v0 <= 1e-12 * np.sqrt(norm2(v).value.real)):
            raise PathThroughSingularity("path meets a pole of the inhomogeneous coordinates")
        return cp2_weierstrass_coefficients(inhomogeneous(v))

    def run(seg):
        t, w = composite_gauss_legendre(0.0, 1.0, nodes, seg)
        t = t[:, None]
        za = r0 * np.exp(1j * (th0 + dth[None, :] * t))
        dza = 1j * dth[None, :] * za
        zs = mid[None, :] + (flat - mid)[None, :] * t
        dzs = np.broadcast_to((flat - mid)[None, :], zs.shape)
        total = 0.0
        for z, dz in ((za, dza), (zs, dzs)):
            a = coefficients(z)
            total = total + np.sum(w[:, None, None] * 2.0 * (a * dz[..., None]).real, axis=0)
        return total

    coarse = run(segments)
    fine = run(2 * segments)
    err = float(np.abs(fine - coarse).max()) if flat.size else 0.0
    if not np.all(np.isfinite(fine)):
        raise PathThroughSingularity("integrand is not finite along some path")
    if err > 1e-6:
        raise NonConvergent(f"refinement changed the integral by {err:.3e}")
    out = np.asarray(anchor_value)[None, :] + fine
    return out.reshape(xi.shape + (8,))


# ---------------------------------------------------------------------------
# rank-one projectors


class Rank1Data(NamedTuple):
    commutator: np.ndarray
    commutator_bar: np.ndarray
    identity_residual: float


def rank1_weierstrass_data(f: HolomorphicVectorSpec, k: int, base) -> Rank1Data:
    """``[d Pk, Pk]`` and ``[dbar Pk, Pk]`` for ``Pk = P(V_k)``.

    Also reports the max deviation from
    ``[d Pk, Pk] = d Pk + 2 V_k V_{k-1}^dag / |V_{k-1}|^2``
    (the extra term is absent for ``k = 0``).
    """
    if k < 0 or k >= f.N:
        raise TowerDepthExceeded(f"k={k} out of range for N={f.N}")
    v_prev = tower(f, k - 1, base, order=k + 1) if k >= 1 else None
    v = tower(f, k, base, order=k + 1)
    pk = projector_rank1(v)
    dp, dbp = pk.d_xi(), pk.d_xibar()
    q = pk.truncate(0)
    c = commutator(dp, q).value
    cb = commutator(dbp, q).value
    expected = dp.value.copy()
    if v_prev is not None:
        vp = v_prev.truncate(0).value
        vk = v.truncate(0).value
        n2 = np.sum(np.abs(vp) ** 2, axis=-1)[..., None, None]
        expected = expected + 2.0 * vk[..., :, None] * np.conj(vp[..., None, :]) / n2
    return Rank1Data(c, cb, float(np.abs(c - expected).max()))


def projector_surface(f: HolomorphicVectorSpec, k: int, xi) -> np.ndarray:
    """Surface proportional to the rank-one projector: ``i (P_k - I/N)``."""
    v = tower(f, k, xi, order=k)
    pk = projector_rank1(v).value
    N = f.N
    return 1j * (pk - np.eye(N) / N)


def coordinate_rank(points: np.ndarray, rtol: float = 1e-9) -> int:
    """Dimension of the affine hull of a point cloud ``(n, d)``."""
    pts = np.asarray(points, dtype=float)
    s = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def gram_spectrum(points: np.ndarray) -> np.ndarray:
    """Eigenvalues (descending) of the centred Gram matrix of a point cloud.

    Invariant under rotations and translations of the cloud.
    """
    pts = np.asarray(points, dtype=float)
    s = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    out = np.zeros(pts.shape[0])
    out[: s.size] = s**2
    return out
