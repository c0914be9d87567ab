"""Closed-form reference values, written independently of the package code.

Every function here is a direct transcription of an explicit formula for the
CP^2 Veronese family or the meron family, evaluated with plain numpy.
"""

from __future__ import annotations

import numpy as np

S2 = np.sqrt(2.0)
S3 = np.sqrt(3.0)


def veronese_g12(N: int, xi) -> np.ndarray:
    """``g12`` of the holomorphic Veronese surface: ``(N - 1) / (2 (1 + |xi|^2)^2)``."""
    return (N - 1) / (2.0 * (1.0 + np.abs(xi) ** 2) ** 2)


def cp2_veronese_radius(xi) -> np.ndarray:
    """Radius vector of the holomorphic CP^2 Veronese surface in the X1..X8 frame."""
    x, y = np.real(xi), np.imag(xi)
    r = x**2 + y**2
    d = (1.0 + r) ** 2
    return np.stack(
        [
            S2 * x * r / d,
            S2 * y * r / d,
            -r * (r - 2.0) / (2.0 * d),
            -S3 * r * (r + 2.0) / (2.0 * d),
            S2 * y / d,
            2.0 * x * y / d,
            -S2 * x / d,
            (y**2 - x**2) / d,
        ],
        axis=-1,
    )


def cp2_radius_from_w(w1, w2) -> np.ndarray:
    """Radius vector of a holomorphic CP^2 solution in inhomogeneous coordinates."""
    A = 1.0 + np.abs(w1) ** 2 + np.abs(w2) ** 2
    c1, c2 = np.conj(w1), np.conj(w2)
    return np.real(
        np.stack(
            [
                (w1 * c2 + c1 * w2) / (2 * A),
                1j * (w1 * c2 - c1 * w2) / (2 * A),
                (np.abs(w1) ** 2 - np.abs(w2) ** 2) / (2 * A),
                -S3 * (np.abs(w1) ** 2 + np.abs(w2) ** 2) / (2 * A),
                -1j * (w1 - c1) / (2 * A),
                -1j * (w2 - c2) / (2 * A),
                -(w1 + c1) / (2 * A),
                -(w2 + c2) / (2 * A),
            ],
            axis=-1,
        )
    )


def cp2_mixed_radius(xi) -> np.ndarray:
    """Radius vector of the mixed CP^2 Veronese surface (lies in a 3-space)."""
    x, y = np.real(xi), np.imag(xi)
    d = 1.0 + x**2 + y**2
    X1 = S2 * x / d
    X2 = S2 * y / d
    X3 = 1.0 / d
    zero = np.zeros_like(X1)
    return np.stack([X1, X2, X3, S3 * X3, X2, zero, -X1, zero], axis=-1)


def christoffel_veronese(xi) -> tuple[complex, complex]:
    """``(G1_11, G2_22)`` of the holomorphic CP^2 Veronese surface."""
    r = abs(xi) ** 2
    return -2 * np.conj(xi) / (1 + r), -2 * xi / (1 + r)


def second_form_table(xi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients of ``dxi^2``, ``dxi dxibar``, ``dxibar^2`` in the tabulated II."""
    x, xb = xi, np.conj(xi)
    r = abs(xi) ** 2
    c = 2j / (1 + r) ** 4
    a = c * np.array(
        [
            [xb**2, -S2 * xb, 1],
            [S2 * xb**3, -2 * xb**2, S2 * xb],
            [xb**4, -S2 * xb**3, xb**2],
        ]
    )
    b = c * np.array(
        [
            [4 * r - 2, 2 * S2 * x * (r - 2), -6 * x**2],
            [2 * S2 * xb * (r - 2), 2 * (1 + r**2 - 4 * r), 2 * S2 * x * (1 - 2 * r)],
            [-6 * xb**2, 2 * S2 * xb * (1 - 2 * r), 2 * r * (2 - r)],
        ]
    )
    e = c * np.array(
        [
            [x**2, S2 * x**3, x**4],
            [-S2 * x, -2 * x**2, -S2 * x**3],
            [1, S2 * x, x**2],
        ]
    )
    return a, b, e


def mean_curvature_table(xi) -> np.ndarray:
    """Tabulated mean-curvature matrix of the holomorphic CP^2 Veronese surface."""
    x, xb = xi, np.conj(xi)
    r = abs(xi) ** 2
    return 4j / (1 + r) ** 2 * np.array(
        [
            [2 * r - 1, S2 * x * (r - 2), -3 * x**2],
            [S2 * xb * (r - 2), 1 + r * (r - 4), -S2 * x * (2 * r - 1)],
            [-3 * xb**2, -S2 * xb * (2 * r - 1), -r * (r - 2)],
        ]
    )


def meron_radius_table(F, c: complex) -> np.ndarray:
    """Tabulated meron radius vector for ``psi = pi/3`` (principal logarithm)."""
    F = np.asarray(F, dtype=complex)
    Fb = np.conj(F)
    lnabs = np.log(np.abs(F))
    e = np.exp(1j * np.pi / 3)
    cb = np.conj(c)
    pre = np.exp(-2 * e * lnabs) / (6 * S3 * abs(c) ** 2)
    ph = np.exp(2j * S3 * lnabs)
    lnF, lnFb = np.log(F), np.log(Fb)
    X = [
        1j * pre * (cb**2 * F - c**2 * Fb * ph),
        -pre * (cb**2 * F + c**2 * Fb * ph),
        ((1 - 1j * S3) * lnF + (1 + 1j * S3) * lnFb) / 6,
        -((1j + S3) * lnF + (-1j + S3) * lnFb) / 6,
        -(F**2 + Fb**2) / (6 * S3 * np.abs(F) ** 2),
        pre * (cb**2 * Fb + c**2 * F * ph),
        1j * (F**2 - Fb**2) / (6 * S3 * np.abs(F) ** 2),
        1j * pre * (cb**2 * Fb - c**2 * F * ph),
    ]
    return np.stack(X, axis=-1)


def central_difference(fun, xi: complex, h: float = 1e-5):
    """``(d/dxi, d/dxibar)`` of ``fun`` at ``xi`` by central differences."""
    fx = (fun(xi + h) - fun(xi - h)) / (2 * h)
    fy = (fun(xi + 1j * h) - fun(xi - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)
