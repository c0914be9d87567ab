"""Truncated bivariate Taylor jets in (xi - xi0, conj(xi) - conj(xi0)).

A :class:`BiJet` carries, for every entry of an array of functions, the Taylor
coefficients ``c[a, b]`` of ``(xi - xi0)**a * (xibar - xibar0)**b`` with total
degree ``a + b <= m``.  Wirtinger derivatives act exactly on these
coefficients, so every derivative used downstream (first fundamental form,
Christoffel symbols, curvature) is exact up to floating point.

Jets are array-valued in the numpy sense: ``coeffs`` has shape
``shape + (m + 1, m + 1)``.  Leading axes of ``shape`` may index base points
(batch evaluation); trailing axes index vector / matrix entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    BranchCut,
    DivisionBySingularJet,
    OrderExhausted,
    PoleAtBase,
    ShapeMismatch,
    ZeroBase,
)

__all__ = [
    "BiJet",
    "RationalFunction",
    "jet_from_rational",
    "jet_combine",
    "jet_deriv",
    "jet_conj",
    "jet_pow_complex",
]


@lru_cache(maxsize=None)
def _mask(order: int) -> np.ndarray:
    a = np.arange(order + 1)
    return (a[:, None] + a[None, :] <= order).astype(float)


@lru_cache(maxsize=None)
def _index_pairs(order: int) -> tuple[tuple[int, int], ...]:
    return tuple((a, b) for a in range(order + 1) for b in range(order + 1 - a))


def _entry_axis(axis: int) -> int:
    # entry axes precede the two coefficient axes
    return axis - 2 if axis < 0 else axis


class BiJet:
    """Array of truncated bivariate jets sharing one base point and order."""

    __slots__ = ("coeffs", "base")
    # make ``ndarray * jet`` defer to BiJet.__rmul__
    __array_ufunc__ = None

    def __init__(self, coeffs, base=0.0):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim < 2 or coeffs.shape[-1] != coeffs.shape[-2]:
            raise ShapeMismatch(f"coefficient block must be square, got {coeffs.shape}")
        coeffs *= _mask(coeffs.shape[-1] - 1)
        self.coeffs = coeffs
        self.base = np.asarray(base, dtype=complex)

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, base=0.0, order: int = 0) -> "BiJet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros(value.shape + (order + 1, order + 1), dtype=complex)
        c[..., 0, 0] = value
        return cls(c, base)

    @classmethod
    def variable(cls, base=0.0, order: int = 1) -> "BiJet":
        """The identity function ``xi`` expanded at ``base``."""
        base = np.asarray(base, dtype=complex)
        c = np.zeros(base.shape + (order + 1, order + 1), dtype=complex)
        c[..., 0, 0] = base
        if order >= 1:
            c[..., 1, 0] = 1.0
        return cls(c, base)

    @classmethod
    def conj_variable(cls, base=0.0, order: int = 1) -> "BiJet":
        """The function ``conj(xi)`` expanded at ``base``."""
        return cls.variable(base, order).conj()

    @staticmethod
    def stack(jets: Sequence["BiJet"], axis: int = -1) -> "BiJet":
        first = jets[0]
        for j in jets[1:]:
            first._check(j)
        arrays = np.broadcast_arrays(*[j.coeffs for j in jets])
        return BiJet(np.stack(arrays, axis=_entry_axis(axis) if axis < 0 else axis), first.base)

    # -- basic properties ---------------------------------------------
    @property
    def order(self) -> int:
        return self.coeffs.shape[-1] - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-2]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[..., 0, 0]

    def coeff(self, a: int, b: int) -> np.ndarray:
        return self.coeffs[..., a, b]

    def __repr__(self) -> str:
        return f"BiJet(shape={self.shape}, order={self.order}, base={self.base})"

    def __getitem__(self, idx) -> "BiJet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if Ellipsis not in idx:
            idx = idx + (Ellipsis,)
        return BiJet(self.coeffs[idx + (slice(None), slice(None))], self.base)

    # -- compatibility ------------------------------------------------
    def _check(self, other: "BiJet") -> None:
        if other.order != self.order:
            raise ShapeMismatch(f"jet orders differ: {self.order} vs {other.order}")
        if self.base is not other.base and not np.array_equal(self.base, other.base):
            raise ShapeMismatch("jets expanded at different base points")

    def _lift(self, other) -> np.ndarray:
        if isinstance(other, BiJet):
            self._check(other)
            return other.coeffs
        other = np.asarray(other, dtype=complex)
        c = np.zeros(other.shape + (self.order + 1, self.order + 1), dtype=complex)
        c[..., 0, 0] = other
        return c

    def truncate(self, order: int) -> "BiJet":
        if order > self.order:
            raise OrderExhausted(f"cannot raise jet order {self.order} to {order}")
        return BiJet(self.coeffs[..., : order + 1, : order + 1], self.base)

    # -- ring arithmetic ----------------------------------------------
    def __add__(self, other):
        return BiJet(self.coeffs + self._lift(other), self.base)

    __radd__ = __add__

    def __sub__(self, other):
        return BiJet(self.coeffs - self._lift(other), self.base)

    def __rsub__(self, other):
        return BiJet(self._lift(other) - self.coeffs, self.base)

    def __neg__(self):
        return BiJet(-self.coeffs, self.base)

    def __mul__(self, other):
        if not isinstance(other, BiJet):
            other = np.asarray(other, dtype=complex)
            return BiJet(self.coeffs * other[..., None, None], self.base)
        return BiJet(_convolve(self.coeffs, self._lift(other), self.order), self.base)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, BiJet):
            other = np.asarray(other, dtype=complex)
            return BiJet(self.coeffs / other[..., None, None], self.base)
        self._check(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        if int(n) != n:
            return self.power(n)
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        result = BiJet.constant(np.ones(self.shape), self.base, self.order)
        square = self
        while n:
            if n & 1:
                result = result * square
            n >>= 1
            if n:
                square = square * square
        return result

    def __matmul__(self, other: "BiJet") -> "BiJet":
        other = other if isinstance(other, BiJet) else BiJet(self._lift(other), self.base)
        if len(other.shape) == 1 or (len(other.shape) >= 1 and len(self.shape) < 2):
            raise ShapeMismatch("matmul needs matrix operands; use dot() for vectors")
        left = self[..., :, :, None]
        right = other[..., None, :, :]
        return (left * right).sum(axis=-2)

    def matvec(self, vec: "BiJet") -> "BiJet":
        return (self * vec[..., None, :]).sum(axis=-1)

    def dot(self, other: "BiJet") -> "BiJet":
        """Bilinear contraction over the last entry axis (no conjugation)."""
        return (self * other).sum(axis=-1)

    def outer(self, other: "BiJet") -> "BiJet":
        return self[..., :, None] * other[..., None, :]

    def sum(self, axis: int = -1) -> "BiJet":
        return BiJet(self.coeffs.sum(axis=_entry_axis(axis)), self.base)

    def trace(self) -> "BiJet":
        return BiJet(np.trace(self.coeffs, axis1=-4, axis2=-3), self.base)

    @property
    def T(self) -> "BiJet":
        return BiJet(np.swapaxes(self.coeffs, -4, -3), self.base)

    @property
    def H(self) -> "BiJet":
        """Hermitian conjugate of a matrix of functions."""
        return self.conj().T

    # -- conjugation and derivatives ------------------------------------
    def conj(self) -> "BiJet":
        """Pointwise complex conjugate ``conj(f)`` as a function of xi."""
        return BiJet(np.conj(np.swapaxes(self.coeffs, -1, -2)), self.base)

    def d_xi(self) -> "BiJet":
        m = self.order
        if m == 0:
            raise OrderExhausted("cannot differentiate an order-0 jet")
        scale = np.arange(1, m + 1)[:, None]
        return BiJet(self.coeffs[..., 1:, :-1] * scale, self.base)

    def d_xibar(self) -> "BiJet":
        m = self.order
        if m == 0:
            raise OrderExhausted("cannot differentiate an order-0 jet")
        scale = np.arange(1, m + 1)[None, :]
        return BiJet(self.coeffs[..., :-1, 1:] * scale, self.base)

    # -- transcendental functions ---------------------------------------
    def _split(self, err):
        v0 = self.value
        if np.any(v0 == 0):
            raise err("jet has a vanishing constant term")
        t = self / v0 - 1.0
        return v0, t

    def reciprocal(self) -> "BiJet":
        v0, t = self._split(DivisionBySingularJet)
        # 1/(1+t) with t nilpotent of index m+1
        s = BiJet.constant(np.ones(self.shape), self.base, self.order)
        for _ in range(self.order):
            s = 1.0 - t * s
        return s / v0

    def log(self) -> "BiJet":
        """Principal-branch logarithm."""
        v0 = self.value
        if np.any(v0 == 0):
            raise ZeroBase("logarithm of a jet with zero value")
        if np.any((v0.imag == 0) & (v0.real < 0)):
            raise BranchCut("jet value on the negative real axis")
        _, t = self._split(ZeroBase)
        m = self.order
        s = BiJet.constant(np.zeros(self.shape), self.base, m)
        for n in range(m, 0, -1):
            s = (1.0 / n) - t * s
        return t * s + np.log(v0)

    def exp(self) -> "BiJet":
        v0 = self.value
        t = self - v0
        m = self.order
        s = BiJet.constant(np.ones(self.shape), self.base, m)
        for n in range(m, 0, -1):
            s = 1.0 + t * s / n
        return s * np.exp(v0)

    def power(self, sigma: complex) -> "BiJet":
        """``exp(sigma * log(self))`` on the principal branch."""
        v0 = self.value
        if np.any(v0 == 0):
            raise ZeroBase("complex power of a jet with zero value")
        if np.any((v0.imag == 0) & (v0.real < 0)):
            raise BranchCut("complex power across the negative real axis")
        return (self.log() * sigma).exp()

    def sqrt(self) -> "BiJet":
        return self.power(0.5)


def _convolve(x: np.ndarray, y: np.ndarray, m: int) -> np.ndarray:
    shape = np.broadcast_shapes(x.shape[:-2], y.shape[:-2]) + (m + 1, m + 1)
    out = np.zeros(shape, dtype=complex)
    for a, b in _index_pairs(m):
        xa = x[..., a, b]
        if not np.any(xa):
            continue
        out[..., a:, b:] += xa[..., None, None] * y[..., : m + 1 - a, : m + 1 - b]
    out *= _mask(m)
    return out


@dataclass(frozen=True)
class RationalFunction:
    """``numerator(xi) / denominator(xi)``, coefficients in ascending powers."""

    numerator: tuple[complex, ...]
    denominator: tuple[complex, ...] = field(default=(1.0,))

    def __post_init__(self):
        num = tuple(complex(c) for c in self.numerator) or (0j,)
        den = tuple(complex(c) for c in self.denominator)
        if not any(den):
            raise ValueError("denominator is the zero polynomial")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def polynomial(cls, coeffs) -> "RationalFunction":
        return cls(tuple(coeffs))

    @property
    def num(self) -> np.ndarray:
        return np.trim_zeros(np.array(self.numerator, dtype=complex), "b") if any(self.numerator) else np.zeros(1, complex)

    @property
    def den(self) -> np.ndarray:
        return np.trim_zeros(np.array(self.denominator, dtype=complex), "b")

    def is_zero(self) -> bool:
        return not any(self.numerator)

    def __call__(self, xi):
        return npoly.polyval(xi, self.num) / npoly.polyval(xi, self.den)

    def derivative(self) -> "RationalFunction":
        n, d = self.num, self.den
        top = npoly.polysub(npoly.polymul(npoly.polyder(n), d), npoly.polymul(n, npoly.polyder(d)))
        return RationalFunction(tuple(top), tuple(npoly.polymul(d, d)))

    def logarithmic_derivative(self) -> "RationalFunction":
        """F'/F as a rational function (not reduced)."""
        n, d = self.num, self.den
        top = npoly.polysub(npoly.polymul(npoly.polyder(n), d), npoly.polymul(n, npoly.polyder(d)))
        return RationalFunction(tuple(top), tuple(npoly.polymul(n, d)))

    def to_json(self) -> dict:
        return {
            "numerator": [[c.real, c.imag] for c in self.numerator],
            "denominator": [[c.real, c.imag] for c in self.denominator],
        }

    @classmethod
    def from_json(cls, obj) -> "RationalFunction":
        def parse(seq):
            return tuple(complex(float(c[0]), float(c[1])) if isinstance(c, (list, tuple)) else complex(c) for c in seq)

        if isinstance(obj, dict):
            return cls(parse(obj["numerator"]), parse(obj.get("denominator", [[1.0, 0.0]])))
        return cls(parse(obj))


def _taylor_polynomial(coeffs: np.ndarray, base: np.ndarray, order: int) -> np.ndarray:
    """Taylor coefficients (ascending) of a polynomial at every base point."""
    out = np.zeros(base.shape + (order + 1,), dtype=complex)
    c = np.array(coeffs, dtype=complex)
    for k in range(order + 1):
        if c.size == 0:
            break
        out[..., k] = npoly.polyval(base, c) / factorial(k)
        c = npoly.polyder(c) if c.size > 1 else np.zeros(0, complex)
    return out


def _holomorphic_jet(series: np.ndarray, base: np.ndarray) -> BiJet:
    order = series.shape[-1] - 1
    c = np.zeros(series.shape[:-1] + (order + 1, order + 1), dtype=complex)
    c[..., :, 0] = series
    return BiJet(c, base)


def jet_from_rational(spec: RationalFunction, base, order: int) -> BiJet:
    """Taylor jet of a rational function at ``base`` (scalar or array)."""
    base = np.asarray(base, dtype=complex)
    den = _taylor_polynomial(spec.den, base, order)
    scale = npoly.polyval(np.abs(base), np.abs(spec.den))
    if np.any(np.abs(den[..., 0]) <= 1e-14 * scale):
        raise PoleAtBase(f"denominator vanishes at base {base}")
    num = _taylor_polynomial(spec.num, base, order)
    return _holomorphic_jet(num, base) / _holomorphic_jet(den, base)


def jet_combine(kind: str, a: BiJet, b: BiJet) -> BiJet:
    a._check(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown jet operation {kind!r}")


def jet_deriv(a: BiJet, which: str) -> BiJet:
    if which == "xi":
        return a.d_xi()
    if which == "xibar":
        return a.d_xibar()
    raise ValueError(f"unknown derivative {which!r}")


def jet_conj(a: BiJet) -> BiJet:
    return a.conj()


def jet_pow_complex(a: BiJet, sigma: complex) -> BiJet:
    return a.power(sigma)
