"""Boys functions and univariate truncated Taylor jets.

F_n(T) = int_0^1 u^(2n) exp(-T u^2) du.

Evaluation regimes (vectorized over T):

* T below ``max(UPWARD_CUTOFF, n_max + 1)``: the top order is summed from the
  all-positive series ``exp(-T) sum_k (2T)^k / ((2n+1)(2n+3)...(2n+2k+1))``
  and lower orders follow by downward recursion.  The series covers T -> 0
  without a separate branch.
* larger T: F_0 from erf, then upward recursion, which is stable once
  2T > 2n + 1.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erf

UPWARD_CUTOFF = 50.0


def _check(n_max: int, T: np.ndarray):
    if n_max < 0:
        raise ValueError(f"Boys order must be non-negative, got {n_max}")
    if np.any(T < 0) or not np.all(np.isfinite(T)):
        raise ValueError("Boys argument must be finite and non-negative")


def _series_top(n: int, T: np.ndarray) -> np.ndarray:
    term = np.full(T.shape, 1.0 / (2 * n + 1))
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * (2.0 * T) / (2 * n + 2 * k + 1)
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total * np.exp(-T)


def boys_batch(n_max: int, T) -> np.ndarray:
    """F_0..F_{n_max} at T; result has shape (n_max + 1,) + shape(T)."""
    T = np.asarray(T, dtype=float)
    _check(n_max, T)
    flat = T.ravel()
    out = np.empty((n_max + 1, flat.size))
    cut = max(UPWARD_CUTOFF, n_max + 1.0)
    low = flat < cut
    if np.any(low):
        t = flat[low]
        et = np.exp(-t)
        f = _series_top(n_max, t)
        out[n_max, low] = f
        for n in range(n_max - 1, -1, -1):
            f = (2.0 * t * f + et) / (2 * n + 1)
            out[n, low] = f
    high = ~low
    if np.any(high):
        t = flat[high]
        et = np.exp(-t)
        f = 0.5 * np.sqrt(np.pi / t) * erf(np.sqrt(t))
        out[0, high] = f
        for n in range(n_max):
            f = ((2 * n + 1) * f - et) / (2.0 * t)
            out[n + 1, high] = f
    return out.reshape((n_max + 1,) + T.shape)


def boys(n: int, T):
    """Single-order Boys function F_n(T)."""
    vals = boys_batch(n, T)[n]
    return float(vals) if vals.ndim == 0 else vals


def boys_upward(n_max: int, T) -> np.ndarray:
    """Upward recursion from the erf closed form for all T (cross-check only)."""
    T = np.asarray(T, dtype=float)
    _check(n_max, T)
    out = np.empty((n_max + 1,) + T.shape)
    et = np.exp(-T)
    f = 0.5 * np.sqrt(np.pi / T) * erf(np.sqrt(T))
    out[0] = f
    for n in range(n_max):
        f = ((2 * n + 1) * f - et) / (2.0 * T)
        out[n + 1] = f
    return out


class Jet:
    """Truncated Taylor expansion in one scalar variable s about s0.

    ``coeffs[k]`` holds f^(k)(s0) / k!.  Trailing array dimensions broadcast,
    so one Jet can carry a whole batch of expansion points.
    """

    __array_priority__ = 1000

    def __init__(self, coeffs):
        c = np.asarray(coeffs)
        if c.ndim == 0:
            c = c[None]
        if not np.iscomplexobj(c):
            c = c.astype(float)
        self.coeffs = c

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def variable(cls, s0, order: int) -> "Jet":
        s0 = np.asarray(s0, dtype=float)
        c = np.zeros((order + 1,) + s0.shape)
        c[0] = s0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet orders differ")
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coeffs + self._coerce(other).coeffs)
        c = self.coeffs.copy() + np.zeros_like(np.asarray(other, dtype=float))
        c[0] = c[0] + other
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * np.asarray(other))
        a, b = self.coeffs, self._coerce(other).coeffs
        n = self.order
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
        for k in range(n + 1):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out[k] = acc
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def _shifted(self):
        """(s0 value, jet with zero constant term)."""
        d = self.coeffs.copy()
        v = d[0].copy()
        d[0] = 0
        return v, Jet(d)

    def compose(self, taylor) -> "Jet":
        """f(self) given taylor[j] = f^(j)(self.coeffs[0]) / j! for j <= order."""
        _, d = self._shifted()
        out = Jet(np.zeros_like(d.coeffs * taylor[0]))
        out.coeffs[0] = taylor[0]
        power = None
        for j in range(1, self.order + 1):
            power = d if power is None else power * d
            out = Jet(out.coeffs + power.coeffs * taylor[j])
        return out

    def __pow__(self, a: float):
        v, _ = self._shifted()
        taylor = []
        c = np.ones_like(v)
        for j in range(self.order + 1):
            taylor.append(c * v ** (a - j))
            c = c * (a - j) / (j + 1)
        return self.compose(taylor)

    def reciprocal(self):
        return self ** -1.0

    def sqrt(self):
        return self ** 0.5

    def exp(self):
        v, _ = self._shifted()
        e = np.exp(v)
        return self.compose([e / math.factorial(j) for j in range(self.order + 1)])

    def derivative(self, k: int):
        """k-th derivative at s0."""
        return math.factorial(k) * self.coeffs[k]

    def __repr__(self):
        return f"Jet(order={self.order}, coeffs={self.coeffs!r})"


def boys_jet(n: int, T_jet: Jet) -> Jet:
    """Jet of F_n(T(s)) using dF_n/dT = -F_(n+1)."""
    T0 = np.asarray(T_jet.coeffs[0])
    if np.any(np.real(T0) < 0):
        raise ValueError("Boys argument must be non-negative")
    order = T_jet.order
    F = boys_batch(n + order, np.real(T0))
    taylor = [(-1) ** j * F[n + j] / math.factorial(j) for j in range(order + 1)]
    return T_jet.compose(taylor)
