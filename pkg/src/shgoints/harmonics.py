"""Racah-normalized complex solid harmonics.

``Y^l_m(r) = sqrt(4 pi / (2l + 1)) r^l Y_lm(theta, phi)`` with the
Condon-Shortley phase.  Everything is evaluated through exact Cartesian
expansions (homogeneous degree-l polynomials), so no spherical angles are
ever formed.

Packed ordering: all harmonics with l <= lmax are stored at index
``l*l + l + m``.  Real solid harmonics are ordered m = -l..l where negative m
are the sine-type combinations, giving (y, z, x) for l = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .angular import AngularKey, binomial, eps_coeff


class MonomialTerm(NamedTuple):
    coeff: complex
    powers: tuple[int, int, int]


class TranslationTerm(NamedTuple):
    l1: int
    m1: int
    coeff: complex


def packed_index(l: int, m: int) -> int:
    return l * l + l + m


def n_packed(lmax: int) -> int:
    return (lmax + 1) ** 2


def _key(key, m=None) -> tuple[int, int]:
    if isinstance(key, AngularKey):
        return key.l, key.m
    if m is None:
        l, m = key
    else:
        l = key
    AngularKey(int(l), int(m))
    return int(l), int(m)


# --------------------------------------------------------------------------
# exact Cartesian expansion


@lru_cache(maxsize=None)
def _exact_expansion(l: int, m: int) -> tuple[int, dict]:
    """Return (s, poly) with Y^l_m = sqrt(s) * poly.

    ``poly`` maps (a, b, c) -> (re, im) as Fractions.
    For m >= 0::

        Y^l_m = sqrt((l+m)!(l-m)!) sum_k (-(x+iy)/2)^(k+m) ((x-iy)/2)^k z^(l-m-2k)
                                         / ((k+m)! k! (l-m-2k)!)
    and Y^l_{-m} = (-1)^m conj(Y^l_m).
    """
    am = abs(m)
    s = math.factorial(l + am) * math.factorial(l - am)
    poly: dict[tuple[int, int, int], list] = {}
    for k in range((l - am) // 2 + 1):
        p = k + am  # power of (x + iy)
        q = k  # power of (x - iy)
        zpow = l - am - 2 * k
        scale = Fraction((-1) ** p, 2 ** (p + q) * math.factorial(p) * math.factorial(k) * math.factorial(zpow))
        # (x+iy)^p (x-iy)^q expanded; i^j tracked as a complex unit
        for j1 in range(p + 1):
            c1 = binomial(p, j1)
            for j2 in range(q + 1):
                c2 = binomial(q, j2)
                ypow = j1 + j2
                xpow = p + q - ypow
                # (iy)^j1 (-iy)^j2 = i^(j1+j2) (-1)^j2 y^(j1+j2)
                unit = (j1 + j2) % 4
                sgn = (-1) ** j2
                re, im = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}[unit]
                c = scale * c1 * c2 * sgn
                key = (xpow, ypow, zpow)
                acc = poly.setdefault(key, [Fraction(0), Fraction(0)])
                acc[0] += c * re
                acc[1] += c * im
    if m < 0:
        sign = (-1) ** am
        poly = {k: [sign * v[0], -sign * v[1]] for k, v in poly.items()}
    return s, {k: (v[0], v[1]) for k, v in poly.items() if v[0] != 0 or v[1] != 0}


def cartesian_expansion(key, m=None) -> list[MonomialTerm]:
    """Monomial expansion of Y^l_m as complex-coefficient terms."""
    l, m = _key(key, m)
    s, poly = _exact_expansion(l, m)
    root = math.sqrt(s)
    return [
        MonomialTerm(complex(float(re) * root, float(im) * root), powers)
        for powers, (re, im) in sorted(poly.items(), reverse=True)
    ]


def monomial_powers(l: int) -> list[tuple[int, int, int]]:
    """Cartesian components of degree l, descending in x power then y power."""
    return [(i, j, l - i - j) for i in range(l, -1, -1) for j in range(l - i, -1, -1)]


@lru_cache(maxsize=None)
def _all_monomials(lmax: int) -> tuple[tuple[int, int, int], ...]:
    return tuple(p for l in range(lmax + 1) for p in monomial_powers(l))


@lru_cache(maxsize=None)
def _harmonic_matrix(lmax: int) -> np.ndarray:
    """Matrix C with Y_packed = monomials @ C for all l <= lmax."""
    mons = _all_monomials(lmax)
    pos = {p: i for i, p in enumerate(mons)}
    C = np.zeros((len(mons), n_packed(lmax)), dtype=complex)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            for term in cartesian_expansion(l, m):
                C[pos[term.powers], packed_index(l, m)] = term.coeff
    C.setflags(write=False)
    return C


def _monomial_values(lmax: int, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    shape = r.shape[:-1]
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    pw = np.ones((3, lmax + 1) + shape)
    for k in range(1, lmax + 1):
        pw[0, k] = pw[0, k - 1] * x
        pw[1, k] = pw[1, k - 1] * y
        pw[2, k] = pw[2, k - 1] * z
    mons = _all_monomials(lmax)
    a = np.array([p[0] for p in mons])
    b = np.array([p[1] for p in mons])
    c = np.array([p[2] for p in mons])
    vals = pw[0, a] * pw[1, b] * pw[2, c]  # (nmon,) + shape
    return np.moveaxis(vals, 0, -1)


def solid_harmonics_table(lmax: int, r) -> np.ndarray:
    """All Y^l_m(r) for l <= lmax, packed along the last axis."""
    return _monomial_values(lmax, r) @ _harmonic_matrix(lmax)


def solid_harmonic(key, r) -> complex | np.ndarray:
    """Y^l_m evaluated at r (a 3-vector or an array of 3-vectors).

    ``key`` is an :class:`AngularKey` or an ``(l, m)`` tuple.
    """
    l, m = _key(key)
    val = solid_harmonics_table(l, r)[..., packed_index(l, m)]
    if np.ndim(val) == 0:
        return complex(val)
    return val


# --------------------------------------------------------------------------
# translation


def translation_coefficients(la: int, weight: float, ab) -> np.ndarray:
    """Dense translation matrix T[ma, (l1, m1)] for Y^la(r - a) -> Y^l1(r - P).

    ``P = a + weight (b - a)`` with ``ab = a - b``.  Columns use the packed
    index over l1 <= la.
    """
    Y = solid_harmonics_table(la, ab)
    T = np.zeros((2 * la + 1, n_packed(la)), dtype=complex)
    for ma in range(-la, la + 1):
        for l1 in range(la + 1):
            dl = la - l1
            f = (-weight) ** dl
            for m1 in range(-l1, l1 + 1):
                e = eps_coeff(la, l1, ma, m1)
                if e == 0.0:
                    continue
                T[ma + la, packed_index(l1, m1)] = e * f * Y[packed_index(dl, ma - m1)]
    return T


def translate_solid_harmonic(key, weight: float, ab) -> list[TranslationTerm]:
    """Expand Y^la_ma(r - a) about P = a + weight (b - a) as terms in Y^l1_m1(r - P).

    Uses the solid-harmonic addition theorem
    ``Y^l_m(u + v) = sum eps(l, l1, m, m1) Y^l1_m1(u) Y^(l-l1)_(m-m1)(v)``
    with u = r - P and v = P - a = -weight (a - b).
    """
    la, ma = _key(key)
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {weight}")
    T = translation_coefficients(la, weight, np.asarray(ab, dtype=float))
    out = []
    for l1 in range(la + 1):
        for m1 in range(-l1, l1 + 1):
            c = T[ma + la, packed_index(l1, m1)]
            if c != 0:
                out.append(TranslationTerm(l1, m1, complex(c)))
    return out


# --------------------------------------------------------------------------
# complex -> real


@lru_cache(maxsize=None)
def _real_transform(l: int) -> np.ndarray:
    s = 1.0 / math.sqrt(2.0)
    U = np.zeros((2 * l + 1, 2 * l + 1), dtype=complex)
    U[l, l] = 1.0
    for m in range(1, l + 1):
        ph = (-1) ** m
        # cosine type: ((-1)^m Y_m + Y_-m) / sqrt 2
        U[l + m, l + m] = ph * s
        U[l + m, l - m] = s
        # sine type: -i ((-1)^m Y_m - Y_-m) / sqrt 2
        U[l - m, l + m] = -1j * ph * s
        U[l - m, l - m] = 1j * s
    U.setflags(write=False)
    return U


def real_solid_transform(l: int) -> np.ndarray:
    """Unitary U with real_r = sum_m U[r, m] Y^l_m, rows/cols ordered m = -l..l."""
    if l < 0:
        raise ValueError("l must be non-negative")
    return _real_transform(l).copy()


def real_solid_harmonics(l: int, r) -> np.ndarray:
    """Real solid harmonics of degree l at r, ordered m = -l..l."""
    Y = solid_harmonics_table(l, r)[..., l * l: (l + 1) ** 2]
    return np.real(Y @ _real_transform(l).T)


# --------------------------------------------------------------------------
# term algebra for harmonic gradient operators


@dataclass
class TermSum:
    """sum c x^a y^b z^c g_n(scale * R^2) with g_n' = -g_(n+1).

    ``kind='boys'`` uses g_n = F_n; ``kind='gaussian'`` uses g_n = exp(-u)
    for every n (the index then only counts derivative order).
    """

    terms: dict = field(default_factory=dict)  # (a, b, c, n) -> complex
    scale: float = 1.0
    kind: str = "boys"

    def __post_init__(self):
        if self.kind not in ("boys", "gaussian"):
            raise ValueError(f"unknown radial kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @classmethod
    def radial(cls, scale: float, kind: str = "boys", n: int = 0) -> "TermSum":
        return cls({(0, 0, 0, n): 1.0 + 0j}, scale, kind)

    def max_index(self) -> int:
        return max((k[3] for k in self.terms), default=0)

    def derivative(self, axis: int) -> "TermSum":
        out: dict = {}
        two_t = 2.0 * self.scale
        for (a, b, c, n), v in self.terms.items():
            p = [a, b, c]
            if p[axis]:
                q = list(p)
                q[axis] -= 1
                k = (q[0], q[1], q[2], n)
                out[k] = out.get(k, 0) + p[axis] * v
            q = list(p)
            q[axis] += 1
            k = (q[0], q[1], q[2], n + 1)
            out[k] = out.get(k, 0) - two_t * v
        return TermSum({k: v for k, v in out.items() if v != 0}, self.scale, self.kind)

    def evaluate(self, R) -> complex:
        from .boys import boys_batch

        R = np.asarray(R, dtype=float)
        u = self.scale * float(R @ R)
        nmax = self.max_index()
        if self.kind == "boys":
            g = boys_batch(nmax, u)
        else:
            g = np.full(nmax + 1, math.exp(-u))
        total = 0j
        for (a, b, c, n), v in self.terms.items():
            total += v * R[0] ** a * R[1] ** b * R[2] ** c * g[n]
        return total


def apply_harmonic_gradient(key, target: TermSum, m=None) -> TermSum:
    """Apply the operator Y^l_m(d/dx, d/dy, d/dz) to a TermSum."""
    l, m = _key(key, m)
    out: dict = {}
    for term in cartesian_expansion(l, m):
        cur = target
        for axis, power in enumerate(term.powers):
            for _ in range(power):
                cur = cur.derivative(axis)
        for k, v in cur.terms.items():
            out[k] = out.get(k, 0) + term.coeff * v
    return TermSum({k: v for k, v in out.items() if abs(v) != 0}, target.scale, target.kind)


def laplacian_exact(l: int, m: int) -> dict:
    """Laplacian of the exact rational part of Y^l_m; empty for harmonic input."""
    _, poly = _exact_expansion(l, m)
    out: dict = {}
    for (a, b, c), (re, im) in poly.items():
        for axis in range(3):
            p = [a, b, c]
            if p[axis] >= 2:
                f = p[axis] * (p[axis] - 1)
                p[axis] -= 2
                acc = out.setdefault(tuple(p), [Fraction(0), Fraction(0)])
                acc[0] += f * re
                acc[1] += f * im
    return {k: v for k, v in out.items() if v[0] != 0 or v[1] != 0}
