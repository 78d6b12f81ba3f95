"""Exact angular-momentum combinatorics.

Binomials and double factorials are served from precomputed integer tables
(n <= 64) and fall back to exact arithmetic beyond.  Wigner 3-j symbols use
the Racah closed-form sum evaluated in rational arithmetic and rounded to
float once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

TABLE_CAP = 64

_BINOM = [[math.comb(n, k) for k in range(n + 1)] for n in range(TABLE_CAP + 1)]
_DFACT = [1, 1]  # (-1)!!, 0!!
for _n in range(1, TABLE_CAP + 1):
    _DFACT.append(_n * _DFACT[_n - 1] if _n >= 2 else 1)


@dataclass(frozen=True)
class AngularKey:
    """(l, m) pair indexing a solid harmonic."""

    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or abs(self.m) > self.l:
            raise ValueError(f"invalid angular key (l={self.l}, m={self.m})")

    @property
    def index(self) -> int:
        """Position in the packed l**2 + l + m ordering."""
        return self.l * self.l + self.l + self.m


@dataclass(frozen=True)
class Wigner3jKey:
    l1: int
    l2: int
    l3: int
    m1: int
    m2: int
    m3: int


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k), zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    if n <= TABLE_CAP:
        return _BINOM[n][k]
    return math.comb(n, k)


def double_factorial(n: int) -> int:
    """n!! with the conventions (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for n={n}")
    if n <= TABLE_CAP:
        return _DFACT[n + 1]
    out = 1
    for k in range(n, 0, -2):
        out *= k
    return out


def eps_coeff(l1: int, l2: int, m1: int, m2: int) -> float:
    """Vector-coupling coefficient sqrt(C(l1+m1, l2+m2) C(l1-m1, l2-m2)).

    Returns 0 when ``|m2| > l2`` so translation loops can run over
    rectangular index ranges.
    """
    if not 0 <= l2 <= l1:
        raise ValueError(f"eps_coeff requires 0 <= l2 <= l1, got l1={l1}, l2={l2}")
    if abs(m1) > l1:
        raise ValueError(f"eps_coeff requires |m1| <= l1, got l1={l1}, m1={m1}")
    if abs(m2) > l2:
        return 0.0
    a = l1 + m1
    b = l1 - m1
    return math.sqrt(binomial(a, l2 + m2) * binomial(b, l2 - m2))


def _fact(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=None)
def _wigner3j_cached(l1: int, l2: int, l3: int, m1: int, m2: int, m3: int) -> float:
    if m1 + m2 + m3 != 0:
        return 0.0
    if min(l1, l2, l3) < 0:
        return 0.0
    if abs(m1) > l1 or abs(m2) > l2 or abs(m3) > l3:
        return 0.0
    if not abs(l1 - l2) <= l3 <= l1 + l2:
        return 0.0
    if m1 == 0 and m2 == 0 and m3 == 0 and (l1 + l2 + l3) % 2:
        return 0.0

    tri = Fraction(
        _fact(l1 + l2 - l3) * _fact(l1 - l2 + l3) * _fact(-l1 + l2 + l3),
        _fact(l1 + l2 + l3 + 1),
    )
    pref2 = tri * (
        _fact(l1 + m1) * _fact(l1 - m1) * _fact(l2 + m2) * _fact(l2 - m2)
        * _fact(l3 + m3) * _fact(l3 - m3)
    )
    kmin = max(0, l2 - l3 - m1, l1 - l3 + m2)
    kmax = min(l1 + l2 - l3, l1 - m1, l2 + m2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            _fact(k) * _fact(l1 + l2 - l3 - k) * _fact(l1 - m1 - k)
            * _fact(l2 + m2 - k) * _fact(l3 - l2 + m1 + k) * _fact(l3 - l1 - m2 + k)
        )
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    sign = -1.0 if (l1 - l2 - m3) % 2 else 1.0
    if total < 0:
        sign = -sign
    # sqrt of an exactly rational square keeps the rounding to one step
    return sign * math.sqrt(float(total * total * pref2))


def wigner3j(l1, l2=None, l3=None, m1=None, m2=None, m3=None) -> float:
    """Wigner 3-j symbol (l1 l2 l3; m1 m2 m3).

    Accepts either a :class:`Wigner3jKey` or six integers.  Selection-rule
    violations evaluate to 0.
    """
    if isinstance(l1, Wigner3jKey):
        k = l1
        return _wigner3j_cached(k.l1, k.l2, k.l3, k.m1, k.m2, k.m3)
    return _wigner3j_cached(int(l1), int(l2), int(l3), int(m1), int(m2), int(m3))


@lru_cache(maxsize=None)
def product_coupling(l1: int, m1: int, l2: int, m2: int, lc: int) -> float:
    """Coefficient of r**(l1+l2-lc) Y^lc_{m1+m2} in the product Y^l1_m1 Y^l2_m2.

    Racah-normalized solid harmonics couple as
    ``Y^l1_m1 Y^l2_m2 = sum_lc <l1 0 l2 0|lc 0><l1 m1 l2 m2|lc m> r^(l1+l2-lc) Y^lc_m``.
    Written with 3-j symbols this is
    ``(2 lc + 1) (-1)^m (l1 l2 lc; 0 0 0)(l1 l2 lc; m1 m2 -m)``.
    """
    mc = m1 + m2
    if abs(mc) > lc or (l1 + l2 + lc) % 2:
        return 0.0
    w0 = wigner3j(l1, l2, lc, 0, 0, 0)
    if w0 == 0.0:
        return 0.0
    wm = wigner3j(l1, l2, lc, m1, m2, -mc)
    sign = -1.0 if mc % 2 else 1.0
    return (2 * lc + 1) * sign * w0 * wm
