"""McMurchie-Davidson integrals over Cartesian Gaussians.

This is the independent reference path.  Cartesian components of a shell
are ordered by descending x power, then descending y power
(``xx, xy, xz, yy, yz, zz`` for l = 2).

By default the Hermite contractions are evaluated in the textbook form: the
full product ``E^x_t E^y_u E^z_v`` is formed against every auxiliary
integral ``R_tuv`` without factorization.  ``optimized=True`` stages the
contraction one axis at a time instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boys import boys_batch
from .engine import PrimitiveShell
from .harmonics import _harmonic_matrix, _real_transform, monomial_powers


@dataclass(frozen=True, eq=False)
class CartesianShell:
    """Unnormalized Cartesian shell: sum_i c_i x^a y^b z^c exp(-alpha_i r^2)."""

    l: int
    center: np.ndarray
    exponents: np.ndarray
    contraction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        object.__setattr__(self, "exponents", np.atleast_1d(np.asarray(self.exponents, dtype=float)))
        object.__setattr__(self, "contraction", np.atleast_1d(np.asarray(self.contraction, dtype=float)))
        if len(self.exponents) != len(self.contraction):
            raise ValueError("exponents and contraction must have equal length")

    @property
    def components(self) -> list[tuple[int, int, int]]:
        return monomial_powers(self.l)

    @classmethod
    def from_solid(cls, shell: PrimitiveShell) -> "CartesianShell":
        """Same radial content as a solid harmonic shell, with norms folded in."""
        return cls(shell.l, shell.center, shell.exponents, shell.weights)


# --------------------------------------------------------------------------
# Hermite expansion coefficients


def _E_table(la: int, lb: int, p, xpa, xpb, K) -> np.ndarray:
    """E[i, j, t, ...] for one axis, vectorized over trailing primitive dims."""
    p = np.asarray(p, dtype=float)
    E = np.zeros((la + 1, lb + 1, la + lb + 2) + p.shape)
    E[0, 0, 0] = K
    h = 0.5 / p
    for i in range(la + 1):
        if i > 0:
            prev = E[i - 1, 0]
            E[i, 0, 0] = xpa * prev[0] + prev[1]
            for t in range(1, i + 1):
                E[i, 0, t] = h * prev[t - 1] + xpa * prev[t] + (t + 1) * prev[t + 1]
        for j in range(1, lb + 1):
            prev = E[i, j - 1]
            E[i, j, 0] = xpb * prev[0] + prev[1]
            for t in range(1, i + j + 1):
                E[i, j, t] = h * prev[t - 1] + xpb * prev[t] + (t + 1) * prev[t + 1]
    return E[:, :, : la + lb + 1]


def hermite_E(i: int, j: int, t: int, alpha: float, beta: float, ab: float) -> float:
    """Hermite expansion coefficient E^{ij}_t along one axis with ab = A_x - B_x."""
    if min(i, j, t) < 0:
        raise ValueError("indices must be non-negative")
    if t > i + j:
        return 0.0
    p = alpha + beta
    mu = alpha * beta / p
    E = _E_table(i, j, p, -beta / p * ab, alpha / p * ab, math.exp(-mu * ab * ab))
    return float(E[i, j, t])


# --------------------------------------------------------------------------
# Hermite Coulomb integrals


def _R_table(L: int, p, PC, n: int = 0) -> np.ndarray:
    """R^n_{tuv} for t, u, v <= L - n (entries with t+u+v > L - n are junk).

    ``p`` has shape S and ``PC`` shape S + (3,); result (L-n+1,)*3 + S.
    """
    p = np.asarray(p, dtype=float)
    PC = np.asarray(PC, dtype=float)
    X, Y, Z = PC[..., 0], PC[..., 1], PC[..., 2]
    F = boys_batch(L, p * (X * X + Y * Y + Z * Z))
    shape = p.shape
    prev = np.zeros((1, 1, 1) + shape)
    prev[0, 0, 0] = (-2.0 * p) ** L * F[L]
    for level in range(L - 1, n - 1, -1):
        m = L - level
        cur = np.zeros((m + 1,) * 3 + shape)
        cur[0, 0, 0] = (-2.0 * p) ** level * F[level]
        coef = np.arange(m, dtype=float).reshape((m,) + (1,) * (2 + len(shape)))
        cur[1:, :m, :m] = X * prev
        cur[2:, :m, :m] += coef[1:m] * prev[: m - 1]
        cur[0, 1:, :m] = Y * prev[0]
        cur[0, 2:, :m] += coef[1:m, 0] * prev[0, : m - 1]
        cur[0, 0, 1:] = Z * prev[0, 0]
        cur[0, 0, 2:] += coef[1:m, 0, 0] * prev[0, 0, : m - 1]
        prev = cur
    return prev


def hermite_R(t: int, u: int, v: int, n: int, p: float, PC) -> float:
    """Auxiliary Hermite Coulomb integral R^n_{tuv}(p, PC)."""
    if min(t, u, v, n) < 0:
        raise ValueError("indices must be non-negative")
    R = _R_table(t + u + v + n, p, np.asarray(PC, dtype=float), n)
    return float(R[t, u, v])


# --------------------------------------------------------------------------
# primitive-pair Hermite data


def _pair_hermite(A: CartesianShell, B: CartesianShell):
    """Per-pair p, P, weights and E^{ab}_{t,u,v} (flattened to (np, na, nb, T, T, T) factors)."""
    al = A.exponents[:, None]
    be = B.exponents[None, :]
    p = (al + be).ravel()
    P = ((al[..., None] * A.center + be[..., None] * B.center) / (al + be)[..., None]).reshape(-1, 3)
    w = (A.contraction[:, None] * B.contraction[None, :]).ravel()
    mu = (al * be).ravel() / p
    ca = np.array(A.components)
    cb = np.array(B.components)
    Es = []
    for ax in range(3):
        xab = A.center[ax] - B.center[ax]
        E = _E_table(A.l, B.l, p, P[:, ax] - A.center[ax], P[:, ax] - B.center[ax], np.exp(-mu * xab * xab))
        # (i, j, t, np) -> (np, a, b, t)
        Es.append(np.moveaxis(E[ca[:, ax][:, None], cb[:, ax][None, :]], -1, 0))
    return p, P, w, Es


def cart_overlap(A: CartesianShell, B: CartesianShell) -> np.ndarray:
    p, _, w, (Ex, Ey, Ez) = _pair_hermite(A, B)
    f = w * (math.pi / p) ** 1.5
    return np.einsum("p,pab,pab,pab->ab", f, Ex[..., 0], Ey[..., 0], Ez[..., 0])


def cart_nuclear(A: CartesianShell, B: CartesianShell, nuclei, optimized: bool = False) -> np.ndarray:
    """-sum_C Z_C <A| 1/|r - C| |B> over Cartesian components."""
    p, P, w, (Ex, Ey, Ez) = _pair_hermite(A, B)
    L = A.l + B.l
    out = np.zeros((len(A.components), len(B.components)))
    for c, charge in nuclei:
        R = _R_table(L, p, P - np.asarray(c, dtype=float))  # (T, T, T, np)
        R = np.moveaxis(R, -1, 0)
        f = -float(charge) * w * 2.0 * math.pi / p
        if optimized:
            V = np.einsum("pabt,pabu,pabv,ptuv->pab", Ex, Ey, Ez, R, optimize=True)
        else:
            V = np.einsum("pabt,pabu,pabv,ptuv->pab", Ex, Ey, Ez, R)
        out += np.einsum("p,pab->ab", f, V)
    return out


@lru_cache(maxsize=None)
def _eri_gather(lbra: int, lket: int):
    tb, tk = lbra + 1, lket + 1
    n = lbra + lket + 1
    t, u, v = np.meshgrid(*(np.arange(tb),) * 3, indexing="ij")
    s, q, r = np.meshgrid(*(np.arange(tk),) * 3, indexing="ij")
    bra = (t.ravel(), u.ravel(), v.ravel())
    ket = (s.ravel(), q.ravel(), r.ravel())
    idx = ((bra[0][:, None] + ket[0][None, :]) * n + bra[1][:, None] + ket[1][None, :]) * n \
        + bra[2][:, None] + ket[2][None, :]
    sign = (-1.0) ** (ket[0] + ket[1] + ket[2])
    return idx, sign


def cart_eri(A: CartesianShell, B: CartesianShell, C: CartesianShell, D: CartesianShell,
             optimized: bool = False) -> np.ndarray:
    """(AB|CD) over Cartesian components, chemists' notation."""
    p, P, wb, Eb = _pair_hermite(A, B)
    q, Q, wk, Ek = _pair_hermite(C, D)
    lbra, lket = A.l + B.l, C.l + D.l
    na, nb, nc, nd = (len(s.components) for s in (A, B, C, D))
    Hb = np.einsum("pabt,pabu,pabv->pabtuv", *Eb).reshape(len(p), na * nb, -1)
    Hk = np.einsum("pabt,pabu,pabv->pabtuv", *Ek).reshape(len(q), nc * nd, -1)
    idx, sign = _eri_gather(lbra, lket)
    out = np.zeros((na * nb, nc * nd))
    for i in range(len(p)):
        alpha = p[i] * q / (p[i] + q)
        R = _R_table(lbra + lket, alpha, P[i][None, :] - Q)  # (n, n, n, nq)
        R = np.moveaxis(R.reshape(-1, len(q)), 0, -1)
        Rm = R[:, idx] * sign  # (nq, Tb, Tk)
        pref = 2.0 * math.pi ** 2.5 / (p[i] * q * np.sqrt(p[i] + q)) * wb[i] * wk
        if optimized:
            out += np.einsum("xs,j,jst,jyt->xy", Hb[i], pref, Rm, Hk, optimize=True)
        else:
            for j in range(len(q)):
                out += pref[j] * (Hb[i] @ Rm[j] @ Hk[j].T)
    return out.reshape(na, nb, nc, nd)


# --------------------------------------------------------------------------
# Cartesian to real solid harmonics


@lru_cache(maxsize=None)
def _cart_to_solid(l: int) -> np.ndarray:
    start = l * (l + 1) * (l + 2) // 6
    ncart = (l + 1) * (l + 2) // 2
    C = _harmonic_matrix(l)[start:start + ncart, l * l:(l + 1) ** 2]
    M = np.real(_real_transform(l) @ C.T)
    M.setflags(write=False)
    return M


def cart_to_solid(l: int) -> np.ndarray:
    """(2l+1, (l+1)(l+2)/2) matrix taking Cartesian monomials to real solid harmonics."""
    if l < 0:
        raise ValueError("l must be non-negative")
    return _cart_to_solid(l).copy()


def solid_overlap(A: PrimitiveShell, B: PrimitiveShell) -> np.ndarray:
    """Overlap block over real solid harmonics computed through the Cartesian path."""
    cs = cart_overlap(CartesianShell.from_solid(A), CartesianShell.from_solid(B))
    return _cart_to_solid(A.l) @ cs @ _cart_to_solid(B.l).T


def solid_nuclear(A: PrimitiveShell, B: PrimitiveShell, nuclei, optimized: bool = False) -> np.ndarray:
    cv = cart_nuclear(CartesianShell.from_solid(A), CartesianShell.from_solid(B), nuclei, optimized)
    return _cart_to_solid(A.l) @ cv @ _cart_to_solid(B.l).T


def solid_eri(A, B, C, D, optimized: bool = False) -> np.ndarray:
    shells = (A, B, C, D)
    g = cart_eri(*(CartesianShell.from_solid(s) for s in shells), optimized=optimized)
    for k, s in enumerate(shells):
        g = np.moveaxis(np.tensordot(_cart_to_solid(s.l), g, axes=([1], [k])), 0, k)
    return g


def compute_matrix(kind: str, shells, nuclei=(), optimized: bool = False) -> np.ndarray:
    off = np.cumsum([0] + [s.size for s in shells])
    out = np.zeros((off[-1], off[-1]))
    for i, A in enumerate(shells):
        for j, B in enumerate(shells):
            if kind == "overlap":
                b = solid_overlap(A, B)
            elif kind == "nuclear":
                b = solid_nuclear(A, B, list(nuclei), optimized)
            else:
                raise ValueError(f"unknown one-electron kind {kind!r}")
            out[off[i]:off[i + 1], off[j]:off[j + 1]] = b
    return out


def compute_eri_tensor(shells, optimized: bool = False) -> np.ndarray:
    off = np.cumsum([0] + [s.size for s in shells])
    n = off[-1]
    out = np.zeros((n, n, n, n))
    ns = len(shells)
    for i in range(ns):
        for j in range(ns):
            for k in range(ns):
                for l in range(ns):
                    out[off[i]:off[i + 1], off[j]:off[j + 1], off[k]:off[k + 1], off[l]:off[l + 1]] = \
                        solid_eri(shells[i], shells[j], shells[k], shells[l], optimized)
    return out
