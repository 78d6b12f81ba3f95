"""Overlap, nuclear attraction and electron repulsion over solid harmonic Gaussians.

A primitive is ``N(l, alpha) Y^l_m(r - a) exp(-alpha |r - a|^2)`` with the
complex Racah harmonic ``Y``; public blocks are returned over the real
combinations produced by :func:`harmonics.real_solid_transform`.

Every integral is evaluated in the same order:

1. Gaussian product of each primitive pair onto its composite center P.
2. Both angular factors are translated to P with the addition theorem, so
   the pair density becomes a sum of products ``Y^l1_m1 Y^l2_m2`` at P.
3. Same-center overlaps collapse by orthogonality.  For Coulomb integrals
   each product is vector-coupled with 3-j coefficients into
   ``r^(2k) Y^L_M`` pieces.
4. The radial factors ``r^(2k)`` are handled as exponent derivatives
   (nuclear) or as Laplacians, which act on the Coulomb kernel as
   derivatives in the combined Gaussian width (repulsion).  Both are
   evaluated in truncated Taylor arithmetic around the Boys function.
5. Primitive contraction, then the complex-to-real transform.

The step-by-step derivation lives in ``docs/FORMULA_NOTES.md``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .angular import AngularKey, double_factorial, eps_coeff, product_coupling
from .boys import Jet, boys_batch
from .harmonics import (
    _real_transform,
    n_packed,
    packed_index,
    solid_harmonics_table,
)

SCREEN_THRESHOLD = 1e-16
_ERI_BLOCK = 1 << 22


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True, eq=False)
class PrimitiveShell:
    """A contracted shell of solid harmonic Gaussians sharing l and center.

    The effective weight of primitive i is ``contraction[i] * norms[i]``.
    """

    l: int
    center: np.ndarray
    exponents: np.ndarray
    contraction: np.ndarray
    norms: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        for name in ("exponents", "contraction", "norms"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if self.l < 0:
            raise ValueError("angular momentum must be non-negative")
        if not (len(self.exponents) == len(self.contraction) == len(self.norms)):
            raise ValueError("exponents, contraction and norms must have equal length")
        if len(self.exponents) == 0 or np.any(self.exponents <= 0):
            raise ValueError("exponents must be strictly positive")
        if not np.all(np.isfinite(self.center)):
            raise ValueError("shell center must be finite")

    @property
    def size(self) -> int:
        return 2 * self.l + 1

    @property
    def weights(self) -> np.ndarray:
        return self.contraction * self.norms


class ShellPair(NamedTuple):
    composite_center: np.ndarray
    zeta: float
    prefactor: float


@dataclass
class IntegralTensor:
    """Dense integral block over a list of shells."""

    data: np.ndarray
    basis: str = "real_solid"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=float)
        if self.data.ndim not in (2, 4):
            raise ValueError("integral tensors have rank 2 or 4")

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.data.shape)


# --------------------------------------------------------------------------
# normalization and Gaussian products


def single_center_pair_integral(k1, k2, zeta: float) -> float:
    """<Y^l1_m1 | Y^l2_m2 exp(-zeta r^2)> with the first factor conjugated.

    Orthogonality leaves ``pi^(3/2) (2l-1)!! / (2^l zeta^(l+3/2))`` on the
    diagonal and zero elsewhere.
    """
    k1 = k1 if isinstance(k1, AngularKey) else AngularKey(*k1)
    k2 = k2 if isinstance(k2, AngularKey) else AngularKey(*k2)
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    if k1 != k2:
        return 0.0
    return _radial_overlap(k1.l, zeta)


def _radial_overlap(l: int, zeta):
    return math.pi ** 1.5 * double_factorial(2 * l - 1) / (2.0 ** l * np.asarray(zeta) ** (l + 1.5))


def primitive_norm(l: int, alpha):
    """N(l, alpha) making a single primitive's self-overlap exactly 1."""
    return 1.0 / np.sqrt(_radial_overlap(l, 2.0 * np.asarray(alpha, dtype=float)))


def make_shell(l: int, center, exponents, contraction=None, normalize: bool = True) -> PrimitiveShell:
    """Build a shell with primitive norms attached and contraction renormalized."""
    exponents = np.atleast_1d(np.asarray(exponents, dtype=float))
    if contraction is None:
        contraction = np.ones_like(exponents)
    contraction = np.atleast_1d(np.asarray(contraction, dtype=float))
    if np.any(exponents <= 0):
        raise ValueError("exponents must be strictly positive")
    if not normalize:
        return PrimitiveShell(l, center, exponents, contraction, np.ones_like(exponents))
    norms = primitive_norm(l, exponents)
    w = contraction * norms
    self_overlap = np.sum(np.outer(w, w) * _radial_overlap(l, exponents[:, None] + exponents[None, :]))
    return PrimitiveShell(l, center, exponents, contraction / np.sqrt(self_overlap), norms)


def gaussian_product(alpha: float, a, beta: float, b) -> ShellPair:
    """Composite center, exponent and prefactor of exp(-alpha|r-a|^2) exp(-beta|r-b|^2)."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("Gaussian exponents must be positive")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    zeta = alpha + beta
    P = (alpha * a + beta * b) / zeta
    d = a - b
    return ShellPair(P, zeta, math.exp(-alpha * beta / zeta * float(d @ d)))


# --------------------------------------------------------------------------
# cached index structures


@lru_cache(maxsize=None)
def _translation_structure(l: int):
    rows, cols, hidx, eps, power = [], [], [], [], []
    for ma in range(-l, l + 1):
        for l1 in range(l + 1):
            for m1 in range(-l1, l1 + 1):
                e = eps_coeff(l, l1, ma, m1)
                if e == 0.0:
                    continue
                rows.append(ma + l)
                cols.append(packed_index(l1, m1))
                hidx.append(packed_index(l - l1, ma - m1))
                eps.append(e)
                power.append(l - l1)
    return tuple(np.array(x) for x in (rows, cols, hidx, eps, power))


def _translations(l: int, weight: np.ndarray, ab: np.ndarray) -> np.ndarray:
    """T[p, ma, (l1, m1)] moving Y^l(r - a) onto P = a + weight (b - a)."""
    rows, cols, hidx, eps, power = _translation_structure(l)
    Y = solid_harmonics_table(l, ab)
    T = np.zeros((len(weight), 2 * l + 1, n_packed(l)), dtype=complex)
    T[:, rows, cols] = (eps * Y[hidx])[None, :] * (-weight[:, None]) ** power[None, :]
    return T


@lru_cache(maxsize=None)
def _overlap_structure(la: int, lb: int):
    """Pairs of packed columns (l1, m1) in A and (l1, -m1) in B with sign and l1."""
    ia, ib, sign, lvals = [], [], [], []
    for l1 in range(min(la, lb) + 1):
        for m1 in range(-l1, l1 + 1):
            ia.append(packed_index(l1, m1))
            ib.append(packed_index(l1, -m1))
            sign.append(-1.0 if m1 % 2 else 1.0)
            lvals.append(l1)
    return tuple(np.array(x) for x in (ia, ib, sign, lvals))


def _multipole_components(lsum: int):
    """(k, L, M) with 2k + L <= lsum, in a fixed order."""
    return [(k, L, M) for L in range(lsum + 1) for k in range((lsum - L) // 2 + 1) for M in range(-L, L + 1)]


@lru_cache(maxsize=None)
def _coupling_structure(la: int, lb: int):
    """Sparse map (l1 m1, l2 m2) -> (k, L, M) with product-coupling weights.

    Returned as a CSR matrix of shape (n1 * n2, ncomp).
    """
    comps = _multipole_components(la + lb)
    pos = {c: i for i, c in enumerate(comps)}
    n1, n2 = n_packed(la), n_packed(lb)
    rows, cols, vals = [], [], []
    for l1 in range(la + 1):
        for m1 in range(-l1, l1 + 1):
            i1 = packed_index(l1, m1)
            for l2 in range(lb + 1):
                for m2 in range(-l2, l2 + 1):
                    i2 = packed_index(l2, m2)
                    M = m1 + m2
                    for L in range(abs(l1 - l2), l1 + l2 + 1, 2):
                        if abs(M) > L:
                            continue
                        g = product_coupling(l1, m1, l2, m2, L)
                        if g == 0.0:
                            continue
                        rows.append(i1 * n2 + i2)
                        cols.append(pos[((l1 + l2 - L) // 2, L, M)])
                        vals.append(g)
    G = sp.csr_matrix((vals, (rows, cols)), shape=(n1 * n2, len(comps)))
    return comps, G


# --------------------------------------------------------------------------
# primitive-pair data


@dataclass
class _PairData:
    la: int
    lb: int
    p: np.ndarray  # (np,)
    P: np.ndarray  # (np, 3)
    weight: np.ndarray  # (np,) contraction * norms * prefactor
    TA: np.ndarray  # (np, 2la+1, (la+1)^2)
    TB: np.ndarray  # (np, 2lb+1, (lb+1)^2)


def _pair_data(A: PrimitiveShell, B: PrimitiveShell, screening: bool = True) -> _PairData:
    al = A.exponents[:, None]
    be = B.exponents[None, :]
    p = (al + be).ravel()
    mu = (al * be).ravel() / p
    ab = A.center - B.center
    K = np.exp(-mu * float(ab @ ab))
    w = (A.weights[:, None] * B.weights[None, :]).ravel() * K
    wa = (be / (al + be)).ravel()  # P - a = wa (b - a)
    wb = (al / (al + be)).ravel()  # P - b = wb (a - b)
    P = A.center[None, :] + wa[:, None] * (B.center - A.center)[None, :]
    keep = np.ones(p.shape, dtype=bool)
    if screening:
        keep = K >= SCREEN_THRESHOLD
    p, P, w, wa, wb = p[keep], P[keep], w[keep], wa[keep], wb[keep]
    TA = _translations(A.l, wa, ab)
    TB = _translations(B.l, wb, -ab)
    return _PairData(A.l, B.l, p, P, w, TA, TB)


def _to_real2(block: np.ndarray, la: int, lb: int) -> np.ndarray:
    return np.real(_real_transform(la) @ block @ _real_transform(lb).T)


# --------------------------------------------------------------------------
# overlap


def _overlap_complex(pd: _PairData) -> np.ndarray:
    if len(pd.p) == 0:
        return np.zeros((2 * pd.la + 1, 2 * pd.lb + 1), dtype=complex)
    ia, ib, sign, lvals = _overlap_structure(pd.la, pd.lb)
    rad = _radial_overlap(0, pd.p)[:, None] * (
        np.array([double_factorial(2 * l - 1) / 2.0 ** l for l in lvals])[None, :]
        * pd.p[:, None] ** (-lvals[None, :].astype(float))
    )
    f = pd.weight[:, None] * sign[None, :] * rad
    return np.einsum("pai,pbi,pi->ab", pd.TA[:, :, ia], pd.TB[:, :, ib], f)


def overlap(A: PrimitiveShell, B: PrimitiveShell, screening: bool = True) -> np.ndarray:
    """Contracted overlap block (2la+1, 2lb+1) over real solid harmonics."""
    pd = _pair_data(A, B, screening)
    return _to_real2(_overlap_complex(pd), A.l, B.l)


# --------------------------------------------------------------------------
# nuclear attraction


def _nuclear_kernel(lsum: int, p: np.ndarray, C: np.ndarray) -> np.ndarray:
    """W[..., (k, L, M)] = (-d/dp)^k [(2 pi / p) F_L(p |C|^2)] Y^L_M(C).

    ``p`` has shape (n,), ``C`` shape (n, 3).  Columns follow
    :func:`_multipole_components`.
    """
    R2 = np.einsum("ni,ni->n", C, C)
    Y = solid_harmonics_table(lsum, C)
    F = boys_batch(lsum, p * R2)
    kmax = lsum // 2
    pj = Jet.variable(p, kmax)
    inv = pj.reciprocal() * (2.0 * math.pi)
    Tj = pj * R2
    cols = []
    for L in range(lsum + 1):
        order = (lsum - L) // 2
        taylor = [(-1) ** j * F[L + j] / math.factorial(j) if L + j <= lsum else 0.0 for j in range(kmax + 1)]
        f = inv * Tj.compose(taylor)
        YL = Y[:, L * L: (L + 1) ** 2]
        for k in range(order + 1):
            cols.append(((-1) ** k * f.derivative(k))[:, None] * YL)
    return np.concatenate(cols, axis=1)


def _nuclear_complex(pd: _PairData, nuclei) -> np.ndarray:
    la, lb = pd.la, pd.lb
    out = np.zeros((2 * la + 1, 2 * lb + 1), dtype=complex)
    if len(pd.p) == 0 or not nuclei:
        return out
    lsum = la + lb
    comps, G = _coupling_structure(la, lb)
    n1, n2 = n_packed(la), n_packed(lb)
    Jsum = np.zeros((len(pd.p), n1 * n2), dtype=complex)
    for c, charge in nuclei:
        C = np.asarray(c, dtype=float)[None, :] - pd.P
        W = _nuclear_kernel(lsum, pd.p, C)
        Jsum += (-float(charge)) * (G @ W.T).T
    J = Jsum.reshape(len(pd.p), n1, n2) * pd.weight[:, None, None]
    return np.einsum("pai,pij,pbj->ab", pd.TA, J, pd.TB, optimize=True)


def nuclear_attraction(A: PrimitiveShell, B: PrimitiveShell, nucleus=None, charge: float = 1.0,
                       nuclei=None, screening: bool = True) -> np.ndarray:
    """Attraction block -charge <A| 1/|r - c| |B> over real solid harmonics.

    Pass either one ``nucleus`` with its ``charge`` or a list ``nuclei`` of
    (center, charge) pairs that are summed.
    """
    if nuclei is None:
        if nucleus is None:
            raise ValueError("a nucleus or a list of nuclei is required")
        nuclei = [(nucleus, charge)]
    pd = _pair_data(A, B, screening)
    return _to_real2(_nuclear_complex(pd, list(nuclei)), A.l, B.l)


# --------------------------------------------------------------------------
# electron repulsion


def _laplacian_series(kmax: int, L: int, p: np.ndarray) -> np.ndarray:
    """a[k, n] with r^(2k) Y^L(r) e^(-p r^2) = sum_n a[k, n] lap^n [Y^L(r) e^(-p r^2)].

    From lap[Y^L f(r^2)] = Y^L [4 r^2 f'' + (4L + 6) f'].
    """
    a = np.zeros((kmax + 1, kmax + 1) + p.shape)
    a[0, 0] = 1.0
    inv = 1.0 / (4.0 * p * p)
    for j in range(kmax):
        nxt = np.zeros((kmax + 1,) + p.shape)
        nxt[1:] += a[j, :-1]
        nxt += (8 * j + 4 * L + 6) * p * a[j]
        if j:
            nxt -= j * (4 * j + 4 * L + 2) * a[j - 1]
        a[j + 1] = nxt * inv
    return a


@lru_cache(maxsize=None)
def _operator_conversion_structure(lsum: int):
    comps = _multipole_components(lsum)
    pos = {c: i for i, c in enumerate(comps)}
    src, dst, kk, nn, LL = [], [], [], [], []
    for (k, L, M), i in pos.items():
        for n in range(k + 1):
            src.append(i)
            dst.append(pos[(n, L, M)])
            kk.append(k)
            nn.append(n)
            LL.append(L)
    return tuple(np.array(x) for x in (src, dst, kk, nn, LL))


def _bra_operators(pd: _PairData) -> np.ndarray:
    """O[p, ma, mb, (n, L, M)]: pair density as lap^n Y^L_M(grad_P) acting on exp(-p|r-P|^2).

    Includes the contraction weight and the p^(-3/2) share of the
    s-type Coulomb prefactor.
    """
    la, lb = pd.la, pd.lb
    lsum = la + lb
    comps, G = _coupling_structure(la, lb)
    npair = len(pd.p)
    na, nb = 2 * la + 1, 2 * lb + 1
    outer = pd.TA[:, :, None, :, None] * pd.TB[:, None, :, None, :]
    outer = outer.reshape(npair * na * nb, -1)
    D = np.asarray((G.T @ outer.T).T).reshape(npair, na * nb, len(comps))
    src, dst, kk, nn, LL = _operator_conversion_structure(lsum)
    kmax = lsum // 2
    conv = np.zeros((npair, len(comps), len(comps)))
    for L in range(lsum + 1):
        a = _laplacian_series(kmax, L, pd.p)  # (k, n, p)
        sel = LL == L
        conv[:, src[sel], dst[sel]] = (a[kk[sel], nn[sel]] * (2.0 * pd.p) ** (-L)).T
    scale = pd.weight * pd.p ** -1.5
    return np.matmul(D, conv) * scale[:, None, None]


@lru_cache(maxsize=None)
def _repulsion_structure(lbra: int, lket: int):
    """Sparse map (X, Y) -> (N, L, M) for the coupled Coulomb kernel."""
    cx = _multipole_components(lbra)
    cy = _multipole_components(lket)
    ltot = lbra + lket
    wcomps = _multipole_components(ltot)
    wpos = {c: i for i, c in enumerate(wcomps)}
    rows, cols, vals = [], [], []
    ny = len(cy)
    for ix, (n1, L1, M1) in enumerate(cx):
        for iy, (n2, L2, M2) in enumerate(cy):
            M = M1 + M2
            s2 = -1.0 if L2 % 2 else 1.0
            for L in range(abs(L1 - L2), L1 + L2 + 1, 2):
                if abs(M) > L:
                    continue
                g = product_coupling(L1, M1, L2, M2, L)
                if g == 0.0:
                    continue
                N = n1 + n2 + (L1 + L2 - L) // 2
                rows.append(ix * ny + iy)
                cols.append(wpos[(N, L, M)])
                vals.append(g * s2)
    S = sp.csr_matrix((vals, (rows, cols)), shape=(len(cx) * ny, len(wcomps)))
    return S, len(cx), ny


def _repulsion_kernel(ltot: int, sigma: np.ndarray, R: np.ndarray) -> np.ndarray:
    """W[..., (N, L, M)] = d^N/dsigma^N h_L(sigma) Y^L_M(R).

    ``h_L = (2/sqrt(pi)) (-2)^L rho^(L+1/2) F_L(rho R^2)`` with
    ``rho = 1/(4 sigma)`` is Y^L(grad) applied to erf(|R|/(2 sqrt(sigma)))/|R|.
    """
    R2 = np.einsum("ni,ni->n", R, R)
    Y = solid_harmonics_table(ltot, R)
    nmax = ltot // 2
    sj = Jet.variable(sigma, nmax)
    rho = sj.reciprocal() * 0.25
    rho0 = 0.25 / sigma
    Tj = rho * R2
    F = boys_batch(ltot + nmax, rho0 * R2)
    cols = []
    for L in range(ltot + 1):
        order = (ltot - L) // 2
        taylor = [(-1) ** j * F[L + j] / math.factorial(j) for j in range(nmax + 1)]
        h = (rho ** (L + 0.5)) * Tj.compose(taylor) * (2.0 / math.sqrt(math.pi) * (-2.0) ** L)
        YL = Y[:, L * L: (L + 1) ** 2]
        for N in range(order + 1):
            cols.append(h.derivative(N)[:, None] * YL)
    return np.concatenate(cols, axis=1)


def _eri_complex(bra: _PairData, ket: _PairData) -> np.ndarray:
    na, nb = 2 * bra.la + 1, 2 * bra.lb + 1
    nc, nd = 2 * ket.la + 1, 2 * ket.lb + 1
    if len(bra.p) == 0 or len(ket.p) == 0:
        return np.zeros((na, nb, nc, nd), dtype=complex)
    lbra, lket = bra.la + bra.lb, ket.la + ket.lb
    Ob = _bra_operators(bra)
    Ok = _bra_operators(ket)
    S, nx, ny = _repulsion_structure(lbra, lket)
    ni, nj = len(bra.p), len(ket.p)
    # bra primitives are processed in blocks to bound the kernel's memory
    step = max(1, _ERI_BLOCK // (nj * nx * ny))
    out = np.zeros((Ob.shape[1], Ok.shape[1]), dtype=complex)
    for s0 in range(0, ni, step):
        sl = slice(s0, min(ni, s0 + step))
        sigma = (0.25 / bra.p[sl, None] + 0.25 / ket.p[None, :]).ravel()
        R = (bra.P[sl, None, :] - ket.P[None, :, :]).reshape(-1, 3)
        W = _repulsion_kernel(lbra + lket, sigma, R)
        T = np.asarray((S @ W.T).T).reshape(-1, nj, nx, ny)
        out += np.einsum("iax,ijxy,jcy->ac", Ob[sl], T, Ok, optimize=True)
    out *= math.pi ** 3
    return out.reshape(na, nb, nc, nd)


def _to_real4(block: np.ndarray, ls) -> np.ndarray:
    Ua, Ub, Uc, Ud = (_real_transform(l) for l in ls)
    out = np.einsum("ai,ijkl->ajkl", Ua, block)
    out = np.einsum("bj,ajkl->abkl", Ub, out)
    out = np.einsum("ck,abkl->abcl", Uc, out)
    out = np.einsum("dl,abcl->abcd", Ud, out)
    return np.real(out)


def eri(A: PrimitiveShell, B: PrimitiveShell, C: PrimitiveShell, D: PrimitiveShell,
        screening: bool = True) -> np.ndarray:
    """Contracted (AB|CD) block over real solid harmonics, chemists' notation."""
    bra = _pair_data(A, B, screening)
    ket = _pair_data(C, D, screening)
    return _to_real4(_eri_complex(bra, ket), (A.l, B.l, C.l, D.l))


# --------------------------------------------------------------------------
# full matrices


def _offsets(shells: Sequence[PrimitiveShell]) -> list[int]:
    off = [0]
    for s in shells:
        off.append(off[-1] + s.size)
    return off


def _metadata(kind: str, screening: bool, **extra) -> dict:
    meta = {
        "engine": "shgo",
        "kind": kind,
        "screening": bool(screening),
        "screen_threshold": SCREEN_THRESHOLD if screening else 0.0,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    meta.update(extra)
    return meta


def _run(tasks, fn, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def compute_matrix(kind: str, shells: Sequence[PrimitiveShell], nuclei=(), *,
                   screening: bool = True, threads: int = 1) -> IntegralTensor:
    """Full overlap or nuclear-attraction matrix over real solid harmonics."""
    if not shells:
        raise ValueError("shell list is empty")
    if kind not in ("overlap", "nuclear"):
        raise ValueError(f"unknown one-electron kind {kind!r}")
    nuclei = list(nuclei)
    if kind == "nuclear" and not nuclei:
        raise ValueError("nuclear attraction needs at least one nucleus")
    off = _offsets(shells)
    n = off[-1]
    out = np.zeros((n, n))
    tasks = [(i, j) for i in range(len(shells)) for j in range(i + 1)]

    def block(t):
        i, j = t
        if kind == "overlap":
            return overlap(shells[i], shells[j], screening)
        return nuclear_attraction(shells[i], shells[j], nuclei=nuclei, screening=screening)

    for (i, j), b in zip(tasks, _run(tasks, block, threads)):
        out[off[i]:off[i + 1], off[j]:off[j + 1]] = b
        out[off[j]:off[j + 1], off[i]:off[i + 1]] = b.T
    return IntegralTensor(out, metadata=_metadata(kind, screening))


def _mirror_canonical(g: np.ndarray) -> np.ndarray:
    """Copy every element from its canonical image so the 8-fold symmetry is exact.

    Shell quartets that pair with themselves contain element images that
    were evaluated independently; this makes them bitwise copies.
    """
    n = g.shape[0]
    i = np.arange(n)
    lower = (i[:, None] >= i[None, :])
    g = np.where(lower[:, :, None, None], g, g.transpose(1, 0, 2, 3))
    g = np.where(lower[None, None, :, :], g, g.transpose(0, 1, 3, 2))
    hi = np.maximum(i[:, None], i[None, :])
    lo = np.minimum(i[:, None], i[None, :])
    compound = hi * (hi + 1) // 2 + lo
    bra_first = compound[:, :, None, None] >= compound[None, None, :, :]
    return np.where(bra_first, g, g.transpose(2, 3, 0, 1))


def compute_eri_tensor(shells: Sequence[PrimitiveShell], *, screening: bool = True,
                       use_symmetry: bool = True, threads: int = 1) -> IntegralTensor:
    """Full (ij|kl) tensor.

    With ``use_symmetry`` only canonical shell quartets are evaluated and the
    other seven images are copied; without it every quartet is computed
    independently, which is what the symmetry checks need.
    """
    if not shells:
        raise ValueError("shell list is empty")
    off = _offsets(shells)
    n = off[-1]
    ns = len(shells)
    out = np.zeros((n, n, n, n))
    pairs = {}

    def pair(i, j):
        if (i, j) not in pairs:
            pairs[(i, j)] = _pair_data(shells[i], shells[j], screening)
        return pairs[(i, j)]

    if use_symmetry:
        tasks = [(i, j, k, l) for i in range(ns) for j in range(i + 1)
                 for k in range(ns) for l in range(k + 1) if i * (i + 1) // 2 + j >= k * (k + 1) // 2 + l]
    else:
        tasks = [(i, j, k, l) for i in range(ns) for j in range(ns) for k in range(ns) for l in range(ns)]
    for t in tasks:
        pair(t[0], t[1])
        pair(t[2], t[3])

    def block(t):
        i, j, k, l = t
        c = _eri_complex(pairs[(i, j)], pairs[(k, l)])
        return _to_real4(c, (shells[i].l, shells[j].l, shells[k].l, shells[l].l))

    def sl(i):
        return slice(off[i], off[i + 1])

    for (i, j, k, l), b in zip(tasks, _run(tasks, block, threads)):
        out[sl(i), sl(j), sl(k), sl(l)] = b
        if use_symmetry:
            out[sl(j), sl(i), sl(k), sl(l)] = b.transpose(1, 0, 2, 3)
            out[sl(i), sl(j), sl(l), sl(k)] = b.transpose(0, 1, 3, 2)
            out[sl(j), sl(i), sl(l), sl(k)] = b.transpose(1, 0, 3, 2)
            bt = b.transpose(2, 3, 0, 1)
            out[sl(k), sl(l), sl(i), sl(j)] = bt
            out[sl(l), sl(k), sl(i), sl(j)] = bt.transpose(1, 0, 2, 3)
            out[sl(k), sl(l), sl(j), sl(i)] = bt.transpose(0, 1, 3, 2)
            out[sl(l), sl(k), sl(j), sl(i)] = bt.transpose(1, 0, 3, 2)
    if use_symmetry:
        out = _mirror_canonical(out)
    return IntegralTensor(out, metadata=_metadata("eri", screening, symmetry=use_symmetry))
