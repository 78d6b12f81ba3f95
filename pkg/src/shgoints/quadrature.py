"""Brute-force 3-D quadrature of one-electron integrals.

The literal integrand is sampled on a spherical product grid around an
expansion point: Gauss-Legendre panels in r, Gauss-Legendre in cos(theta)
and the trapezoid rule in phi (spectrally accurate for periodic integrands).
All orders double until two successive estimates agree.

For the nuclear kernel the grid is centered on the nucleus, so the volume
element r^2 cancels the 1/r singularity and the integrand stays smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import PrimitiveShell
from .harmonics import real_solid_harmonics


class QuadratureError(RuntimeError):
    """Raised when refinement stops before the requested tolerance."""

    def __init__(self, estimate: float, error: float, tol: float):
        super().__init__(f"quadrature did not converge: estimate {estimate!r}, "
                         f"error estimate {error:.3e} > tolerance {tol:.1e}")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True, eq=False)
class BasisFunction:
    """One real solid harmonic Gaussian: component m of degree l (m = -l..l)."""

    l: int
    m: int
    center: np.ndarray
    exponents: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def from_shell(cls, shell: PrimitiveShell, m: int) -> "BasisFunction":
        if abs(m) > shell.l:
            raise ValueError("component out of range")
        return cls(shell.l, m, np.asarray(shell.center, float), shell.exponents, shell.weights)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        d = pts - self.center
        r2 = np.einsum("...i,...i->...", d, d)
        radial = np.zeros(r2.shape)
        for a, c in zip(self.exponents, self.coefficients):
            radial += c * np.exp(-a * r2)
        return real_solid_harmonics(self.l, d)[..., self.m + self.l] * radial


def _grid(origin, rmax, panels, order, ntheta, nphi):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, rmax, panels + 1)
    h = np.diff(edges)
    r = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    wr = (0.5 * h[:, None] * w[None, :]).ravel() * r * r
    ct, wt = np.polynomial.legendre.leggauss(ntheta)
    st = np.sqrt(1.0 - ct * ct)
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    wp = 2.0 * math.pi / nphi
    dirs = np.stack([st[:, None] * np.cos(phi)[None, :],
                     st[:, None] * np.sin(phi)[None, :],
                     np.broadcast_to(ct[:, None], (ntheta, nphi))], axis=-1).reshape(-1, 3)
    wa = np.repeat(wt * wp, nphi)
    return r, wr, dirs, wa


def _integrate(f, origin, rmax, panels, order, ntheta, nphi, radial_power):
    r, wr, dirs, wa = _grid(origin, rmax, panels, order, ntheta, nphi)
    total = 0.0
    chunk = max(1, 400000 // len(dirs))
    for s in range(0, len(r), chunk):
        rs = r[s:s + chunk]
        pts = origin + rs[:, None, None] * dirs[None, :, :]
        vals = f(pts) * (rs[:, None] ** radial_power)
        total += float(np.einsum("ij,i,j->", vals, wr[s:s + chunk], wa))
    return total


def quad_oracle_one_electron(kind: str, fA: BasisFunction, fB: BasisFunction, nucleus=None,
                             charge: float = 1.0, tol: float = 1e-10, max_level: int = 4) -> float:
    """Overlap <fA|fB> or nuclear attraction -charge <fA|1/|r-c||fB> by quadrature."""
    if kind not in ("overlap", "nuclear"):
        raise ValueError(f"unknown kind {kind!r}")
    if kind == "nuclear":
        if nucleus is None:
            raise ValueError("nuclear kind needs a nucleus")
        origin = np.asarray(nucleus, dtype=float)
        power, scale = -1, -float(charge)
    else:
        amin = np.min(fA.exponents)
        bmin = np.min(fB.exponents)
        origin = (amin * fA.center + bmin * fB.center) / (amin + bmin)
        power, scale = 0, 1.0

    def f(pts):
        return fA(pts) * fB(pts)

    # beyond rmax every primitive product is below ~exp(-46) relative to its peak
    zmin = float(np.min(fA.exponents) + np.min(fB.exponents))
    reach = max(np.linalg.norm(fA.center - origin), np.linalg.norm(fB.center - origin))
    rmax = reach + math.sqrt(46.0 / zmin) + 2.0
    lsum = fA.l + fB.l
    prev = None
    for level in range(max_level + 1):
        k = 2 ** level
        est = scale * _integrate(f, origin, rmax, 8 * k, 12, 12 * k + lsum, 24 * k + 2 * lsum, power)
        if prev is not None and abs(est - prev) <= tol:
            return est
        err = abs(est - prev) if prev is not None else float("inf")
        prev = est
    raise QuadratureError(prev, err, tol)
