"""Seeded verification suites comparing the engine with its references.

Every check reduces to a worst-case ``error / allowed`` ratio, so a suite
passes when its ratio is at most 1.  Reports contain no timings and are
byte-identical for a given seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import engine, mmd
from .quadrature import BasisFunction, quad_oracle_one_electron

SUITE_SIZES = {
    "quick": {"one_electron": 20, "eri": 4, "quadrature": 2, "symmetry": 1, "invariance": 1},
    "full": {"one_electron": 200, "eri": 100, "quadrature": 10, "symmetry": 2, "invariance": 3},
}


@dataclass
class SuiteResult:
    name: str
    cases: int
    worst_ratio: float = 0.0
    worst_error: float = 0.0
    failure: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failure is None

    def update(self, err: np.ndarray, allowed: np.ndarray, case: dict):
        err = np.asarray(err, dtype=float)
        ratio = float(np.max(err / allowed)) if err.size else 0.0
        if not np.isfinite(ratio):
            ratio = float("inf")
        if ratio > self.worst_ratio:
            self.worst_ratio = ratio
            self.worst_error = float(np.max(err))
        if ratio > 1.0 and self.failure is None:
            self.failure = dict(case, error=float(np.max(err)), ratio=ratio)


def _mixed_tol(ref, rel, floor, small=1e-6):
    ref = np.abs(ref)
    return np.where(ref < small, floor, rel * ref)


def shell_dict(s: engine.PrimitiveShell) -> dict:
    return {"l": s.l, "center": s.center.tolist(), "exponents": s.exponents.tolist(),
            "contraction": s.contraction.tolist()}


def shell_from_dict(d: dict) -> engine.PrimitiveShell:
    return engine.make_shell(d["l"], d["center"], d["exponents"], d["contraction"])


@dataclass
class Verifier:
    seed: int = 0
    lmax: int = 4
    corrupt: bool = False
    results: list = field(default_factory=list)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    # engine calls go through here so the debug hook can perturb them
    def _shgo(self, value):
        return value * (1.0 + 1e-6) if self.corrupt else value

    def _exponents(self, n, lo=0.05, hi=50.0):
        return np.exp(self.rng.uniform(np.log(lo), np.log(hi), n))

    def _pair(self, lmax, lo=0.05, hi=50.0, rmax=5.0, nprim=1):
        la, lb = (int(x) for x in self.rng.integers(0, lmax + 1, 2))
        a = self.rng.uniform(-1.0, 1.0, 3)
        d = self.rng.normal(size=3)
        b = a + d / np.linalg.norm(d) * self.rng.uniform(0.0, rmax)
        A = engine.make_shell(la, a, self._exponents(nprim, lo, hi), self.rng.uniform(0.2, 1.0, nprim))
        B = engine.make_shell(lb, b, self._exponents(nprim, lo, hi), self.rng.uniform(0.2, 1.0, nprim))
        return A, B

    def one_electron(self, n):
        res = SuiteResult("oracle_one_electron", n)
        for i in range(n):
            A, B = self._pair(self.lmax)
            c = self.rng.uniform(-3.0, 3.0, 3)
            case = {"suite": res.name, "index": i, "shells": [shell_dict(A), shell_dict(B)],
                    "nucleus": c.tolist()}
            for kind, got, ref in (
                ("overlap", engine.overlap(A, B, screening=False), mmd.solid_overlap(A, B)),
                ("nuclear", engine.nuclear_attraction(A, B, c, 1.0, screening=False),
                 mmd.solid_nuclear(A, B, [(c, 1.0)])),
            ):
                got = self._shgo(got)
                res.update(np.abs(got - ref), _mixed_tol(ref, 1e-10, 1e-13), dict(case, kind=kind))
        return res

    def eri(self, n):
        res = SuiteResult("oracle_eri", n)
        lmax = min(self.lmax, 3)
        for i in range(n):
            shells = []
            for _ in range(2):
                shells.extend(self._pair(lmax, 0.1, 10.0, 3.0, nprim=int(self.rng.integers(1, 3))))
            got = self._shgo(engine.eri(*shells, screening=False))
            ref = mmd.solid_eri(*shells)
            res.update(np.abs(got - ref), _mixed_tol(ref, 1e-9, 1e-12),
                       {"suite": res.name, "index": i, "shells": [shell_dict(s) for s in shells]})
        return res

    def quadrature(self, n):
        res = SuiteResult("quadrature_closure", n)
        for i in range(n):
            A, B = self._pair(min(self.lmax, 3), 0.3, 3.0, 2.0)
            ma = int(self.rng.integers(-A.l, A.l + 1))
            mb = int(self.rng.integers(-B.l, B.l + 1))
            c = self.rng.uniform(-1.5, 1.5, 3)
            fa, fb = BasisFunction.from_shell(A, ma), BasisFunction.from_shell(B, mb)
            case = {"suite": res.name, "index": i, "shells": [shell_dict(A), shell_dict(B)],
                    "components": [ma, mb], "nucleus": c.tolist()}
            s = self._shgo(engine.overlap(A, B))[ma + A.l, mb + B.l]
            v = self._shgo(engine.nuclear_attraction(A, B, c))[ma + A.l, mb + B.l]
            qs = quad_oracle_one_electron("overlap", fa, fb)
            qv = quad_oracle_one_electron("nuclear", fa, fb, c)
            res.update(np.array([abs(s - qs), abs(v - qv)]), np.array([1e-9, 1e-9]), case)
        return res

    def symmetry(self, n):
        res = SuiteResult("eri_symmetry", n)
        for i in range(n):
            shells = [engine.make_shell(int(self.rng.integers(0, min(self.lmax, 2) + 1)),
                                        self.rng.uniform(-1.0, 1.0, 3), self._exponents(1, 0.3, 3.0))
                      for _ in range(3)]
            g = self._shgo(engine.compute_eri_tensor(shells, use_symmetry=False, screening=False).data)
            err = max(np.abs(g - g.transpose(p)).max() for p in
                      [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1), (1, 0, 3, 2), (3, 2, 1, 0)])
            res.update(np.array([err]), np.array([1e-11]),
                       {"suite": res.name, "index": i, "shells": [shell_dict(s) for s in shells]})
        return res

    def invariance(self, n):
        res = SuiteResult("translation_invariance", n)
        for i in range(n):
            A, B = self._pair(self.lmax, 0.1, 10.0, 3.0)
            c = self.rng.uniform(-2.0, 2.0, 3)
            shift = self.rng.uniform(-5.0, 5.0, 3)
            A2 = engine.make_shell(A.l, A.center + shift, A.exponents, A.contraction)
            B2 = engine.make_shell(B.l, B.center + shift, B.exponents, B.contraction)
            v1 = self._shgo(engine.nuclear_attraction(A, B, c))
            v2 = engine.nuclear_attraction(A2, B2, c + shift)
            res.update(np.abs(v1 - v2), _mixed_tol(v1, 1e-12, 1e-14),
                       {"suite": res.name, "index": i, "shells": [shell_dict(A), shell_dict(B)],
                        "nucleus": c.tolist(), "shift": shift.tolist()})
        return res

    def run(self, suite: str) -> list[SuiteResult]:
        if suite not in SUITE_SIZES:
            raise ValueError(f"unknown suite {suite!r}")
        sizes = SUITE_SIZES[suite]
        self.results = [
            self.one_electron(sizes["one_electron"]),
            self.eri(sizes["eri"]),
            self.quadrature(sizes["quadrature"]),
            self.symmetry(sizes["symmetry"]),
            self.invariance(sizes["invariance"]),
        ]
        return self.results


def format_report(results, suite: str, seed: int, lmax: int) -> str:
    lines = [f"verify suite={suite} seed={seed} lmax={lmax}"]
    for r in results:
        lines.append(f"{r.name:<24} cases={r.cases:<4} worst_error={r.worst_error:.3e} "
                     f"worst/allowed={r.worst_ratio:.3e} {'PASS' if r.passed else 'FAIL'}")
    ok = all(r.passed for r in results)
    lines.append("overall " + ("PASS" if ok else "FAIL"))
    return "\n".join(lines) + "\n"


def write_replay(results, path, suite: str, seed: int, lmax: int) -> Path:
    bundle = {"suite": suite, "seed": seed, "lmax": lmax,
              "failures": [r.failure for r in results if r.failure is not None]}
    path = Path(path)
    path.write_text(json.dumps(bundle, indent=2, sort_keys=True), encoding="utf-8")
    return path
