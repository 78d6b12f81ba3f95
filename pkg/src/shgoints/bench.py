"""Speed-up benchmark: solid harmonic engine against the Cartesian reference.

Both engines run unscreened on identical synthetic tasks: shells of degree
l with P primitives (exponents log-spaced in [0.1, 10], unit contraction)
on centers 1.5 bohr apart, with a unit nucleus on every center.  The ERI
task places four centers on a regular tetrahedron of edge 1.5 bohr.
"""

from __future__ import annotations

import csv
import gc
import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import engine, mmd

CSV_COLUMNS = ("l", "p", "kind", "t_shgo_ns", "t_cgto_ns", "ratio", "max_abs_diff")
CSV_SCHEMA_VERSION = 1
SEPARATION = 1.5
EXPONENT_RANGE = (0.1, 10.0)
AGREEMENT_TOL = 1e-10


class BenchDisagreement(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchRecord:
    l_max: int
    n_prim: int
    engine: str
    kind: str
    wall_ns: int  # median
    repetitions: int
    checksum: float  # sum of all integrals, compared with tolerance
    min_ns: int
    max_ns: int


@dataclass(frozen=True)
class BenchRow:
    l: int
    p: int
    kind: str
    shgo: BenchRecord
    cgto: BenchRecord
    max_abs_diff: float

    @property
    def ratio(self) -> float:
        return self.cgto.wall_ns / self.shgo.wall_ns

    def csv_row(self) -> list:
        return [self.l, self.p, self.kind, self.shgo.wall_ns, self.cgto.wall_ns,
                f"{self.ratio:.6g}", f"{self.max_abs_diff:.3e}"]


def centers(kind: str) -> np.ndarray:
    if kind == "nuclear":
        return np.array([[0.0, 0.0, 0.0], [0.0, 0.0, SEPARATION]])
    s = SEPARATION
    return np.array([
        [0.0, 0.0, 0.0],
        [s, 0.0, 0.0],
        [s / 2, s * math.sqrt(3) / 2, 0.0],
        [s / 2, s * math.sqrt(3) / 6, s * math.sqrt(2.0 / 3.0)],
    ])


def synthetic_task(kind: str, l: int, nprim: int):
    ex = np.geomspace(*EXPONENT_RANGE, nprim)
    shells = [engine.make_shell(l, c, ex, np.ones(nprim)) for c in centers(kind)]
    nuclei = [(c, 1.0) for c in centers(kind)]
    return shells, nuclei


def _time_pair(fn_a, fn_b, reps: int):
    """Time two callables with their repetitions interleaved.

    Alternating a, b, a, b keeps slow drift in machine speed (shared CPUs,
    frequency scaling) from landing on one engine only.  Garbage collection
    is paused around each timed call, as ``timeit`` does.
    """
    res_a, res_b = fn_a(), fn_b()  # warm-up: caches and tables, excluded from timing
    sa, sb = [], []
    gc_was_enabled = gc.isenabled()
    try:
        for _ in range(reps):
            for fn, samples in ((fn_a, sa), (fn_b, sb)):
                gc.collect()
                gc.disable()
                t0 = time.perf_counter_ns()
                fn()
                samples.append(max(1, time.perf_counter_ns() - t0))
                if gc_was_enabled:
                    gc.enable()
    finally:
        if gc_was_enabled:
            gc.enable()
    return (res_a, sa), (res_b, sb)


def _record(name, kind, l, nprim, result, samples) -> BenchRecord:
    return BenchRecord(l, nprim, name, kind, int(statistics.median(samples)), len(samples),
                       float(np.sum(result)), min(samples), max(samples))


def bench_one(kind: str, l: int, nprim: int, reps: int) -> BenchRow:
    shells, nuclei = synthetic_task(kind, l, nprim)
    if kind == "nuclear":
        A, B = shells

        def run_shgo():
            return engine.nuclear_attraction(A, B, nuclei=nuclei, screening=False)

        def run_cgto():
            return mmd.solid_nuclear(A, B, nuclei)
    elif kind == "eri":
        def run_shgo():
            return engine.eri(*shells, screening=False)

        def run_cgto():
            return mmd.solid_eri(*shells)
    else:
        raise ValueError(f"unknown benchmark kind {kind!r}")
    (r1, s1), (r2, s2) = _time_pair(run_shgo, run_cgto, reps)
    diff = float(np.max(np.abs(r1 - r2)))
    scale = max(1.0, float(np.max(np.abs(r2))))
    if not diff <= AGREEMENT_TOL * scale:
        raise BenchDisagreement(f"engines disagree at l={l}: max |diff| = {diff:.3e}")
    return BenchRow(l, nprim, kind, _record("shgo", kind, l, nprim, r1, s1),
                    _record("cgto", kind, l, nprim, r2, s2), diff)


def run_bench(kind: str, lmax: int, nprim: int, reps: int, progress=None) -> list[BenchRow]:
    if lmax < 0 or nprim < 1 or reps < 1:
        raise ValueError("lmax >= 0, nprim >= 1 and reps >= 1 are required")
    rows = []
    for l in range(lmax + 1):
        rows.append(bench_one(kind, l, nprim, reps))
        if progress:
            progress(rows[-1])
    return rows


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(r.csv_row())


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def fit_exponent(ls, times) -> float:
    """Slope of log(time) against log(l + 1), least squares."""
    x = np.log(np.asarray(ls, dtype=float) + 1.0)
    y = np.log(np.asarray(times, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def fit_exponents(rows, lmin: int = 2) -> tuple[float, float] | None:
    """(shgo, cgto) scaling exponents over rows with l >= lmin."""
    sel = [r for r in rows if r.l >= lmin]
    if len(sel) < 2:
        return None
    ls = [r.l for r in sel]
    return (fit_exponent(ls, [r.shgo.wall_ns for r in sel]),
            fit_exponent(ls, [r.cgto.wall_ns for r in sel]))


def op_count_model(l: int, nprim: int) -> tuple[float, float]:
    """Operation counts for nuclear attraction per the published cost table.

    Cartesian route: Boys LP^2, Hermite integrals L^4P^2, expansion
    coefficients L^2P^2, Cartesian integrals L^7P^2, contraction L^3P^2,
    solid harmonics L^5.  Solid harmonic route: L^2 + L^2P^2 + LP^2.
    L is taken as l + 1 so that s shells cost one unit.
    """
    L, P2 = l + 1, nprim * nprim
    cgto = (L + L ** 4 + L ** 2 + L ** 7 + L ** 3) * P2 + L ** 5
    shgo = L ** 2 + L ** 2 * P2 + L * P2
    return float(cgto), float(shgo)


def report(rows) -> str:
    lines = [f"benchmark schema v{CSV_SCHEMA_VERSION}: kind={rows[0].kind} P={rows[0].p} "
             f"reps={rows[0].shgo.repetitions} (median reported, warm-up excluded)"]
    lines.append(f"{'l':>2} {'shgo ms':>10} {'[min,max]':>19} {'cgto ms':>10} {'[min,max]':>19} "
                 f"{'ratio':>9} {'model':>9} {'max|diff|':>10}")
    for r in rows:
        c, s = op_count_model(r.l, r.p)
        lines.append(
            f"{r.l:>2} {r.shgo.wall_ns / 1e6:>10.3f} [{r.shgo.min_ns / 1e6:>8.3f},{r.shgo.max_ns / 1e6:>8.3f}] "
            f"{r.cgto.wall_ns / 1e6:>10.3f} [{r.cgto.min_ns / 1e6:>8.3f},{r.cgto.max_ns / 1e6:>8.3f}] "
            f"{r.ratio:>9.3g} {c / s:>9.3g} {r.max_abs_diff:>10.2e}")
    fits = fit_exponents(rows)
    if fits:
        lines.append(f"scaling fit over l >= 2, time ~ (l+1)^k: shgo k = {fits[0]:.2f}, "
                     f"cgto k = {fits[1]:.2f}, gap = {fits[1] - fits[0]:.2f}")
    return "\n".join(lines)
