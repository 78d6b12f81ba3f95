from pathlib import Path

import numpy as np

from shgoints import engine

DATA = Path(__file__).resolve().parent.parent / "data"


def random_shell(rng, lmax, nprim=1, lo=0.1, hi=10.0, spread=1.5, l=None):
    l = int(rng.integers(0, lmax + 1)) if l is None else l
    return engine.make_shell(l, rng.uniform(-spread, spread, 3),
                             np.exp(rng.uniform(np.log(lo), np.log(hi), nprim)),
                             rng.uniform(0.2, 1.0, nprim))


def mixed_close(got, ref, rel, floor, small=1e-6):
    ref = np.asarray(ref)
    tol = np.where(np.abs(ref) < small, floor, rel * np.abs(ref))
    return bool(np.all(np.abs(np.asarray(got) - ref) <= tol))


def block_close(got, ref, rel):
    """Agreement relative to the largest magnitude in the reference block."""
    ref = np.asarray(ref)
    return float(np.max(np.abs(np.asarray(got) - ref))) <= rel * max(float(np.max(np.abs(ref))), 1e-300)
