"""Command line entry point: ``shgo compute | verify | bench``.

Exit codes: 0 success, 1 computation or verification failure, 2 usage error.
``SHGO_LOG=debug|info`` turns on diagnostics on standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import bench, engine, mmd
from .io_model import ParseError, TensorFileError, build_shells, read_basis, read_molecule, write_tensor
from .verify import Verifier, format_report, write_replay

log = logging.getLogger("shgoints")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _setup_logging():
    level = os.environ.get("SHGO_LOG", "").lower()
    if level in ("debug", "info"):
        logging.basicConfig(stream=sys.stderr, level=getattr(logging, level.upper()),
                            format="%(levelname)s %(name)s: %(message)s")
    else:
        logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shgo", description="Molecular integrals over solid harmonic Gaussians.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("compute", help="compute an integral tensor for a molecule")
    c.add_argument("--molecule", required=True, help="XYZ file")
    c.add_argument("--basis", required=True, help="basis set text file")
    c.add_argument("--kind", required=True, choices=("overlap", "nuclear", "eri"))
    c.add_argument("--engine", default="shgo", choices=("shgo", "cgto"))
    c.add_argument("--out", required=True, help="output tensor path")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--no-screening", action="store_true")

    v = sub.add_parser("verify", help="run the seeded verification suites")
    v.add_argument("--suite", default="quick", choices=("quick", "full"))
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--lmax", type=int, default=4)
    v.add_argument("--replay", default="shgo-replay.json", help="where a failing case is written")
    v.add_argument("--debug-corrupt", action="store_true", help=argparse.SUPPRESS)

    b = sub.add_parser("bench", help="time the engine against the Cartesian reference")
    b.add_argument("--kind", default="nuclear", choices=("nuclear", "eri"))
    b.add_argument("--lmax", type=int, default=8)
    b.add_argument("--nprim", type=int, default=10)
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--out", required=True, help="CSV output path")
    b.add_argument("--threads", type=int, default=1)
    return p


def cmd_compute(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    try:
        mol = read_molecule(args.molecule)
        basis = read_basis(args.basis)
        shells = build_shells(mol, basis)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    nuclei = mol.nuclei()
    screening = not args.no_screening
    t0 = time.perf_counter()
    if args.engine == "shgo":
        if args.kind == "eri":
            tensor = engine.compute_eri_tensor(shells, screening=screening, threads=args.threads)
        else:
            tensor = engine.compute_matrix(args.kind, shells, nuclei, screening=screening, threads=args.threads)
    else:
        if args.kind == "eri":
            data = mmd.compute_eri_tensor(shells)
        else:
            data = mmd.compute_matrix(args.kind, shells, nuclei)
        tensor = engine.IntegralTensor(data, metadata={"engine": "cgto", "kind": args.kind, "screening": False})
    elapsed = time.perf_counter() - t0
    tensor.metadata["molecule"] = os.path.basename(args.molecule)
    tensor.metadata["basis_file"] = os.path.basename(args.basis)
    write_tensor(tensor, args.out)
    data = tensor.data
    print(f"kind={args.kind} engine={args.engine} shells={len(shells)} dims={'x'.join(map(str, tensor.dims))}")
    print(f"frobenius_norm={np.linalg.norm(data):.12e} max_abs={np.max(np.abs(data)):.12e}")
    print(f"elapsed_s={elapsed:.4f} out={args.out}")
    return 0


def cmd_verify(args) -> int:
    if args.lmax < 0:
        raise UsageError("--lmax must be non-negative")
    ver = Verifier(seed=args.seed, lmax=args.lmax, corrupt=args.debug_corrupt)
    results = ver.run(args.suite)
    sys.stdout.write(format_report(results, args.suite, args.seed, args.lmax))
    if all(r.passed for r in results):
        return 0
    path = write_replay(results, args.replay, args.suite, args.seed, args.lmax)
    print(f"verification failed; replay bundle written to {path}", file=sys.stderr)
    return 1


def cmd_bench(args) -> int:
    if args.lmax < 0 or args.nprim < 1 or args.reps < 1:
        raise UsageError("--lmax >= 0, --nprim >= 1 and --reps >= 1 are required")
    if args.threads != 1:
        log.warning("benchmarks time single-threaded kernels; --threads is ignored")

    def progress(row):
        log.info("l=%d shgo=%dns cgto=%dns", row.l, row.shgo.wall_ns, row.cgto.wall_ns)

    rows = bench.run_bench(args.kind, args.lmax, args.nprim, args.reps, progress)
    bench.write_csv(rows, args.out)
    print(bench.report(rows))
    print(f"csv written to {args.out}")
    return 0


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"compute": cmd_compute, "verify": cmd_verify, "bench": cmd_bench}[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"shgo: error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, TensorFileError, KeyError, ValueError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"shgo: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
