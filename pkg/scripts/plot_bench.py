"""Plot a ``shgo bench`` CSV: timings and speed-up ratio against l.

    python scripts/plot_bench.py bench.csv -o bench.png

Needs matplotlib (``pip install -e .[plot]``).
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from shgoints.bench import op_count_model, read_csv  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", default="bench.png")
    args = ap.parse_args(argv)

    rows = read_csv(args.csv)
    ls = [int(r["l"]) for r in rows]
    t_shgo = [int(r["t_shgo_ns"]) / 1e6 for r in rows]
    t_cgto = [int(r["t_cgto_ns"]) / 1e6 for r in rows]
    ratio = [float(r["ratio"]) for r in rows]
    nprim = int(rows[0]["p"])
    model = [c / s for c, s in (op_count_model(l, nprim) for l in ls)]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.semilogy(ls, t_shgo, "o-", label="solid harmonic")
    ax1.semilogy(ls, t_cgto, "s-", label="Cartesian (MMD)")
    ax1.set_xlabel("l")
    ax1.set_ylabel("median time per shell pair [ms]")
    ax1.legend()
    ax2.semilogy(ls, ratio, "o-", label="measured")
    ax2.semilogy(ls, model, "--", label="operation-count model")
    ax2.axhline(1.0, color="grey", lw=0.8)
    ax2.set_xlabel("l")
    ax2.set_ylabel("speed-up")
    ax2.legend()
    for ax in (ax1, ax2):
        ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    fig.suptitle(f"{rows[0]['kind']} integrals, P = {nprim}")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
