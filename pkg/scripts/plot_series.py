"""Plot growth CSVs written by ``annular growth``.

    python3 scripts/plot_series.py z.csv wall.csv -o growth.png

Understands the three layouts the CLI emits: (n, value, k_n, ratio),
(n, l, b, r) and the wallpaper table (n, engine, paperFormula, ...).
"""
import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_series(path):
    rows = [line for line in Path(path).read_text().splitlines() if line and not line.startswith("#")]
    reader = csv.DictReader(rows)
    out = {}
    for row in reader:
        for key, val in row.items():
            if key == "n" or val in ("", None):
                continue
            try:
                point = (int(row["n"]), float(val))
            except ValueError:
                continue
            out.setdefault(key, []).append(point)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--out", default="series.png")
    args = ap.parse_args(argv)

    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for path in args.csv:
        stem = Path(path).stem
        for key, pts in read_series(path).items():
            xs, ys = zip(*pts)
            if key in ("ratio", "r"):
                bottom.plot(xs, ys, marker="o", label=f"{stem}: {key}")
            elif key in ("value", "l", "b", "k_n", "engine", "paperFormula"):
                top.semilogy(xs, ys, marker=".", label=f"{stem}: {key}")
    top.set_ylabel("count")
    bottom.set_ylabel("ratio")
    bottom.set_xlabel("n")
    for ax in (top, bottom):
        if ax.lines:
            ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
