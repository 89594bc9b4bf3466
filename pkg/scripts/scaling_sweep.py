"""Mine growing prefixes of a corpus and fit wall time against document count.

    python scripts/scaling_sweep.py --docword D --vocab V --out sweep/
"""

import argparse
from pathlib import Path

import numpy as np

from swmh import formats
from swmh.cli import RunConfig, cmd_mine


def sweep(base: RunConfig, fractions, out: Path) -> list[dict]:
    rows = []
    for frac in fractions:
        cfg = RunConfig(**{**vars(base), "fraction": frac, "out": str(out / f"f{frac:.2f}")})
        cfg.validate()
        rows.append(cmd_mine(cfg))
    return rows


def linear_r2(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return 1.0 - resid @ resid / ((y - y.mean()) @ (y - y.mean()))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docword", required=True)
    parser.add_argument("--vocab", required=True)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--min-term-freq", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    base = RunConfig(
        docword=args.docword, vocab=args.vocab, min_term_freq=args.min_term_freq,
        seed=args.seed, threads=args.threads,
    )
    fractions = [k / 10 for k in range(1, 11)]
    rows = sweep(base, fractions, args.out)
    with open(args.out / "scaling.csv", "w", newline="\n") as f:
        formats.write_stats(rows, f)
    docs = [r["documents"] for r in rows]
    secs = [float(r["seconds_total"]) for r in rows]
    print(f"R^2 of linear fit (time vs documents): {linear_r2(docs, secs):.4f}")


if __name__ == "__main__":
    main()
