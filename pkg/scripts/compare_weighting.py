"""Topic counts of weighted vs unweighted mining over the six standard table sizes.

(s*, r) in {0.15, 0.13, 0.10} x {3, 4} gives 205, 315, 693, 1369, 2427 and
6931 tables.  Runs on a UCI corpus, or on a heavy-tailed synthetic corpus
when no files are given.
"""

import argparse

from swmh.corpus import build_inverted_file, load_corpus
from swmh.minhash import MiningParams
from swmh.pipeline import mine_topics
from swmh.synthetic import heavy_tailed_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docword")
    parser.add_argument("--vocab")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--overlap", type=float, default=0.7)
    args = parser.parse_args()

    if args.docword:
        corpus = load_corpus(args.docword, args.vocab)
    else:
        corpus, _ = heavy_tailed_corpus(num_docs=1000, seed=args.seed)
    inv = build_inverted_file(corpus)

    grid = sorted(
        (MiningParams.from_threshold(s, r, seed=args.seed).l, s, r)
        for s in (0.15, 0.13, 0.10)
        for r in (3, 4)
    )
    print("tables,s_star,r,topics_smh,topics_swmh,mean_size_smh,mean_size_swmh")
    for l, s, r in grid:
        counts, sizes = [], []
        for weighted in (False, True):
            params = MiningParams.from_threshold(s, r, seed=args.seed, weighted=weighted)
            topics = mine_topics(inv, params, eps=args.overlap).topics
            counts.append(len(topics))
            sizes.append(sum(len(t) for t in topics) / max(1, len(topics)))
        print(f"{l},{s},{r},{counts[0]},{counts[1]},{sizes[0]:.2f},{sizes[1]:.2f}")


if __name__ == "__main__":
    main()
