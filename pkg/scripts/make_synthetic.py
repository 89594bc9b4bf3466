"""Write a synthetic corpus in UCI format (docword.txt, vocab.txt, labels.txt)."""

import argparse
from pathlib import Path

from swmh.corpus import write_uci
from swmh.synthetic import block_corpus, heavy_tailed_corpus, planted_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=Path)
    parser.add_argument("--kind", choices=("planted", "heavy-tailed", "blocks"), default="planted")
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--topics", type=int, default=10)
    parser.add_argument("--background", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    kwargs = dict(num_docs=args.docs, seed=args.seed)
    if args.kind == "blocks":
        corpus, planted = block_corpus(**kwargs)
    else:
        kwargs["num_topics"] = args.topics
        if args.background is not None:
            kwargs["background_terms"] = args.background
        make = planted_corpus if args.kind == "planted" else heavy_tailed_corpus
        corpus, planted = make(**kwargs)

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "docword.txt", "wb") as dw, open(args.out / "vocab.txt", "wb") as vo:
        write_uci(corpus, dw, vo)
    # class label = planted topic of the document, 1-based
    owner = {t: k for k, group in enumerate(planted) for t in group}
    labels = [next((owner[t] + 1 for t in doc if t in owner), 0) for doc in corpus.docs]
    (args.out / "labels.txt").write_text("".join(f"{y}\n" for y in labels))
    print(f"{corpus.num_docs} documents, {corpus.vocab_size} terms -> {args.out}")


if __name__ == "__main__":
    main()
