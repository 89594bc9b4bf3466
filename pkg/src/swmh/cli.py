"""Command-line front end: ``swmh mine | eval | features``.

Settings come from defaults, then an optional ``--config`` file of
``key=value`` lines (keys are flag names without the leading dashes), then
explicit flags.  Exit codes: 0 success, 1 usage error, 2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import logging
import resource
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from . import formats
from .cluster import stage2_params
from .corpus import CorpusError, build_inverted_file, load_corpus, load_labels
from .evaluation import coherence_report, doc_topic_features, rank_score
from .minhash import MiningParams, ParameterError, compute_tables
from .partition import write_coterm_sets
from .pipeline import mine_topics

log = logging.getLogger("swmh")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    docword: str | None = None
    vocab: str | None = None
    labels: str | None = None
    out: str | None = None
    weighted: bool = True
    s_star: float = 0.10
    r: int = 3
    tables: int | None = None
    quantization: int = 1
    overlap: float = 0.7
    min_set_size: int = 3
    min_cluster_size: int = 1
    min_term_freq: int = 6
    top_m: int = 10
    seed: int = 0
    threads: int = 1
    fraction: float = 1.0
    stage2_s_star: float | None = None
    stage2_r: int = 3
    candidates: str = "minhash"
    dump_sets: bool = False

    def mining_params(self) -> MiningParams:
        l = self.tables if self.tables is not None else compute_tables(self.s_star, self.r)
        return MiningParams(
            r=self.r, l=l, s_star=self.s_star, quantization=self.quantization,
            seed=self.seed, weighted=self.weighted,
        )

    def stage2(self) -> MiningParams:
        return stage2_params(self.overlap, self.seed, self.stage2_r, self.stage2_s_star)

    def validate(self) -> None:
        try:
            self.mining_params()
            if self.candidates == "minhash":
                self.stage2()
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
        if not 0 < self.overlap <= 1:
            raise UsageError("--overlap must lie in (0, 1]")
        if not 0 < self.fraction <= 1:
            raise UsageError("--fraction must lie in (0, 1]")
        if self.min_set_size < 1 or self.min_cluster_size < 1:
            raise UsageError("--min-set-size and --min-cluster-size must be >= 1")
        if self.min_term_freq < 0:
            raise UsageError("--min-term-freq must be >= 0")
        if self.top_m < 2:
            raise UsageError("--top-m must be >= 2")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.candidates not in ("minhash", "exact"):
            raise UsageError("--candidates must be 'minhash' or 'exact'")
        if self.tables is not None and self.tables < 1:
            raise UsageError("--tables must be >= 1")


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value: str):
    kind = _TYPES[key]
    if "bool" in kind:
        lowered = value.strip().lower()
        if lowered in ("1", "true", "yes", "on", "weighted"):
            return True
        if lowered in ("0", "false", "no", "off", "unweighted"):
            return False
        raise UsageError(f"config: {key} expects a boolean, got {value!r}")
    if value.strip().lower() in ("", "none") and "None" in kind:
        return None
    try:
        if kind.startswith("int"):
            return int(value)
        if kind.startswith("float"):
            return float(value)
    except ValueError:
        raise UsageError(f"config: {key} expects a number, got {value!r}") from None
    return value.strip()


def read_config(path: str) -> dict:
    settings = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key == "mode":
            key, value = "weighted", value
        if key not in _TYPES:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        settings[key] = _coerce(key, value)
    return settings


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swmh", description="Topic mining by Min-Hashing weighted inverted-file lists.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def corpus_args(p):
        p.add_argument("--docword", help="UCI docword file (.gz accepted)")
        p.add_argument("--vocab", help="UCI vocabulary file")
        p.add_argument("--labels", help="one integer class per document")
        p.add_argument("--min-term-freq", type=int, help="drop terms rarer than this (default 6)")
        p.add_argument("--fraction", type=float, help="use the first ceil(fraction*D) documents")
        p.add_argument("--top-m", type=int, help="terms used for coherence and ranking (default 10)")
        p.add_argument("--threads", type=int, help="worker threads (default 1)")
        p.add_argument("--config", help="key=value settings file")
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    mine = sub.add_parser("mine", help="mine topics into an output directory")
    corpus_args(mine)
    mine.add_argument("--out", help="output directory")
    mode = mine.add_mutually_exclusive_group()
    mode.add_argument("--weighted", dest="weighted", action="store_true", default=None)
    mode.add_argument("--unweighted", dest="weighted", action="store_false")
    mine.add_argument("--s-star", type=float)
    mine.add_argument("--r", type=int)
    mine.add_argument("--tables", type=int, help="explicit number of tables; overrides --s-star")
    mine.add_argument("--quantization", type=int)
    mine.add_argument("--overlap", type=float, help="overlap threshold eps for merging")
    mine.add_argument("--min-set-size", type=int)
    mine.add_argument("--min-cluster-size", type=int)
    mine.add_argument("--seed", type=int)
    mine.add_argument("--stage2-s-star", type=float)
    mine.add_argument("--stage2-r", type=int)
    mine.add_argument("--candidates", choices=("minhash", "exact"))
    mine.add_argument("--dump-sets", action="store_true", default=None, help="also write cotermsets.txt")

    for name, helptext in (("eval", "coherence CSV for a topics file"), ("features", "SVM-light document features")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("topics", help="topics file written by 'mine'")
        corpus_args(p)
        p.add_argument("--out", help="output file (default stdout)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = read_config(args.config) if getattr(args, "config", None) else {}
    for key in _TYPES:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    cfg = RunConfig(**settings)
    cfg.validate()
    return cfg


def _peak_rss_mb() -> float:
    # ru_maxrss is in kilobytes on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def _load(cfg: RunConfig):
    if not cfg.docword or not cfg.vocab:
        raise UsageError("--docword and --vocab are required")
    corpus = load_corpus(cfg.docword, cfg.vocab, cfg.min_term_freq, fraction=cfg.fraction)
    if cfg.labels:
        corpus.labels = load_labels(cfg.labels, corpus.num_docs)
    return corpus


def cmd_mine(cfg: RunConfig) -> dict:
    if not cfg.out:
        raise UsageError("--out is required for mine")
    params = cfg.mining_params()
    stage2 = cfg.stage2() if cfg.candidates == "minhash" else None
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    corpus = _load(cfg)
    inv = build_inverted_file(corpus)
    t1 = time.perf_counter()
    log.info("loaded %d documents, %d terms", corpus.num_docs, corpus.vocab_size)
    result = mine_topics(
        inv, params, eps=cfg.overlap, min_set_size=cfg.min_set_size,
        min_cluster_size=cfg.min_cluster_size, M=cfg.top_m, stage2=stage2,
        candidates=cfg.candidates, threads=cfg.threads,
    )
    log.info("%d co-occurring term sets, %d topics", len(result.sets), len(result.topics))
    with open(out / "topics.txt", "w", encoding="utf-8", newline="\n") as f:
        formats.write_topics(result.topics, corpus.vocab, f)
    if cfg.dump_sets:
        with open(out / "cotermsets.txt", "w", encoding="utf-8", newline="\n") as f:
            write_coterm_sets(result.sets, f)
    t2 = time.perf_counter()
    stats = {
        "documents": corpus.num_docs,
        "vocab_size": corpus.vocab_size,
        "tables": params.l,
        "coterm_sets": len(result.sets),
        "topics": len(result.topics),
        "seconds_load": f"{t1 - t0:.4f}",
        "seconds_partition": f"{result.timings['partition']:.4f}",
        "seconds_cluster": f"{result.timings['cluster']:.4f}",
        "seconds_rank": f"{result.timings['rank']:.4f}",
        "seconds_total": f"{t2 - t0:.4f}",
        "peak_rss_mb": f"{_peak_rss_mb():.1f}",
    }
    with open(out / "stats.csv", "w", encoding="utf-8", newline="\n") as f:
        formats.write_stats([stats], f)
    return stats


def _read_topics(cfg: RunConfig, path: str, corpus):
    with open(path, encoding="utf-8") as f:
        try:
            return formats.read_topics(f, corpus.term_index())
        except formats.TopicsFileError as exc:
            raise formats.TopicsFileError(f"{path}: {exc}") from None


def _output(cfg: RunConfig):
    if cfg.out:
        return open(cfg.out, "w", encoding="utf-8", newline="\n")
    return _Unclosable(sys.stdout)


class _Unclosable:
    def __init__(self, stream):
        self.stream = stream

    def __enter__(self):
        return self.stream

    def __exit__(self, *exc):
        self.stream.flush()


def cmd_eval(cfg: RunConfig, topics_path: str) -> None:
    corpus = _load(cfg)
    inv = build_inverted_file(corpus)
    topics = _read_topics(cfg, topics_path, corpus)
    report = coherence_report(topics, inv, cfg.top_m)
    scores = [rank_score(t, inv, cfg.top_m) for t in topics]
    with _output(cfg) as f:
        formats.write_coherence_csv(report, topics, scores, f)


def cmd_features(cfg: RunConfig, topics_path: str) -> None:
    corpus = _load(cfg)
    topics = _read_topics(cfg, topics_path, corpus)
    if not topics:
        raise CorpusError(f"{topics_path}: no topics")
    features = doc_topic_features(corpus, topics)
    labels = corpus.labels if corpus.labels is not None else [0] * corpus.num_docs
    with _output(cfg) as f:
        formats.write_svmlight(features, labels, f)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(asctime)s %(name)s %(levelname)s %(message)s",
        )
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        cfg = resolve_config(args)
        if args.command == "mine":
            cmd_mine(cfg)
        elif args.command == "eval":
            cmd_eval(cfg, args.topics)
        else:
            cmd_features(cfg, args.topics)
    except UsageError as exc:
        print(f"swmh: usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"swmh: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
