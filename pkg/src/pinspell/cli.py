"""Command-line entry point.

Exit codes: 0 success, 2 usage/configuration error, 1 runtime failure.
Diagnostics go to stderr; data goes to stdout or output files.

A flat JSON config file (--config, or the PINSPELL_CONFIG environment
variable) supplies defaults; explicit flags override it.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import PinspellError
from .index import (
    INDEX_FORMAT_VERSION,
    RetrieverConfig,
    build_index,
    expand_lexicon,
    ingest_lexicon,
    load_index,
    save_index,
)
from .losses import TargetSentence, combined_loss, nll_loss
from .metrics import EvalPair, evaluate, format_report, load_pairs
from .pinyin import (
    default_fuzzy_rules,
    default_general_words,
    default_reading_table,
    load_fuzzy_rules,
    load_reading_table,
)
from .pipeline import PipelineConfig, Resources, run_file
from .retrieve import SourceSentence, retrieve
from .segment import build_segment_dict, load_word_list
from .speller import (
    LM_FORMAT_VERSION,
    BaselineSpeller,
    ConfusionSet,
    NGramModel,
    SpellerWeights,
)

log = logging.getLogger("pinspell")

CONFIG_ENV_VAR = "PINSPELL_CONFIG"

CONFIG_KEYS = (
    "readings", "general_words", "fuzzy_rules", "index", "lm", "confusion",
    "theta", "top_k", "ngram_max", "order", "k", "min_freq", "min_len",
    "w_lm", "w_chan", "w_ret", "no_retrieval", "no_secondary_search",
)


class _Config:
    """Flag > config file > built-in default."""

    def __init__(self, path: str | None):
        self.values: dict = {}
        self.path = path or os.environ.get(CONFIG_ENV_VAR)
        if self.path:
            if not Path(self.path).exists():
                raise PinspellError(f"config file not found: {self.path}")
            with open(self.path, encoding="utf-8") as f:
                self.values = json.load(f)
            unknown = set(self.values) - set(CONFIG_KEYS)
            if unknown:
                raise PinspellError(f"unknown config keys: {', '.join(sorted(unknown))}")

    def get(self, key: str, flag_value, default):
        if flag_value is not None:
            return flag_value
        if key in self.values:
            return self.values[key]
        return default


def _require_files(*paths: str | None) -> None:
    for p in paths:
        if p is not None and not Path(p).exists():
            raise PinspellError(f"file not found: {p}")


def _load_table(cfg: _Config, flag_value):
    path = cfg.get("readings", flag_value, None)
    if path is None:
        return default_reading_table()
    _require_files(path)
    return load_reading_table(path)


def _load_general_words(cfg: _Config, flag_value) -> list[str]:
    path = cfg.get("general_words", flag_value, None)
    if path is None:
        return default_general_words()
    _require_files(path)
    return load_word_list(path)


def _print_config(effective: dict) -> None:
    for key in sorted(effective):
        print(f"{key}={effective[key]}")


def _retriever_config(index, cfg: _Config, args) -> RetrieverConfig:
    return RetrieverConfig(
        theta=float(cfg.get("theta", args.theta, 0.6)),
        ngram_max=index.ngram_max,
        top_k_per_query=int(cfg.get("top_k", args.top_k, 5)),
        fuzzy=index.fuzzy,
    )


def _speller_resources(args, cfg: _Config):
    _require_files(args.index, args.lm)
    index = load_index(args.index)
    table = _load_table(cfg, args.readings)
    confusion_path = cfg.get("confusion", args.confusion, None)
    if confusion_path is None:
        confusion = ConfusionSet.from_reading_table(table, index.fuzzy)
    else:
        _require_files(confusion_path)
        confusion = ConfusionSet.load(confusion_path)
    lm = NGramModel.load(args.lm)
    weights = SpellerWeights(
        w_lm=float(cfg.get("w_lm", args.w_lm, 1.0)),
        w_chan=float(cfg.get("w_chan", args.w_chan, 2.0)),
        w_ret=float(cfg.get("w_ret", args.w_ret, 3.0)),
    )
    speller = BaselineSpeller(confusion, lm, weights, table, index.fuzzy)
    words = [e.word for e in index.entries] + _load_general_words(cfg, args.general_words)
    seg_dict = build_segment_dict(words)
    retriever = _retriever_config(index, cfg, args)
    return index, table, seg_dict, speller, retriever


def cmd_build_index(args) -> int:
    cfg = _Config(args.config)
    _require_files(args.lexicon)
    table = _load_table(cfg, args.readings)
    rules_path = cfg.get("fuzzy_rules", args.fuzzy_rules, None)
    if rules_path is None:
        rules = default_fuzzy_rules()
    else:
        _require_files(rules_path)
        rules = load_fuzzy_rules(rules_path)
    ngram_max = int(cfg.get("ngram_max", args.ngram_max, 2))
    if args.print_config:
        _print_config({"lexicon": args.lexicon, "out": args.out, "ngram_max": ngram_max,
                       "fuzzy_rules": rules_path or "<bundled>",
                       "readings": cfg.get("readings", args.readings, "<bundled>")})
        return 0
    entries = ingest_lexicon(args.lexicon, table, rules)
    config = RetrieverConfig(ngram_max=ngram_max, fuzzy=rules)
    index = build_index(entries, config)
    save_index(index, args.out)
    print(f"indexed {len(index.entries)} entries -> {args.out}")
    return 0


def cmd_retrieve(args) -> int:
    cfg = _Config(args.config)
    _require_files(args.index)
    index = load_index(args.index)
    table = _load_table(cfg, args.readings)
    seg_dict = build_segment_dict(
        [e.word for e in index.entries] + _load_general_words(cfg, args.general_words)
    )
    retriever = _retriever_config(index, cfg, args)
    if args.print_config:
        _print_config({"index": args.index, "theta": retriever.theta,
                       "top_k": retriever.top_k_per_query, "ngram_max": retriever.ngram_max})
        return 0
    result = retrieve(SourceSentence(args.sentence), index, retriever, seg_dict, table)
    for term, score in zip(result.terms, result.per_term_score):
        print(f"{term}\t{score:.6f}")
    return 0


def cmd_correct(args) -> int:
    cfg = _Config(args.config)
    _require_files(args.dataset)
    index, _, seg_dict, speller, retriever = _speller_resources(args, cfg)
    no_retrieval = bool(cfg.get("no_retrieval", args.no_retrieval, False))
    no_secondary = bool(cfg.get("no_secondary_search", args.no_secondary_search, False))
    pipeline_config = PipelineConfig(
        use_retrieval=not no_retrieval,
        use_secondary_search=not (no_retrieval or no_secondary),
        retriever=retriever,
    )
    if args.print_config:
        _print_config({
            "dataset": args.dataset, "out": args.out, "index": args.index, "lm": args.lm,
            "use_retrieval": pipeline_config.use_retrieval,
            "use_secondary_search": pipeline_config.use_secondary_search,
            "theta": retriever.theta, "top_k": retriever.top_k_per_query,
            "w_lm": speller.weights.w_lm, "w_chan": speller.weights.w_chan,
            "w_ret": speller.weights.w_ret,
        })
        return 0
    res = Resources(speller=speller, table=speller.table, seg_dict=seg_dict, index=index)
    summary = run_file(args.dataset, args.out, pipeline_config, res)
    print(f"sentences={summary.sentences}")
    print(f"changed={summary.changed}")
    print(f"errors={summary.errors}")
    return 0


def cmd_eval(args) -> int:
    if args.print_config:
        _print_config({"pairs": args.pairs, "pred": args.pred, "gold": args.gold})
        return 0
    if args.pairs:
        _require_files(args.pairs)
        pairs = load_pairs(args.pairs)
    else:
        if not (args.pred and args.gold):
            raise PinspellError("eval needs either --pairs or both --pred and --gold")
        _require_files(args.pred, args.gold)
        with open(args.gold, encoding="utf-8") as f:
            gold_lines = [l.rstrip("\n") for l in f if l.strip()]
        with open(args.pred, encoding="utf-8") as f:
            pred_lines = [l.rstrip("\n") for l in f if l.strip()]
        if len(gold_lines) != len(pred_lines):
            raise PinspellError(
                f"line count mismatch: {len(gold_lines)} gold vs {len(pred_lines)} pred"
            )
        pairs = []
        for i, (g, p) in enumerate(zip(gold_lines, pred_lines), start=1):
            gf = g.split("\t")
            pf = p.split("\t")
            if len(gf) != 2:
                raise PinspellError(f"gold line {i}: expected '<source>\\t<target>'")
            if len(pf) != 2:
                raise PinspellError(f"pred line {i}: expected '<source>\\t<prediction>'")
            if gf[0] != pf[0]:
                raise PinspellError(f"line {i}: gold and pred sources differ")
            pairs.append(EvalPair(source=gf[0], gold=gf[1], pred=pf[1]))
    print(format_report(evaluate(pairs)))
    return 0


def cmd_expand_lexicon(args) -> int:
    cfg = _Config(args.config)
    if args.print_config:
        _print_config({
            "lexicon": args.lexicon, "corpus": args.corpus, "out": args.out,
            "min_freq": cfg.get("min_freq", args.min_freq, 2),
            "min_len": cfg.get("min_len", args.min_len, 2),
        })
        return 0
    _require_files(args.lexicon, args.corpus)
    table = _load_table(cfg, args.readings)
    rules_path = cfg.get("fuzzy_rules", args.fuzzy_rules, None)
    rules = load_fuzzy_rules(rules_path) if rules_path else default_fuzzy_rules()
    base = ingest_lexicon(args.lexicon, table, rules)
    seg_dict = build_segment_dict(
        [e.word for e in base] + _load_general_words(cfg, args.general_words)
    )
    expanded = expand_lexicon(
        args.corpus, base, seg_dict,
        min_freq=int(cfg.get("min_freq", args.min_freq, 2)),
        min_len=int(cfg.get("min_len", args.min_len, 2)),
        table=table, rules=rules,
    )
    with open(args.out, "w", encoding="utf-8") as f:
        for e in expanded:
            f.write(f"{e.word}\t{e.key.text}\n")
    print(f"{len(base)} base + {len(expanded) - len(base)} mined -> {args.out}")
    return 0


def cmd_train_lm(args) -> int:
    cfg = _Config(args.config)
    if args.print_config:
        _print_config({
            "corpus": args.corpus, "out": args.out,
            "order": cfg.get("order", args.order, 3),
            "k": cfg.get("k", args.k, 0.01),
        })
        return 0
    _require_files(args.corpus)
    with open(args.corpus, encoding="utf-8") as f:
        lm = NGramModel.train(
            f,
            order=int(cfg.get("order", args.order, 3)),
            k=float(cfg.get("k", args.k, 0.01)),
        )
    lm.save(args.out)
    print(f"order-{lm.order} model over {len(lm.vocab)} chars -> {args.out}")
    return 0


def cmd_diagnose_loss(args) -> int:
    cfg = _Config(args.config)
    if args.print_config:
        _print_config({
            "dataset": args.dataset, "index": args.index, "lm": args.lm,
            "no_gate": args.no_gate,
            "theta": cfg.get("theta", args.theta, 0.6),
            "top_k": cfg.get("top_k", args.top_k, 5),
        })
        return 0
    _require_files(args.dataset)
    index, table, seg_dict, speller, retriever = _speller_resources(args, cfg)
    sentences = 0
    skipped = 0
    open_gates = 0
    total_c = 0.0
    total_r = 0.0
    with open(args.dataset, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2 or len(fields[0]) != len(fields[1]):
                log.warning("%s:%d: need equal-length '<source>\\t<target>', skipped",
                            args.dataset, line_no)
                skipped += 1
                continue
            x = SourceSentence(fields[0])
            y = TargetSentence(fields[1])
            r = retrieve(x, index, retriever, seg_dict, table)
            m_c = speller.predict(x, None)
            m_r = speller.predict(x, r)
            if args.no_gate:
                loss_c = nll_loss(m_c, y)
                loss_r = nll_loss(m_r, y)
                gate_open = True
            else:
                breakdown = combined_loss(m_c, m_r, r, y)
                loss_c, loss_r, gate_open = breakdown.loss_c, breakdown.loss_r, breakdown.gate_open
            sentences += 1
            open_gates += int(gate_open)
            total_c += loss_c
            total_r += loss_r
    print(f"sentences={sentences}")
    print(f"skipped={skipped}")
    print(f"gate_open={open_gates}")
    print(f"loss_c={total_c:.6f}")
    print(f"loss_r={total_r:.6f}")
    print(f"loss_total={total_c + total_r:.6f}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat JSON config file (or set $PINSPELL_CONFIG)")
    parser.add_argument("--print-config", action="store_true",
                        help="print the effective configuration and exit")


def _add_retrieval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--readings", help="reading-table TSV (default: bundled)")
    parser.add_argument("--general-words", help="general word list (default: bundled)")
    parser.add_argument("--theta", type=float, help="similarity threshold (default 0.6)")
    parser.add_argument("--top-k", type=int, help="matches kept per query (default 5)")


def _add_speller_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--index", required=True, help="index artifact from build-index")
    parser.add_argument("--lm", required=True, help="language-model artifact from train-lm")
    parser.add_argument("--confusion", help="confusion-set TSV (default: derived from readings)")
    parser.add_argument("--w-lm", type=float, help="LM weight (default 1.0)")
    parser.add_argument("--w-chan", type=float, help="change-penalty weight (default 2.0)")
    parser.add_argument("--w-ret", type=float, help="retrieval-bonus weight (default 3.0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinspell",
        description="Retrieval-augmented Chinese spelling check toolkit",
    )
    parser.add_argument(
        "--version", action="version",
        version=(f"pinspell {__version__} "
                 f"(index format {INDEX_FORMAT_VERSION}, lm format {LM_FORMAT_VERSION})"),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="ingest a lexicon and write an index artifact")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--readings")
    p.add_argument("--fuzzy-rules", help="fuzzy-rule JSON (default: bundled)")
    p.add_argument("--ngram-max", type=int, help="max syllable n-gram length (default 2)")
    _add_common(p)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("retrieve", help="print the domain terms retrieved for one sentence")
    p.add_argument("--index", required=True)
    _add_retrieval_flags(p)
    _add_common(p)
    p.add_argument("sentence")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("correct", help="correct a dataset file")
    p.add_argument("--dataset", required=True, help="TSV: <source>[\\t<target>] per line")
    p.add_argument("--out", required=True, help="predictions file: <source>\\t<prediction>")
    _add_speller_flags(p)
    _add_retrieval_flags(p)
    p.add_argument("--no-retrieval", action="store_const", const=True,
                   help="disable retrieval (bare speller)")
    p.add_argument("--no-secondary-search", action="store_const", const=True,
                   help="single-pass correction")
    _add_common(p)
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("eval", help="sentence-level detection/correction P/R/F1")
    p.add_argument("--pairs", help="TSV: <source>\\t<gold>\\t<pred>")
    p.add_argument("--pred", help="prediction file from correct")
    p.add_argument("--gold", help="dataset TSV with targets")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("expand-lexicon", help="mine frequent corpus words into a lexicon")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--readings")
    p.add_argument("--general-words")
    p.add_argument("--fuzzy-rules")
    p.add_argument("--min-freq", type=int, help="minimum corpus frequency (default 2)")
    p.add_argument("--min-len", type=int, help="minimum word length (default 2)")
    _add_common(p)
    p.set_defaults(func=cmd_expand_lexicon)

    p = sub.add_parser("train-lm", help="train the char n-gram model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--order", type=int, help="n-gram order (default 3)")
    p.add_argument("--k", type=float, help="add-k smoothing constant (default 0.01)")
    _add_common(p)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("diagnose-loss", help="gated loss arithmetic over a labelled dataset")
    p.add_argument("--dataset", required=True, help="TSV: <source>\\t<target>")
    p.add_argument("--no-gate", action="store_true",
                   help="always include the retrieval branch loss")
    _add_speller_flags(p)
    _add_retrieval_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_diagnose_loss)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PinspellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
