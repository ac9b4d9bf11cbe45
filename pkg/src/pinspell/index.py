"""Pinyin-keyed domain lexicon and its TF-IDF search engine.

Entries are (hanzi word, normalized pinyin key) pairs; queries are pinyin
strings scored by cosine similarity over syllable n-gram features and gated
by a similarity threshold.

TF-IDF variant pinned for exactness: raw term frequency, smoothed idf
ln((N+1)/(df+1)) + 1, L2-normalized cosine.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from .errors import BuildError, ConfigurationError
from .pinyin import CharReadingTable, FuzzyRules, PinyinString, normalize, syllable_ngrams, to_pinyin
from .segment import SegmentDict, is_cjk, segment

log = logging.getLogger(__name__)

INDEX_FORMAT_VERSION = 1

# Scores this close to 1.0 are exact-key matches up to float rounding.
_EXACT_SNAP = 1e-9


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    key: PinyinString


@dataclass(frozen=True)
class RetrieverConfig:
    theta: float = 0.6
    ngram_max: int = 2
    top_k_per_query: int = 5
    fuzzy: FuzzyRules = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.fuzzy is None:
            from .pinyin import default_fuzzy_rules

            object.__setattr__(self, "fuzzy", default_fuzzy_rules())
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigurationError(f"theta must be in [0, 1], got {self.theta}")
        if self.ngram_max < 1:
            raise ConfigurationError("ngram_max must be >= 1")
        if self.top_k_per_query < 1:
            raise ConfigurationError("top_k_per_query must be >= 1")

    @property
    def fingerprint(self) -> str:
        return build_fingerprint(self.fuzzy, self.ngram_max)


@dataclass(frozen=True)
class MatchResult:
    entry: LexiconEntry
    entry_id: int
    score: float


@dataclass
class TfIdfIndex:
    entries: list[LexiconEntry]
    vocab: dict[str, int]
    idf: list[float]
    doc_vectors: list[dict[int, float]]
    postings: dict[int, list[int]]
    config_fingerprint: str
    ngram_max: int
    fuzzy: FuzzyRules
    _weighted_postings: dict[int, list[tuple[int, float]]] = field(repr=False, default_factory=dict)


def rules_to_dict(rules: FuzzyRules) -> dict:
    return {
        "initials": sorted(sorted(c) for c in rules.initial_classes),
        "finals": sorted(sorted(c) for c in rules.final_classes),
    }


def build_fingerprint(rules: FuzzyRules, ngram_max: int) -> str:
    payload = rules_to_dict(rules)
    payload["ngram_max"] = ngram_max
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=True)
    return hashlib.sha256(blob.encode("ascii")).hexdigest()[:16]


def ingest_lexicon(
    path: str | Path,
    table: CharReadingTable,
    rules: FuzzyRules,
) -> list[LexiconEntry]:
    """Read a lexicon file into entries, one per word.

    A line is either `<word>` (pinyin derived from the reading table) or
    `<word>\\t<space-joined pinyin>` (explicit override). Lines whose explicit
    pinyin does not have one syllable per char are rejected with a warning;
    ingestion continues. Duplicate words keep the first occurrence.
    """
    entries: dict[str, LexiconEntry] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            word = fields[0].strip()
            if not word:
                log.warning("%s:%d: empty word field, line skipped", path, line_no)
                continue
            if len(fields) >= 2 and fields[1].strip():
                try:
                    py = PinyinString.parse(fields[1].strip())
                except ValueError:
                    log.warning("%s:%d: unparseable pinyin %r, line rejected", path, line_no, fields[1])
                    continue
                if len(py) != len(word):
                    log.warning(
                        "%s:%d: %d syllables for %d chars, line rejected",
                        path, line_no, len(py), len(word),
                    )
                    continue
            else:
                py = to_pinyin(word, table)
            if word not in entries:
                entries[word] = LexiconEntry(word, normalize(py, rules))
    return list(entries.values())


def build_index(entries: list[LexiconEntry], config: RetrieverConfig) -> TfIdfIndex:
    """Vectorize entry keys into L2-normalized tf-idf vectors plus postings."""
    if not entries:
        raise BuildError("cannot build an index from an empty lexicon")
    n = len(entries)
    token_lists = [syllable_ngrams(e.key, config.ngram_max) for e in entries]
    df: Counter[str] = Counter()
    for tokens in token_lists:
        df.update(set(tokens))
    vocab = {tok: fid for fid, tok in enumerate(sorted(df))}
    idf = [0.0] * len(vocab)
    for tok, fid in vocab.items():
        idf[fid] = math.log((n + 1) / (df[tok] + 1)) + 1.0

    doc_vectors: list[dict[int, float]] = []
    for tokens in token_lists:
        tf = Counter(tokens)
        fids = sorted(vocab[t] for t in tf)
        weights = {fid: 0.0 for fid in fids}
        for tok, count in tf.items():
            fid = vocab[tok]
            weights[fid] = count * idf[fid]
        norm = math.sqrt(sum(weights[fid] ** 2 for fid in fids))
        doc_vectors.append({fid: weights[fid] / norm for fid in fids})

    postings: dict[int, list[int]] = {}
    weighted: dict[int, list[tuple[int, float]]] = {}
    for eid, vec in enumerate(doc_vectors):
        for fid in sorted(vec):
            postings.setdefault(fid, []).append(eid)
            weighted.setdefault(fid, []).append((eid, vec[fid]))

    return TfIdfIndex(
        entries=list(entries),
        vocab=vocab,
        idf=idf,
        doc_vectors=doc_vectors,
        postings=postings,
        config_fingerprint=build_fingerprint(config.fuzzy, config.ngram_max),
        ngram_max=config.ngram_max,
        fuzzy=config.fuzzy,
        _weighted_postings=weighted,
    )


def query(index: TfIdfIndex, q: PinyinString, config: RetrieverConfig) -> list[MatchResult]:
    """Cosine-score a pinyin query against the index.

    Returns matches with score >= theta, best first (ties by entry id),
    truncated to top_k_per_query. Unseen query tokens weigh zero; an exact
    key match scores exactly 1.0.
    """
    if config.fingerprint != index.config_fingerprint:
        raise ConfigurationError(
            "query config does not match the index build parameters "
            f"({config.fingerprint} != {index.config_fingerprint})"
        )
    tf = Counter(syllable_ngrams(normalize(q, config.fuzzy), config.ngram_max))
    weights: dict[int, float] = {}
    for tok in sorted(tf):
        fid = index.vocab.get(tok)
        if fid is not None:
            weights[fid] = tf[tok] * index.idf[fid]
    if not weights:
        return []
    norm = math.sqrt(sum(w * w for w in weights.values()))

    scores: dict[int, float] = {}
    for fid in sorted(weights):
        qw = weights[fid] / norm
        for eid, dw in index._weighted_postings.get(fid, ()):
            scores[eid] = scores.get(eid, 0.0) + qw * dw

    results = []
    for eid in sorted(scores):
        s = scores[eid]
        if abs(s - 1.0) <= _EXACT_SNAP:
            s = 1.0
        s = min(1.0, max(0.0, s))
        if s >= config.theta:
            results.append(MatchResult(index.entries[eid], eid, s))
    results.sort(key=lambda m: (-m.score, m.entry_id))
    return results[: config.top_k_per_query]


def expand_lexicon(
    corpus_path: str | Path,
    base: list[LexiconEntry],
    seg_dict: SegmentDict,
    min_freq: int,
    min_len: int,
    table: CharReadingTable,
    rules: FuzzyRules,
) -> list[LexiconEntry]:
    """Mine frequent segmented words from a corpus and append them to a base
    lexicon, deduplicated by word (base wins)."""
    counts: Counter[str] = Counter()
    with open(corpus_path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            for word in segment(line, seg_dict).words:
                if len(word) >= min_len and all(is_cjk(c) for c in word):
                    counts[word] += 1
    known = {e.word for e in base}
    out = list(base)
    for word, freq in counts.items():
        if freq >= min_freq and word not in known:
            out.append(LexiconEntry(word, normalize(to_pinyin(word, table), rules)))
            known.add(word)
    return out


def save_index(index: TfIdfIndex, path: str | Path) -> None:
    """Serialize build inputs (entries + parameters); vectors are rebuilt on
    load, which keeps the artifact small and the round trip exact."""
    payload = {
        "format": INDEX_FORMAT_VERSION,
        "fingerprint": index.config_fingerprint,
        "ngram_max": index.ngram_max,
        "fuzzy": rules_to_dict(index.fuzzy),
        "entries": [[e.word, e.key.text] for e in index.entries],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def load_index(path: str | Path) -> TfIdfIndex:
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    if payload.get("format") != INDEX_FORMAT_VERSION:
        raise ConfigurationError(
            f"unsupported index format {payload.get('format')!r}, expected {INDEX_FORMAT_VERSION}"
        )
    rules = FuzzyRules.from_dict(payload["fuzzy"])
    entries = [LexiconEntry(word, PinyinString.parse(key)) for word, key in payload["entries"]]
    config = RetrieverConfig(ngram_max=payload["ngram_max"], fuzzy=rules)
    index = build_index(entries, config)
    if index.config_fingerprint != payload["fingerprint"]:
        raise ConfigurationError("index fingerprint mismatch after rebuild")
    return index
