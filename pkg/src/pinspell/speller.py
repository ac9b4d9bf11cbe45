"""Speller contract plus a built-in non-neural baseline.

Any speller that turns a sentence (and optionally retrieved terms) into
per-position character distributions can sit behind the pipeline; the
baseline here combines a char trigram LM, a confusion-set channel penalty,
and a bonus for candidates confirmed by retrieved-term alignment.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

from .errors import BuildError, ConfigurationError
from .pinyin import CharReadingTable, FuzzyRules, normalize, to_pinyin
from .retrieve import RetrievalResult, SourceSentence

log = logging.getLogger(__name__)

LM_FORMAT_VERSION = 1

_BOS = "\x02"


@dataclass(frozen=True)
class TokenDistributionMatrix:
    """Sparse per-position distributions over candidate chars (log space).

    Per position the probabilities sum to 1 and the original char is always a
    candidate, so decoding can never change the sentence length.
    """

    originals: tuple[str, ...]
    candidates: tuple[tuple[tuple[str, float], ...], ...]

    @property
    def n(self) -> int:
        return len(self.originals)

    def position(self, i: int) -> dict[str, float]:
        return dict(self.candidates[i])

    def validate(self, tol: float = 1e-6) -> None:
        if len(self.candidates) != len(self.originals):
            raise ValueError("candidate rows do not match positions")
        for i, row in enumerate(self.candidates):
            chars = [c for c, _ in row]
            if self.originals[i] not in chars:
                raise ValueError(f"original char missing at position {i}")
            total = sum(math.exp(lp) for _, lp in row)
            if abs(total - 1.0) > tol:
                raise ValueError(f"probabilities at position {i} sum to {total}")


class Speller(Protocol):
    """Minimal contract the pipeline needs from any speller."""

    def predict(
        self, sentence: SourceSentence, retrieval: RetrievalResult | None = None
    ) -> TokenDistributionMatrix:
        ...


@dataclass(frozen=True)
class SpellerWeights:
    """Baseline score mix: LM log-prob, per-change channel penalty (applied
    as -w_chan), and alignment bonus (+w_ret)."""

    w_lm: float = 1.0
    w_chan: float = 2.0
    w_ret: float = 3.0


@dataclass(frozen=True)
class ConfusionSet:
    mapping: dict[str, frozenset[str]]

    def confusables(self, char: str) -> frozenset[str]:
        return self.mapping.get(char, frozenset())

    @classmethod
    def load(cls, path: str | Path) -> "ConfusionSet":
        mapping: dict[str, frozenset[str]] = {}
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 2 or len(fields[0]) != 1:
                    continue
                char, confusables = fields
                mapping[char] = frozenset(c for c in confusables if c != char)
        return cls(mapping)

    @classmethod
    def from_reading_table(cls, table: CharReadingTable, rules: FuzzyRules) -> "ConfusionSet":
        """Homophone-derived sets: chars sharing any fuzzy-normalized reading."""
        groups: dict[str, set[str]] = {}
        for char, readings in table.char_readings.items():
            for py in readings:
                key = normalize(py, rules).text
                groups.setdefault(key, set()).add(char)
        mapping: dict[str, frozenset[str]] = {}
        for char, readings in table.char_readings.items():
            pool: set[str] = set()
            for py in readings:
                pool |= groups[normalize(py, rules).text]
            pool.discard(char)
            if pool:
                mapping[char] = frozenset(pool)
        return cls(mapping)


@dataclass
class NGramModel:
    """Char n-gram LM with add-k smoothing over observed vocab + unk mass."""

    order: int
    k: float
    vocab: frozenset[str]
    counts: dict[str, dict[str, int]]
    totals: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.totals:
            self.totals = {h: sum(row.values()) for h, row in self.counts.items()}

    @classmethod
    def train(cls, lines: Iterable[str], order: int = 3, k: float = 0.01) -> "NGramModel":
        if order < 1:
            raise BuildError("order must be >= 1")
        counts: dict[str, dict[str, int]] = {}
        vocab: set[str] = set()
        seen_any = False
        pad = _BOS * (order - 1)
        for line in lines:
            line = line.strip()
            if not line:
                continue
            seen_any = True
            vocab.update(line)
            padded = pad + line
            for i in range(len(line)):
                h = padded[i:i + order - 1]
                c = padded[i + order - 1]
                counts.setdefault(h, {})
                counts[h][c] = counts[h].get(c, 0) + 1
        if not seen_any:
            raise BuildError("training corpus is empty")
        return cls(order=order, k=k, vocab=frozenset(vocab), counts=counts)

    def context(self, chars: str, i: int) -> str:
        """Left context of length order-1 for position i, BOS-padded."""
        pad = _BOS * (self.order - 1)
        padded = pad + chars
        return padded[i:i + self.order - 1]

    def logprob(self, char: str, context: str) -> float:
        row = self.counts.get(context)
        cnt = row.get(char, 0) if row else 0
        tot = self.totals.get(context, 0)
        denom = tot + self.k * (len(self.vocab) + 1)
        return math.log((cnt + self.k) / denom)

    def save(self, path: str | Path) -> None:
        payload = {
            "format": LM_FORMAT_VERSION,
            "order": self.order,
            "k": self.k,
            "vocab": sorted(self.vocab),
            "counts": self.counts,
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=True, sort_keys=True, separators=(",", ":"))
            f.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "NGramModel":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        if payload.get("format") != LM_FORMAT_VERSION:
            raise ConfigurationError(
                f"unsupported LM format {payload.get('format')!r}, expected {LM_FORMAT_VERSION}"
            )
        return cls(
            order=payload["order"],
            k=payload["k"],
            vocab=frozenset(payload["vocab"]),
            counts=payload["counts"],
        )


def align_retrieved_terms(
    sentence: SourceSentence,
    r: RetrievalResult,
    table: CharReadingTable,
    rules: FuzzyRules,
) -> list[set[str]]:
    """Slide each retrieved term over the sentence; wherever the normalized
    pinyin matches the window syllable-for-syllable, the term's chars become
    candidates at those positions."""
    n = len(sentence)
    aligned: list[set[str]] = [set() for _ in range(n)]
    if not r.terms or n == 0:
        return aligned
    char_raws = [
        normalize(to_pinyin(c, table), rules).syllables[0].raw for c in sentence.text
    ]
    for term in r.terms:
        term_raws = [s.raw for s in normalize(to_pinyin(term, table), rules)]
        m = len(term)
        if len(term_raws) != m or m > n:
            continue
        for off in range(n - m + 1):
            window = sentence.text[off:off + m]
            if window in table.word_readings:
                window_raws = [s.raw for s in normalize(table.word_readings[window], rules)]
            else:
                window_raws = char_raws[off:off + m]
            if window_raws == term_raws:
                for j, ch in enumerate(term):
                    aligned[off + j].add(ch)
    return aligned


def _softmax_logs(scores: list[float]) -> list[float]:
    top = max(scores)
    total = sum(math.exp(s - top) for s in scores)
    log_total = math.log(total)
    return [s - top - log_total for s in scores]


@dataclass
class BaselineSpeller:
    """Noisy-channel speller over confusion candidates and aligned terms.

    score(c) = w_lm * lm(c | left context) - w_chan * [c != original]
             + w_ret * [c aligned from retrieval]
    """

    confusion: ConfusionSet
    lm: NGramModel
    weights: SpellerWeights = SpellerWeights()
    table: CharReadingTable = None  # type: ignore[assignment]
    rules: FuzzyRules = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.table is None or self.rules is None:
            from .pinyin import default_fuzzy_rules, default_reading_table

            if self.table is None:
                self.table = default_reading_table()
            if self.rules is None:
                self.rules = default_fuzzy_rules()

    def predict(
        self, sentence: SourceSentence, retrieval: RetrievalResult | None = None
    ) -> TokenDistributionMatrix:
        n = len(sentence)
        if retrieval is not None and retrieval.terms:
            aligned = align_retrieved_terms(sentence, retrieval, self.table, self.rules)
        else:
            aligned = [set() for _ in range(n)]
        w = self.weights
        rows = []
        text = sentence.text
        for i, orig in enumerate(text):
            cands = sorted({orig} | self.confusion.confusables(orig) | aligned[i])
            ctx = self.lm.context(text, i)
            scores = []
            for c in cands:
                s = w.w_lm * self.lm.logprob(c, ctx)
                if c != orig:
                    s -= w.w_chan
                if c in aligned[i]:
                    s += w.w_ret
                scores.append(s)
            rows.append(tuple(zip(cands, _softmax_logs(scores))))
        return TokenDistributionMatrix(tuple(text), tuple(rows))


def decode(m: TokenDistributionMatrix) -> str:
    """Argmax char per position; exact ties prefer the original char, then
    the lowest code point."""
    out = []
    for i, row in enumerate(m.candidates):
        orig = m.originals[i]
        best_char = None
        best_lp = -math.inf
        for char, lp in sorted(row):
            if lp > best_lp or (lp == best_lp and char == orig and best_char != orig):
                best_char, best_lp = char, lp
        out.append(best_char)
    return "".join(out)


@dataclass(frozen=True)
class CorrectionResult:
    source: SourceSentence
    output: str
    changed_positions: frozenset[int]
    per_pass_terms: tuple[RetrievalResult, ...]
