"""Sentence-level retrieval: segment, build pinyin queries, collect domain
terms, and render the augmented input string."""

from __future__ import annotations

from dataclasses import dataclass

from .index import RetrieverConfig, TfIdfIndex, query
from .pinyin import CharReadingTable, FuzzyRules, PinyinString, normalize, to_pinyin
from .segment import SegmentDict, is_cjk, segment

# Separator and prompt rendered into the augmented input. The double bar is
# U+2016 and the comma is fullwidth U+FF0C; both are part of the wire format.
AUGMENT_SEPARATOR = "‖"
AUGMENT_PROMPT = "领域词是"
AUGMENT_JOINER = "，"


@dataclass(frozen=True)
class SourceSentence:
    text: str

    @property
    def chars(self) -> tuple[str, ...]:
        return tuple(self.text)

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class PinyinQuerySet:
    """One (word, normalized pinyin) query per non-punctuation segmented word."""

    queries: tuple[tuple[str, PinyinString], ...]

    def __len__(self) -> int:
        return len(self.queries)


@dataclass(frozen=True)
class RetrievalResult:
    """Duplicate-free retrieved terms with their best scores, ordered by the
    first query that produced them, then score."""

    terms: tuple[str, ...]
    per_term_score: tuple[float, ...]

    @classmethod
    def empty(cls) -> "RetrievalResult":
        return cls((), ())

    def __bool__(self) -> bool:
        return bool(self.terms)


@dataclass(frozen=True)
class AugmentedInput:
    source: SourceSentence
    terms: tuple[str, ...]
    rendered: str


def make_queries(
    sentence: SourceSentence,
    seg_dict: SegmentDict,
    table: CharReadingTable,
    rules: FuzzyRules,
) -> PinyinQuerySet:
    """Segment the sentence and convert each fully-CJK word to a normalized
    pinyin query; punctuation and ASCII tokens produce no query."""
    queries = []
    for word in segment(sentence.text, seg_dict).words:
        if all(is_cjk(c) for c in word):
            queries.append((word, normalize(to_pinyin(word, table), rules)))
    return PinyinQuerySet(tuple(queries))


def retrieve(
    sentence: SourceSentence,
    index: TfIdfIndex,
    config: RetrieverConfig,
    seg_dict: SegmentDict,
    table: CharReadingTable,
) -> RetrievalResult:
    """Union of per-query matches, deduplicated by word keeping the max score."""
    queries = make_queries(sentence, seg_dict, table, config.fuzzy)
    first_pos: dict[str, int] = {}
    best: dict[str, float] = {}
    for pos, (_, py) in enumerate(queries.queries):
        for match in query(index, py, config):
            word = match.entry.word
            if word not in best:
                first_pos[word] = pos
                best[word] = match.score
            elif match.score > best[word]:
                best[word] = match.score
    order = sorted(best, key=lambda w: (first_pos[w], -best[w], w))
    return RetrievalResult(tuple(order), tuple(best[w] for w in order))


def build_augmented(
    sentence: SourceSentence,
    r: RetrievalResult,
    separator: str = AUGMENT_SEPARATOR,
) -> AugmentedInput:
    """Render `<text>‖领域词是<terms>`; datasets using an ASCII separator can
    override it."""
    if r.terms:
        rendered = sentence.text + separator + AUGMENT_PROMPT + AUGMENT_JOINER.join(r.terms)
    else:
        rendered = sentence.text
    return AugmentedInput(sentence, r.terms, rendered)
