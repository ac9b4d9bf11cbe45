"""Hanzi-to-pinyin conversion, fuzzy normalization and syllable featurization.

Pinyin is handled tone-stripped throughout: Chinese misspellings are mostly
homophones modulo tone, so keys and queries live in the toneless space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import ParseError

# Syllable onsets, longest first so zh/ch/sh win over z/c/s.
INITIALS = (
    "zh", "ch", "sh",
    "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
    "j", "q", "x", "r", "z", "c", "s", "y", "w",
)

WORDS_SENTINEL = "#WORDS"


@dataclass(frozen=True)
class Syllable:
    """One toneless pinyin syllable, split into initial + final.

    Unknown hanzi degrade to opaque syllables (the raw char stored in
    ``final``) instead of raising; they never match real pinyin.
    """

    initial: str
    final: str
    opaque: bool = False

    @property
    def raw(self) -> str:
        return self.initial + self.final

    @classmethod
    def parse(cls, text: str) -> "Syllable":
        if not text or not all("a" <= c <= "z" for c in text):
            raise ValueError(f"invalid pinyin syllable: {text!r}")
        for ini in INITIALS:
            if text.startswith(ini) and len(text) > len(ini):
                return cls(ini, text[len(ini):])
        return cls("", text)

    @classmethod
    def opaque_token(cls, raw: str) -> "Syllable":
        return cls("", raw, opaque=True)


@dataclass(frozen=True)
class PinyinString:
    """An ordered sequence of syllables; textual form joins raws by spaces."""

    syllables: tuple[Syllable, ...]

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    @property
    def text(self) -> str:
        return " ".join(s.raw for s in self.syllables)

    @classmethod
    def parse(cls, text: str) -> "PinyinString":
        return cls(tuple(Syllable.parse(tok) for tok in text.split()))


@dataclass
class CharReadingTable:
    """Readings per hanzi char (most frequent first) plus whole-word readings
    used to disambiguate polyphones."""

    char_readings: dict[str, tuple[PinyinString, ...]] = field(default_factory=dict)
    word_readings: dict[str, PinyinString] = field(default_factory=dict)
    duplicate_count: int = 0

    def __contains__(self, char: str) -> bool:
        return char in self.char_readings


@dataclass(frozen=True)
class FuzzyRules:
    """Equivalence classes over initials and finals; normalization replaces a
    member with the lexicographically smallest member of its class."""

    initial_classes: tuple[frozenset[str], ...]
    final_classes: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "_initial_map", self._build_map(self.initial_classes, "initial"))
        object.__setattr__(self, "_final_map", self._build_map(self.final_classes, "final"))

    @staticmethod
    def _build_map(classes: tuple[frozenset[str], ...], family: str) -> dict[str, str]:
        mapping: dict[str, str] = {}
        for cls in classes:
            canon = min(cls)
            for member in cls:
                if member in mapping:
                    raise ValueError(f"{family} classes are not disjoint at {member!r}")
                mapping[member] = canon
        return mapping

    def canonical_initial(self, initial: str) -> str:
        return self._initial_map.get(initial, initial)

    def canonical_final(self, final: str) -> str:
        return self._final_map.get(final, final)

    @classmethod
    def empty(cls) -> "FuzzyRules":
        return cls((), ())

    @classmethod
    def from_dict(cls, data: dict) -> "FuzzyRules":
        return cls(
            tuple(frozenset(c) for c in data.get("initials", [])),
            tuple(frozenset(c) for c in data.get("finals", [])),
        )


def parse_reading_table(lines: Iterable[str]) -> CharReadingTable:
    table = CharReadingTable()
    in_words = False
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        if line.strip() == WORDS_SENTINEL:
            in_words = True
            continue
        fields = line.split("\t")
        if in_words:
            if len(fields) != 2:
                raise ParseError(f"expected '<word>\\t<reading>', got {line!r}", line_no)
            word, reading = fields
            try:
                py = PinyinString.parse(reading)
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from exc
            if len(py) != len(word):
                raise ParseError(
                    f"word {word!r} has {len(word)} chars but reading has {len(py)} syllables",
                    line_no,
                )
            if word in table.word_readings:
                table.duplicate_count += 1
            table.word_readings[word] = py
        else:
            if len(fields) < 2 or len(fields[0]) != 1:
                raise ParseError(f"expected '<char>\\t<reading>...', got {line!r}", line_no)
            char = fields[0]
            try:
                readings = tuple(
                    PinyinString((Syllable.parse(r),)) for r in fields[1:]
                )
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from exc
            if char in table.char_readings:
                table.duplicate_count += 1
            table.char_readings[char] = readings
    return table


def load_reading_table(path: str | Path) -> CharReadingTable:
    with open(path, encoding="utf-8") as f:
        return parse_reading_table(f)


def load_fuzzy_rules(path: str | Path) -> FuzzyRules:
    with open(path, encoding="utf-8") as f:
        return FuzzyRules.from_dict(json.load(f))


def _bundled_text(name: str) -> str:
    return (resources.files("pinspell") / "data" / name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def default_reading_table() -> CharReadingTable:
    return parse_reading_table(_bundled_text("readings.tsv").splitlines())


@lru_cache(maxsize=1)
def default_fuzzy_rules() -> FuzzyRules:
    return FuzzyRules.from_dict(json.loads(_bundled_text("fuzzy_rules.json")))


def default_general_words() -> list[str]:
    return [w for w in _bundled_text("general_words.txt").splitlines() if w.strip()]


def to_pinyin(word: str, table: CharReadingTable) -> PinyinString:
    """Convert a hanzi word to its toneless pinyin.

    Word-level readings win over per-char lookups (polyphone disambiguation);
    unknown chars become opaque flagged syllables rather than errors.
    """
    if not word:
        raise ValueError("cannot convert an empty word")
    whole = table.word_readings.get(word)
    if whole is not None:
        return whole
    syllables: list[Syllable] = []
    for char in word:
        readings = table.char_readings.get(char)
        if readings:
            syllables.append(readings[0].syllables[0])
        else:
            syllables.append(Syllable.opaque_token(char))
    return PinyinString(tuple(syllables))


def normalize(py: PinyinString, rules: FuzzyRules) -> PinyinString:
    """Collapse each syllable onto its fuzzy-canonical form. Idempotent."""
    out = []
    for s in py.syllables:
        if s.opaque:
            out.append(s)
        else:
            out.append(Syllable(rules.canonical_initial(s.initial), rules.canonical_final(s.final)))
    return PinyinString(tuple(out))


def syllable_ngrams(py: PinyinString, n_max: int) -> list[str]:
    """All syllable n-grams for n = 1..min(n_max, len), joined by '_'.

    Order-preserving, duplicates kept; the token stream feeding the index.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    raws = [s.raw for s in py.syllables]
    tokens: list[str] = []
    for n in range(1, min(n_max, len(raws)) + 1):
        for i in range(len(raws) - n + 1):
            tokens.append("_".join(raws[i:i + n]))
    return tokens
