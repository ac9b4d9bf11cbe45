"""Dictionary-based word segmentation via bidirectional maximum matching.

Deterministic and dependency-free; the fuzzy retrieval stage downstream
carries the error tolerance, so a statistical segmenter buys nothing here.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


def is_cjk(char: str) -> bool:
    code = ord(char)
    return 0x4E00 <= code <= 0x9FFF or 0x3400 <= code <= 0x4DBF


@dataclass(frozen=True)
class SegmentDict:
    words: frozenset[str]
    max_word_len: int

    def __contains__(self, word: str) -> bool:
        return word in self.words


@dataclass(frozen=True)
class Segmentation:
    """Lossless cover of the input: concatenating words restores it exactly."""

    words: tuple[str, ...]

    @property
    def text(self) -> str:
        return "".join(self.words)


def build_segment_dict(entries: Iterable[str]) -> SegmentDict:
    words = frozenset(w for w in entries if w)
    max_len = max((len(w) for w in words), default=0)
    return SegmentDict(words, max_len)


def load_word_list(path: str | Path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]


def _forward_mm(text: str, d: SegmentDict) -> list[str]:
    out = []
    i = 0
    n = len(text)
    while i < n:
        for size in range(min(d.max_word_len, n - i), 1, -1):
            if text[i:i + size] in d:
                out.append(text[i:i + size])
                i += size
                break
        else:
            out.append(text[i])
            i += 1
    return out


def _backward_mm(text: str, d: SegmentDict) -> list[str]:
    out = []
    i = len(text)
    while i > 0:
        for size in range(min(d.max_word_len, i), 1, -1):
            if text[i - size:i] in d:
                out.append(text[i - size:i])
                i -= size
                break
        else:
            out.append(text[i - 1])
            i -= 1
    out.reverse()
    return out


def _pick(fwd: list[str], bwd: list[str]) -> list[str]:
    if len(fwd) != len(bwd):
        return fwd if len(fwd) < len(bwd) else bwd
    fwd_singles = sum(1 for w in fwd if len(w) == 1)
    bwd_singles = sum(1 for w in bwd if len(w) == 1)
    if bwd_singles < fwd_singles:
        return bwd
    return fwd


def _split_runs(text: str) -> list[tuple[str, bool]]:
    """Maximal runs of (text, is_cjk). Non-CJK runs are split further: alnum
    runs stay whole, anything else is one token per char."""
    runs: list[tuple[str, bool]] = []
    buf = []
    buf_cjk = None
    for ch in text:
        cjk = is_cjk(ch)
        if buf_cjk is None or cjk == buf_cjk:
            buf.append(ch)
            buf_cjk = cjk
        else:
            runs.append(("".join(buf), buf_cjk))
            buf = [ch]
            buf_cjk = cjk
    if buf:
        runs.append(("".join(buf), bool(buf_cjk)))
    return runs


def _split_non_cjk(run: str) -> list[str]:
    tokens: list[str] = []
    buf = []
    for ch in run:
        if ch.isascii() and ch.isalnum():
            buf.append(ch)
        else:
            if buf:
                tokens.append("".join(buf))
                buf = []
            tokens.append(ch)
    if buf:
        tokens.append("".join(buf))
    return tokens


def segment(text: str, d: SegmentDict) -> Segmentation:
    """Bidirectional maximum matching over CJK runs.

    Of the forward and backward covers, the one with fewer words wins, ties
    broken by fewer single-char words, then the forward result. Punctuation
    chars and ASCII alnum runs are their own tokens; OOV spans fall back to
    single chars.
    """
    words: list[str] = []
    for run, cjk in _split_runs(text):
        if cjk:
            words.extend(_pick(_forward_mm(run, d), _backward_mm(run, d)))
        else:
            words.extend(_split_non_cjk(run))
    return Segmentation(tuple(words))
