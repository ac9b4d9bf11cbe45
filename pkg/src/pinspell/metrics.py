"""Sentence-level detection and correction precision/recall/F1.

Detection credits a sentence only when the predicted change positions match
the gold error positions exactly; correction additionally requires the full
predicted string to equal the gold string. 0/0 ratios report as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import ContractError


@dataclass(frozen=True)
class EvalPair:
    source: str
    gold: str
    pred: str

    def __post_init__(self):
        if not (len(self.source) == len(self.gold) == len(self.pred)):
            raise ContractError(
                f"length mismatch: source {len(self.source)}, gold {len(self.gold)}, "
                f"pred {len(self.pred)}"
            )


@dataclass(frozen=True)
class PrfScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    detection: PrfScores
    correction: PrfScores
    gold_error_sents: int
    pred_flagged_sents: int
    detect_hits: int
    correct_hits: int
    total: int


def detect_positions(a: str, b: str) -> set[int]:
    if len(a) != len(b):
        raise ContractError(f"length mismatch: {len(a)} vs {len(b)}")
    return {i for i, (x, y) in enumerate(zip(a, b)) if x != y}


def _prf(hits: int, flagged: int, gold: int) -> PrfScores:
    precision = hits / flagged if flagged else 0.0
    recall = hits / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrfScores(precision, recall, f1)


def evaluate(pairs: Iterable[EvalPair]) -> EvalReport:
    gold_errored = 0
    flagged = 0
    detect_hits = 0
    correct_hits = 0
    total = 0
    for pair in pairs:
        total += 1
        gold_pos = detect_positions(pair.source, pair.gold)
        pred_pos = detect_positions(pair.source, pair.pred)
        if gold_pos:
            gold_errored += 1
        if pred_pos:
            flagged += 1
            if pred_pos == gold_pos:
                detect_hits += 1
                if pair.pred == pair.gold:
                    correct_hits += 1
    return EvalReport(
        detection=_prf(detect_hits, flagged, gold_errored),
        correction=_prf(correct_hits, flagged, gold_errored),
        gold_error_sents=gold_errored,
        pred_flagged_sents=flagged,
        detect_hits=detect_hits,
        correct_hits=correct_hits,
        total=total,
    )


def load_pairs(path: str | Path) -> list[EvalPair]:
    """Read a `<source>\\t<gold>\\t<pred>` TSV into pairs."""
    pairs = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ContractError(f"{path}:{line_no}: expected 3 tab-separated fields")
            pairs.append(EvalPair(*fields))
    return pairs


def format_report(report: EvalReport) -> str:
    """Machine-readable key=value lines followed by an aligned table."""
    lines = [
        f"sentences={report.total}",
        f"gold_error_sents={report.gold_error_sents}",
        f"pred_flagged_sents={report.pred_flagged_sents}",
        f"detect_hits={report.detect_hits}",
        f"correct_hits={report.correct_hits}",
        f"detection_precision={report.detection.precision:.4f}",
        f"detection_recall={report.detection.recall:.4f}",
        f"detection_f1={report.detection.f1:.4f}",
        f"correction_precision={report.correction.precision:.4f}",
        f"correction_recall={report.correction.recall:.4f}",
        f"correction_f1={report.correction.f1:.4f}",
        "",
        f"{'level':<12}{'precision':>10}{'recall':>10}{'f1':>10}",
        f"{'detection':<12}{report.detection.precision:>10.4f}{report.detection.recall:>10.4f}"
        f"{report.detection.f1:>10.4f}",
        f"{'correction':<12}{report.correction.precision:>10.4f}{report.correction.recall:>10.4f}"
        f"{report.correction.f1:>10.4f}",
    ]
    return "\n".join(lines)
