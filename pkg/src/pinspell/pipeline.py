"""End-to-end correction: single pass, and the two-pass secondary search.

The second pass re-retrieves on the pass-1 output and corrects that output;
errors masked by neighbouring errors in pass 1 become retrievable once the
first fix lands. Exactly two passes — iterating further starts overcorrecting
valid expressions into more common ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .index import RetrieverConfig, TfIdfIndex
from .pinyin import CharReadingTable
from .retrieve import RetrievalResult, SourceSentence, retrieve
from .segment import SegmentDict
from .speller import CorrectionResult, Speller, decode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    use_retrieval: bool = True
    use_secondary_search: bool = True
    retriever: RetrieverConfig = field(default_factory=RetrieverConfig)

    def __post_init__(self):
        if self.use_secondary_search and not self.use_retrieval:
            raise ConfigurationError("secondary search requires retrieval to be enabled")


@dataclass
class Resources:
    """Immutable artifacts shared by every sentence of a run."""

    speller: Speller
    table: CharReadingTable
    seg_dict: SegmentDict
    index: TfIdfIndex | None = None


def _diff_positions(a: str, b: str) -> frozenset[int]:
    return frozenset(i for i, (x, y) in enumerate(zip(a, b)) if x != y)


def _retrieve_or_empty(
    text: str, config: PipelineConfig, res: Resources
) -> RetrievalResult:
    if not config.use_retrieval:
        return RetrievalResult.empty()
    if res.index is None:
        raise ConfigurationError("retrieval is enabled but no index is loaded")
    return retrieve(SourceSentence(text), res.index, config.retriever, res.seg_dict, res.table)


def correct_once(x: SourceSentence, config: PipelineConfig, res: Resources) -> CorrectionResult:
    """Retrieve (if enabled), predict, decode. Inference always feeds the
    retrieved terms to the speller; gating is a training-only concern."""
    r = _retrieve_or_empty(x.text, config, res)
    output = decode(res.speller.predict(x, r))
    return CorrectionResult(
        source=x,
        output=output,
        changed_positions=_diff_positions(x.text, output),
        per_pass_terms=(r,),
    )


def correct_secondary(x: SourceSentence, config: PipelineConfig, res: Resources) -> CorrectionResult:
    """Two-pass correction: fix, re-retrieve on the fixed text, fix again."""
    if not config.use_secondary_search:
        raise ConfigurationError("correct_secondary called with secondary search disabled")
    first = correct_once(x, config, res)
    y1 = SourceSentence(first.output)
    r2 = _retrieve_or_empty(y1.text, config, res)
    output = decode(res.speller.predict(y1, r2))
    return CorrectionResult(
        source=x,
        output=output,
        changed_positions=_diff_positions(x.text, output),
        per_pass_terms=first.per_pass_terms + (r2,),
    )


def correct(x: SourceSentence, config: PipelineConfig, res: Resources) -> CorrectionResult:
    if config.use_secondary_search:
        return correct_secondary(x, config, res)
    return correct_once(x, config, res)


@dataclass
class RunSummary:
    sentences: int = 0
    changed: int = 0
    errors: int = 0


def run_file(
    dataset_path,
    out_path,
    config: PipelineConfig,
    res: Resources,
) -> RunSummary:
    """Correct a TSV dataset (`<source>[\\t<target>]` per line) into a
    prediction file (`<source>\\t<prediction>` per line), order-preserving.

    Malformed lines are counted and skipped; the run continues.
    """
    summary = RunSummary()
    with open(dataset_path, encoding="utf-8") as fin, open(out_path, "w", encoding="utf-8") as fout:
        for line_no, line in enumerate(fin, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) > 2 or not fields[0]:
                log.warning("%s:%d: malformed dataset line, skipped", dataset_path, line_no)
                summary.errors += 1
                continue
            source = fields[0]
            result = correct(SourceSentence(source), config, res)
            summary.sentences += 1
            if result.changed_positions:
                summary.changed += 1
            fout.write(f"{source}\t{result.output}\n")
    return summary
