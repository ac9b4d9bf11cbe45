"""Retrieval-augmented Chinese spelling check toolkit.

The pieces compose left to right: hanzi -> pinyin -> fuzzy normalization ->
TF-IDF retrieval of domain terms -> term-guided spelling correction ->
sentence-level evaluation.
"""

__version__ = "0.1.0"

from .errors import (
    BuildError,
    ConfigurationError,
    ContractError,
    ParseError,
    PinspellError,
)
from .index import (
    LexiconEntry,
    MatchResult,
    RetrieverConfig,
    TfIdfIndex,
    build_index,
    expand_lexicon,
    ingest_lexicon,
    load_index,
    query,
    save_index,
)
from .losses import LossBreakdown, TargetSentence, combined_loss, gate, nll_loss
from .metrics import EvalPair, EvalReport, detect_positions, evaluate
from .pinyin import (
    CharReadingTable,
    FuzzyRules,
    PinyinString,
    Syllable,
    default_fuzzy_rules,
    default_general_words,
    default_reading_table,
    load_fuzzy_rules,
    load_reading_table,
    normalize,
    syllable_ngrams,
    to_pinyin,
)
from .pipeline import (
    PipelineConfig,
    Resources,
    correct,
    correct_once,
    correct_secondary,
    run_file,
)
from .retrieve import (
    AugmentedInput,
    PinyinQuerySet,
    RetrievalResult,
    SourceSentence,
    build_augmented,
    make_queries,
    retrieve,
)
from .segment import SegmentDict, Segmentation, build_segment_dict, load_word_list, segment
from .speller import (
    BaselineSpeller,
    ConfusionSet,
    CorrectionResult,
    NGramModel,
    Speller,
    SpellerWeights,
    TokenDistributionMatrix,
    align_retrieved_terms,
    decode,
)

__all__ = [name for name in dir() if not name.startswith("_")]
