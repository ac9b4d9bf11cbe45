from pathlib import Path

import pytest

from pinspell.index import RetrieverConfig, build_index, ingest_lexicon
from pinspell.pinyin import (
    default_fuzzy_rules,
    default_general_words,
    default_reading_table,
)
from pinspell.pipeline import Resources
from pinspell.segment import build_segment_dict
from pinspell.speller import BaselineSpeller, ConfusionSet, NGramModel

DATA = Path(__file__).parent / "data"

TABLE1_INPUT = "治疗弱视采用医学验光配镜来进行校正。"
TABLE1_TARGET = "治疗弱视采用医学验光配镜来进行矫正。"
TABLE1_TERMS = ("弱视", "医学验光", "配镜", "矫正")
TABLE1_AUGMENTED = TABLE1_INPUT + "‖" + "领域词是" + "，".join(TABLE1_TERMS)


@pytest.fixture(scope="session")
def table():
    return default_reading_table()


@pytest.fixture(scope="session")
def rules():
    return default_fuzzy_rules()


@pytest.fixture(scope="session")
def med_entries(table, rules):
    return ingest_lexicon(DATA / "med_lexicon.txt", table, rules)


@pytest.fixture(scope="session")
def retriever_config(rules):
    return RetrieverConfig(fuzzy=rules)


@pytest.fixture(scope="session")
def med_index(med_entries, retriever_config):
    return build_index(med_entries, retriever_config)


@pytest.fixture(scope="session")
def med_seg_dict(med_entries):
    return build_segment_dict([e.word for e in med_entries] + default_general_words())


@pytest.fixture(scope="session")
def clean_corpus():
    lines = (DATA / "med_clean_corpus.txt").read_text(encoding="utf-8").splitlines()
    return [l for l in lines if l.strip()]


@pytest.fixture(scope="session")
def med_lm(clean_corpus):
    return NGramModel.train(clean_corpus)


@pytest.fixture(scope="session")
def med_confusion(table, rules):
    return ConfusionSet.from_reading_table(table, rules)


@pytest.fixture(scope="session")
def med_speller(med_confusion, med_lm, table, rules):
    return BaselineSpeller(med_confusion, med_lm, table=table, rules=rules)


@pytest.fixture(scope="session")
def med_resources(med_speller, table, med_seg_dict, med_index):
    return Resources(
        speller=med_speller, table=table, seg_dict=med_seg_dict, index=med_index
    )
