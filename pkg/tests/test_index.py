import math
import random

import numpy as np
import pytest

from pinspell.errors import BuildError, ConfigurationError
from pinspell.index import (
    LexiconEntry,
    RetrieverConfig,
    build_index,
    expand_lexicon,
    ingest_lexicon,
    load_index,
    query,
    save_index,
)
from pinspell.pinyin import (
    PinyinString,
    default_fuzzy_rules,
    default_reading_table,
    normalize,
    syllable_ngrams,
    to_pinyin,
)
from pinspell.segment import build_segment_dict


@pytest.fixture(scope="module")
def table():
    return default_reading_table()


@pytest.fixture(scope="module")
def rules():
    return default_fuzzy_rules()


def entry(word, table, rules):
    return LexiconEntry(word, normalize(to_pinyin(word, table), rules))


def dense_scores(entries, q, config):
    """Independent dense tf-idf cosine oracle (numpy, no postings)."""
    token_lists = [syllable_ngrams(e.key, config.ngram_max) for e in entries]
    vocab = sorted({t for toks in token_lists for t in toks})
    col = {t: j for j, t in enumerate(vocab)}
    n = len(entries)
    df = np.zeros(len(vocab))
    for toks in token_lists:
        for t in set(toks):
            df[col[t]] += 1
    idf = np.log((n + 1) / (df + 1)) + 1.0
    mat = np.zeros((n, len(vocab)))
    for i, toks in enumerate(token_lists):
        for t in toks:
            mat[i, col[t]] += 1
    mat *= idf
    norms = np.linalg.norm(mat, axis=1)
    mat /= norms[:, None]
    qv = np.zeros(len(vocab))
    for t in syllable_ngrams(normalize(q, config.fuzzy), config.ngram_max):
        if t in col:
            qv[col[t]] += 1
    qv *= idf
    qn = np.linalg.norm(qv)
    if qn == 0:
        return np.zeros(n)
    return mat @ (qv / qn)


class TestIngest:
    def test_plain_word_uses_reading_table(self, tmp_path, table, rules):
        f = tmp_path / "lex.txt"
        f.write_text("矫正\n", encoding="utf-8")
        entries = ingest_lexicon(f, table, rules)
        assert len(entries) == 1
        assert entries[0].word == "矫正"
        # normalized key: zh->z, eng->en
        assert entries[0].key.text == "jiao zen"

    def test_explicit_pinyin_override(self, tmp_path, table, rules):
        f = tmp_path / "lex.txt"
        f.write_text("矫正\tjiao zheng\n", encoding="utf-8")
        entries = ingest_lexicon(f, table, rules)
        assert entries[0].key.text == "jiao zen"

    def test_empty_file(self, tmp_path, table, rules):
        f = tmp_path / "lex.txt"
        f.write_text("", encoding="utf-8")
        assert ingest_lexicon(f, table, rules) == []

    def test_syllable_count_mismatch_rejected_but_continues(self, tmp_path, table, rules):
        f = tmp_path / "lex.txt"
        f.write_text("矫正\tjiao\n弱视\n", encoding="utf-8")
        entries = ingest_lexicon(f, table, rules)
        assert [e.word for e in entries] == ["弱视"]

    def test_comments_and_duplicates(self, tmp_path, table, rules):
        f = tmp_path / "lex.txt"
        f.write_text("# domain terms\n弱视\n弱视\n", encoding="utf-8")
        assert len(ingest_lexicon(f, table, rules)) == 1

    def test_missing_file_raises(self, tmp_path, table, rules):
        with pytest.raises(OSError):
            ingest_lexicon(tmp_path / "nope.txt", table, rules)

    def test_key_one_syllable_per_char(self, tmp_path, table, rules):
        f = tmp_path / "lex.txt"
        f.write_text("医学验光\n配镜\n", encoding="utf-8")
        for e in ingest_lexicon(f, table, rules):
            assert len(e.key) == len(e.word)


class TestBuildIndex:
    def test_empty_entries_rejected(self):
        with pytest.raises(BuildError):
            build_index([], RetrieverConfig())

    def test_single_entry(self, table, rules):
        config = RetrieverConfig()
        idx = build_index([entry("配镜", table, rules)], config)
        vec = idx.doc_vectors[0]
        assert abs(math.sqrt(sum(w * w for w in vec.values())) - 1.0) < 1e-9
        # every df == 1 -> idf == ln(2/2) + 1 == 1
        assert all(abs(v - 1.0) < 1e-12 for v in idx.idf)

    def test_disjoint_entries_have_singleton_postings(self, table, rules):
        config = RetrieverConfig()
        idx = build_index([entry("配镜", table, rules), entry("弱视", table, rules)], config)
        assert all(len(p) == 1 for p in idx.postings.values())

    def test_three_entry_fixture_matches_dense_oracle(self, table, rules):
        config = RetrieverConfig()
        entries = [entry(w, table, rules) for w in ["矫正", "弱视", "配镜"]]
        idx = build_index(entries, config)
        # all tokens unique to one entry: idf = ln(4/2) + 1 everywhere
        assert all(abs(v - (math.log(2) + 1)) < 1e-12 for v in idx.idf)
        for i, e in enumerate(entries):
            oracle = dense_scores(entries, e.key, config)
            got = query(idx, e.key, config)
            assert got[0].entry.word == e.word
            assert abs(got[0].score - 1.0) < 1e-12
            assert abs(oracle[i] - 1.0) < 1e-9

    def test_doc_vectors_normalized(self, table, rules):
        words = ["矫正", "弱视", "配镜", "医学验光", "青光眼", "白内障"]
        idx = build_index([entry(w, table, rules) for w in words], RetrieverConfig())
        for vec in idx.doc_vectors:
            assert abs(math.sqrt(sum(w * w for w in vec.values())) - 1.0) <= 1e-9

    def test_postings_sorted_unique(self, table, rules):
        words = ["矫正", "矫正器", "弱视", "配镜", "医学验光"]
        idx = build_index([entry(w, table, rules) for w in words], RetrieverConfig())
        for plist in idx.postings.values():
            assert plist == sorted(set(plist))

    def test_deterministic(self, table, rules):
        words = ["矫正", "弱视", "配镜"]
        a = build_index([entry(w, table, rules) for w in words], RetrieverConfig())
        b = build_index([entry(w, table, rules) for w in words], RetrieverConfig())
        assert a.vocab == b.vocab and a.idf == b.idf and a.doc_vectors == b.doc_vectors


class TestQuery:
    def test_exact_key_scores_one(self, table, rules):
        config = RetrieverConfig()
        idx = build_index([entry(w, table, rules) for w in ["矫正", "弱视", "配镜"]], config)
        got = query(idx, PinyinString.parse("jiao zheng"), config)
        assert got and got[0].entry.word == "矫正"
        assert got[0].score == 1.0

    def test_no_shared_ngram_returns_nothing(self, table, rules):
        config = RetrieverConfig()
        idx = build_index([entry("配镜", table, rules)], config)
        assert query(idx, PinyinString.parse("ruo shi"), config) == []

    def test_scores_match_oracle_on_fixture(self, table, rules):
        config = RetrieverConfig(theta=0.3)
        entries = [entry(w, table, rules) for w in ["矫正", "弱视", "配镜"]]
        idx = build_index(entries, config)
        q = PinyinString.parse("ruo shi")
        oracle = dense_scores(entries, q, config)
        got = {m.entry_id: m.score for m in query(idx, q, config)}
        for i in range(len(entries)):
            if oracle[i] >= 0.3 + 1e-9:
                assert abs(got[i] - oracle[i]) < 1e-9
            elif oracle[i] < 0.3 - 1e-9:
                assert i not in got

    def test_fingerprint_mismatch_rejected(self, table, rules):
        idx = build_index([entry("配镜", table, rules)], RetrieverConfig())
        with pytest.raises(ConfigurationError):
            query(idx, PinyinString.parse("pei jing"), RetrieverConfig(ngram_max=3))

    def test_theta_monotonicity(self, table, rules):
        words = ["矫正", "矫正器", "娇正", "弱视", "医学验光", "验光"]
        entries = [entry(w, table, rules) for w in words]
        low = RetrieverConfig(theta=0.2)
        high = RetrieverConfig(theta=0.7)
        idx = build_index(entries, low)
        q = PinyinString.parse("jiao zen")
        low_set = {m.entry.word for m in query(idx, q, low)}
        high_set = {m.entry.word for m in query(idx, q, high)}
        assert high_set <= low_set

    def test_top_k_truncation(self, table, rules):
        words = ["矫正", "娇正", "轿正", "骄正", "胶正", "椒正"]
        entries = [entry(w, table, rules) for w in words]
        config = RetrieverConfig(theta=0.1, top_k_per_query=3)
        idx = build_index(entries, config)
        assert len(query(idx, PinyinString.parse("jiao zen"), config)) == 3


def random_entries(rng, table, rules, max_entries=200):
    chars = sorted(table.char_readings)
    n = rng.randint(2, max_entries)
    words, seen = [], set()
    while len(words) < n:
        w = "".join(rng.choice(chars) for _ in range(rng.randint(1, 4)))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return [entry(w, table, rules) for w in words]


def random_query(rng, entries):
    syllables = sorted({s.raw for e in entries for s in e.key.syllables})
    length = rng.randint(1, 4)
    return PinyinString.parse(" ".join(rng.choice(syllables) for _ in range(length)))


class TestOracleEquivalence:
    def test_random_indices_match_dense_oracle(self, table, rules):
        rng = random.Random(20240917)
        config = RetrieverConfig(theta=0.3, top_k_per_query=10**9)
        for _ in range(5):
            entries = random_entries(rng, table, rules, max_entries=60)
            idx = build_index(entries, config)
            for _ in range(20):
                q = random_query(rng, entries)
                oracle = dense_scores(entries, q, config)
                got = {m.entry_id: m.score for m in query(idx, q, config)}
                for i in range(len(entries)):
                    if oracle[i] >= config.theta + 1e-9:
                        assert i in got and abs(got[i] - oracle[i]) < 1e-9
                    elif oracle[i] < config.theta - 1e-9:
                        assert i not in got

    def test_self_retrieval(self, table, rules):
        rng = random.Random(7)
        config = RetrieverConfig()
        entries = random_entries(rng, table, rules, max_entries=80)
        idx = build_index(entries, config)
        for eid, e in enumerate(entries):
            got = query(idx, e.key, config)
            by_id = {m.entry_id: m.score for m in got}
            if eid in by_id:
                assert by_id[eid] == 1.0
            else:
                # crowded out of top_k by identical-key ties, all at 1.0
                assert all(m.score == 1.0 for m in got)
                assert idx.entries[got[0].entry_id].key == e.key


class TestExpandLexicon:
    def test_frequency_threshold(self, tmp_path, table, rules):
        corpus = tmp_path / "c.txt"
        corpus.write_text("医学验光很好\n医学验光可靠\n推荐医学验光\n", encoding="utf-8")
        base = [entry("配镜", table, rules)]
        seg = build_segment_dict(["医学验光", "配镜"])
        out = expand_lexicon(corpus, base, seg, min_freq=2, min_len=2,
                             table=table, rules=rules)
        assert "医学验光" in {e.word for e in out}

    def test_existing_word_not_duplicated(self, tmp_path, table, rules):
        corpus = tmp_path / "c.txt"
        corpus.write_text("配镜\n配镜\n配镜\n", encoding="utf-8")
        base = [entry("配镜", table, rules)]
        seg = build_segment_dict(["配镜"])
        out = expand_lexicon(corpus, base, seg, min_freq=2, min_len=2,
                             table=table, rules=rules)
        assert len(out) == len(base)

    def test_min_freq_respected(self, tmp_path, table, rules):
        corpus = tmp_path / "c.txt"
        corpus.write_text("医学验光很好\n", encoding="utf-8")
        base = [entry("配镜", table, rules)]
        seg = build_segment_dict(["医学验光", "配镜"])
        out = expand_lexicon(corpus, base, seg, min_freq=2, min_len=2,
                             table=table, rules=rules)
        assert {e.word for e in out} == {"配镜"}

    def test_counts_match_script_oracle(self, tmp_path, table, rules):
        rng = random.Random(3)
        words = ["青光眼", "白内障", "验光", "斜视", "视力"]
        seg = build_segment_dict(words)
        lines = []
        for _ in range(100):
            lines.append("".join(rng.choice(words) for _ in range(rng.randint(1, 3))))
        corpus = tmp_path / "c.txt"
        corpus.write_text("\n".join(lines) + "\n", encoding="utf-8")
        # independent frequency count over the same segmentation
        from collections import Counter
        from pinspell.segment import segment as seg_fn
        counts = Counter(w for line in lines for w in seg_fn(line, seg).words)
        base = [entry("配镜", table, rules)]
        out = expand_lexicon(corpus, base, seg, min_freq=30, min_len=2,
                             table=table, rules=rules)
        expected = {w for w, c in counts.items() if c >= 30 and len(w) >= 2}
        assert {e.word for e in out} == expected | {"配镜"}


class TestSerialization:
    def test_round_trip(self, tmp_path, table, rules):
        config = RetrieverConfig()
        entries = [entry(w, table, rules) for w in ["矫正", "弱视", "配镜"]]
        idx = build_index(entries, config)
        path = tmp_path / "x.idx"
        save_index(idx, path)
        loaded = load_index(path)
        assert loaded.vocab == idx.vocab
        assert loaded.doc_vectors == idx.doc_vectors
        assert loaded.config_fingerprint == idx.config_fingerprint
        got = query(loaded, PinyinString.parse("jiao zheng"), config)
        assert got[0].entry.word == "矫正" and got[0].score == 1.0

    def test_rebuild_byte_identical(self, tmp_path, table, rules):
        config = RetrieverConfig()
        entries = [entry(w, table, rules) for w in ["矫正", "弱视"]]
        p1, p2 = tmp_path / "a.idx", tmp_path / "b.idx"
        save_index(build_index(entries, config), p1)
        save_index(build_index(entries, config), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestRetrieverConfigValidation:
    def test_theta_out_of_range(self):
        with pytest.raises(ConfigurationError):
            RetrieverConfig(theta=1.5)

    def test_ngram_max_positive(self):
        with pytest.raises(ConfigurationError):
            RetrieverConfig(ngram_max=0)

    def test_top_k_positive(self):
        with pytest.raises(ConfigurationError):
            RetrieverConfig(top_k_per_query=0)


def test_unsupported_index_format_rejected(tmp_path):
    bad = tmp_path / "bad.idx"
    bad.write_text('{"format": 99, "entries": [], "fuzzy": {}, "ngram_max": 2, "fingerprint": ""}',
                   encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_index(bad)
