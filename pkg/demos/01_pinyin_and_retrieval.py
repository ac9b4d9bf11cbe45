"""Pinyin conversion, fuzzy normalization, and lexicon retrieval, step by step.

Run: python demos/01_pinyin_and_retrieval.py
"""

from pinspell import (
    LexiconEntry,
    PinyinString,
    RetrieverConfig,
    build_index,
    default_fuzzy_rules,
    default_reading_table,
    normalize,
    query,
    syllable_ngrams,
    to_pinyin,
)

table = default_reading_table()
rules = default_fuzzy_rules()

print("=== hanzi -> toneless pinyin ===")
for word in ["弱视", "医学验光", "学校", "校正", "银行"]:
    print(f"{word:>6} -> {to_pinyin(word, table).text}")
print("(校 alone reads xiao; the word entries 校正/银行 pick the jiao/hang readings)")

print("\n=== fuzzy normalization ===")
for raw in ["zhang sheng", "shi li", "jin xing"]:
    py = PinyinString.parse(raw)
    print(f"{raw:>12} -> {normalize(py, rules).text}")
print("(zh/z, ch/c, sh/s, n/l, f/h initials and an/ang, en/eng, in/ing finals collapse)")

print("\n=== syllable n-gram features ===")
py = normalize(to_pinyin("医学验光", table), rules)
print(f"医学验光 -> {syllable_ngrams(py, 2)}")

print("\n=== TF-IDF retrieval over a pinyin-keyed lexicon ===")
words = ["矫正", "弱视", "配镜", "医学验光", "验光", "青光眼", "白内障", "视力"]
entries = [LexiconEntry(w, normalize(to_pinyin(w, table), rules)) for w in words]
config = RetrieverConfig(theta=0.5, fuzzy=rules)
index = build_index(entries, config)

for probe in ["jiao zheng", "yi xue yan guang", "yan guang", "ruo shi", "mo sheng"]:
    matches = query(index, PinyinString.parse(probe), config)
    shown = ", ".join(f"{m.entry.word}({m.score:.3f})" for m in matches) or "(nothing)"
    print(f"query {probe!r:>20} -> {shown}")
print("(exact keys score 1.0; partial syllable overlap decays; unrelated queries miss)")

print("\n=== the threshold is the noise gate ===")
probe = PinyinString.parse("yan guang")
for theta in (0.3, 0.6, 0.9):
    cfg = RetrieverConfig(theta=theta, fuzzy=rules)
    idx = build_index(entries, cfg)
    got = [m.entry.word for m in query(idx, probe, cfg)]
    print(f"theta={theta}: {got}")
