"""End-to-end correction: retrieval-guided fixing of a domain homophone error,
then the two-pass secondary search on a sentence with two errors.

Run: python demos/02_end_to_end_correction.py
"""

from pinspell import (
    BaselineSpeller,
    ConfusionSet,
    LexiconEntry,
    NGramModel,
    PipelineConfig,
    Resources,
    RetrieverConfig,
    SourceSentence,
    build_augmented,
    build_index,
    build_segment_dict,
    correct_once,
    correct_secondary,
    default_fuzzy_rules,
    default_general_words,
    default_reading_table,
    normalize,
    retrieve,
    to_pinyin,
)

table = default_reading_table()
rules = default_fuzzy_rules()
confusion = ConfusionSet.from_reading_table(table, rules)


def make_entries(words):
    return [LexiconEntry(w, normalize(to_pinyin(w, table), rules)) for w in words]


print("=== act 1: one homophone error in a medical sentence ===")
lexicon = ["弱视", "医学", "医学验光", "配镜", "矫正", "验光", "近视", "青光眼", "视力"]
carriers = [f"治疗弱视采用医学验光配镜来进行{t}。"
            for t in ["检查", "治疗", "观察", "调整", "处理", "评估", "复查", "诊断"]]
corpus = carriers + [
    "医生建议采用医学验光进行治疗。",
    "患者需要定期复查视力的情况。",
    "医院定期组织视力检查工作。",
    "检查结果符合相关标准要求。",
]
retriever = RetrieverConfig(fuzzy=rules)
resources = Resources(
    speller=BaselineSpeller(confusion, NGramModel.train(corpus), table=table, rules=rules),
    table=table,
    seg_dict=build_segment_dict(lexicon + default_general_words()),
    index=build_index(make_entries(lexicon), retriever),
)
config = PipelineConfig(retriever=retriever)

sentence = "治疗弱视采用医学验光配镜来进行校正。"
print(f"input : {sentence}")
print("        (校正 'proofreading' should be 矫正 'correction' in this context)")

x = SourceSentence(sentence)
r = retrieve(x, resources.index, retriever, resources.seg_dict, resources.table)
print("\nretrieved domain terms:")
for term, score in zip(r.terms, r.per_term_score):
    print(f"  {term:<8} {score:.3f}")
print(f"\naugmented input: {build_augmented(x, r).rendered}")

result = correct_once(x, config, resources)
print(f"\noutput: {result.output}")
print(f"changed positions: {sorted(result.changed_positions)}")

print("\n=== act 2: two errors, the second masked until the first is fixed ===")
lexicon2 = ["培训", "基地", "培训基地", "考试", "成绩", "考试成绩", "成本"]
resources2 = Resources(
    speller=resources.speller,
    table=table,
    seg_dict=build_segment_dict(lexicon2 + ["员工", "参加", "帝考试"]),
    index=build_index(make_entries(lexicon2), retriever),
)
sentence2 = "员工参加培训基帝考试成吉。"
print(f"input : {sentence2}  (基帝 -> 基地, 成吉 -> 成绩)")

x2 = SourceSentence(sentence2)
first = correct_once(x2, config, resources2)
print(f"pass 1: {first.output}")
print(f"        retrieved: {list(first.per_pass_terms[0].terms)}")
final = correct_secondary(x2, config, resources2)
print(f"pass 2: {final.output}")
print(f"        re-retrieved on the fixed text: {list(final.per_pass_terms[1].terms)}")
print("pass 1 segmentation hides 考试成绩; once 基地 is restored, the second")
print("retrieval sees 考试 as a unit and the term covering 成吉 surfaces.")
