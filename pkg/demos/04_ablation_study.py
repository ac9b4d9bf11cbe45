"""Ablation study driven entirely through the CLI, mirroring the pipeline
switches: full system, no secondary search, no retrieval.

Run: python demos/04_ablation_study.py
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from pinspell import default_general_words

LEXICON = [
    "弱视", "医学", "医学验光", "配镜", "矫正", "验光", "近视",
    "青光眼", "视力", "白内障", "培训", "基地", "培训基地",
    "考试", "成绩", "考试成绩", "成本",
]

CORPUS = [f"治疗弱视采用医学验光配镜来进行{t}。"
          for t in ["检查", "治疗", "观察", "调整", "处理", "评估", "复查", "诊断"]]
CORPUS += [
    "医生建议采用医学验光进行治疗。",
    "患者需要定期复查视力的情况。",
    "医院定期组织视力检查工作。",
    "员工参加培训的情况符合要求。",
]

# <source>\t<gold>: two fixable homophone errors, one two-error sentence,
# and clean sentences that must stay untouched
DATASET = [
    ("治疗弱视采用医学验光配镜来进行校正。", "治疗弱视采用医学验光配镜来进行矫正。"),
    ("医生建议采用医学严光进行治疗。", "医生建议采用医学验光进行治疗。"),
    ("员工参加培训基帝考试成吉。", "员工参加培训基地考试成绩。"),
    ("医院定期组织视力检查工作。", "医院定期组织视力检查工作。"),
    ("患者需要定期复查视力的情况。", "患者需要定期复查视力的情况。"),
]


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "pinspell", *args],
                          capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"command failed: {args}\n{proc.stderr}")
    return proc.stdout


def main():
    tmp = Path(tempfile.mkdtemp(prefix="pinspell-ablation-"))
    (tmp / "lexicon.txt").write_text("\n".join(LEXICON) + "\n", encoding="utf-8")
    (tmp / "corpus.txt").write_text("\n".join(CORPUS) + "\n", encoding="utf-8")
    (tmp / "gold.tsv").write_text(
        "\n".join(f"{s}\t{g}" for s, g in DATASET) + "\n", encoding="utf-8")
    # the glue word 帝考试 reproduces the masked second error from demo 02
    words = tmp / "words.txt"
    words.write_text("\n".join(default_general_words() + ["员工", "帝考试"]) + "\n",
                     encoding="utf-8")

    print(cli("build-index", "--lexicon", str(tmp / "lexicon.txt"),
              "--out", str(tmp / "domain.idx")).strip())
    print(cli("train-lm", "--corpus", str(tmp / "corpus.txt"),
              "--out", str(tmp / "domain.lm")).strip())

    variants = [
        ("full system", []),
        ("no secondary search", ["--no-secondary-search"]),
        ("no retrieval", ["--no-retrieval"]),
    ]
    print(f"\n{'variant':<22}{'detection F1':>14}{'correction F1':>15}")
    for name, flags in variants:
        pred = tmp / f"pred_{len(flags)}.tsv"
        cli("correct", "--dataset", str(tmp / "gold.tsv"), "--out", str(pred),
            "--index", str(tmp / "domain.idx"), "--lm", str(tmp / "domain.lm"),
            "--general-words", str(words), *flags)
        report = cli("eval", "--pred", str(pred), "--gold", str(tmp / "gold.tsv"))
        values = dict(line.split("=") for line in report.splitlines() if "=" in line)
        print(f"{name:<22}{float(values['detection_f1']):>14.3f}"
              f"{float(values['correction_f1']):>15.3f}")
    print(f"\nartifacts left in {tmp} for inspection")


if __name__ == "__main__":
    main()
