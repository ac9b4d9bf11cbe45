"""The adaptive gate and combined-loss arithmetic used by trainable spellers.

The plain branch always contributes its loss; the retrieval branch counts
only when a retrieved term actually occurs in the target sentence. At
inference time there is no gate: retrieval feeds every sentence.

Run: python demos/03_gate_and_losses.py
"""

import math

from pinspell import (
    RetrievalResult,
    TargetSentence,
    TokenDistributionMatrix,
    combined_loss,
    gate,
    nll_loss,
)

target = TargetSentence("治疗弱视采用医学验光配镜来进行矫正。")

print("=== the gate: does any retrieved term occur in the target? ===")
cases = [
    ("弱视", "医学验光", "配镜", "矫正"),
    ("阑尾炎",),
    (),
]
for terms in cases:
    r = RetrievalResult(tuple(terms), tuple(1.0 for _ in terms))
    print(f"R = {list(terms) or '∅'!s:<40} gate open: {gate(r, target)}")

print("\n=== the per-token loss is a plain NLL over sparse distributions ===")
one_hot = TokenDistributionMatrix(
    tuple(target.text), tuple(((c, 0.0),) for c in target.text)
)
print(f"one-hot on the gold chars      -> loss {nll_loss(one_hot, target):.4f}")

quarter = math.log(0.25)
uniform = TokenDistributionMatrix(
    ("弱", "视"),
    tuple(((c, quarter), ("人", quarter), ("山", quarter), ("水", quarter))
          for c in "弱视"),
)
short_target = TargetSentence("弱视")
print(f"uniform over 4 candidates (n=2) -> loss {nll_loss(uniform, short_target):.4f}"
      f"  (= 2*ln4 = {2 * math.log(4):.4f})")

print("\n=== combining the branches ===")
plain = uniform
augmented = TokenDistributionMatrix(
    ("弱", "视"),
    tuple(((c, math.log(0.9)), ("人", math.log(0.1))) for c in "弱视"),
)
for terms in [("弱视",), ("阑尾炎",)]:
    r = RetrievalResult(terms, (1.0,))
    out = combined_loss(plain, augmented, r, short_target)
    print(f"R = {terms}: gate={out.gate_open}  "
          f"loss_c={out.loss_c:.4f}  loss_r={out.loss_r:.4f}  total={out.total:.4f}")
print("(a closed gate zeroes the retrieval branch so noisy retrieval cannot")
print(" pull a trainable speller away from the plain objective)")
