"""Adaptive gating of retrieval knowledge and combined-loss arithmetic.

The gate opens only when a retrieved term actually occurs in the target
sentence; a closed gate zeroes the retrieval-branch loss. The gate is a
train-time device — inference always runs the augmented branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContractError
from .retrieve import RetrievalResult
from .speller import TokenDistributionMatrix

PROB_FLOOR = 1e-9


@dataclass(frozen=True)
class TargetSentence:
    text: str

    @property
    def chars(self) -> tuple[str, ...]:
        return tuple(self.text)

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class LossBreakdown:
    loss_c: float
    loss_r: float
    total: float
    gate_open: bool


def gate(r: RetrievalResult, y: TargetSentence) -> bool:
    """True iff some retrieved term occurs as a contiguous substring of the
    target text."""
    return any(term in y.text for term in r.terms)


def nll_loss(
    m: TokenDistributionMatrix, y: TargetSentence, floor: float = PROB_FLOOR
) -> float:
    """Negative log-likelihood of the gold chars under the matrix (natural
    log). Gold chars missing from a sparse candidate row get the floor
    probability so diagnostics stay finite."""
    if m.n != len(y):
        raise ContractError(f"matrix has {m.n} positions but target has {len(y)} chars")
    total = 0.0
    for i, gold in enumerate(y.chars):
        row = dict(m.candidates[i])
        lp = row.get(gold)
        if lp is None:
            lp = math.log(floor)
        total -= lp
    return total


def combined_loss(
    m_c: TokenDistributionMatrix,
    m_r: TokenDistributionMatrix | None,
    r: RetrievalResult,
    y: TargetSentence,
) -> LossBreakdown:
    """loss_c always; loss_r only when the gate is open (else exactly 0)."""
    loss_c = nll_loss(m_c, y)
    gate_open = gate(r, y)
    if gate_open:
        if m_r is None:
            raise ContractError("gate is open but no augmented-branch matrix was provided")
        loss_r = nll_loss(m_r, y)
    else:
        loss_r = 0.0
    return LossBreakdown(loss_c=loss_c, loss_r=loss_r, total=loss_c + loss_r, gate_open=gate_open)
