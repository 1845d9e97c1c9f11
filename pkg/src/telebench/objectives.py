"""Training objectives as pure functions over token log-probabilities.

Causal-LM and SFT losses are negative log-likelihood sums over per-token
log-probabilities supplied by the caller; the preference-alignment loss is
-log sigmoid of the beta-scaled policy/reference log-ratio margin between a
chosen and a rejected response. No model, no optimizer: everything here is
verifiable with plain floats, including the analytic DPO gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_DPO_BETA = 0.1


def _check_finite(name: str, value: float) -> None:
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"{name} must be finite, got {value}")


@dataclass(frozen=True)
class TokenLogProbs:
    """Per-token log-probabilities of one sequence; each entry is <= 0."""

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        object.__setattr__(self, "values", tuple(float(v) for v in values))
        for v in self.values:
            _check_finite("log-probability", v)
            if v > 0:
                raise ValueError(f"log-probabilities must be <= 0, got {v}")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DpoInputs:
    """Sequence log-probabilities of a preference pair under both policies."""

    logp_theta_chosen: float
    logp_theta_rejected: float
    logp_ref_chosen: float
    logp_ref_rejected: float
    beta: float = DEFAULT_DPO_BETA

    def __post_init__(self) -> None:
        for name in (
            "logp_theta_chosen",
            "logp_theta_rejected",
            "logp_ref_chosen",
            "logp_ref_rejected",
            "beta",
        ):
            _check_finite(name, getattr(self, name))
        if self.beta <= 0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class DpoResult:
    loss: float
    reward_margin: float
    # Partials w.r.t. (logp_theta_chosen, logp_theta_rejected,
    # logp_ref_chosen, logp_ref_rejected); reference terms are constants.
    gradient_wrt_logps: tuple[float, float, float, float]


def clm_loss(lp: TokenLogProbs) -> float:
    """Negative log-likelihood of a token sequence: -sum of log-probs."""
    if not lp.values:
        raise ValueError("clm_loss requires a non-empty sequence")
    return -sum(lp.values)


def sft_loss(response_lp: TokenLogProbs) -> float:
    """Negative log-likelihood of a response conditioned on its instruction.

    The caller passes log-probabilities for response positions only;
    instruction tokens are excluded upstream.
    """
    if not response_lp.values:
        raise ValueError("sft_loss requires a non-empty response")
    return -sum(response_lp.values)


def sigmoid(x: float) -> float:
    """Logistic function, branch form to avoid overflow for large |x|."""
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def _log_sigmoid(x: float) -> float:
    # log sigma(x) = -softplus(-x), stable on both sides
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def dpo_loss_and_margin(inputs: DpoInputs) -> DpoResult:
    """Preference-alignment loss, reward margin and analytic gradient.

    margin = beta * [(logp_th_w - logp_ref_w) - (logp_th_l - logp_ref_l)]
    loss   = -log sigmoid(margin)

    The gradient covers only the two policy log-probs; the reference policy
    is treated as a constant (zero partials).
    """
    margin = inputs.beta * (
        (inputs.logp_theta_chosen - inputs.logp_ref_chosen)
        - (inputs.logp_theta_rejected - inputs.logp_ref_rejected)
    )
    loss = -_log_sigmoid(margin)
    slope = inputs.beta * (1.0 - sigmoid(margin))
    return DpoResult(
        loss=loss,
        reward_margin=margin,
        gradient_wrt_logps=(-slope, +slope, 0.0, 0.0),
    )


def dpo_batch_loss(batch: Sequence[DpoInputs]) -> tuple[float, float]:
    """Arithmetic-mean loss and margin over a batch of preference pairs."""
    if not batch:
        raise ValueError("dpo_batch_loss requires at least one preference pair")
    results = [dpo_loss_and_margin(x) for x in batch]
    n = len(results)
    return (sum(r.loss for r in results) / n, sum(r.reward_margin for r in results) / n)
