"""Preference-pair construction from instruction runs.

Pairs encode a concision-and-accuracy preference: an instruction enters the
preference dataset when the model output scores a low RougeL F-measure
against the ground truth or rambles past a length ratio, with the ground
truth as the chosen response and the model output as the rejected one.
"""

from __future__ import annotations

import logging
from typing import Iterable, Mapping

from ..scoring import rouge_l
from .items import PreferencePair

logger = logging.getLogger(__name__)

DEFAULT_ROUGEL_THRESHOLD = 0.3
DEFAULT_LENGTH_RATIO_THRESHOLD = 3.0


def build_preference_pairs(
    items: Iterable[Mapping[str, str]],
    rougeL_threshold: float = DEFAULT_ROUGEL_THRESHOLD,
    length_ratio_threshold: float = DEFAULT_LENGTH_RATIO_THRESHOLD,
) -> list[PreferencePair]:
    """Select low-metric instruction runs as preference pairs.

    Each item maps ``prompt`` / ``ground_truth`` / ``model_output``. A pair
    is emitted iff RougeL-F(model_output, ground_truth) < rougeL_threshold
    or the word-count ratio output/truth exceeds length_ratio_threshold.
    Items with an empty ground truth or empty model output are skipped with
    a warning.
    """
    if rougeL_threshold <= 0 or length_ratio_threshold <= 0:
        raise ValueError("thresholds must be positive")
    pairs: list[PreferencePair] = []
    for item in items:
        prompt = item["prompt"]
        truth = item["ground_truth"]
        output = item["model_output"]
        if not truth.strip():
            logger.warning("skipping item with empty ground truth (prompt %r)", prompt[:40])
            continue
        if not output.strip():
            logger.warning("skipping item with empty model output (prompt %r)", prompt[:40])
            continue
        if output == truth:
            continue  # identical responses can never form a valid pair

        rouge = rouge_l(output, truth).f_measure
        ratio = len(output.split()) / len(truth.split())
        if rouge < rougeL_threshold:
            metric = {"name": "rougeL_f", "value": rouge}
        elif ratio > length_ratio_threshold:
            metric = {"name": "length_ratio", "value": ratio}
        else:
            continue
        pairs.append(
            PreferencePair(prompt=prompt, chosen=truth, rejected=output, selection_metric=metric)
        )
    return pairs
