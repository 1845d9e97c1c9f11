"""Metrics and aggregation for benchmark runs.

Covers Rouge-1/Rouge-L over word tokens, option-letter answer parsing and
accuracy tables for MCQ and working-group classification runs, the
baseline-normalized embedding similarity score for equation infilling, and
score distributions (mean, threshold portions, CDF).

Tokenization for Rouge is deliberately plain: case-fold, then split on any
non-alphanumeric run. No stemming, no stopword handling. All functions are
pure; rounding to two decimals happens only in the table renderers.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

logger = logging.getLogger(__name__)

WORKING_GROUPS = (
    "CT1", "CT3", "CT4", "CT6",
    "RAN1", "RAN2", "RAN3", "RAN4", "RAN5",
    "SA1", "SA2", "SA3", "SA4", "SA5", "SA6",
)

MCQ_CATEGORIES = (
    "lexicon",
    "research-overview",
    "research-publications",
    "standards-overview",
    "standards-specifications",
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_OPTION_RE = re.compile(r"option\s*(\d+)", re.IGNORECASE)
_INT_TOKEN_RE = re.compile(r"\b(\d+)\b")

DISTRIBUTION_THRESHOLDS = (50.0, 90.0)


class DegenerateBaselineError(ValueError):
    """Empty-answer baseline cosine too close to 1 to normalize against."""


def tokenize(text: str) -> list[str]:
    """Case-folded alphanumeric tokens; everything else is a separator."""
    return _TOKEN_RE.findall(text.casefold())


@dataclass(frozen=True)
class RougeResult:
    precision: float
    recall: float
    f_measure: float


def _f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def rouge_1(candidate: str, reference: str) -> RougeResult:
    """Unigram overlap with clipped counts; empty side gives all zeros."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return RougeResult(0.0, 0.0, 0.0)
    overlap = sum((Counter(cand) & Counter(ref)).values())
    precision = overlap / len(cand)
    recall = overlap / len(ref)
    return RougeResult(precision, recall, _f_measure(precision, recall))


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> RougeResult:
    """Longest-common-subsequence Rouge over word tokens."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return RougeResult(0.0, 0.0, 0.0)
    lcs = _lcs_length(cand, ref)
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return RougeResult(precision, recall, _f_measure(precision, recall))


def parse_option_answer(response_text: str, option_count: int) -> int | None:
    """Extract the chosen option index from a free-form response.

    First "Option k" (case-insensitive) with k in range wins; fallback is the
    first standalone integer in range. None means no answer could be parsed
    and the response grades as incorrect.
    """
    if option_count < 2:
        raise ValueError("option_count must be >= 2")
    for m in _OPTION_RE.finditer(response_text):
        k = int(m.group(1))
        if 1 <= k <= option_count:
            return k
    for m in _INT_TOKEN_RE.finditer(response_text):
        k = int(m.group(1))
        if 1 <= k <= option_count:
            return k
    return None


@dataclass
class AccuracyBreakdown:
    """Accuracy percentages per group plus overall, with raw counts."""

    per_group: dict[str, float]
    overall: float
    correct: dict[str, int]
    totals: dict[str, int]


def grade_mcq_run(
    items: Sequence[tuple[str, "McqItem"]],
    responses: Mapping[str, str],
) -> AccuracyBreakdown:
    """Per-category and overall MCQ accuracy (percent, full precision).

    ``items`` pairs each item with its id; ``responses`` maps id to the raw
    response text. A missing response counts as incorrect and is logged.
    """
    correct: Counter[str] = Counter()
    totals: Counter[str] = Counter()
    n_correct = 0
    for item_id, item in items:
        totals[item.category] += 1
        response = responses.get(item_id)
        if response is None:
            logger.warning("no response for item %s; graded incorrect", item_id)
            continue
        parsed = parse_option_answer(response, len(item.options))
        if parsed == item.answer_index:
            correct[item.category] += 1
            n_correct += 1
    per_group = {cat: 100.0 * correct[cat] / totals[cat] for cat in totals}
    overall = 100.0 * n_correct / len(items) if items else 0.0
    return AccuracyBreakdown(
        per_group=per_group, overall=overall, correct=dict(correct), totals=dict(totals)
    )


def _tsg_of(label: str) -> str:
    return re.match(r"[A-Z]+", label).group(0)


def grade_classification_run(
    items: Sequence[tuple[str, "TdocClassItem"]],
    predicted_labels: Mapping[str, str],
) -> tuple[AccuracyBreakdown, AccuracyBreakdown]:
    """Working-group and TSG-pooled classification accuracy.

    Predictions are normalized (trim, upper-case) before string comparison;
    anything outside the label set grades incorrect and is logged.
    """
    label_set = set(WORKING_GROUPS)
    wg_correct: Counter[str] = Counter()
    wg_totals: Counter[str] = Counter()
    tsg_correct: Counter[str] = Counter()
    tsg_totals: Counter[str] = Counter()
    n_correct = 0
    for item_id, item in items:
        label = item.label.strip().upper()
        tsg = _tsg_of(label)
        wg_totals[label] += 1
        tsg_totals[tsg] += 1
        pred = predicted_labels.get(item_id)
        if pred is None:
            logger.warning("no prediction for item %s; graded incorrect", item_id)
            continue
        pred = pred.strip().upper()
        if pred not in label_set:
            logger.warning("prediction %r for item %s outside label set", pred, item_id)
            continue
        if pred == label:
            wg_correct[label] += 1
            tsg_correct[tsg] += 1
            n_correct += 1
    overall = 100.0 * n_correct / len(items) if items else 0.0
    per_wg = AccuracyBreakdown(
        per_group={wg: 100.0 * wg_correct[wg] / wg_totals[wg] for wg in wg_totals},
        overall=overall,
        correct=dict(wg_correct),
        totals=dict(wg_totals),
    )
    per_tsg = AccuracyBreakdown(
        per_group={t: 100.0 * tsg_correct[t] / tsg_totals[t] for t in tsg_totals},
        overall=overall,
        correct=dict(tsg_correct),
        totals=dict(tsg_totals),
    )
    return per_wg, per_tsg


def normalized_similarity_score(cos_truth_pred: float, cos_truth_empty: float) -> float:
    """Rebased cosine similarity as a percentage in [0, 100].

    The raw cosine between a predicted and ground-truth equation embedding is
    normalized against the cosine between the ground truth and the empty
    answer, then clamped at zero:

        score = max((cos_tp - cos_te) / (1 - cos_te), 0) * 100
    """
    for name, value in (("cos_truth_pred", cos_truth_pred), ("cos_truth_empty", cos_truth_empty)):
        if not -1.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [-1, 1], got {value}")
    if cos_truth_empty >= 1.0 - 1e-12:
        raise DegenerateBaselineError(
            "empty-answer baseline cosine is too close to 1 to normalize against"
        )
    raw = (cos_truth_pred - cos_truth_empty) / (1.0 - cos_truth_empty)
    return max(raw, 0.0) * 100.0


@dataclass
class ScoreRecord:
    """One metric value for one benchmark item."""

    item_id: str
    metric: str
    value: float

    def __post_init__(self) -> None:
        if not (self.value == self.value and abs(self.value) != float("inf")):
            raise ValueError("metric value must be finite")

    def to_record(self) -> dict:
        return {"item_id": self.item_id, "metric": self.metric, "value": self.value}


@dataclass
class ScoreDistribution:
    """Aggregate view of per-item scores in [0, 100]."""

    values: list[float]
    mean: float
    portion_ge: dict[float, float]
    cdf: list[float]


def score_distribution(
    values: Sequence[float], thresholds: Sequence[float] = DISTRIBUTION_THRESHOLDS
) -> ScoreDistribution:
    """Mean, inclusive >=threshold portions, and CDF at integer percents.

    ``cdf[p]`` is the fraction of values <= p for p in 0..100. Raises on an
    empty input.
    """
    values = list(values)
    if not values:
        raise ValueError("score_distribution requires at least one value")
    for v in values:
        if not 0.0 <= v <= 100.0:
            raise ValueError(f"scores must lie in [0, 100], got {v}")
    n = len(values)
    mean = sum(values) / n
    portion_ge = {t: sum(1 for v in values if v >= t) / n for t in thresholds}
    cdf = [sum(1 for v in values if v <= p) / n for p in range(101)]
    return ScoreDistribution(values=values, mean=mean, portion_ge=portion_ge, cdf=cdf)


def render_distribution_table(dist: ScoreDistribution, delimiter: str = "\t") -> str:
    """Two-line table: Average Score | >=90% portion | >=50% portion."""
    header = delimiter.join(["Average Score", "≥ 90%", "≥ 50%"])
    row = delimiter.join(
        [
            f"{dist.mean:.2f}",
            f"{dist.portion_ge[90.0] * 100:.2f}",
            f"{dist.portion_ge[50.0] * 100:.2f}",
        ]
    )
    return header + "\n" + row


def render_mcq_table(result: AccuracyBreakdown, delimiter: str = "\t") -> str:
    """Accuracy row over the five MCQ categories plus overall."""
    titles = {
        "lexicon": "Lexicon",
        "research-overview": "Research Overview",
        "research-publications": "Research Publications",
        "standards-overview": "Standards Overview",
        "standards-specifications": "Standards Specifications",
    }
    header = delimiter.join([titles[c] for c in MCQ_CATEGORIES] + ["Overall"])
    cells = [
        f"{result.per_group[c]:.2f}" if c in result.per_group else "-"
        for c in MCQ_CATEGORIES
    ]
    cells.append(f"{result.overall:.2f}")
    return header + "\n" + delimiter.join(cells)


def render_classification_table(per_tsg: AccuracyBreakdown, delimiter: str = "\t") -> str:
    """Accuracy row over the RAN / SA / CT specification groups plus overall."""
    header = delimiter.join(["RAN", "SA", "CT", "Overall"])
    cells = [
        f"{per_tsg.per_group[t]:.2f}" if t in per_tsg.per_group else "-"
        for t in ("RAN", "SA", "CT")
    ]
    cells.append(f"{per_tsg.overall:.2f}")
    return header + "\n" + delimiter.join(cells)


def render_code_table(
    rouge_by_task: Mapping[str, tuple[float, float]], delimiter: str = "\t"
) -> str:
    """One row per code task with average Rouge1 / RougeL F-measures."""
    lines = [delimiter.join(["Task", "Rouge1", "RougeL"])]
    for task, (r1, rl) in rouge_by_task.items():
        lines.append(delimiter.join([task, f"{r1:.4f}", f"{rl:.4f}"]))
    return "\n".join(lines)
