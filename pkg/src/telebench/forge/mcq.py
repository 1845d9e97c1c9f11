"""Two-agent MCQ forging: generate with one LLM, validate with another.

The generator's labeled-line output (Question / Option k / Answer /
Explanation) is parsed into candidates; structurally malformed candidates
and candidates containing banned tokens are dropped with a recorded reason.
Each surviving candidate is posed back to a validator agent together with
the source text, and is kept only when the validator's parsed answer equals
the candidate's. Kept items await human review downstream.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from ..clients import ChatClient, ProviderError
from ..scoring import parse_option_answer
from .items import InstructItem, McqItem, banned_token_violations, format_options
from .prompts import render_prompt_template

logger = logging.getLogger(__name__)

_LABEL_RE = re.compile(
    r"^\s*(?:[-*•]\s*)?(question|option\s*(\d+)|answer|explanation)\s*:\s*(.*)$",
    re.IGNORECASE,
)

DEFAULT_MCQ_CATEGORY = "research-publications"


@dataclass
class DroppedCandidate:
    """A generator candidate that did not survive, and why."""

    stage: str  # parse | banned-token | validator
    reason: str
    question: str

    def to_record(self) -> dict:
        return {"stage": self.stage, "reason": self.reason, "question": self.question}


@dataclass
class McqForgeResult:
    kept: list[McqItem] = field(default_factory=list)
    dropped: list[DroppedCandidate] = field(default_factory=list)


class McqForgeError(RuntimeError):
    """Provider failure during forging; carries the partial result."""

    def __init__(self, message: str, partial: McqForgeResult):
        super().__init__(message)
        self.partial = partial


def parse_generator_candidates(response_text: str) -> list[dict]:
    """Split a generator response into raw candidate dicts.

    Tolerates extra whitespace and leading bullets; lines that match no
    label continue the previous field. Each candidate dict carries
    ``question``, ``options`` ({number: text}), ``answer_raw`` and
    ``explanation`` as found, without validation.
    """
    candidates: list[dict] = []
    current: dict | None = None
    last_field: tuple | None = None

    for line in response_text.splitlines():
        m = _LABEL_RE.match(line)
        if not m:
            text = line.strip()
            if current is not None and last_field is not None and text:
                kind, key = last_field
                if kind == "option":
                    current["options"][key] = f"{current['options'][key]} {text}"
                else:
                    current[key] = f"{current[key]} {text}".strip()
            continue
        label = m.group(1).lower()
        value = m.group(3).strip()
        if label == "question":
            current = {"question": value, "options": {}, "answer_raw": None, "explanation": ""}
            candidates.append(current)
            last_field = ("plain", "question")
        elif current is None:
            continue  # stray labels before any question
        elif label.startswith("option"):
            number = int(m.group(2))
            current["options"][number] = value
            last_field = ("option", number)
        elif label == "answer":
            current["answer_raw"] = value
            last_field = ("plain", "answer_raw")
        else:
            current["explanation"] = value
            last_field = ("plain", "explanation")
    return candidates


def candidate_to_item(candidate: dict, category: str) -> tuple[McqItem | None, str | None]:
    """Validate one raw candidate; returns (item, None) or (None, reason)."""
    question = (candidate.get("question") or "").strip()
    if not question:
        return None, "missing question"
    numbers = sorted(candidate["options"])
    if len(numbers) < 2:
        return None, "fewer than two options"
    if numbers != list(range(1, len(numbers) + 1)):
        return None, f"non-contiguous option numbers {numbers}"
    options = [candidate["options"][k] for k in numbers]
    if any(not o.strip() for o in options):
        return None, "empty option text"
    answer_raw = candidate.get("answer_raw")
    if not answer_raw:
        return None, "missing answer"
    answer = parse_option_answer(answer_raw, len(options))
    if answer is None:
        return None, f"unparseable or out-of-range answer {answer_raw!r}"
    item = McqItem(
        question=question,
        options=options,
        answer_index=answer,
        explanation=candidate.get("explanation", ""),
        category=category,
    )
    return item, None


def format_mcq_for_validation(item: McqItem) -> str:
    return f"{item.question}\n{format_options(item.options)}"


def generate_validated_mcqs(
    text: str,
    generator_client: ChatClient,
    validator_client: ChatClient,
    category: str = DEFAULT_MCQ_CATEGORY,
) -> McqForgeResult:
    """Forge MCQs from one source text through the generate-validate loop.

    A candidate is kept iff the validator, shown the source text and the
    question, answers with the candidate's own option; disagreement removes
    the candidate silently (it still lands in the drop log). Provider
    failure raises ``McqForgeError`` carrying the partial result.
    """
    result = McqForgeResult()

    prompt = render_prompt_template("mcq-generate", {"text": text})
    try:
        generated = generator_client.complete(prompt)
    except ProviderError as exc:
        raise McqForgeError(f"generator failed: {exc}", result) from exc

    for candidate in parse_generator_candidates(generated.text):
        item, reason = candidate_to_item(candidate, category)
        if item is None:
            logger.info("dropping malformed candidate: %s", reason)
            result.dropped.append(
                DroppedCandidate("parse", reason, (candidate.get("question") or "").strip())
            )
            continue
        violations = banned_token_violations(item)
        if violations:
            reason = f"banned tokens: {', '.join(violations)}"
            logger.info("dropping candidate %r: %s", item.question[:40], reason)
            result.dropped.append(DroppedCandidate("banned-token", reason, item.question))
            continue

        validation_prompt = render_prompt_template(
            "mcq-validate", {"text": text, "question": format_mcq_for_validation(item)}
        )
        try:
            verdict = validator_client.complete(validation_prompt)
        except ProviderError as exc:
            raise McqForgeError(f"validator failed: {exc}", result) from exc
        validator_answer = parse_option_answer(verdict.text, len(item.options))
        if validator_answer == item.answer_index:
            result.kept.append(item)
        else:
            result.dropped.append(
                DroppedCandidate(
                    "validator",
                    f"validator answered {validator_answer}, candidate says {item.answer_index}",
                    item.question,
                )
            )
    return result


def derive_open_qa(mcq: McqItem) -> InstructItem:
    """Open-ended QA item from an MCQ: the options are removed entirely.

    The instruction is the question and the response is the text of the
    correct option.
    """
    return InstructItem(
        kind="open-qa",
        instruction=mcq.question,
        input="",
        response=mcq.correct_option,
    )
