"""Benchmark and instruction item types with a common JSON wire format.

Every item serializes to a flat JSON object carrying a ``kind`` discriminator
so mixed item families can live in one JSONL file. Structural invariants are
enforced at construction; the MCQ banned-token rule is a separate
validation-time check (generated candidates are dropped for violations,
human edits are only badged).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

MASK_PLACEHOLDER = "<MASK>"
FILL_PLACEHOLDER = "<FILL>"

CODE_TASK_KINDS = ("summary", "analysis", "infill", "generate")
CODE_LANGUAGES = ("c", "cpp", "python", "matlab")
MCQ_CATEGORIES = (
    "lexicon",
    "research-overview",
    "research-publications",
    "standards-overview",
    "standards-specifications",
)
INSTRUCT_KINDS = ("general", "protocol", "open-qa")

WORKING_GROUPS = (
    "CT1", "CT3", "CT4", "CT6",
    "RAN1", "RAN2", "RAN3", "RAN4", "RAN5",
    "SA1", "SA2", "SA3", "SA4", "SA5", "SA6",
)

# Generated questions must stand alone: no deixis back to the source text.
BANNED_MCQ_PATTERNS = (
    re.compile(r"\bproposed\b", re.IGNORECASE),
    re.compile(r"\bthe\s+invention\b", re.IGNORECASE),
    re.compile(r"\btext\b", re.IGNORECASE),
    re.compile(r"\bpaper\b", re.IGNORECASE),
)


@dataclass
class MaskedEquationItem:
    """Equation-infilling item: context with one masked display equation."""

    doc_id: str
    context: str
    ground_truth_equation: str
    equation_ordinal: int

    def __post_init__(self) -> None:
        if self.context.count(MASK_PLACEHOLDER) != 1:
            raise ValueError("context must contain exactly one mask placeholder")
        if not self.ground_truth_equation:
            raise ValueError("ground-truth equation must be non-empty")

    def splice_back(self) -> str:
        """Original passage: the mask replaced by the ground-truth equation."""
        return self.context.replace(MASK_PLACEHOLDER, self.ground_truth_equation, 1)

    def to_record(self) -> dict:
        return {
            "kind": "masked-equation",
            "doc_id": self.doc_id,
            "context": self.context,
            "ground_truth_equation": self.ground_truth_equation,
            "equation_ordinal": self.equation_ordinal,
        }


@dataclass
class CodeTaskItem:
    """One code benchmark item (summary / analysis / infill / generate)."""

    kind: str
    language: str
    prompt: str
    ground_truth: str
    source_id: str

    def __post_init__(self) -> None:
        if self.kind not in CODE_TASK_KINDS:
            raise ValueError(f"unknown code task kind {self.kind!r}")
        if self.language not in CODE_LANGUAGES:
            raise ValueError(f"unknown code language {self.language!r}")
        if self.kind == "infill" and self.prompt.count(FILL_PLACEHOLDER) != 1:
            raise ValueError("infill prompts must contain exactly one fill placeholder")

    def splice_back(self) -> str:
        """For infill items: the source file with the ground truth restored."""
        if self.kind != "infill":
            raise ValueError("splice_back applies to infill items only")
        return self.prompt.replace(FILL_PLACEHOLDER, self.ground_truth, 1)

    def to_record(self) -> dict:
        return {
            "kind": "code-task",
            "task": self.kind,
            "language": self.language,
            "prompt": self.prompt,
            "ground_truth": self.ground_truth,
            "source_id": self.source_id,
        }


@dataclass
class McqItem:
    """Multiple-choice question with a 1-based answer index."""

    question: str
    options: list[str]
    answer_index: int
    explanation: str
    category: str

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("question must be non-empty")
        if len(self.options) < 2:
            raise ValueError("an MCQ needs at least two options")
        if any(not o.strip() for o in self.options):
            raise ValueError("options must be non-empty")
        if not 1 <= self.answer_index <= len(self.options):
            raise ValueError(
                f"answer_index {self.answer_index} out of range 1..{len(self.options)}"
            )
        if self.category not in MCQ_CATEGORIES:
            raise ValueError(f"unknown MCQ category {self.category!r}")

    @property
    def correct_option(self) -> str:
        return self.options[self.answer_index - 1]

    def to_record(self) -> dict:
        return {
            "kind": "mcq",
            "question": self.question,
            "options": list(self.options),
            "answer_index": self.answer_index,
            "explanation": self.explanation,
            "category": self.category,
        }


def banned_token_violations(item: McqItem) -> list[str]:
    """Banned tokens found in the question, options or explanation."""
    haystack = "\n".join([item.question, *item.options, item.explanation])
    return [p.pattern for p in BANNED_MCQ_PATTERNS if p.search(haystack)]


@dataclass
class TdocClassItem:
    """Working-group classification item: a text segment and its label."""

    text: str
    label: str

    def __post_init__(self) -> None:
        if self.label not in WORKING_GROUPS:
            raise ValueError(f"label {self.label!r} not in the working-group set")
        if not self.text.strip():
            raise ValueError("classification text must be non-empty")

    def to_record(self) -> dict:
        return {"kind": "tdoc-class", "text": self.text, "label": self.label}


@dataclass
class PreferencePair:
    """Prompt with a preferred and a dispreferred response."""

    prompt: str
    chosen: str
    rejected: str
    selection_metric: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.chosen or not self.rejected:
            raise ValueError("chosen and rejected must be non-empty")
        if self.chosen == self.rejected:
            raise ValueError("chosen and rejected must differ")

    def to_record(self) -> dict:
        return {
            "kind": "preference-pair",
            "prompt": self.prompt,
            "chosen": self.chosen,
            "rejected": self.rejected,
            "selection_metric": dict(self.selection_metric),
        }


@dataclass
class InstructItem:
    """Instruction / input / response triple."""

    kind: str
    instruction: str
    input: str
    response: str

    def __post_init__(self) -> None:
        if self.kind not in INSTRUCT_KINDS:
            raise ValueError(f"unknown instruct kind {self.kind!r}")
        if not self.instruction.strip() or not self.response.strip():
            raise ValueError("instruction and response must be non-empty")

    def to_record(self) -> dict:
        return {
            "kind": "instruct",
            "instruct_kind": self.kind,
            "instruction": self.instruction,
            "input": self.input,
            "response": self.response,
        }


def item_from_record(record: dict):
    """Rebuild an item from its wire record; raises on invalid payloads."""
    kind = record.get("kind")
    if kind == "masked-equation":
        return MaskedEquationItem(
            doc_id=record["doc_id"],
            context=record["context"],
            ground_truth_equation=record["ground_truth_equation"],
            equation_ordinal=record["equation_ordinal"],
        )
    if kind == "code-task":
        return CodeTaskItem(
            kind=record["task"],
            language=record["language"],
            prompt=record["prompt"],
            ground_truth=record["ground_truth"],
            source_id=record["source_id"],
        )
    if kind == "mcq":
        return McqItem(
            question=record["question"],
            options=list(record["options"]),
            answer_index=record["answer_index"],
            explanation=record.get("explanation", ""),
            category=record["category"],
        )
    if kind == "tdoc-class":
        return TdocClassItem(text=record["text"], label=record["label"])
    if kind == "preference-pair":
        return PreferencePair(
            prompt=record["prompt"],
            chosen=record["chosen"],
            rejected=record["rejected"],
            selection_metric=dict(record.get("selection_metric", {})),
        )
    if kind == "instruct":
        return InstructItem(
            kind=record["instruct_kind"],
            instruction=record["instruction"],
            input=record.get("input", ""),
            response=record["response"],
        )
    raise ValueError(f"unknown item kind {kind!r}")


def format_options(options: Sequence[str]) -> str:
    return "\n".join(f"Option {i}: {opt}" for i, opt in enumerate(options, start=1))
