"""Benchmark and instruction item forging."""

from .code_tasks import make_code_infill_item, make_code_infill_item_from_text
from .equations import (
    EquationSpan,
    extract_display_equations,
    is_definition_equation,
    make_masked_equation_items,
)
from .items import (
    BANNED_MCQ_PATTERNS,
    FILL_PLACEHOLDER,
    MASK_PLACEHOLDER,
    WORKING_GROUPS,
    CodeTaskItem,
    InstructItem,
    MaskedEquationItem,
    McqItem,
    PreferencePair,
    TdocClassItem,
    banned_token_violations,
    item_from_record,
)
from .mcq import (
    DroppedCandidate,
    McqForgeError,
    McqForgeResult,
    derive_open_qa,
    generate_validated_mcqs,
    parse_generator_candidates,
)
from .preference import build_preference_pairs
from .prompts import TEMPLATE_IDS, TemplateError, render_prompt_template
from .tdoc import make_tdoc_items

__all__ = [
    "BANNED_MCQ_PATTERNS",
    "FILL_PLACEHOLDER",
    "MASK_PLACEHOLDER",
    "WORKING_GROUPS",
    "CodeTaskItem",
    "DroppedCandidate",
    "EquationSpan",
    "InstructItem",
    "MaskedEquationItem",
    "McqForgeError",
    "McqForgeResult",
    "McqItem",
    "PreferencePair",
    "TdocClassItem",
    "TEMPLATE_IDS",
    "TemplateError",
    "banned_token_violations",
    "build_preference_pairs",
    "derive_open_qa",
    "extract_display_equations",
    "generate_validated_mcqs",
    "is_definition_equation",
    "item_from_record",
    "make_code_infill_item",
    "make_code_infill_item_from_text",
    "make_masked_equation_items",
    "make_tdoc_items",
    "parse_generator_candidates",
    "render_prompt_template",
]
