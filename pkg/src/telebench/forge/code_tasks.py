"""Fill-in-the-middle code task construction.

A contiguous span of 1-7 lines from the middle of a source file (the first
and last 20% of lines are off limits) is replaced by the fill placeholder;
the removed lines become the ground truth. Construction is deterministic
for a given seed and round-trips byte-exactly.
"""

from __future__ import annotations

import random
from pathlib import Path

from .items import FILL_PLACEHOLDER, CodeTaskItem

MIN_FILE_LINES = 10
MAX_SPAN_LINES = 7
EDGE_FRACTION = 0.2

_SUFFIX_LANGUAGES = {
    ".c": "c",
    ".h": "c",
    ".cc": "cpp",
    ".cpp": "cpp",
    ".hpp": "cpp",
    ".py": "python",
    ".m": "matlab",
}


def language_for_path(path: str | Path) -> str | None:
    return _SUFFIX_LANGUAGES.get(Path(path).suffix.lower())


def make_code_infill_item_from_text(
    source_id: str, code_text: str, language: str, rng_seed: int
) -> CodeTaskItem:
    """Build an infill item from in-memory code; see make_code_infill_item."""
    if FILL_PLACEHOLDER in code_text:
        raise ValueError(f"{source_id} already contains the fill placeholder")
    lines = code_text.splitlines(keepends=True)
    n = len(lines)
    if n < MIN_FILE_LINES:
        raise ValueError(f"{source_id} has {n} lines; at least {MIN_FILE_LINES} required")

    edge = int(EDGE_FRACTION * n)
    lo = edge
    hi = n - edge - 1  # inclusive line index
    zone = hi - lo + 1

    rng = random.Random(rng_seed)
    span = rng.randint(1, min(MAX_SPAN_LINES, zone))
    start = rng.randint(lo, hi - span + 1)

    ground_truth = "".join(lines[start : start + span])
    prompt = "".join(lines[:start]) + FILL_PLACEHOLDER + "".join(lines[start + span :])
    return CodeTaskItem(
        kind="infill",
        language=language,
        prompt=prompt,
        ground_truth=ground_truth,
        source_id=source_id,
    )


def make_code_infill_item(
    code_file: str | Path, rng_seed: int, language: str | None = None
) -> CodeTaskItem:
    """Read a code file and mask a random middle span of 1-7 lines.

    Files shorter than 10 lines are rejected. The span never touches the
    first or last 20% of lines; splicing the ground truth back at the
    placeholder reproduces the file byte-exactly.
    """
    path = Path(code_file)
    lang = language or language_for_path(path)
    if lang is None:
        raise ValueError(f"cannot infer language for {path}; pass language explicitly")
    return make_code_infill_item_from_text(
        source_id=path.name, code_text=path.read_text(encoding="utf-8"), language=lang, rng_seed=rng_seed
    )
