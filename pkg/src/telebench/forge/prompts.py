"""Prompt template loading and rendering.

Templates live as UTF-8 text files next to this module so they can be
diffed and versioned independently of the code. Placeholders use single
braces ({text}, {script}, {question}); substitution is literal string
replacement, never str.format, because several templates legitimately
contain JSON braces.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from typing import Mapping

TEMPLATE_IDS = (
    "mcq-generate",
    "mcq-validate",
    "code-request",
    "code-summary",
    "code-analysis",
    "general-instruct",
    "protocol-instruct",
)

_PLACEHOLDER_RE = re.compile(r"\{(text|script|question)\}")


class TemplateError(KeyError):
    """Unknown template id or missing placeholder variable."""


@lru_cache(maxsize=None)
def load_template(template_id: str) -> str:
    if template_id not in TEMPLATE_IDS:
        raise TemplateError(f"unknown template id {template_id!r}")
    ref = resources.files("telebench.forge").joinpath(f"templates/{template_id}.txt")
    return ref.read_text(encoding="utf-8")


def template_placeholders(template_id: str) -> set[str]:
    return set(_PLACEHOLDER_RE.findall(load_template(template_id)))


def render_prompt_template(template_id: str, variables: Mapping[str, str]) -> str:
    """Fill a template's placeholders; unknown id or missing variable raise."""
    template = load_template(template_id)
    rendered = template
    for name in template_placeholders(template_id):
        if name not in variables:
            raise TemplateError(f"template {template_id!r} requires variable {name!r}")
        rendered = rendered.replace("{" + name + "}", variables[name])
    return rendered
