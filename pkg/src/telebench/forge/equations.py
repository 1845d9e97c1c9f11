"""Display-equation extraction and masked-equation item construction.

Display math means equation/align/eqnarray environments (starred or not)
and bracket-delimited blocks; inline math is never extracted. For masking,
one display equation at a time is replaced by the placeholder while all
earlier equations stay in ground-truth form, and the context is cut at the
end of the paragraph containing the masked equation.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..ingest import Document
from .items import MASK_PLACEHOLDER, MaskedEquationItem

logger = logging.getLogger(__name__)

_ENV_NAMES = ("equation", "align", "eqnarray")
_BEGIN_RE = re.compile(r"\\begin\{(equation|align|eqnarray)(\*?)\}")
# \[ opens display math only when the backslash is not itself escaped
# (\\[2mm] is a line break, not math).
_BRACKET_OPEN_RE = re.compile(r"(?<!\\)\\\[")
_BRACKET_CLOSE_RE = re.compile(r"(?<!\\)\\\]")

_EQ_TOKEN_RE = re.compile(r"\\[A-Za-z]+|[A-Za-z0-9]+|[^\sA-Za-z0-9]")

DEFAULT_MAX_ITEMS = 8


@dataclass(frozen=True)
class EquationSpan:
    """One display-math block: [start, end) offsets and the verbatim source."""

    start: int
    end: int
    source: str


def extract_display_equations(latex_source: str) -> list[EquationSpan]:
    """All balanced display-math blocks in document order.

    Unbalanced environments are skipped with a logged warning. Spans never
    overlap; when a block begins inside another, the outer block wins.
    """
    spans: list[EquationSpan] = []

    for m in _BEGIN_RE.finditer(latex_source):
        env = m.group(1) + m.group(2)
        closer = f"\\end{{{env}}}"
        end = latex_source.find(closer, m.end())
        if end == -1:
            logger.warning("unbalanced \\begin{%s} at offset %d; block skipped", env, m.start())
            continue
        stop = end + len(closer)
        spans.append(EquationSpan(m.start(), stop, latex_source[m.start():stop]))

    for m in _BRACKET_OPEN_RE.finditer(latex_source):
        close = _BRACKET_CLOSE_RE.search(latex_source, m.end())
        if close is None:
            logger.warning("unbalanced \\[ at offset %d; block skipped", m.start())
            continue
        spans.append(
            EquationSpan(m.start(), close.end(), latex_source[m.start():close.end()])
        )

    spans.sort(key=lambda s: s.start)
    merged: list[EquationSpan] = []
    for span in spans:
        if merged and span.start < merged[-1].end:
            continue
        merged.append(span)
    return merged


def _inner_source(span: EquationSpan) -> str:
    text = span.source
    m = _BEGIN_RE.match(text)
    if m:
        env = m.group(1) + m.group(2)
        return text[m.end(): len(text) - len(f"\\end{{{env}}}")]
    return text[2:-2]  # \[ ... \]


def is_definition_equation(span: EquationSpan) -> bool:
    """Trivial notation-introducing equations that are pointless to mask.

    Skip rule: a single-token left-hand side and at most three tokens in the
    whole equation body (e.g. ``x = y``).
    """
    tokens = _EQ_TOKEN_RE.findall(_inner_source(span))
    if "=" not in tokens:
        return False
    lhs = tokens[: tokens.index("=")]
    return len(lhs) == 1 and len(tokens) <= 3


def _paragraph_end(text: str, pos: int) -> int:
    idx = text.find("\n\n", pos)
    return idx if idx != -1 else len(text)


def make_masked_equation_items(
    doc: Document, max_items: int = DEFAULT_MAX_ITEMS
) -> list[MaskedEquationItem]:
    """Mask up to ``max_items`` eligible display equations of one document.

    The item for equation k carries the document text up to the end of that
    equation's paragraph, with equations 1..k-1 left verbatim and equation k
    replaced by the placeholder. Splicing the ground truth back into the
    context reproduces the original passage byte-exactly. Documents without
    display equations yield an empty list.
    """
    text = doc.cleaned if doc.cleaned else doc.raw
    if MASK_PLACEHOLDER in text:
        logger.warning("document %s already contains the mask placeholder; skipped", doc.id)
        return []
    spans = extract_display_equations(text)
    items: list[MaskedEquationItem] = []
    for ordinal, span in enumerate(spans):
        if len(items) >= max_items:
            break
        if is_definition_equation(span):
            continue
        context_end = _paragraph_end(text, span.end)
        context = text[: span.start] + MASK_PLACEHOLDER + text[span.end:context_end]
        items.append(
            MaskedEquationItem(
                doc_id=doc.id,
                context=context,
                ground_truth_equation=span.source,
                equation_ordinal=ordinal,
            )
        )
    return items
