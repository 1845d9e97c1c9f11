"""Document cleaning for raw telecom corpora.

Pipeline per document: strip markup (tables dropped wholesale), remove URLs,
strip boilerplate lines and truncate at the references heading. Change
requests, drafts and templates are excluded at the document level. Cleaned
text is segmented into word-count-targeted chunks on sentence boundaries.

All functions are pure; documents can be processed in parallel.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

DOCUMENT_SOURCES = frozenset(
    {
        "standard-3gpp",
        "standard-ieee",
        "paper",
        "book",
        "patent",
        "stackexchange",
        "wiki",
        "code",
    }
)

# Block-level tags become line breaks so words on either side never merge.
_BLOCK_TAGS = frozenset(
    {
        "p", "div", "br", "li", "ul", "ol", "tr", "td", "th", "table",
        "h1", "h2", "h3", "h4", "h5", "h6", "section", "article", "header",
        "footer", "blockquote", "pre", "hr",
    }
)

# Leftover "<" runs directly before a letter (incomplete tags the parser
# emitted as data). Removing the full run keeps the cleanup idempotent.
_LEFTOVER_TAG_RE = re.compile(r"<+(?=[A-Za-z])")
_BLANK_RUN_RE = re.compile(r"\n{3,}")
_TRAILING_WS_RE = re.compile(r"[ \t]+\n")

# A URL is a whitespace-delimited token starting with http:// or https://.
_URL_RE = re.compile(r"\s*(?<!\S)https?://\S+\s*")

DEFAULT_BOILERPLATE_PATTERNS = (
    r"page\s+\d+(\s+of\s+\d+)?\s*$",
    r"(figure|fig\.?|table)\s+\d+\s*[.:)-]",
    r"\d+\s*/\s*\d+\s*$",
)

_REFERENCE_HEADINGS = frozenset({"references", "bibliography"})

_DISCARD_KIND_MARKERS = frozenset({"cr", "change-request", "changerequest", "draft", "template"})


@dataclass
class Document:
    """One source text with provenance and its cleaned form."""

    id: str
    source: str
    raw: str
    cleaned: str = ""
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")
        if self.source not in DOCUMENT_SOURCES:
            raise ValueError(f"unknown document source {self.source!r}")

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "text": self.cleaned if self.cleaned else self.raw,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Document":
        return cls(
            id=record["id"],
            source=record["source"],
            raw=record["text"],
            meta=dict(record.get("meta", {})),
        )


@dataclass
class Segment:
    """One contiguous chunk of a cleaned document."""

    doc_id: str
    index: int
    text: str
    word_count: int

    def __post_init__(self) -> None:
        if self.word_count != len(self.text.split()):
            raise ValueError("word_count must equal the whitespace-token count")
        if self.word_count <= 0:
            raise ValueError("segments must contain at least one word")


class _MarkupStripper(HTMLParser):
    """Drops tags, drops table content wholesale, keeps text verbatim."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=False)
        self.parts: list[str] = []
        self._table_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag == "table":
            self._table_depth += 1
        elif self._table_depth == 0 and tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_startendtag(self, tag, attrs):
        if self._table_depth == 0 and tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag == "table":
            self._table_depth = max(0, self._table_depth - 1)
            if self._table_depth == 0:
                self.parts.append("\n")
        elif self._table_depth == 0 and tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data):
        if self._table_depth == 0:
            self.parts.append(data)


_AMP_SENTINEL = "\x00"


def strip_markup(raw: str) -> str:
    """Return the text content without tags; table blocks are removed entirely.

    Malformed markup is handled leniently: unmatched or truncated tags are
    stripped rather than raising. Entity references pass through verbatim:
    ampersands are shielded from the parser (its lenient recovery would
    swallow incomplete references), which requires dropping NUL control
    characters from the input first.
    """
    parser = _MarkupStripper()
    parser.feed(raw.replace(_AMP_SENTINEL, "").replace("&", _AMP_SENTINEL))
    parser.close()
    out = "".join(parser.parts).replace(_AMP_SENTINEL, "&")
    out = _LEFTOVER_TAG_RE.sub("", out)
    out = _TRAILING_WS_RE.sub("\n", out)
    out = _BLANK_RUN_RE.sub("\n\n", out)
    return out.strip()


def remove_urls(text: str) -> str:
    """Remove whitespace-delimited tokens starting with http:// or https://.

    Whitespace around each removed token collapses to a single space and the
    result is end-trimmed; text without URLs is returned unchanged.
    """
    if not _URL_RE.search(text):
        return text
    return _URL_RE.sub(" ", text).strip()


def strip_boilerplate(
    text: str, patterns: Sequence[str] = DEFAULT_BOILERPLATE_PATTERNS
) -> str:
    """Drop header/footer/caption lines and truncate at the references heading.

    A line whose trimmed, case-folded content matches one of ``patterns`` is
    removed. The first line equal to "references" or "bibliography"
    (case-insensitive, trimmed) ends the document; it and everything after
    are discarded.
    """
    compiled = [re.compile(p, re.IGNORECASE) for p in patterns]
    lines = text.splitlines()
    kept: list[str] = []
    changed = False
    for line in lines:
        stripped = line.strip()
        if stripped.lower() in _REFERENCE_HEADINGS:
            changed = True
            break
        if any(p.match(stripped) for p in compiled):
            changed = True
            continue
        kept.append(line)
    if not changed:
        return text
    return "\n".join(kept).strip("\n")


def should_keep_document(meta: dict[str, str]) -> bool:
    """False for change requests, drafts and templates; True otherwise.

    Missing metadata keeps the document (conservative default, logged).
    """
    kind = meta.get("kind", "").strip().lower().replace("_", "-")
    filename = meta.get("filename", "")
    if not kind and not filename:
        logger.info("document without kind/filename metadata kept by default")
        return True
    if kind and kind in _DISCARD_KIND_MARKERS:
        return False
    for token in re.split(r"[^0-9A-Za-z]+", filename.lower()):
        if token in _DISCARD_KIND_MARKERS:
            return False
    return True


_SENTENCE_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+(?=[A-Z])")


def split_sentences(text: str) -> list[str]:
    """Cheap sentence split: ./?/! followed by whitespace and an uppercase letter."""
    stripped = text.strip()
    if not stripped:
        return []
    return [s for s in _SENTENCE_BOUNDARY_RE.split(stripped) if s.strip()]


def segment_text(
    text: str, target_word_counts: Sequence[int], doc_id: str = ""
) -> list[Segment]:
    """Pack sentences into segments near a cyclically chosen word-count target.

    Segment k aims for ``target_word_counts[k % len(targets)]`` words: a
    sentence is added while it brings the count closer to the target and the
    result stays within 1.5x the target (a single sentence longer than that
    still forms its own segment). Coverage is total: every input word lands
    in exactly one segment, in order.
    """
    if not target_word_counts:
        raise ValueError("target_word_counts must be non-empty")
    if any(t <= 0 for t in target_word_counts):
        raise ValueError("targets must be positive")
    sentences = split_sentences(text)
    if not sentences:
        return []

    counts = [len(s.split()) for s in sentences]
    segments: list[Segment] = []
    i = 0
    while i < len(sentences):
        target = target_word_counts[len(segments) % len(target_word_counts)]
        cap = 1.5 * target
        chunk = [sentences[i]]
        words = counts[i]
        i += 1
        while (
            i < len(sentences)
            and words < target
            and words + counts[i] <= cap
            and abs(words + counts[i] - target) <= target - words
        ):
            chunk.append(sentences[i])
            words += counts[i]
            i += 1
        seg_text = " ".join(" ".join(chunk).split())
        segments.append(
            Segment(doc_id=doc_id, index=len(segments), text=seg_text, word_count=words)
        )
    return segments


def clean_text(raw: str, boilerplate_patterns: Sequence[str] = DEFAULT_BOILERPLATE_PATTERNS) -> str:
    """Full cleaning chain: markup -> URLs -> boilerplate/references."""
    return strip_boilerplate(remove_urls(strip_markup(raw)), boilerplate_patterns)


def clean_document(
    doc: Document, boilerplate_patterns: Sequence[str] = DEFAULT_BOILERPLATE_PATTERNS
) -> Document:
    """Return a copy of ``doc`` with ``cleaned`` filled in; ``raw`` is untouched.

    Code sources keep their structure: only URL removal applies, since tag
    stripping would eat include directives and comparison operators, and
    line-level boilerplate rules are meaningless inside source files.
    """
    if doc.source == "code":
        cleaned = remove_urls(doc.raw)
    else:
        cleaned = clean_text(doc.raw, boilerplate_patterns)
    return Document(
        id=doc.id,
        source=doc.source,
        raw=doc.raw,
        cleaned=cleaned,
        meta=dict(doc.meta),
    )


def clean_corpus(
    docs: Iterable[Document],
    boilerplate_patterns: Sequence[str] = DEFAULT_BOILERPLATE_PATTERNS,
) -> tuple[list[Document], list[str]]:
    """Clean every keepable document; returns (cleaned docs, dropped ids)."""
    kept: list[Document] = []
    dropped: list[str] = []
    for doc in docs:
        if not should_keep_document(doc.meta):
            dropped.append(doc.id)
            continue
        kept.append(clean_document(doc, boilerplate_patterns))
    return kept, dropped
