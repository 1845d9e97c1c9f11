"""Keyword-based telecom relevance filtering.

A lexicon of telecom terms (with optional abbreviations and selection-criteria
flags) is matched against cleaned documents. Relevance is summarised by the
number of distinct matched terms M and the density M / ln(N + 1) for an
N-word text; both must clear configurable thresholds for a document to pass.

Full terms match case-insensitively on word boundaries; abbreviations match
case-sensitively (to dodge polysemous expansions such as DL), and noisy
abbreviations can be disabled wholesale through an exclusion list.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import Document

CRITERIA_FLAGS = frozenset(
    {
        "domain-specificity",
        "frequency",
        "distinctiveness",
        "authority",
        "timeliness",
        "clarity",
    }
)

DEFAULT_MIN_UNIQUE_KEYWORDS = 2
DEFAULT_MIN_DENSITY = 0.3


class LexiconError(ValueError):
    """Raised for unreadable, empty or malformed lexicon files."""


def _boundary_pattern(term: str, case_sensitive: bool) -> re.Pattern:
    escaped = re.escape(" ".join(term.split()))
    flags = 0 if case_sensitive else re.IGNORECASE
    return re.compile(rf"(?<![0-9A-Za-z]){escaped}(?![0-9A-Za-z])", flags)


@dataclass(frozen=True)
class LexiconEntry:
    term: str
    abbreviations: tuple[str, ...] = ()
    criteria_flags: frozenset[str] = frozenset()


@dataclass
class KeywordLexicon:
    """Telecom keyword list plus the set of abbreviations disabled as noisy."""

    entries: list[LexiconEntry]
    excluded_abbreviations: frozenset[str] = frozenset()
    _patterns: list[tuple[str, list[re.Pattern]]] = field(
        default_factory=list, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entry in self.entries:
            if not entry.term:
                raise LexiconError("lexicon entries must have a non-empty term")
            folded = entry.term.casefold()
            if folded in seen:
                raise LexiconError(f"duplicate lexicon term {entry.term!r}")
            seen.add(folded)
        self._patterns = []
        for entry in self.entries:
            pats = [_boundary_pattern(entry.term, case_sensitive=False)]
            for abbr in self.active_abbreviations(entry):
                pats.append(_boundary_pattern(abbr, case_sensitive=True))
            self._patterns.append((entry.term, pats))

    def active_abbreviations(self, entry: LexiconEntry) -> tuple[str, ...]:
        return tuple(a for a in entry.abbreviations if a not in self.excluded_abbreviations)

    def matched_terms(self, text: str) -> set[str]:
        """Canonical terms of all entries found in ``text`` (each at most once)."""
        normalized = " ".join(text.split())
        if not normalized:
            return set()
        return {
            term
            for term, pats in self._patterns
            if any(p.search(normalized) for p in pats)
        }

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class RelevanceReport:
    """Per-document keyword match statistics."""

    doc_id: str
    unique_keywords_M: int
    total_words_N: int
    density: float
    matched_terms: set[str]

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "unique_keywords": self.unique_keywords_M,
            "total_words": self.total_words_N,
            "density": self.density,
            "matched_terms": sorted(self.matched_terms),
        }


def keyword_density(unique_matches: int, total_words: int) -> float:
    """M / ln(N + 1) for M distinct keyword matches in an N-word text.

    The log of the word count compensates long documents; zero matches or an
    empty text give density 0 exactly.
    """
    if unique_matches < 0 or total_words < 0:
        raise ValueError("counts must be non-negative")
    if unique_matches == 0 or total_words == 0:
        return 0.0
    return unique_matches / math.log(total_words + 1)


def load_lexicon(path: str | Path, exclusions_path: str | Path | None = None) -> KeywordLexicon:
    """Parse a lexicon file (and optional companion exclusion list).

    Format: one entry per line, tab-separated fields term / comma-separated
    abbreviations / comma-separated criteria flags; the last two optional.
    Lines starting with "#" are comments. Duplicate terms merge (union of
    abbreviations and flags). An unreadable or empty file is a hard error.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LexiconError(f"cannot read lexicon file {path}: {exc}") from exc

    merged: dict[str, dict] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        term = parts[0].strip()
        if not term:
            raise LexiconError(f"{path}:{lineno}: empty term")
        abbrs = []
        if len(parts) > 1:
            abbrs = [a.strip() for a in parts[1].split(",") if a.strip()]
        flags = set()
        if len(parts) > 2:
            flags = {f.strip().lower() for f in parts[2].split(",") if f.strip()}
            unknown = flags - CRITERIA_FLAGS
            if unknown:
                raise LexiconError(
                    f"{path}:{lineno}: unknown criteria flags {sorted(unknown)}"
                )
        key = term.casefold()
        slot = merged.setdefault(key, {"term": term, "abbrs": [], "flags": set()})
        for a in abbrs:
            if a not in slot["abbrs"]:
                slot["abbrs"].append(a)
        slot["flags"] |= flags

    if not merged:
        raise LexiconError(f"lexicon file {path} contains no entries")

    excluded: frozenset[str] = frozenset()
    if exclusions_path is not None:
        try:
            lines = Path(exclusions_path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise LexiconError(f"cannot read exclusion file {exclusions_path}: {exc}") from exc
        excluded = frozenset(l.strip() for l in lines if l.strip() and not l.startswith("#"))

    entries = [
        LexiconEntry(
            term=slot["term"],
            abbreviations=tuple(slot["abbrs"]),
            criteria_flags=frozenset(slot["flags"]),
        )
        for slot in merged.values()
    ]
    return KeywordLexicon(entries=entries, excluded_abbreviations=excluded)


def analyze_relevance(doc: Document, lex: KeywordLexicon) -> RelevanceReport:
    """Match the lexicon against ``doc.cleaned`` and compute M, N and density."""
    text = doc.cleaned
    matched = lex.matched_terms(text)
    total_words = len(text.split())
    return RelevanceReport(
        doc_id=doc.id,
        unique_keywords_M=len(matched),
        total_words_N=total_words,
        density=keyword_density(len(matched), total_words),
        matched_terms=matched,
    )


def filter_corpus(
    docs: Iterable[Document],
    lex: KeywordLexicon,
    min_unique_keywords: int = DEFAULT_MIN_UNIQUE_KEYWORDS,
    min_density: float = DEFAULT_MIN_DENSITY,
) -> tuple[list[Document], list[RelevanceReport]]:
    """Keep documents with M >= min_unique_keywords and density >= min_density.

    Both boundaries are inclusive. Reports are returned for every input
    document, kept or not, in input order.
    """
    if min_unique_keywords < 0 or min_density < 0:
        raise ValueError("thresholds must be non-negative")
    kept: list[Document] = []
    reports: list[RelevanceReport] = []
    for doc in docs:
        report = analyze_relevance(doc, lex)
        reports.append(report)
        if report.unique_keywords_M >= min_unique_keywords and report.density >= min_density:
            kept.append(doc)
    return kept, reports
