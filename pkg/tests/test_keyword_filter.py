import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telebench.ingest import Document
from telebench.keyword_filter import (
    KeywordLexicon,
    LexiconEntry,
    LexiconError,
    analyze_relevance,
    filter_corpus,
    keyword_density,
    load_lexicon,
)


@pytest.fixture
def lexicon_file(tmp_path):
    path = tmp_path / "lexicon.tsv"
    path.write_text(
        "# telecom keyword list\n"
        "MIMO\n"
        "mimo\t\tdomain-specificity\n"
        "Downlink\tDL\tfrequency,domain-specificity\n"
        "5G\n"
        "beamforming\n"
        "spectrum allocation\n"
        "New Radio\tNR\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def exclusions_file(tmp_path):
    path = tmp_path / "excluded.txt"
    path.write_text("DL\nSAP\n", encoding="utf-8")
    return path


def _doc(text: str, doc_id: str = "d1") -> Document:
    return Document(id=doc_id, source="wiki", raw=text, cleaned=text)


# ---------------------------------------------------------------------------
# density formula
# ---------------------------------------------------------------------------


def test_density_paper_narrative_inputs():
    assert keyword_density(30, 1000) == pytest.approx(30 / math.log(1001), abs=1e-12)


def test_density_zero_iff_no_matches():
    assert keyword_density(0, 500) == 0.0
    assert keyword_density(0, 0) == 0.0
    assert keyword_density(1, 100) > 0.0


def test_density_monotonicity_random_pairs():
    rng = random.Random(99)
    for _ in range(1000):
        m = rng.randint(1, 500)
        n = rng.randint(1, 100_000)
        assert keyword_density(m + 1, n) > keyword_density(m, n)
        assert keyword_density(m, n + 1) < keyword_density(m, n)


def test_density_rejects_negative():
    with pytest.raises(ValueError):
        keyword_density(-1, 10)


# ---------------------------------------------------------------------------
# lexicon loading
# ---------------------------------------------------------------------------


def test_load_lexicon_merges_duplicates(lexicon_file):
    lex = load_lexicon(lexicon_file)
    terms = [e.term.casefold() for e in lex.entries]
    assert terms.count("mimo") == 1
    mimo = next(e for e in lex.entries if e.term.casefold() == "mimo")
    assert "domain-specificity" in mimo.criteria_flags


def test_load_lexicon_exclusion_deactivates_abbreviation(lexicon_file, exclusions_file):
    lex = load_lexicon(lexicon_file, exclusions_file)
    downlink = next(e for e in lex.entries if e.term == "Downlink")
    assert downlink.abbreviations == ("DL",)  # declared but inactive
    assert lex.active_abbreviations(downlink) == ()
    report = analyze_relevance(_doc("The DL scheduler assigns resources."), lex)
    assert "Downlink" not in report.matched_terms


def test_load_lexicon_empty_file_errors(tmp_path):
    empty = tmp_path / "empty.tsv"
    empty.write_text("# only a comment\n", encoding="utf-8")
    with pytest.raises(LexiconError):
        load_lexicon(empty)


def test_load_lexicon_missing_file_errors(tmp_path):
    with pytest.raises(LexiconError):
        load_lexicon(tmp_path / "absent.tsv")


def test_load_lexicon_unknown_flag_errors(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("MIMO\t\tnot-a-flag\n", encoding="utf-8")
    with pytest.raises(LexiconError):
        load_lexicon(path)


def test_lexicon_rejects_empty_term():
    with pytest.raises(LexiconError):
        KeywordLexicon(entries=[LexiconEntry(term="")])


# ---------------------------------------------------------------------------
# relevance analysis
# ---------------------------------------------------------------------------


def test_analysis_counts_each_term_once(lexicon_file):
    lex = load_lexicon(lexicon_file)
    report = analyze_relevance(_doc("5G here, 5G there, 5G everywhere"), lex)
    assert report.unique_keywords_M == 1
    assert report.matched_terms == {"5G"}


def test_analysis_density_formula(lexicon_file):
    lex = load_lexicon(lexicon_file)
    text = "MIMO beamforming " + "word " * 98  # 100 words, 2 matches
    report = analyze_relevance(_doc(text.strip()), lex)
    assert report.total_words_N == 100
    assert report.unique_keywords_M == 2
    assert report.density == pytest.approx(2 / math.log(101))


def test_analysis_no_matches(lexicon_file):
    lex = load_lexicon(lexicon_file)
    report = analyze_relevance(_doc("completely unrelated prose"), lex)
    assert report.unique_keywords_M == 0
    assert report.density == 0.0


def test_analysis_terms_case_insensitive(lexicon_file):
    lex = load_lexicon(lexicon_file)
    report = analyze_relevance(_doc("BEAMFORMING improves coverage"), lex)
    assert "beamforming" in report.matched_terms


def test_analysis_abbreviations_case_sensitive(lexicon_file):
    lex = load_lexicon(lexicon_file)
    assert "New Radio" in analyze_relevance(_doc("The NR waveform"), lex).matched_terms
    assert "New Radio" not in analyze_relevance(_doc("the nr waveform"), lex).matched_terms


def test_analysis_word_boundaries(lexicon_file):
    lex = load_lexicon(lexicon_file)
    assert analyze_relevance(_doc("HEMIMOTOR is not a match"), lex).unique_keywords_M == 0
    assert analyze_relevance(_doc("5G-NR deployment"), lex).unique_keywords_M >= 1


def test_analysis_multiword_contiguous(lexicon_file):
    lex = load_lexicon(lexicon_file)
    assert "spectrum allocation" in analyze_relevance(
        _doc("Dynamic spectrum\n   allocation policies"), lex
    ).matched_terms
    assert "spectrum allocation" not in analyze_relevance(
        _doc("spectrum of the allocation"), lex
    ).matched_terms


def test_analysis_duplication_invariance(lexicon_file):
    lex = load_lexicon(lexicon_file)
    base = "MIMO and beamforming systems."
    r1 = analyze_relevance(_doc(base), lex)
    r2 = analyze_relevance(_doc(base + " " + base), lex)
    assert r1.unique_keywords_M == r2.unique_keywords_M
    assert r1.density != r2.density  # N doubled


# ---------------------------------------------------------------------------
# corpus filtering
# ---------------------------------------------------------------------------


def test_filter_drops_zero_match_doc(lexicon_file):
    lex = load_lexicon(lexicon_file)
    kept, reports = filter_corpus([_doc("nothing relevant at all")], lex, 1, 0.1)
    assert kept == []
    assert len(reports) == 1


def test_filter_inclusive_boundaries(lexicon_file):
    lex = load_lexicon(lexicon_file)
    text = "MIMO beamforming " + "word " * 98
    doc = _doc(text.strip())
    report = analyze_relevance(doc, lex)
    kept, _ = filter_corpus([doc], lex, report.unique_keywords_M, report.density)
    assert kept == [doc]


def test_filter_zero_thresholds_keep_all(lexicon_file):
    lex = load_lexicon(lexicon_file)
    docs = [_doc("x", "a"), _doc("MIMO", "b")]
    kept, reports = filter_corpus(docs, lex, 0, 0.0)
    assert kept == docs
    assert [r.doc_id for r in reports] == ["a", "b"]


def test_filter_output_subset_and_deterministic(lexicon_file):
    lex = load_lexicon(lexicon_file)
    docs = [
        _doc("MIMO beamforming 5G dense text", "a"),
        _doc("nothing here", "b"),
        _doc("5G spectrum allocation roll-out", "c"),
    ]
    kept1, _ = filter_corpus(docs, lex, 2, 0.1)
    kept2, _ = filter_corpus(docs, lex, 2, 0.1)
    assert kept1 == kept2
    assert set(d.id for d in kept1) <= {d.id for d in docs}


def test_filter_negative_thresholds_rejected(lexicon_file):
    lex = load_lexicon(lexicon_file)
    with pytest.raises(ValueError):
        filter_corpus([], lex, -1, 0.0)


@settings(max_examples=200)
@given(
    st.integers(min_value=1, max_value=300),
    st.integers(min_value=1, max_value=300),
    st.integers(min_value=1, max_value=10_000),
)
def test_density_strictly_increasing_in_m(m1, m2, n):
    if m1 != m2:
        low, high = sorted((m1, m2))
        assert keyword_density(low, n) < keyword_density(high, n)
