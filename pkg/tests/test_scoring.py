import math
import random
from collections import Counter
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telebench.forge.items import McqItem, TdocClassItem
from telebench.scoring import (
    DegenerateBaselineError,
    grade_classification_run,
    grade_mcq_run,
    normalized_similarity_score,
    parse_option_answer,
    render_classification_table,
    render_distribution_table,
    render_mcq_table,
    rouge_1,
    rouge_l,
    score_distribution,
    tokenize,
)

# ---------------------------------------------------------------------------
# Brute-force oracles, independent of the implementations under test.
# ---------------------------------------------------------------------------


def oracle_lcs(a: tuple, b: tuple) -> int:
    @lru_cache(maxsize=None)
    def rec(i: int, j: int) -> int:
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + rec(i + 1, j + 1)
        return max(rec(i + 1, j), rec(i, j + 1))

    return rec(0, 0)


def oracle_rouge1(cand: list, ref: list) -> tuple:
    if not cand or not ref:
        return 0.0, 0.0, 0.0
    overlap = sum(min(c, Counter(ref)[w]) for w, c in Counter(cand).items())
    p, r = overlap / len(cand), overlap / len(ref)
    f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return p, r, f


def oracle_rougel(cand: list, ref: list) -> tuple:
    if not cand or not ref:
        return 0.0, 0.0, 0.0
    lcs = oracle_lcs(tuple(cand), tuple(ref))
    p, r = lcs / len(cand), lcs / len(ref)
    f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return p, r, f


# ---------------------------------------------------------------------------
# Rouge
# ---------------------------------------------------------------------------


def test_rouge1_identical_strings():
    assert rouge_1("MIMO beamforming gain", "MIMO beamforming gain").f_measure == 1.0


def test_rouge1_disjoint_strings():
    assert rouge_1("alpha beta", "gamma delta").f_measure == 0.0


def test_rouge1_hand_count():
    result = rouge_1("the cat sat", "the cat sat down")
    assert result.precision == pytest.approx(1.0, abs=1e-9)
    assert result.recall == pytest.approx(0.75, abs=1e-9)
    assert result.f_measure == pytest.approx(6 / 7, abs=1e-9)


def test_rougel_identical():
    assert rouge_l("a b c", "a b c").f_measure == 1.0


def test_rougel_hand_lcs():
    result = rouge_l("a b c d", "a c b d")
    assert result.precision == pytest.approx(0.75, abs=1e-9)
    assert result.recall == pytest.approx(0.75, abs=1e-9)
    assert result.f_measure == pytest.approx(0.75, abs=1e-9)


def test_rouge_empty_candidate():
    for fn in (rouge_1, rouge_l):
        result = fn("", "reference words")
        assert (result.precision, result.recall, result.f_measure) == (0.0, 0.0, 0.0)


def test_rouge_case_folding_and_punctuation():
    assert tokenize("OFDM, Sub-carrier!") == ["ofdm", "sub", "carrier"]
    assert rouge_1("OFDM", "ofdm.").f_measure == 1.0


_WORDS = ["mimo", "ofdm", "gain", "cell", "ue", "gnb", "harq", "sinr"]


def _random_sentence(rng: random.Random) -> str:
    return " ".join(rng.choices(_WORDS, k=rng.randint(0, 10)))


def test_rouge_against_oracle_random_pairs():
    rng = random.Random(1234)
    for _ in range(1000):
        cand, ref = _random_sentence(rng), _random_sentence(rng)
        tc, tr = tokenize(cand), tokenize(ref)
        got1 = rouge_1(cand, ref)
        exp1 = oracle_rouge1(tc, tr)
        assert (got1.precision, got1.recall, got1.f_measure) == pytest.approx(exp1, abs=1e-12)
        gotl = rouge_l(cand, ref)
        expl = oracle_rougel(tc, tr)
        assert (gotl.precision, gotl.recall, gotl.f_measure) == pytest.approx(expl, abs=1e-12)
        # symmetry and boundedness of the F-measure
        assert gotl.f_measure == pytest.approx(rouge_l(ref, cand).f_measure, abs=1e-12)
        assert got1.f_measure == pytest.approx(rouge_1(ref, cand).f_measure, abs=1e-12)
        for v in (got1.precision, got1.recall, got1.f_measure, gotl.f_measure):
            assert 0.0 <= v <= 1.0


@given(st.lists(st.sampled_from(_WORDS), min_size=1, max_size=8))
def test_rouge1_f1_iff_permutation(words):
    shuffled = list(words)
    random.Random(0).shuffle(shuffled)
    assert rouge_1(" ".join(words), " ".join(shuffled)).f_measure == pytest.approx(1.0)


@given(
    st.lists(st.sampled_from(_WORDS), min_size=1, max_size=7),
    st.lists(st.sampled_from(_WORDS), min_size=1, max_size=7),
)
def test_rouge_perfect_f_characterization(a, b):
    cand, ref = " ".join(a), " ".join(b)
    if rouge_1(cand, ref).f_measure == 1.0:
        assert sorted(a) == sorted(b)  # F=1 only for permutation-equal bags
    if rouge_l(cand, ref).f_measure == 1.0:
        assert a == b  # F=1 only for equal sequences
    if a == b:
        assert rouge_l(cand, ref).f_measure == 1.0


# ---------------------------------------------------------------------------
# Option answer parsing
# ---------------------------------------------------------------------------


def test_parse_option_answer_canonical():
    assert parse_option_answer("Answer: Option 2", 4) == 2


def test_parse_option_answer_tolerant():
    assert parse_option_answer("option 3.", 4) == 3
    assert parse_option_answer("OPTION2", 4) == 2


def test_parse_option_answer_none():
    assert parse_option_answer("I am not sure", 4) is None


def test_parse_option_answer_out_of_range_then_fallback():
    assert parse_option_answer("Option 9", 4) is None
    assert parse_option_answer("Option 9 ... but really 3", 4) == 3
    assert parse_option_answer("the answer is 2", 4) == 2


# ---------------------------------------------------------------------------
# Grading
# ---------------------------------------------------------------------------


def _mcq(category: str, answer: int = 1) -> McqItem:
    return McqItem(
        question="Which access technology uses OFDM?",
        options=["NR", "GSM", "AMPS"],
        answer_index=answer,
        explanation="NR uses OFDM waveforms.",
        category=category,
    )


def test_grade_mcq_all_correct():
    items = [("a", _mcq("lexicon")), ("b", _mcq("lexicon"))]
    result = grade_mcq_run(items, {"a": "Option 1", "b": "Option 1"})
    assert result.overall == pytest.approx(100.0)


def test_grade_mcq_quarter():
    items = [(str(i), _mcq("lexicon")) for i in range(4)]
    responses = {"0": "Option 1", "1": "Option 2", "2": "Option 3", "3": "nope"}
    result = grade_mcq_run(items, responses)
    assert result.overall == pytest.approx(25.0)


def test_grade_mcq_per_category_hand_count():
    items = [
        ("a", _mcq("lexicon")),
        ("b", _mcq("lexicon")),
        ("c", _mcq("standards-specifications")),
        ("d", _mcq("standards-specifications")),
    ]
    responses = {"a": "Option 1", "b": "Option 1", "c": "Option 2", "d": "Option 3"}
    result = grade_mcq_run(items, responses)
    assert result.per_group["lexicon"] == pytest.approx(100.0)
    assert result.per_group["standards-specifications"] == pytest.approx(0.0)
    assert result.overall == pytest.approx(50.0)


def test_grade_mcq_missing_response_incorrect():
    items = [("a", _mcq("lexicon")), ("b", _mcq("lexicon"))]
    result = grade_mcq_run(items, {"a": "Option 1"})
    assert result.overall == pytest.approx(50.0)


def test_grade_mcq_order_invariant():
    items = [("a", _mcq("lexicon")), ("b", _mcq("research-overview", answer=2))]
    responses = {"b": "Option 2", "a": "Option 1"}
    assert grade_mcq_run(items, responses).overall == pytest.approx(
        grade_mcq_run(list(reversed(items)), responses).overall
    )


def test_grade_classification_normalization_and_pooling():
    items = [
        ("a", TdocClassItem(text="scheduling request", label="RAN1")),
        ("b", TdocClassItem(text="charging data", label="SA5")),
        ("c", TdocClassItem(text="mobility management", label="CT1")),
    ]
    predictions = {"a": " ran1 ", "b": "SA5", "c": "SA9"}
    per_wg, per_tsg = grade_classification_run(items, predictions)
    assert per_wg.per_group["RAN1"] == pytest.approx(100.0)
    assert per_tsg.per_group["RAN"] == pytest.approx(100.0)
    assert per_tsg.per_group["CT"] == pytest.approx(0.0)
    assert per_tsg.overall == pytest.approx(100 * 2 / 3)


def test_grade_classification_all_correct():
    items = [(f"i{i}", TdocClassItem(text="t", label=wg)) for i, wg in enumerate(["RAN1", "SA2", "CT3"])]
    predictions = {"i0": "RAN1", "i1": "SA2", "i2": "CT3"}
    per_wg, per_tsg = grade_classification_run(items, predictions)
    assert per_wg.overall == pytest.approx(100.0)
    assert all(v == pytest.approx(100.0) for v in per_tsg.per_group.values())


# ---------------------------------------------------------------------------
# Normalized similarity score
# ---------------------------------------------------------------------------


def test_similarity_score_perfect_prediction():
    assert normalized_similarity_score(1.0, 0.7) == pytest.approx(100.0)


def test_similarity_score_empty_baseline():
    assert normalized_similarity_score(0.7, 0.7) == pytest.approx(0.0)


def test_similarity_score_halfway():
    assert normalized_similarity_score(0.85, 0.7) == pytest.approx(50.0)


def test_similarity_score_clamps_below_baseline():
    assert normalized_similarity_score(0.2, 0.7) == 0.0


def test_similarity_score_degenerate_baseline():
    with pytest.raises(DegenerateBaselineError):
        normalized_similarity_score(0.9, 1.0)


def test_similarity_score_input_range():
    with pytest.raises(ValueError):
        normalized_similarity_score(1.5, 0.0)


@settings(max_examples=200)
@given(
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=-1.0, max_value=0.999),
)
def test_similarity_score_monotone_and_bounded(c1, c2, baseline):
    s1 = normalized_similarity_score(c1, baseline)
    s2 = normalized_similarity_score(c2, baseline)
    assert 0.0 <= s1 <= 100.0
    if c1 <= c2:
        assert s1 <= s2 + 1e-12


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


def test_score_distribution_hand_case():
    dist = score_distribution([95, 92, 55, 10])
    assert dist.portion_ge[90.0] == pytest.approx(0.50)
    assert dist.portion_ge[50.0] == pytest.approx(0.75)
    assert dist.mean == pytest.approx(63.0)


def test_score_distribution_unit_step_cdf():
    dist = score_distribution([100.0, 100.0, 100.0])
    assert dist.cdf[99] == 0.0
    assert dist.cdf[100] == 1.0


def test_score_distribution_empty_errors():
    with pytest.raises(ValueError):
        score_distribution([])


@given(st.lists(st.floats(min_value=0, max_value=100), min_size=1, max_size=40))
def test_score_distribution_recomputable(values):
    dist = score_distribution(values)
    n = len(values)
    assert dist.mean == pytest.approx(sum(values) / n)
    assert dist.portion_ge[90.0] == sum(1 for v in values if v >= 90) / n
    assert dist.portion_ge[50.0] == sum(1 for v in values if v >= 50) / n
    # portions non-increasing in threshold
    assert dist.portion_ge[90.0] <= dist.portion_ge[50.0]
    # cdf is a non-decreasing step function ending at 1
    assert dist.cdf == sorted(dist.cdf)
    assert dist.cdf[100] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------


def test_distribution_table_layout():
    table = render_distribution_table(score_distribution([95, 92, 55, 10]))
    header, row = table.splitlines()
    assert header.split("\t") == ["Average Score", "≥ 90%", "≥ 50%"]
    assert row.split("\t") == ["63.00", "50.00", "75.00"]


def test_mcq_table_layout():
    items = [("a", _mcq("lexicon")), ("b", _mcq("standards-specifications"))]
    result = grade_mcq_run(items, {"a": "Option 1", "b": "Option 2"})
    table = render_mcq_table(result)
    header, row = table.splitlines()
    assert header.split("\t") == [
        "Lexicon",
        "Research Overview",
        "Research Publications",
        "Standards Overview",
        "Standards Specifications",
        "Overall",
    ]
    assert row.split("\t") == ["100.00", "-", "-", "-", "0.00", "50.00"]


def test_classification_table_layout():
    items = [("a", TdocClassItem(text="t", label="RAN2"))]
    _, per_tsg = grade_classification_run(items, {"a": "RAN2"})
    header, row = render_classification_table(per_tsg).splitlines()
    assert header.split("\t") == ["RAN", "SA", "CT", "Overall"]
    assert row.split("\t") == ["100.00", "-", "-", "100.00"]
