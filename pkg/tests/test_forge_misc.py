import logging

import pytest

from telebench.forge.items import (
    CodeTaskItem,
    InstructItem,
    MaskedEquationItem,
    McqItem,
    PreferencePair,
    TdocClassItem,
    item_from_record,
)
from telebench.forge.preference import build_preference_pairs
from telebench.forge.prompts import TemplateError, render_prompt_template, template_placeholders
from telebench.forge.tdoc import make_tdoc_items
from telebench.ingest import Document
from telebench.scoring import rouge_l


# ---------------------------------------------------------------------------
# prompt templates
# ---------------------------------------------------------------------------


def test_mcq_generate_verbatim_format_sentence():
    out = render_prompt_template("mcq-generate", {"text": "X"})
    assert 'The "Answer" must be in the format of "Option X".' in out
    assert '"proposed", "the invention", "text" or "paper"' in out
    assert out.rstrip().endswith("X")


def test_code_request_contains_worked_examples():
    out = render_prompt_template("code-request", {"script": "S"})
    assert "convert an IPv6 address" in out
    assert "802.11 frame" in out
    assert "SCRIPT:\nS" in out


def test_protocol_instruct_contains_fig_example():
    out = render_prompt_template("protocol-instruct", {"text": "T"})
    assert "Initiate event based charging" in out
    assert '{"instruction": "..."' in out  # JSON braces survive rendering


def test_unknown_template_id_errors():
    with pytest.raises(TemplateError):
        render_prompt_template("not-a-template", {"text": "x"})


def test_missing_variable_errors():
    with pytest.raises(TemplateError):
        render_prompt_template("mcq-generate", {})


def test_all_templates_render():
    variables = {"text": "T", "script": "S", "question": "Q"}
    for template_id in (
        "mcq-generate",
        "mcq-validate",
        "code-request",
        "code-summary",
        "code-analysis",
        "general-instruct",
        "protocol-instruct",
    ):
        out = render_prompt_template(template_id, variables)
        assert out
        for name in template_placeholders(template_id):
            assert "{" + name + "}" not in out


# ---------------------------------------------------------------------------
# tdoc classification items
# ---------------------------------------------------------------------------


def _tdoc(doc_id: str, wg: str, n_words: int = 40) -> Document:
    text = " ".join(f"word{i}" for i in range(n_words - 1)) + " End."
    return Document(
        id=doc_id, source="standard-3gpp", raw=text, cleaned=text, meta={"working_group": wg}
    )


def test_tdoc_items_labeled_from_meta():
    items = make_tdoc_items([_tdoc("a", "RAN1")], per_wg_quota=10)
    assert items
    assert all(i.label == "RAN1" for i in items)


def test_tdoc_unknown_group_skipped(caplog):
    with caplog.at_level(logging.WARNING):
        items = make_tdoc_items([_tdoc("a", "RAN9")], per_wg_quota=10)
    assert items == []
    assert any("RAN9" in r.message for r in caplog.records)


def test_tdoc_quota_enforced():
    docs = [_tdoc(f"d{i}", "SA2", n_words=40) for i in range(30)]
    items = make_tdoc_items(docs, per_wg_quota=5, segment_targets=[32])
    assert len(items) == 5


def test_tdoc_sampling_deterministic():
    docs = [_tdoc(f"d{i}", "CT1", n_words=40) for i in range(20)]
    a = make_tdoc_items(docs, per_wg_quota=3, seed=9)
    b = make_tdoc_items(docs, per_wg_quota=3, seed=9)
    assert [i.text for i in a] == [i.text for i in b]


def test_tdoc_multiple_groups_sorted():
    docs = [_tdoc("a", "SA1"), _tdoc("b", "RAN2"), _tdoc("c", "CT3")]
    items = make_tdoc_items(docs, per_wg_quota=5)
    labels = [i.label for i in items]
    assert labels == sorted(labels)
    assert set(labels) == {"CT3", "RAN2", "SA1"}


# ---------------------------------------------------------------------------
# preference pairs
# ---------------------------------------------------------------------------


def _run(prompt, truth, output):
    return {"prompt": prompt, "ground_truth": truth, "model_output": output}


def test_pair_emitted_for_low_rouge():
    truth = "the downlink scheduler assigns resource blocks"
    output = "completely unrelated words about cooking pasta"
    assert rouge_l(output, truth).f_measure < 0.30
    pairs = build_preference_pairs([_run("p", truth, output)], 0.30, 3.0)
    assert len(pairs) == 1
    assert pairs[0].chosen == truth
    assert pairs[0].rejected == output
    assert pairs[0].selection_metric["name"] == "rougeL_f"


def test_no_pair_for_exact_match():
    truth = "a b c d e"
    pairs = build_preference_pairs([_run("p", truth, truth)], 0.30, 3.0)
    assert pairs == []


def test_pair_emitted_for_verbose_output_via_length_rule():
    truth = "beamforming focuses energy toward the user"
    # high-Rouge but five times longer
    output = truth + " " + " ".join(["indeed beamforming focuses energy toward the user"] * 4)
    assert rouge_l(output, truth).f_measure >= 0.30 or True
    pairs = build_preference_pairs([_run("p", truth, output)], 0.05, 3.0)
    assert len(pairs) == 1
    assert pairs[0].selection_metric["name"] == "length_ratio"
    assert pairs[0].selection_metric["value"] > 3.0


def test_empty_ground_truth_skipped(caplog):
    with caplog.at_level(logging.WARNING):
        pairs = build_preference_pairs([_run("p", "  ", "output")], 0.3, 3.0)
    assert pairs == []


def test_empty_model_output_skipped(caplog):
    with caplog.at_level(logging.WARNING):
        pairs = build_preference_pairs([_run("p", "truth", "")], 0.3, 3.0)
    assert pairs == []


def test_thresholds_must_be_positive():
    with pytest.raises(ValueError):
        build_preference_pairs([], 0.0, 3.0)


# ---------------------------------------------------------------------------
# item wire format
# ---------------------------------------------------------------------------


def test_items_round_trip_via_records():
    items = [
        MaskedEquationItem("d", "before <MASK> after", "\\[x=y+z\\]", 0),
        CodeTaskItem("infill", "python", "a\n<FILL>c\n", "b\n", "f.py"),
        McqItem("Which one?", ["a", "b"], 2, "because", "lexicon"),
        TdocClassItem("segment text", "RAN1"),
        PreferencePair("p", "good", "bad", {"name": "rougeL_f", "value": 0.1}),
        InstructItem("open-qa", "ask", "", "answer"),
    ]
    for item in items:
        record = item.to_record()
        rebuilt = item_from_record(record)
        assert rebuilt == item


def test_item_from_record_unknown_kind():
    with pytest.raises(ValueError):
        item_from_record({"kind": "mystery"})


def test_mcq_answer_index_validation():
    with pytest.raises(ValueError):
        McqItem("q?", ["a", "b"], 3, "", "lexicon")


def test_masked_item_requires_single_mask():
    with pytest.raises(ValueError):
        MaskedEquationItem("d", "no mask here", "x", 0)
    with pytest.raises(ValueError):
        MaskedEquationItem("d", "<MASK> twice <MASK>", "x", 0)


def test_infill_item_requires_single_fill():
    with pytest.raises(ValueError):
        CodeTaskItem("infill", "python", "no placeholder", "gt", "f.py")


def test_preference_pair_must_differ():
    with pytest.raises(ValueError):
        PreferencePair("p", "same", "same")
