"""End-to-end pipeline: ingest -> filter -> dedup -> forge -> score, plus export.

Every stage reads and writes one-record-per-line JSON files under the
configured output directory, never mutates its inputs, and is individually
re-runnable. Runs are deterministic: identical config and seed produce a
byte-identical output tree. The run report (which carries wall times) is
returned to the caller and optionally written elsewhere, so it never
perturbs the output tree itself.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path

from . import dedup as dedup_mod
from . import keyword_filter
from .clients import (
    CachingChatClient,
    ChatClient,
    EmbeddingClient,
    HttpChatClient,
    HttpEmbeddingClient,
    MockChatClient,
    StubEmbedder,
    cosine_similarity,
)
from .config import EmbeddingSettings, PipelineConfig, ProviderSettings
from .forge import (
    McqForgeError,
    build_preference_pairs,
    generate_validated_mcqs,
    item_from_record,
    make_code_infill_item_from_text,
    make_masked_equation_items,
    make_tdoc_items,
)
from .forge.code_tasks import language_for_path
from .ingest import Document, clean_corpus
from .jsonl import iter_jsonl, write_jsonl
from .scoring import (
    DegenerateBaselineError,
    grade_classification_run,
    grade_mcq_run,
    normalized_similarity_score,
    parse_option_answer,
    render_classification_table,
    render_distribution_table,
    render_mcq_table,
    score_distribution,
)

logger = logging.getLogger(__name__)

MCQ_SOURCE_WORD_LIMIT = 250


@dataclass
class StageReport:
    name: str
    input_count: int
    output_count: int
    drops: dict[str, int] = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_record(self) -> dict:
        return {
            "stage": self.name,
            "input": self.input_count,
            "output": self.output_count,
            "drops": dict(self.drops),
            "wall_time_s": self.wall_time_s,
        }


@dataclass
class RunReport:
    output_dir: str
    config_hash: str
    stages: list[StageReport] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "output_dir": self.output_dir,
            "config_hash": self.config_hash,
            "stages": [s.to_record() for s in self.stages],
        }


class PipelineStageError(RuntimeError):
    """A stage failed; carries the stage name and the partial run report."""

    def __init__(self, stage: str, cause: Exception, partial: RunReport):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.partial = partial


class PipelinePaths:
    """Canonical file layout below one output directory."""

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.cleaned = self.out_dir / "cleaned.jsonl"
        self.relevance_reports = self.out_dir / "relevance_reports.jsonl"
        self.filtered = self.out_dir / "filtered.jsonl"
        self.deduped = self.out_dir / "deduped.jsonl"
        self.dedup_report = self.out_dir / "dedup_report.jsonl"
        self.items = self.out_dir / "items.jsonl"
        self.forge_drops = self.out_dir / "forge_drops.jsonl"
        self.scores_dir = self.out_dir / "scores"


def _read_docs(path: Path, treat_as_cleaned: bool) -> list[Document]:
    docs = []
    for record in iter_jsonl(path):
        doc = Document.from_record(record)
        if treat_as_cleaned:
            doc.cleaned = doc.raw
        docs.append(doc)
    return docs


def build_chat_client(settings: ProviderSettings, config: PipelineConfig) -> ChatClient:
    if settings.kind == "mock":
        fixtures = config.resolve(settings.fixtures_dir) if settings.fixtures_dir else None
        client: ChatClient = MockChatClient(model_id=settings.model_id, fixtures_dir=fixtures)
    else:
        client = HttpChatClient(
            model_id=settings.model_id, endpoint=settings.endpoint, api_key=settings.api_key
        )
    if settings.cache_dir:
        client = CachingChatClient(
            client,
            cache_dir=config.resolve(settings.cache_dir),
            max_in_flight=settings.max_in_flight,
        )
    return client


def build_embedding_client(settings: EmbeddingSettings) -> EmbeddingClient:
    if settings.kind == "stub":
        return StubEmbedder(dimension=settings.dimension)
    return HttpEmbeddingClient(
        endpoint=settings.endpoint, api_key=settings.api_key, dimension=settings.dimension
    )


def stage_ingest(config: PipelineConfig, paths: PipelinePaths) -> StageReport:
    records = list(iter_jsonl(config.resolve(config.corpus_path)))
    docs = [Document.from_record(r) for r in records]
    cleaned, dropped_ids = clean_corpus(docs)
    write_jsonl(paths.cleaned, (d.to_record() for d in cleaned))
    return StageReport(
        name="ingest",
        input_count=len(docs),
        output_count=len(cleaned),
        drops={"excluded-kind": len(dropped_ids)},
    )


def stage_filter(config: PipelineConfig, paths: PipelinePaths) -> StageReport:
    docs = _read_docs(paths.cleaned, treat_as_cleaned=True)
    lexicon = keyword_filter.load_lexicon(
        config.resolve(config.lexicon_path),
        config.resolve(config.lexicon_exclusions) if config.lexicon_exclusions else None,
    )
    kept, reports = keyword_filter.filter_corpus(
        docs,
        lexicon,
        min_unique_keywords=config.filter.min_unique_keywords,
        min_density=config.filter.min_density,
    )
    write_jsonl(paths.filtered, (d.to_record() for d in kept))
    write_jsonl(paths.relevance_reports, (r.to_record() for r in reports))
    return StageReport(
        name="filter",
        input_count=len(docs),
        output_count=len(kept),
        drops={"below-threshold": len(docs) - len(kept)},
    )


def stage_dedup(config: PipelineConfig, paths: PipelinePaths) -> StageReport:
    docs = _read_docs(paths.filtered, treat_as_cleaned=True)
    kept, removals = dedup_mod.dedup_corpus(
        docs,
        shingle_words=config.dedup.shingle_words,
        jaccard_threshold=config.dedup.jaccard_threshold,
        num_permutations=config.dedup.num_permutations,
        seed=config.dedup.seed,
    )
    write_jsonl(paths.deduped, (d.to_record() for d in kept))
    write_jsonl(paths.dedup_report, (r.to_record() for r in removals))
    drops: dict[str, int] = {}
    for removal in removals:
        drops[removal.stage] = drops.get(removal.stage, 0) + 1
    return StageReport(
        name="dedup", input_count=len(docs), output_count=len(kept), drops=drops
    )


def _doc_seed(base_seed: int, doc_id: str) -> int:
    return zlib.crc32(f"{base_seed}:{doc_id}".encode("utf-8"))


def stage_forge(config: PipelineConfig, paths: PipelinePaths) -> StageReport:
    docs = _read_docs(paths.deduped, treat_as_cleaned=True)
    forge_cfg = config.forge
    envelopes: list[dict] = []
    drops: list[dict] = []
    counters: dict[str, int] = {}

    def add(item) -> None:
        record = item.to_record()
        family = record["kind"]
        index = counters.get(family, 0)
        counters[family] = index + 1
        envelopes.append(
            {"item_id": f"{family}-{index:05d}", "review_status": "pending", **record}
        )

    if forge_cfg.masked_equations:
        for doc in docs:
            if doc.source == "code":
                continue
            for item in make_masked_equation_items(doc, forge_cfg.max_equation_items_per_doc):
                add(item)

    if forge_cfg.code_infill:
        for doc in docs:
            if doc.source != "code":
                continue
            language = doc.meta.get("language") or language_for_path(doc.meta.get("filename", ""))
            if language is None:
                drops.append(
                    {"stage": "code-infill", "reason": "unknown language", "doc_id": doc.id}
                )
                continue
            try:
                add(
                    make_code_infill_item_from_text(
                        source_id=doc.id,
                        code_text=doc.cleaned,
                        language=language,
                        rng_seed=_doc_seed(forge_cfg.seed, doc.id),
                    )
                )
            except ValueError as exc:
                drops.append({"stage": "code-infill", "reason": str(exc), "doc_id": doc.id})

    if forge_cfg.tdoc:
        labeled = [d for d in docs if d.meta.get("working_group") or d.meta.get("wg")]
        for item in make_tdoc_items(labeled, forge_cfg.per_wg_quota, seed=forge_cfg.seed):
            add(item)

    if forge_cfg.mcq:
        generator = build_chat_client(config.generator, config)
        validator = build_chat_client(config.validator, config)
        eligible = [
            d for d in docs if d.source in forge_cfg.mcq_category_by_source
        ][: forge_cfg.mcq_max_docs]
        for doc in eligible:
            text = " ".join(doc.cleaned.split()[:MCQ_SOURCE_WORD_LIMIT])
            if not text:
                continue
            category = forge_cfg.mcq_category_by_source[doc.source]
            try:
                result = generate_validated_mcqs(text, generator, validator, category=category)
            except McqForgeError as exc:
                logger.error("MCQ forging failed for %s: %s", doc.id, exc)
                raise
            for item in result.kept:
                add(item)
            for dropped in result.dropped:
                drops.append({"stage": "mcq", "doc_id": doc.id, **dropped.to_record()})

    write_jsonl(paths.items, envelopes)
    write_jsonl(paths.forge_drops, drops)
    drop_counts: dict[str, int] = {}
    for d in drops:
        drop_counts[d["stage"]] = drop_counts.get(d["stage"], 0) + 1
    return StageReport(
        name="forge",
        input_count=len(docs),
        output_count=len(envelopes),
        drops=drop_counts,
    )


def _load_items(paths: PipelinePaths) -> list[dict]:
    return list(iter_jsonl(paths.items))


def stage_score(config: PipelineConfig, paths: PipelinePaths) -> StageReport:
    envelopes = _load_items(paths)
    paths.scores_dir.mkdir(parents=True, exist_ok=True)
    outputs = 0

    if config.scoring.mcq_responses:
        responses = {
            r["item_id"]: r["response"]
            for r in iter_jsonl(config.resolve(config.scoring.mcq_responses))
        }
        mcq_items = [
            (e["item_id"], item_from_record(e)) for e in envelopes if e["kind"] == "mcq"
        ]
        result = grade_mcq_run(mcq_items, responses)
        (paths.scores_dir / "mcq_accuracy.tsv").write_text(
            render_mcq_table(result) + "\n", encoding="utf-8"
        )
        per_item = []
        for item_id, item in mcq_items:
            response = responses.get(item_id)
            correct = 0.0
            if response is not None:
                correct = float(parse_option_answer(response, len(item.options)) == item.answer_index)
            per_item.append({"item_id": item_id, "metric": "mcq_correct", "value": correct})
        write_jsonl(paths.scores_dir / "mcq_per_item.jsonl", per_item)
        outputs += 2

    if config.scoring.tdoc_predictions:
        predictions = {
            r["item_id"]: r["label"]
            for r in iter_jsonl(config.resolve(config.scoring.tdoc_predictions))
        }
        tdoc_items = [
            (e["item_id"], item_from_record(e)) for e in envelopes if e["kind"] == "tdoc-class"
        ]
        per_wg, per_tsg = grade_classification_run(tdoc_items, predictions)
        (paths.scores_dir / "classification_accuracy.tsv").write_text(
            render_classification_table(per_tsg) + "\n", encoding="utf-8"
        )
        outputs += 1

    if config.scoring.equation_predictions:
        embedder = build_embedding_client(config.embedding)
        predictions = {
            r["item_id"]: r["prediction"]
            for r in iter_jsonl(config.resolve(config.scoring.equation_predictions))
        }
        records = []
        for envelope in envelopes:
            if envelope["kind"] != "masked-equation":
                continue
            item_id = envelope["item_id"]
            if item_id not in predictions:
                logger.warning("no equation prediction for %s; skipped", item_id)
                continue
            truth_vec = embedder.embed_text(envelope["ground_truth_equation"])
            pred_vec = embedder.embed_text(predictions[item_id])
            empty_vec = embedder.embed_text("")
            cos_tp = cosine_similarity(truth_vec, pred_vec)
            cos_te = cosine_similarity(truth_vec, empty_vec)
            try:
                value = normalized_similarity_score(cos_tp, cos_te)
            except DegenerateBaselineError:
                logger.warning("degenerate empty baseline for %s; score set to 0", item_id)
                value = 0.0
            records.append({"item_id": item_id, "metric": "normalized_similarity", "value": value})
        write_jsonl(paths.scores_dir / "equation_scores.jsonl", records)
        if records:
            dist = score_distribution([r["value"] for r in records])
            (paths.scores_dir / "equation_distribution.tsv").write_text(
                render_distribution_table(dist) + "\n", encoding="utf-8"
            )
            cdf_lines = ["score\tcumulative_fraction"]
            cdf_lines += [f"{p}\t{dist.cdf[p]:.6f}" for p in range(101)]
            (paths.scores_dir / "equation_cdf.tsv").write_text(
                "\n".join(cdf_lines) + "\n", encoding="utf-8"
            )
        outputs += 2

    return StageReport(
        name="score", input_count=len(envelopes), output_count=outputs
    )


_STAGE_FUNCTIONS = {
    "ingest": stage_ingest,
    "filter": stage_filter,
    "dedup": stage_dedup,
    "forge": stage_forge,
    "score": stage_score,
}


def config_file_hash(config: PipelineConfig, config_path: str | Path | None = None) -> str:
    if config_path is not None:
        return hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
    payload = json.dumps(
        {k: str(v) for k, v in vars(config).items()}, sort_keys=True
    ).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def run_pipeline(config: PipelineConfig, config_path: str | Path | None = None) -> RunReport:
    """Execute the configured stages in order; abort on the first failure.

    Returns the run report (stage counts, drop reasons, wall times). The
    report is not written into the output directory, keeping reruns with the
    same config and seed byte-identical there.
    """
    paths = PipelinePaths(config.resolve(config.output_dir))
    paths.out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(
        output_dir=str(paths.out_dir), config_hash=config_file_hash(config, config_path)
    )
    for stage_name in config.stages:
        stage_fn = _STAGE_FUNCTIONS[stage_name]
        start = time.perf_counter()
        try:
            stage_report = stage_fn(config, paths)
        except Exception as exc:
            logger.error("stage %s failed: %s", stage_name, exc)
            raise PipelineStageError(stage_name, exc, report) from exc
        stage_report.wall_time_s = time.perf_counter() - start
        report.stages.append(stage_report)
        logger.info(
            "stage %-6s in=%d out=%d (%.2fs)",
            stage_name,
            stage_report.input_count,
            stage_report.output_count,
            stage_report.wall_time_s,
        )
    return report


def export_dataset(
    kind: str,
    decisions: list,
    items: list[dict],
    output_path: str | Path,
    include_pending: bool = False,
    config_hash: str = "",
) -> dict:
    """Write the reviewed dataset for one item kind; returns the manifest.

    Accepted items are exported with edits applied; rejected items are
    excluded; pending items are excluded unless ``include_pending``. The
    ``open-qa`` kind derives open-ended QA records from accepted MCQs. A
    manifest (counts, config hash, forced flag) is written next to the
    dataset file.
    """
    from .forge.mcq import derive_open_qa  # local import, keeps module load light

    decision_by_item: dict[str, object] = {}
    for decision in decisions:
        decision_by_item.setdefault(decision.item_id, decision)

    source_kind = "mcq" if kind == "open-qa" else kind
    counts = {"accepted": 0, "rejected": 0, "pending": 0, "edited": 0}
    exported: list[dict] = []
    for envelope in items:
        if envelope.get("kind") != source_kind:
            continue
        item_id = envelope["item_id"]
        decision = decision_by_item.get(item_id)
        payload = {k: v for k, v in envelope.items() if k not in ("item_id", "review_status")}
        if decision is None:
            counts["pending"] += 1
            if not include_pending:
                continue
        elif decision.verdict == "reject":
            counts["rejected"] += 1
            continue
        elif decision.verdict == "edit":
            counts["accepted"] += 1
            counts["edited"] += 1
            payload = dict(decision.edited_item)
            payload.setdefault("kind", source_kind)
        else:
            counts["accepted"] += 1

        if kind == "open-qa":
            mcq = item_from_record(payload)
            record = {"item_id": item_id, **derive_open_qa(mcq).to_record()}
        else:
            record = {"item_id": item_id, **payload}
        exported.append(record)

    output_path = Path(output_path)
    if not exported:
        logger.warning("export for kind %r contains zero records", kind)
    write_jsonl(output_path, exported)
    manifest = {
        "kind": kind,
        "exported": len(exported),
        "counts": counts,
        "include_pending": include_pending,
        "config_hash": config_hash,
    }
    manifest_path = output_path.with_suffix(".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest
