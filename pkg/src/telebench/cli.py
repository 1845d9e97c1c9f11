"""Command-line entry points for the pipeline, scoring and review service."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .config import load_config
from .jsonl import iter_jsonl
from .objectives import DpoInputs, TokenLogProbs, clm_loss, dpo_loss_and_margin, sft_loss
from .pipeline import (
    PipelinePaths,
    config_file_hash,
    export_dataset,
    run_pipeline,
)
from .review import load_journal, serve_review_api

logger = logging.getLogger(__name__)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """Telecom corpus curation and benchmark toolchain."""
    _setup_logging(verbose)


def _run_stages(config_path: str, stages: list[str], report_path: str | None) -> None:
    config = load_config(config_path)
    config.stages = stages
    report = run_pipeline(config, config_path=config_path)
    rendered = json.dumps(report.to_record(), indent=2)
    if report_path:
        Path(report_path).write_text(rendered + "\n", encoding="utf-8")
    click.echo(rendered)


def _stage_command(name: str, help_text: str):
    @main.command(name=name, help=help_text)
    @click.option("--config", "config_path", required=True, type=click.Path(exists=True))
    @click.option("--report", "report_path", default=None, type=click.Path())
    def command(config_path: str, report_path: str | None) -> None:
        _run_stages(config_path, [name], report_path)

    return command


_stage_command("ingest", "Clean the raw corpus into normalized documents.")
_stage_command("filter", "Keep telecom-relevant documents by keyword match and density.")
_stage_command("dedup", "Remove exact and near-duplicate documents.")
_stage_command("forge", "Construct benchmark and instruction items.")
_stage_command("score", "Grade configured model responses against forged items.")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", default=None, type=click.Path())
def run(config_path: str, report_path: str | None) -> None:
    """Run every configured stage in order."""
    config = load_config(config_path)
    report = run_pipeline(config, config_path=config_path)
    rendered = json.dumps(report.to_record(), indent=2)
    if report_path:
        Path(report_path).write_text(rendered + "\n", encoding="utf-8")
    click.echo(rendered)


@main.group()
def objectives() -> None:
    """Training-objective evaluation over log-probability records."""


@objectives.command("eval")
@click.option("--inputs", "inputs_path", type=click.Path(exists=True), default=None,
              help="JSONL of objective records; stdin when omitted.")
@click.option("--output", "output_path", type=click.Path(), default=None,
              help="Write results here instead of stdout.")
def objectives_eval(inputs_path: str | None, output_path: str | None) -> None:
    """Evaluate clm / sft / dpo records, one JSON object per line."""
    if inputs_path:
        records = list(iter_jsonl(inputs_path))
    else:
        records = [json.loads(line) for line in sys.stdin if line.strip()]

    results = []
    dpo_losses: list[float] = []
    for i, record in enumerate(records):
        kind = record.get("kind")
        try:
            if kind == "clm":
                loss = clm_loss(TokenLogProbs(record["log_probs"]))
                results.append({"kind": "clm", "loss": loss})
            elif kind == "sft":
                loss = sft_loss(TokenLogProbs(record["log_probs"]))
                results.append({"kind": "sft", "loss": loss})
            elif kind == "dpo":
                out = dpo_loss_and_margin(
                    DpoInputs(
                        logp_theta_chosen=record["logp_theta_chosen"],
                        logp_theta_rejected=record["logp_theta_rejected"],
                        logp_ref_chosen=record["logp_ref_chosen"],
                        logp_ref_rejected=record["logp_ref_rejected"],
                        beta=record.get("beta", 0.1),
                    )
                )
                dpo_losses.append(out.loss)
                results.append(
                    {"kind": "dpo", "loss": out.loss, "reward_margin": out.reward_margin}
                )
            else:
                raise ValueError(f"unknown objective kind {kind!r}")
        except (KeyError, ValueError) as exc:
            raise click.ClickException(f"record {i}: {exc}") from exc

    if dpo_losses:
        results.append(
            {"kind": "dpo-batch", "count": len(dpo_losses), "mean_loss": sum(dpo_losses) / len(dpo_losses)}
        )
    rendered = "\n".join(json.dumps(r, ensure_ascii=False) for r in results)
    if output_path:
        Path(output_path).write_text(rendered + "\n", encoding="utf-8")
    else:
        click.echo(rendered)


@main.group()
def review() -> None:
    """Human-validation review service."""


@review.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--items", "items_path", type=click.Path(exists=True), default=None,
              help="Items JSONL; defaults to <output_dir>/items.jsonl.")
@click.option("--journal", "journal_path", type=click.Path(), default=None,
              help="Decision journal; defaults to <output_dir>/review_journal.jsonl.")
def review_serve(config_path: str, items_path: str | None, journal_path: str | None) -> None:
    """Serve the review API (and the UI when a static dir is configured)."""
    config = load_config(config_path)
    paths = PipelinePaths(config.resolve(config.output_dir))
    items = Path(items_path) if items_path else paths.items
    journal = Path(journal_path) if journal_path else paths.out_dir / "review_journal.jsonl"
    if not items.exists():
        raise click.ClickException(f"no forged items at {items}; run the forge stage first")
    static_dir = config.resolve(config.review.static_dir) if config.review.static_dir else None
    serve_review_api(
        items,
        journal,
        host=config.review.host,
        port=config.review.port,
        static_dir=static_dir,
        token=config.review.token,
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--kind", required=True, help="Item kind to export (e.g. mcq, open-qa).")
@click.option("--journal", "journal_path", type=click.Path(), default=None)
@click.option("--output", "output_path", type=click.Path(), default=None)
@click.option("--include-pending", is_flag=True, help="Force-export undecided items too.")
def export(
    config_path: str,
    kind: str,
    journal_path: str | None,
    output_path: str | None,
    include_pending: bool,
) -> None:
    """Export the reviewed dataset for one item kind."""
    config = load_config(config_path)
    paths = PipelinePaths(config.resolve(config.output_dir))
    journal = Path(journal_path) if journal_path else paths.out_dir / "review_journal.jsonl"
    output = Path(output_path) if output_path else paths.out_dir / "export" / f"{kind}.jsonl"
    if not paths.items.exists():
        raise click.ClickException(f"no forged items at {paths.items}; run the forge stage first")
    items = list(iter_jsonl(paths.items))
    decisions = load_journal(journal)
    manifest = export_dataset(
        kind,
        decisions,
        items,
        output,
        include_pending=include_pending,
        config_hash=config_file_hash(config, config_path),
    )
    click.echo(json.dumps(manifest, indent=2))


if __name__ == "__main__":
    main()
