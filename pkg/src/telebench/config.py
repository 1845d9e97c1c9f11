"""Declarative pipeline configuration.

One YAML file drives every stage. String values may interpolate environment
variables with ``${VAR}`` (useful for provider secrets); relative paths are
resolved against the config file's directory so a config travels with its
fixtures. Validation runs up front: every referenced path must exist and
every threshold must be in range before any stage starts.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

PIPELINE_STAGES = ("ingest", "filter", "dedup", "forge", "score")

_ENV_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


class ConfigError(ValueError):
    """Invalid, incomplete or unresolvable pipeline configuration."""


def _interpolate(value):
    if isinstance(value, str):
        def repl(m):
            name = m.group(1)
            if name not in os.environ:
                raise ConfigError(f"environment variable {name} referenced but not set")
            return os.environ[name]

        return _ENV_RE.sub(repl, value)
    if isinstance(value, list):
        return [_interpolate(v) for v in value]
    if isinstance(value, dict):
        return {k: _interpolate(v) for k, v in value.items()}
    return value


@dataclass
class FilterSettings:
    min_unique_keywords: int = 2
    min_density: float = 0.3


@dataclass
class DedupSettings:
    shingle_words: int = 5
    num_permutations: int = 128
    jaccard_threshold: float = 0.85
    seed: int = 1


@dataclass
class ForgeSettings:
    seed: int = 7
    masked_equations: bool = True
    max_equation_items_per_doc: int = 4
    code_infill: bool = True
    tdoc: bool = True
    per_wg_quota: int = 1000
    mcq: bool = False
    mcq_max_docs: int = 8
    mcq_category_by_source: dict[str, str] = field(
        default_factory=lambda: {
            "paper": "research-publications",
            "wiki": "research-overview",
            "book": "lexicon",
            "stackexchange": "research-overview",
            "standard-3gpp": "standards-specifications",
            "standard-ieee": "standards-specifications",
            "patent": "research-publications",
        }
    )


@dataclass
class ProviderSettings:
    kind: str = "mock"  # mock | http
    model_id: str = "mock"
    fixtures_dir: str | None = None
    endpoint: str | None = None
    api_key: str | None = None
    cache_dir: str | None = None
    max_in_flight: int = 4


@dataclass
class EmbeddingSettings:
    kind: str = "stub"  # stub | http
    dimension: int = 64
    endpoint: str | None = None
    api_key: str | None = None


@dataclass
class ScoringSettings:
    mcq_responses: str | None = None
    equation_predictions: str | None = None
    tdoc_predictions: str | None = None


@dataclass
class ReviewSettings:
    host: str = "127.0.0.1"
    port: int = 8321
    static_dir: str | None = None
    token: str | None = None


@dataclass
class PipelineConfig:
    corpus_path: str
    lexicon_path: str
    output_dir: str
    lexicon_exclusions: str | None = None
    stages: list[str] = field(default_factory=lambda: list(PIPELINE_STAGES))
    seed: int = 0
    segment_targets: list[int] = field(default_factory=lambda: [64, 128, 256, 512])
    filter: FilterSettings = field(default_factory=FilterSettings)
    dedup: DedupSettings = field(default_factory=DedupSettings)
    forge: ForgeSettings = field(default_factory=ForgeSettings)
    generator: ProviderSettings = field(default_factory=ProviderSettings)
    validator: ProviderSettings = field(default_factory=ProviderSettings)
    embedding: EmbeddingSettings = field(default_factory=EmbeddingSettings)
    scoring: ScoringSettings = field(default_factory=ScoringSettings)
    review: ReviewSettings = field(default_factory=ReviewSettings)
    base_dir: Path = field(default_factory=Path)

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else (self.base_dir / p)


def _build(section_cls, data: dict, what: str):
    known = {f for f in section_cls.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys in {what}: {sorted(unknown)}")
    return section_cls(**data)


def load_config(path: str | Path) -> PipelineConfig:
    """Load, interpolate and validate a pipeline config file."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")
    raw = _interpolate(raw)

    sections = {
        "filter": FilterSettings,
        "dedup": DedupSettings,
        "forge": ForgeSettings,
        "generator": ProviderSettings,
        "validator": ProviderSettings,
        "embedding": EmbeddingSettings,
        "scoring": ScoringSettings,
        "review": ReviewSettings,
    }
    kwargs = {}
    for key, value in raw.items():
        if key in sections:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key} must be a mapping")
            kwargs[key] = _build(sections[key], value, key)
        else:
            kwargs[key] = value

    known = {f for f in PipelineConfig.__dataclass_fields__} - {"base_dir"}
    unknown = set(kwargs) - known
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {sorted(unknown)}")
    missing = {"corpus_path", "lexicon_path", "output_dir"} - set(kwargs)
    if missing:
        raise ConfigError(f"config missing required keys: {sorted(missing)}")

    config = PipelineConfig(base_dir=path.parent.resolve(), **kwargs)
    validate_config(config)
    return config


def validate_config(config: PipelineConfig) -> None:
    """Check paths and ranges; raises ConfigError before any stage runs."""
    for stage in config.stages:
        if stage not in PIPELINE_STAGES:
            raise ConfigError(f"unknown stage {stage!r}; valid: {PIPELINE_STAGES}")

    for label, value in (("corpus_path", config.corpus_path), ("lexicon_path", config.lexicon_path)):
        if not config.resolve(value).exists():
            raise ConfigError(f"{label} does not exist: {config.resolve(value)}")
    if config.lexicon_exclusions and not config.resolve(config.lexicon_exclusions).exists():
        raise ConfigError(f"lexicon_exclusions does not exist: {config.lexicon_exclusions}")

    f = config.filter
    if f.min_unique_keywords < 0 or f.min_density < 0:
        raise ConfigError("filter thresholds must be non-negative")
    d = config.dedup
    if d.shingle_words < 1:
        raise ConfigError("dedup.shingle_words must be >= 1")
    if d.num_permutations < 1:
        raise ConfigError("dedup.num_permutations must be >= 1")
    if not 0 < d.jaccard_threshold <= 1:
        raise ConfigError("dedup.jaccard_threshold must be in (0, 1]")
    if not config.segment_targets or any(t <= 0 for t in config.segment_targets):
        raise ConfigError("segment_targets must be positive integers")
    g = config.forge
    if g.max_equation_items_per_doc < 1 or g.per_wg_quota < 1 or g.mcq_max_docs < 1:
        raise ConfigError("forge quotas must be >= 1")

    for name, provider in (("generator", config.generator), ("validator", config.validator)):
        if provider.kind not in ("mock", "http"):
            raise ConfigError(f"{name}.kind must be mock or http")
        if provider.kind == "mock" and provider.fixtures_dir:
            if not config.resolve(provider.fixtures_dir).is_dir():
                raise ConfigError(f"{name}.fixtures_dir does not exist: {provider.fixtures_dir}")
        if provider.kind == "http" and not provider.endpoint:
            raise ConfigError(f"{name}.endpoint required for http providers")
    if config.embedding.kind not in ("stub", "http"):
        raise ConfigError("embedding.kind must be stub or http")
    if config.embedding.dimension < 2:
        raise ConfigError("embedding.dimension must be >= 2")

    for label, value in (
        ("scoring.mcq_responses", config.scoring.mcq_responses),
        ("scoring.equation_predictions", config.scoring.equation_predictions),
        ("scoring.tdoc_predictions", config.scoring.tdoc_predictions),
    ):
        if value and not config.resolve(value).exists():
            raise ConfigError(f"{label} does not exist: {value}")
    if config.review.static_dir and not config.resolve(config.review.static_dir).is_dir():
        raise ConfigError(f"review.static_dir does not exist: {config.review.static_dir}")
