"""Pipeline configuration: one structured file, flag overrides win.

Validation reports every problem at once, and the seed is mandatory so a
run can never silently depend on the wall clock.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass

import yaml

from .corpus import CORPUS_FORMATS, TITLE_STRATEGIES


@dataclass
class PipelineConfig:
    input: str = ""
    output: str = ""
    seed: int | None = None
    domain: str = "custom"
    input_format: str = "jsonl"
    text_field: str = "text"
    title_field: str = "title"
    title_strategy: str = "none"
    domain_vocab: str | None = None
    general_vocab: str | None = None
    keyword_min_chars: int = 10
    keyword_threshold: int = 3
    cap: int = 2
    max_tokens: int = 1800
    token_counter: str = "whitespace"
    reversal_rate: float = 0.5
    completion_enabled: bool = True
    completion_min_sentences: int = 2
    patterns_file: str | None = None
    templates_file: str | None = None
    stats_out: str | None = None
    dump_instances: str | None = None
    packed_out: str | None = None
    eos: str = "</s>"


_FIELD_NAMES = {f.name for f in dataclasses.fields(PipelineConfig)}


def load_config(path: str | None, overrides: dict | None = None) -> tuple[PipelineConfig, list[str]]:
    """Build a config from an optional yaml file plus override values.

    Returns the config and the list of load-time problems (unknown keys).
    """
    problems: list[str] = []
    values: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            problems.append(f"config file {path} must contain a mapping")
            loaded = {}
        for key, value in loaded.items():
            if key not in _FIELD_NAMES:
                problems.append(f"unknown config key {key!r}")
            else:
                values[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return PipelineConfig(**values), problems


def validate_config(cfg: PipelineConfig) -> list[str]:
    """Check everything and return all problems, not just the first."""
    problems = []
    if not cfg.input:
        problems.append("input path is required")
    elif not os.path.exists(cfg.input):
        problems.append(f"input path does not exist: {cfg.input}")
    if not cfg.output:
        problems.append("output path is required")
    if cfg.seed is None:
        problems.append("seed is required (runs must not depend on the wall clock)")
    if cfg.input_format not in CORPUS_FORMATS:
        problems.append(f"input_format must be one of {CORPUS_FORMATS}, got {cfg.input_format!r}")
    if cfg.title_strategy not in TITLE_STRATEGIES:
        problems.append(f"title_strategy must be one of {TITLE_STRATEGIES}, got {cfg.title_strategy!r}")
    for name in ("domain_vocab", "general_vocab", "patterns_file", "templates_file"):
        value = getattr(cfg, name)
        if value is not None and not os.path.exists(value):
            problems.append(f"{name} does not exist: {value}")
    if (cfg.domain_vocab is None) != (cfg.general_vocab is None):
        problems.append("domain_vocab and general_vocab must be supplied together")
    if cfg.keyword_min_chars < 1:
        problems.append("keyword_min_chars must be >= 1")
    if cfg.keyword_threshold < 1:
        problems.append("keyword_threshold must be >= 1")
    if cfg.cap < 1:
        problems.append("cap must be >= 1")
    if cfg.max_tokens < 1:
        problems.append("max_tokens must be >= 1")
    if cfg.token_counter != "whitespace":
        problems.append(f"unknown token_counter {cfg.token_counter!r}")
    if not 0.0 <= cfg.reversal_rate <= 1.0:
        problems.append("reversal_rate must be within [0, 1]")
    if cfg.completion_min_sentences < 2:
        problems.append("completion_min_sentences must be >= 2")
    if not cfg.eos:
        problems.append("eos must be non-empty")
    return problems


def config_dict(cfg: PipelineConfig) -> dict:
    return dataclasses.asdict(cfg)


def config_hash(cfg: PipelineConfig) -> str:
    canonical = json.dumps(config_dict(cfg), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
