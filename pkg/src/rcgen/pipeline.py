"""The transform pipeline: stream documents, mine and render tasks per
unit, assemble output lines, and fold statistics.

Every random decision for a unit comes from a generator seeded by
(global seed, source id, unit index), so output bytes do not depend on
worker count or scheduling. The worker pool maps documents in order and the
writer is the single serialization point.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from random import Random

from . import corpus, mining, vocab
from .assemble import compose, truncate_body, wrap_record
from .config import PipelineConfig, config_dict, config_hash
from .factory import cap_subcategories, load_template_pools, render_task
from .mining import CompletionConfig
from .stats import RunStats, render_report, save_stats

WORKERS_ENV = "RCGEN_WORKERS"


def unit_rng(seed: int, source_id: str, unit_index: int) -> Random:
    """Stable per-unit generator; hashlib-based so it survives process
    boundaries and hash randomization."""
    digest = hashlib.sha256(f"{seed}|{source_id}|{unit_index}".encode("utf-8")).digest()
    return Random(int.from_bytes(digest[:8], "big"))


@dataclass
class TransformContext:
    cfg: PipelineConfig
    patterns: list
    pools: dict
    keywords: vocab.KeywordSet | None
    completion: CompletionConfig


def build_context(cfg: PipelineConfig) -> TransformContext:
    patterns = mining.compile_patterns(mining.load_patterns(cfg.patterns_file))
    pools = load_template_pools(cfg.templates_file)
    keywords = None
    if cfg.domain_vocab and cfg.general_vocab:
        keywords = vocab.derive_keywords(
            vocab.load_vocabulary(cfg.domain_vocab),
            vocab.load_vocabulary(cfg.general_vocab),
            min_chars=cfg.keyword_min_chars,
            domain=cfg.domain,
        )
    completion = CompletionConfig(
        enabled=cfg.completion_enabled,
        min_sentences=cfg.completion_min_sentences,
    )
    return TransformContext(cfg=cfg, patterns=patterns, pools=pools, keywords=keywords, completion=completion)


@dataclass
class DocResult:
    lines: list[str]
    texts: list[str]
    docs_without_tasks: int
    instances_by_type: dict
    pre_cap_by_type: dict
    capped_rejections: dict
    dump_lines: list[str]


def _slot_record(slot: mining.Slot) -> dict:
    return {"text": slot.text, "start": slot.start, "end": slot.end}


def transform_document(doc: corpus.RawDocument, ctx: TransformContext, want_dump: bool = False) -> DocResult:
    cfg = ctx.cfg
    result = DocResult([], [], 0, {}, {}, {}, [])
    instances_by_type: dict = {}
    pre_cap_by_type: dict = {}
    rejections_total: dict = {}
    for unit in corpus.extract_units(doc, cfg.title_strategy):
        unit.body = truncate_body(unit.body, cfg.max_tokens)
        sentences = corpus.segment_sentences(unit.body)
        rng = unit_rng(cfg.seed, unit.source_id, unit.unit_index)
        word2text = []
        if ctx.keywords is not None:
            word2text = vocab.select_word2text_sentences(sentences, ctx.keywords, cfg.keyword_threshold)
        examples = mining.mine_regex_tasks(unit, ctx.patterns, sentences)
        examples += mining.mine_intrinsic_tasks(unit, word2text, ctx.completion, rng, sentences)
        instances = [render_task(ex, ctx.pools, rng, unit, cfg.reversal_rate) for ex in examples]
        kept, rejections = cap_subcategories(instances, cfg.cap, rng)
        rc = compose(unit, kept, rng)
        result.lines.append(wrap_record(rc))
        result.texts.append(rc.text)
        if rc.n_tasks == 0:
            result.docs_without_tasks += 1
        for task in instances:
            pre_cap_by_type[task.task_type] = pre_cap_by_type.get(task.task_type, 0) + 1
        for task_type, count in rc.task_breakdown.items():
            instances_by_type[task_type] = instances_by_type.get(task_type, 0) + count
        for sub, count in rejections.items():
            rejections_total[sub] = rejections_total.get(sub, 0) + count
        if want_dump:
            pre_cap_counts: dict = {}
            for task in instances:
                pre_cap_counts[task.sub_category] = pre_cap_counts.get(task.sub_category, 0) + 1
            record = {
                "source_id": unit.source_id,
                "unit_index": unit.unit_index,
                "title": unit.title,
                "body": unit.body,
                "pre_cap_counts": pre_cap_counts,
                "instances": [
                    {
                        "task_type": task.task_type,
                        "sub_category": task.sub_category,
                        "reversed": task.reversed,
                        "template_id": task.template_id,
                        "verbalizer": task.provenance.verbalizer_used,
                        "question": task.question,
                        "answer": task.answer,
                        "slots": {name: _slot_record(slot) for name, slot in task.provenance.slots.items()},
                    }
                    for task in kept
                ],
            }
            result.dump_lines.append(json.dumps(record, ensure_ascii=False))
    result.instances_by_type = instances_by_type
    result.pre_cap_by_type = pre_cap_by_type
    result.capped_rejections = rejections_total
    return result


_WORKER_CTX: TransformContext | None = None
_WORKER_DUMP = False


def _init_worker(cfg_values: dict, want_dump: bool) -> None:
    global _WORKER_CTX, _WORKER_DUMP
    _WORKER_CTX = build_context(PipelineConfig(**cfg_values))
    _WORKER_DUMP = want_dump


def _worker(doc: corpus.RawDocument) -> DocResult:
    return transform_document(doc, _WORKER_CTX, _WORKER_DUMP)


def _worker_count() -> int:
    value = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def run_transform(cfg: PipelineConfig) -> RunStats:
    """Execute the transform end to end and write output plus sidecars."""
    stats = RunStats()
    reader_stats = corpus.ReaderStats()
    docs = corpus.stream_documents(
        cfg.input,
        cfg.input_format,
        text_field=cfg.text_field,
        title_field=cfg.title_field,
        domain=cfg.domain,
        stats=reader_stats,
    )
    want_dump = cfg.dump_instances is not None
    workers = _worker_count()

    out = open(cfg.output, "w", encoding="utf-8")
    packed = open(cfg.packed_out, "w", encoding="utf-8") if cfg.packed_out else None
    dump = open(cfg.dump_instances, "w", encoding="utf-8") if want_dump else None
    first_packed = True
    try:
        if workers == 1:
            ctx = build_context(cfg)
            results = (transform_document(doc, ctx, want_dump) for doc in docs)
            pool = None
        else:
            pool = multiprocessing.Pool(
                processes=workers,
                initializer=_init_worker,
                initargs=(config_dict(cfg), want_dump),
            )
            results = pool.imap(_worker, docs, chunksize=16)
        for result in results:
            for line in result.lines:
                out.write(line + "\n")
            if packed is not None:
                for text in result.texts:
                    if not first_packed:
                        packed.write(cfg.eos)
                    packed.write(text)
                    first_packed = False
            if dump is not None:
                for line in result.dump_lines:
                    dump.write(line + "\n")
            stats.docs_without_tasks += result.docs_without_tasks
            stats.docs_out += len(result.lines)
            stats.instances_by_type.update(result.instances_by_type)
            stats.pre_cap_by_type.update(result.pre_cap_by_type)
            stats.capped_rejections.update(result.capped_rejections)
        if pool is not None:
            pool.close()
            pool.join()
    finally:
        out.close()
        if packed is not None:
            packed.close()
        if dump is not None:
            dump.close()

    stats.docs_in = reader_stats.records_in
    stats.malformed_lines = reader_stats.malformed
    stats.empty_docs = reader_stats.empty

    _, record = render_report(stats)
    if cfg.stats_out:
        save_stats(record, cfg.stats_out)
    write_manifest(cfg, record)
    return stats


def manifest_path(output: str) -> str:
    return output + ".manifest.json"


def write_manifest(cfg: PipelineConfig, stats_record: dict) -> None:
    manifest = {
        "config": config_dict(cfg),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "counts": stats_record,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    with open(manifest_path(cfg.output), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
