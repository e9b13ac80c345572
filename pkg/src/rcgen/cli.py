"""Command line interface: build-vocab, transform, mix, probe, stats."""

from __future__ import annotations

import json
import sys

import click

from . import probes, vocab
from .config import load_config, validate_config
from .corpus import ReaderStats, stream_documents
from .mixer import MixError, mix_files, plan_mix
from .pipeline import run_transform
from .stats import load_stats, render_report, RunStats


@click.group()
def main() -> None:
    """Turn raw domain corpora into reading-comprehension training data."""


@main.command("build-vocab")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", default="jsonl", type=click.Choice(["jsonl", "dir"]))
@click.option("--text-field", default="text", show_default=True)
@click.option("--size", default=vocab.DEFAULT_VOCAB_SIZE, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def build_vocab(corpus_path: str, fmt: str, text_field: str, size: int, out_path: str) -> None:
    """Train a domain subword vocabulary and save it one piece per line."""
    stats = ReaderStats()
    texts = (doc.text for doc in stream_documents(corpus_path, fmt, text_field=text_field, stats=stats))
    try:
        built = vocab.train_vocabulary(texts, vocab_size=size)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    vocab.save_vocabulary(built, out_path)
    click.echo(f"wrote {built.size} pieces to {out_path} ({stats.malformed} malformed lines skipped)")


@main.command("transform")
@click.option("--config", "config_path", type=click.Path(exists=True), help="yaml config; flags override it")
@click.option("--input", "input_", type=click.Path())
@click.option("--out", "output", type=click.Path())
@click.option("--seed", type=int)
@click.option("--domain")
@click.option("--input-format", type=click.Choice(["jsonl", "dir"]))
@click.option("--text-field")
@click.option("--title-field")
@click.option("--title-strategy", type=click.Choice(["first-line", "title-field", "section-split", "none"]))
@click.option("--domain-vocab", type=click.Path())
@click.option("--general-vocab", type=click.Path())
@click.option("--keyword-min-chars", type=int)
@click.option("--keyword-threshold", type=int)
@click.option("--cap", type=int)
@click.option("--max-tokens", type=int)
@click.option("--reversal-rate", type=float)
@click.option("--completion-enabled", type=bool)
@click.option("--completion-min-sentences", type=int)
@click.option("--patterns-file", type=click.Path())
@click.option("--templates-file", type=click.Path())
@click.option("--stats-out", type=click.Path())
@click.option("--dump-instances", type=click.Path())
@click.option("--packed-out", type=click.Path())
@click.option("--eos")
def transform(config_path: str | None, input_: str | None, output: str | None, **flags) -> None:
    """Transform a raw corpus into reading-comprehension records."""
    overrides = {k: v for k, v in flags.items() if v is not None}
    if input_ is not None:
        overrides["input"] = input_
    if output is not None:
        overrides["output"] = output
    cfg, problems = load_config(config_path, overrides)
    problems += validate_config(cfg)
    if problems:
        for problem in problems:
            click.echo(f"config error: {problem}", err=True)
        sys.exit(2)
    stats = run_transform(cfg)
    table, _ = render_report(stats)
    click.echo(table)


@main.command("mix")
@click.option("--rc", "rc_path", required=True, type=click.Path(exists=True))
@click.option("--gi", "gi_path", required=True, type=click.Path(exists=True))
@click.option("--ratio", required=True, help="rc:gi record ratio, e.g. 1:2")
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--sampling", default="truncate", type=click.Choice(["truncate", "cycle"]), show_default=True)
def mix(rc_path: str, gi_path: str, ratio: str, seed: int, out_path: str, sampling: str) -> None:
    """Interleave reading-comprehension and general-instruction records."""
    try:
        rc_part, _, gi_part = ratio.partition(":")
        parsed = (int(rc_part), int(gi_part))
    except ValueError:
        raise click.ClickException(f"ratio must look like 1:2, got {ratio!r}")
    try:
        plan = mix_files(rc_path, gi_path, out_path, parsed, seed=seed, sampling=sampling)
    except MixError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"mixed {plan.n_rc} rc + {plan.n_gi_target} gi records into {out_path}")


@main.command("probe")
@click.option("--mode", required=True, type=click.Choice(["filter", "fourchoice"]))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--labels-file", type=click.Path(exists=True), help="label pool, one per line (default: labels seen in the input)")
@click.option("--stem-template", default=probes.DEFAULT_STEM_TEMPLATE, show_default=True)
@click.option("--question-words", default=",".join(probes.DEFAULT_QUESTION_WORDS), show_default=True)
def probe(mode: str, input_path: str, out_path: str, seed: int, labels_file: str | None,
          stem_template: str, question_words: str) -> None:
    """Build knowledge-probing datasets.

    filter: drop instruction-like multiple-choice items.
    fourchoice: convert labeled records into four-choice probes.
    """
    with open(input_path, "r", encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if mode == "filter":
        words = tuple(w.strip() for w in question_words.split(",") if w.strip())
        kept = [r for r in records if not probes.is_instruction_like(r.get("question", r.get("stem", "")), words)]
        with open(out_path, "w", encoding="utf-8") as fh:
            for record in kept:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        click.echo(f"kept {len(kept)}/{len(records)} items")
        return
    if labels_file:
        with open(labels_file, "r", encoding="utf-8") as fh:
            pool = [line.strip() for line in fh if line.strip()]
    else:
        pool = list(dict.fromkeys(r["label"] for r in records))
    items = []
    for i, record in enumerate(records):
        rng = probes.item_rng(seed, str(record.get("id", i)))
        items.append(
            probes.make_four_choice(
                record["text"],
                record["label"],
                pool,
                rng,
                stem_template=stem_template,
                subject=record.get("subject"),
            )
        )
    groups = probes.group_by_subject(items)
    with open(out_path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(item.to_json() + "\n")
    click.echo(f"wrote {len(items)} probes over {len(groups)} subjects")
    for subject in sorted(groups):
        click.echo(f"  {subject}: {len(groups[subject])}")


@main.command("stats")
@click.option("--stats-json", "stats_path", required=True, type=click.Path(exists=True))
def stats_command(stats_path: str) -> None:
    """Render a saved stats record as a console table."""
    from collections import Counter

    record = load_stats(stats_path)
    stats = RunStats(
        docs_in=record.get("docs_in", 0),
        docs_out=record.get("docs_out", 0),
        malformed_lines=record.get("malformed_lines", 0),
        empty_docs=record.get("empty_docs", 0),
        docs_without_tasks=record.get("docs_without_tasks", 0),
        instances_by_type=Counter(record.get("instances_by_type", {})),
        pre_cap_by_type=Counter(record.get("pre_cap_by_type", {})),
        capped_rejections=Counter(record.get("capped_rejections", {})),
    )
    table, _ = render_report(stats)
    click.echo(table)


if __name__ == "__main__":
    main()
