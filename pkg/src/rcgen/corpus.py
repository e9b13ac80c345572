"""Corpus ingestion: stream raw documents, split them into titled units,
and segment unit bodies into sentence spans.

Offsets everywhere are character offsets into the owning string, and every
span is exact: ``text[start:end]`` reproduces the stored text verbatim.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Iterator

DOMAINS = ("biomedicine", "finance", "law")

TITLE_STRATEGIES = ("first-line", "title-field", "section-split", "none")

CORPUS_FORMATS = ("jsonl", "dir")


@dataclass
class RawDocument:
    id: str
    text: str
    title: str | None = None
    domain: str = "custom"
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    end: int


@dataclass
class DocumentUnit:
    body: str
    source_id: str
    unit_index: int
    title: str | None = None
    domain: str = "custom"


@dataclass
class ReaderStats:
    """Counters from one streaming pass; malformed lines are skipped, not fatal."""

    records_in: int = 0
    malformed: int = 0
    empty: int = 0


def stream_documents(
    source: str | os.PathLike,
    fmt: str = "jsonl",
    *,
    text_field: str = "text",
    title_field: str = "title",
    domain: str = "custom",
    stats: ReaderStats | None = None,
) -> Iterator[RawDocument]:
    """Lazily yield documents from a jsonl file or a directory of .txt files.

    jsonl records missing a usable text field count as malformed and are
    skipped; records whose text is empty after trimming count as empty and
    are skipped. Order is stable: line order for jsonl, sorted filename
    order for directories.
    """
    if stats is None:
        stats = ReaderStats()
    if fmt == "jsonl":
        yield from _stream_jsonl(source, text_field, title_field, domain, stats)
    elif fmt == "dir":
        yield from _stream_dir(source, domain, stats)
    else:
        raise ValueError(f"unknown corpus format {fmt!r}")


def _stream_jsonl(source, text_field, title_field, domain, stats) -> Iterator[RawDocument]:
    with open(source, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            stats.records_in += 1
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                stats.malformed += 1
                continue
            if not isinstance(record, dict) or text_field not in record:
                stats.malformed += 1
                continue
            text = record[text_field]
            if not isinstance(text, str):
                stats.malformed += 1
                continue
            if not text.strip():
                stats.empty += 1
                continue
            title = record.get(title_field)
            if not isinstance(title, str) or not title.strip():
                title = None
            doc_id = str(record.get("id", lineno))
            meta = {k: v for k, v in record.items() if k not in (text_field, title_field)}
            yield RawDocument(id=doc_id, text=text, title=title, domain=domain, meta=meta)


def _stream_dir(source, domain, stats) -> Iterator[RawDocument]:
    names = sorted(n for n in os.listdir(source) if n.endswith(".txt"))
    for name in names:
        stats.records_in += 1
        path = os.path.join(source, name)
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        if not text.strip():
            stats.empty += 1
            continue
        yield RawDocument(id=name, text=text, domain=domain)


# A section heading is a short line without terminal punctuation followed by
# a blank line.
_MAX_HEADING_CHARS = 120
_HEADING_BAD_ENDINGS = tuple(".!?,;:")


def _is_heading(line: str) -> bool:
    stripped = line.strip()
    if not stripped or len(stripped) > _MAX_HEADING_CHARS:
        return False
    return not stripped.endswith(_HEADING_BAD_ENDINGS)


def extract_units(doc: RawDocument, strategy: str) -> list[DocumentUnit]:
    """Split one document into units according to the title strategy.

    first-line: the text before the first newline is the title.
    title-field: the title travels with the record; the body is the full text.
    section-split: one unit per detected section, titled when it has a heading.
    none: one untitled unit.
    """
    if strategy == "none":
        return [_unit(doc, doc.text, 0)]
    if strategy == "title-field":
        return [_unit(doc, doc.text, 0, title=doc.title)]
    if strategy == "first-line":
        head, sep, rest = doc.text.partition("\n")
        if not sep or not rest.strip():
            return [_unit(doc, doc.text, 0)]
        return [_unit(doc, rest, 0, title=head.strip() or None)]
    if strategy == "section-split":
        return _split_sections(doc)
    raise ValueError(f"unknown title strategy {strategy!r}")


def _unit(doc: RawDocument, body: str, index: int, title: str | None = None) -> DocumentUnit:
    return DocumentUnit(
        body=body.strip(),
        source_id=doc.id,
        unit_index=index,
        title=title,
        domain=doc.domain,
    )


def _split_sections(doc: RawDocument) -> list[DocumentUnit]:
    lines = doc.text.split("\n")
    units: list[DocumentUnit] = []
    title: str | None = None
    body_lines: list[str] = []

    def flush() -> None:
        nonlocal title, body_lines
        body = "\n".join(body_lines).strip()
        if body:
            units.append(_unit(doc, body, len(units), title=title))
        title = None
        body_lines = []

    i = 0
    while i < len(lines):
        line = lines[i]
        next_blank = i + 1 < len(lines) and not lines[i + 1].strip()
        if _is_heading(line) and next_blank:
            flush()
            title = line.strip()
            i += 2
            continue
        body_lines.append(line)
        i += 1
    flush()
    if not units:
        units.append(_unit(doc, doc.text, 0))
    return units


# A sentence ends at a run of .!? followed by whitespace or end of text, or
# at a newline. Deliberately crude: no abbreviation handling, so "Dr." is a
# sentence of its own and "3.5" never splits.
_SENTENCE_RE = re.compile(r"\S[^\n]*?(?:[.!?]+(?=\s|$)|(?=\n)|$)")


def segment_sentences(text: str) -> list[Sentence]:
    """Return non-overlapping sentence spans in ascending offset order."""
    sentences = []
    for match in _SENTENCE_RE.finditer(text):
        start, end = match.start(), match.end()
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            sentences.append(Sentence(text=text[start:end], start=start, end=end))
    return sentences
