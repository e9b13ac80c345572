"""Task mining: compile mining patterns into regular expressions and scan
document units for task examples.

Pattern templates hold placeholders that expand to fixed regex fragments:

    {VERBAL}  -> capturing alternation of the pattern's verbalizers
    {WORD}    -> ([^.!?\\n,;\\"\\s]{10,})     a single word, 10+ chars
    {SENT}    -> ([^.!?\\n]{50,}[.!?]+)      a sentence, 50+ chars + terminator

A comma after {VERBAL} marks a sentence-boundary pattern (the verbalizer
opens the second sentence, as in ``... kinase. Thus, PST ...``); without the
comma the verbalizer is infix within a single sentence (``... expanding due
to rising demand ...``), and the slot left of the verbalizer is a clause
that cannot carry its own terminator, so it expands without the ``[.!?]+``
tail. Matching is anchored to segmented sentences: a boundary pattern must
cover an adjacent sentence pair exactly, an infix pattern must end at its
sentence's end. This keeps every captured slot sentence-aligned and makes
mining equal to an exhaustive sentence-pair scan.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from random import Random

from .corpus import DocumentUnit, Sentence, segment_sentences

WORD_REGEX = r"([^.!?\n,;\"\s]{10,})"
SENT_REGEX = r"([^.!?\n]{50,}[.!?]+)"
CLAUSE_REGEX = r"([^.!?\n]{50,})"

PLACEHOLDER_REGEX = {
    "{WORD}": WORD_REGEX,
    "{SENT}": SENT_REGEX,
    "{SENT1}": SENT_REGEX,
    "{SENT2}": SENT_REGEX,
}

_SENT_PLACEHOLDERS = ("{SENT}", "{SENT1}", "{SENT2}")

TASK_TYPES = (
    "summarization",
    "word_to_text",
    "nli",
    "commonsense",
    "paraphrase",
    "text_completion",
)

TASK_TYPE_BY_SUBCATEGORY = {
    "title": "summarization",
    "topic": "summarization",
    "word2text": "word_to_text",
    "definition": "word_to_text",
    "entail": "nli",
    "neutral": "nli",
    "contradict": "nli",
    "cause_effect": "commonsense",
    "effect_cause": "commonsense",
    "similar": "paraphrase",
    "different": "paraphrase",
    "completion": "text_completion",
}

_TOKEN_RE = re.compile(r"(\{[A-Z][A-Z0-9]*\})")

# re.escape also escapes spaces (for re.VERBOSE); verbalizers and template
# literals must expand verbatim, e.g. (Therefore|Thus|Hence), so escape only
# true metacharacters.
_METACHARS_RE = re.compile(r"([\\.^$*+?{}\[\]()|])")


def _escape(literal: str) -> str:
    return _METACHARS_RE.sub(r"\\\1", literal)


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class MiningPattern:
    task_type: str
    sub_category: str
    pattern_template: str
    verbalizers: tuple[str, ...]


@dataclass(frozen=True)
class Slot:
    text: str
    start: int | None = None
    end: int | None = None


@dataclass
class MinedExample:
    task_type: str
    sub_category: str
    slots: dict[str, Slot]
    unit_ref: tuple[str, int]
    verbalizer_used: str | None = None


@dataclass
class CompiledPattern:
    pattern: MiningPattern
    source: str
    kind: str  # "boundary" or "infix"
    regex: re.Pattern = field(repr=False)
    end_anchored: re.Pattern = field(repr=False)
    group_names: tuple[str, ...]
    prefix: re.Pattern | None = field(repr=False, default=None)

    def slot_name(self, index: int) -> str:
        return self.group_names[index]


@dataclass
class CompletionConfig:
    enabled: bool = True
    min_sentences: int = 2


def expand_template(template: str, verbalizers: tuple[str, ...]) -> tuple[str, tuple[str, ...], str]:
    """Expand a pattern template into regex source.

    Returns (source, capture group names in order, kind).
    """
    kind = "boundary" if "{VERBAL}," in template else "infix"
    parts = []
    names = []
    seen_verbal = False
    for token in _TOKEN_RE.split(template):
        if not token:
            continue
        if token == "{VERBAL}":
            parts.append("(" + "|".join(_escape(v) for v in verbalizers) + ")")
            names.append("VERBAL")
            seen_verbal = True
        elif token in PLACEHOLDER_REGEX:
            if kind == "infix" and token in _SENT_PLACEHOLDERS and not seen_verbal:
                parts.append(CLAUSE_REGEX)
            else:
                parts.append(PLACEHOLDER_REGEX[token])
            names.append(token[1:-1])
        elif _TOKEN_RE.fullmatch(token):
            raise PatternError(f"unknown placeholder {token[1:-1]}")
        else:
            parts.append(_escape(token))
    return "".join(parts), tuple(names), kind


def compile_pattern(pattern: MiningPattern) -> CompiledPattern:
    if not pattern.verbalizers:
        raise PatternError(f"pattern {pattern.sub_category} has no verbalizers")
    source, names, kind = expand_template(pattern.pattern_template, pattern.verbalizers)
    prefix = None
    if kind == "boundary":
        # Cheap test for "second sentence opens with a verbalizer".
        prefix = re.compile("(?:" + "|".join(_escape(v) for v in pattern.verbalizers) + "), ")
    return CompiledPattern(
        pattern=pattern,
        source=source,
        kind=kind,
        regex=re.compile(source),
        end_anchored=re.compile(source + r"\Z"),
        group_names=names,
        prefix=prefix,
    )


def load_patterns(path=None) -> list[MiningPattern]:
    """Load the mining pattern set from a data file (default: built-in)."""
    if path is None:
        data = json.loads(resources.files("rcgen.data").joinpath("patterns.json").read_text("utf-8"))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    patterns = []
    for row in data["patterns"]:
        if row["task_type"] not in TASK_TYPES:
            raise PatternError(f"unknown task type {row['task_type']!r}")
        if TASK_TYPE_BY_SUBCATEGORY.get(row["sub_category"]) != row["task_type"]:
            raise PatternError(f"sub-category {row['sub_category']!r} does not belong to {row['task_type']!r}")
        patterns.append(
            MiningPattern(
                task_type=row["task_type"],
                sub_category=row["sub_category"],
                pattern_template=row["template"],
                verbalizers=tuple(row["verbalizers"]),
            )
        )
    return patterns


def compile_patterns(patterns: list[MiningPattern]) -> list[CompiledPattern]:
    return [compile_pattern(p) for p in patterns]


def _example(cp: CompiledPattern, unit: DocumentUnit, match: re.Match) -> MinedExample:
    slots: dict[str, Slot] = {}
    verbalizer = None
    for i, name in enumerate(cp.group_names, start=1):
        raw = match.group(i)
        start, end = match.span(i)
        if name == "VERBAL":
            verbalizer = raw
            continue
        # Trim whitespace the character classes may have absorbed, keeping
        # the span pointing at exactly the stored text.
        lstripped = raw.lstrip()
        start += len(raw) - len(lstripped)
        text = lstripped.rstrip()
        end = start + len(text)
        slots[name] = Slot(text=text, start=start, end=end)
    return MinedExample(
        task_type=cp.pattern.task_type,
        sub_category=cp.pattern.sub_category,
        slots=slots,
        unit_ref=(unit.source_id, unit.unit_index),
        verbalizer_used=verbalizer,
    )


def _mine_boundary(cp: CompiledPattern, unit: DocumentUnit, sentences: list[Sentence]) -> list[MinedExample]:
    body = unit.body
    out = []
    i = 0
    while i < len(sentences) - 1:
        s1, s2 = sentences[i], sentences[i + 1]
        if body[s1.end:s2.start] == " " and cp.prefix.match(s2.text):
            match = cp.regex.fullmatch(body, s1.start, s2.end)
            if match is not None:
                out.append(_example(cp, unit, match))
                i += 2
                continue
        i += 1
    return out


def _mine_infix(cp: CompiledPattern, unit: DocumentUnit, sentences: list[Sentence]) -> list[MinedExample]:
    body = unit.body
    verbal_probes = [f" {v} " for v in cp.pattern.verbalizers]
    out = []
    for sentence in sentences:
        if not any(probe in sentence.text for probe in verbal_probes):
            continue
        match = cp.end_anchored.search(body, sentence.start, sentence.end)
        if match is not None:
            out.append(_example(cp, unit, match))
    return out


def mine_regex_tasks(
    unit: DocumentUnit,
    patterns: list[CompiledPattern],
    sentences: list[Sentence] | None = None,
) -> list[MinedExample]:
    """Scan a unit with every compiled pattern.

    Matches of one pattern never overlap; different patterns may mine the
    same site (a "However," joint yields both an NLI contradiction and a
    paraphrase example).
    """
    if sentences is None:
        sentences = segment_sentences(unit.body)
    examples: list[MinedExample] = []
    for cp in patterns:
        if cp.kind == "boundary":
            examples.extend(_mine_boundary(cp, unit, sentences))
        else:
            examples.extend(_mine_infix(cp, unit, sentences))
    return examples


_MAX_KEYWORD_SLOTS = 3


def _keyword_slots(sentence: Sentence, surfaces: list[str]) -> dict[str, Slot]:
    slots = {}
    for i, surface in enumerate(surfaces[:_MAX_KEYWORD_SLOTS], start=1):
        offset = sentence.text.find(surface)
        if offset >= 0:
            start = sentence.start + offset
            slots[f"WORD{i}"] = Slot(text=surface, start=start, end=start + len(surface))
        else:
            slots[f"WORD{i}"] = Slot(text=surface)
    return slots


def choose_completion_split(n_sentences: int, rng: Random) -> int:
    """Pick the index of the first ending sentence, jittered around the middle."""
    fraction = rng.uniform(0.40, 0.70)
    return max(1, min(n_sentences - 1, round(n_sentences * fraction)))


def mine_intrinsic_tasks(
    unit: DocumentUnit,
    word2text: list[tuple[Sentence, list[str]]],
    completion_cfg: CompletionConfig,
    rng: Random,
    sentences: list[Sentence] | None = None,
) -> list[MinedExample]:
    """Mine the tasks that need no regex pattern.

    Emits one title-summary example when the unit is titled, one word-to-text
    example per selected keyword-rich sentence, and one text-completion
    example splitting the body at a sentence boundary near the middle.
    """
    if sentences is None:
        sentences = segment_sentences(unit.body)
    ref = (unit.source_id, unit.unit_index)
    examples = []
    if unit.title:
        examples.append(
            MinedExample(
                task_type="summarization",
                sub_category="title",
                slots={"TITLE": Slot(text=unit.title)},
                unit_ref=ref,
            )
        )
    for sentence, surfaces in word2text:
        slots = {"SENT": Slot(text=sentence.text, start=sentence.start, end=sentence.end)}
        slots.update(_keyword_slots(sentence, surfaces))
        examples.append(
            MinedExample(
                task_type="word_to_text",
                sub_category="word2text",
                slots=slots,
                unit_ref=ref,
            )
        )
    if completion_cfg.enabled and len(sentences) >= max(2, completion_cfg.min_sentences):
        cut = choose_completion_split(len(sentences), rng)
        split = sentences[cut].start
        beginning = unit.body[:split].rstrip()
        ending = unit.body[split:].rstrip()
        examples.append(
            MinedExample(
                task_type="text_completion",
                sub_category="completion",
                slots={
                    "BEGINNING": Slot(text=beginning, start=0, end=len(beginning)),
                    "ENDING": Slot(text=ending, start=split, end=split + len(ending)),
                },
                unit_ref=ref,
            )
        )
    return examples
