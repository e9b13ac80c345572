"""Knowledge-probe dataset construction.

Two transforms: filter multiple-choice items down to next-token-friendly
declarative stems, and convert many-class classification into four-choice
probes with randomly drawn distractor labels.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, asdict
from random import Random
from typing import Iterable

DEFAULT_QUESTION_WORDS = ("What", "Who", "When", "Where", "Why", "Which", "Whose", "How")
BAD_SUFFIXES = (":", "?", "-")
BLANK_MARKER = "__"
DEFAULT_STEM_TEMPLATE = "{CONTRACT} The topic is"

N_OPTIONS = 4

_FIRST_WORD_RE = re.compile(r"[A-Za-z]+")


@dataclass
class ProbeItem:
    stem: str
    options: list[str]
    gold_index: int
    subject: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)


def is_instruction_like(question: str, question_words: Iterable[str] = DEFAULT_QUESTION_WORDS) -> bool:
    """True when a stem reads as an instruction rather than plain text:
    it opens with a question word, ends with ``:``/``?``/``-``, or carries a
    fill-in-the-blank marker.
    """
    stem = question.strip()
    first = _FIRST_WORD_RE.match(stem)
    if first is not None:
        folded = first.group().lower()
        if any(folded == w.lower() for w in question_words):
            return True
    if stem.endswith(BAD_SUFFIXES):
        return True
    return BLANK_MARKER in question


def filter_probe_candidates(
    items: list[tuple[str, list[str], int]],
    question_words: Iterable[str] = DEFAULT_QUESTION_WORDS,
) -> list[tuple[str, list[str], int]]:
    """Drop items whose question is instruction-like; keep the rest in order."""
    words = tuple(question_words)
    return [item for item in items if not is_instruction_like(item[0], words)]


def make_four_choice(
    stem: str,
    gold_label: str,
    label_pool: list[str],
    rng: Random,
    stem_template: str = DEFAULT_STEM_TEMPLATE,
    subject: str | None = None,
) -> ProbeItem:
    """Build a four-choice probe: the gold label plus three distinct
    distractors drawn uniformly from the pool, in shuffled option order.
    """
    pool = list(dict.fromkeys(label_pool))
    if gold_label not in pool:
        raise ValueError(f"gold label {gold_label!r} not in label pool")
    if len(pool) < N_OPTIONS:
        raise ValueError(f"label pool needs at least {N_OPTIONS} labels, has {len(pool)}")
    distractors = rng.sample([label for label in pool if label != gold_label], N_OPTIONS - 1)
    options = [gold_label] + distractors
    rng.shuffle(options)
    return ProbeItem(
        stem=stem_template.replace("{CONTRACT}", stem),
        options=options,
        gold_index=options.index(gold_label),
        subject=subject if subject is not None else gold_label,
    )


def item_rng(seed: int, item_id: str) -> Random:
    """Per-item generator derived from (seed, item id); order-independent."""
    digest = hashlib.sha256(f"{seed}|{item_id}".encode("utf-8")).digest()
    return Random(int.from_bytes(digest[:8], "big"))


def group_by_subject(items: list[ProbeItem]) -> dict[str, list[ProbeItem]]:
    """Partition items by subject, preserving order inside each group."""
    groups: dict[str, list[ProbeItem]] = {}
    for item in items:
        groups.setdefault(item.subject, []).append(item)
    return groups
