"""Assemble the final training document: truncated body, interleaved
completion task, connective phrase, and the remaining tasks joined by blank
lines, wrapped as a single-field json line.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterable, Iterator

from .corpus import DocumentUnit
from .factory import TaskInstance

DEFAULT_MAX_TOKENS = 1800
DEFAULT_EOS = "</s>"

TASK_JOIN = "\n\n"

# Openers for the split-body layout; {DOMAIN} is substituted per document.
PREAMBLES = (
    "Read the beginning of an article about {DOMAIN}:",
    "Read the beginning of an article on {DOMAIN}:",
    "Here is the first part of an article about {DOMAIN}:",
)

# Phrases that connect the raw text with the question block.
CONNECTIVES = (
    "Answer questions based on the article:",
    "Use evidence from the {DOMAIN} article to answer these questions:",
    "Then, answer the following questions based on the whole article:",
)

# In the split-body layout the questions always follow the completed article.
COMPLETION_BRIDGE = "Then, answer the following questions based on the whole article:"

_WORD_RE = re.compile(r"\S+")


@dataclass
class ReadingComprehensionText:
    text: str
    n_tasks: int
    task_breakdown: Counter
    source: tuple[str, int]


def whitespace_token_count(text: str) -> int:
    return len(text.split())


def truncate_body(
    body: str,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    counter: Callable[[str], int] | None = None,
) -> str:
    """Longest prefix ending at a word boundary that stays within the budget.

    The default counter is whitespace word count, with a direct cut after
    the ``max_tokens``-th word; any other counter is applied by binary
    search over word boundaries (counters are assumed monotone on prefixes).
    """
    if max_tokens <= 0:
        raise ValueError("max_tokens must be positive")
    if counter is None:
        for i, match in enumerate(_WORD_RE.finditer(body), start=1):
            if i == max_tokens:
                return body[:match.end()]
        return body
    if counter(body) <= max_tokens:
        return body
    ends = [m.end() for m in _WORD_RE.finditer(body)]
    lo, hi = 0, len(ends)  # prefix of lo words is known to fit
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if counter(body[:ends[mid - 1]]) <= max_tokens:
            lo = mid
        else:
            hi = mid - 1
    return body[:ends[lo - 1]] if lo else ""


def _qa(task: TaskInstance) -> str:
    return task.question + " " + task.answer


def compose(unit: DocumentUnit, tasks: list[TaskInstance], rng: Random) -> ReadingComprehensionText:
    """Lay out one reading comprehension text.

    With a completion task the body is split in two around the completion
    question; otherwise the body is followed by a connective phrase and the
    task block. Tasks are joined by blank lines in seeded-shuffle order.
    """
    completion = next((t for t in tasks if t.sub_category == "completion"), None)
    others = [t for t in tasks if t.sub_category != "completion"]
    if completion is not None:
        opener = rng.choice(PREAMBLES).replace("{DOMAIN}", unit.domain)
    else:
        opener = rng.choice(CONNECTIVES).replace("{DOMAIN}", unit.domain)
    rng.shuffle(others)

    if completion is not None:
        beginning = completion.provenance.slots["BEGINNING"].text
        parts = [opener + " " + beginning, _qa(completion)]
        if others:
            parts.append(COMPLETION_BRIDGE)
            parts.extend(_qa(t) for t in others)
    elif others:
        parts = [unit.body, opener]
        parts.extend(_qa(t) for t in others)
    else:
        parts = [unit.body]

    breakdown = Counter(t.task_type for t in tasks)
    return ReadingComprehensionText(
        text=TASK_JOIN.join(parts),
        n_tasks=len(tasks),
        task_breakdown=breakdown,
        source=(unit.source_id, unit.unit_index),
    )


def wrap_record(rc: ReadingComprehensionText) -> str:
    """One json line per document; parsing the line gives back the text."""
    return json.dumps({"text": rc.text}, ensure_ascii=False)


def pack_stream(texts: Iterable[str], eos: str = DEFAULT_EOS) -> Iterator[str]:
    """Concatenate document texts with an end-of-sequence separator between."""
    first = True
    for text in texts:
        if not first:
            yield eos
        yield text
        first = False
