"""Render mined examples into question-answer task instances.

Each sub-category owns a pool of paraphrased question templates plus, where
the task has a natural inverse, a pool of reversed templates that exchange
question and answer. Rendering is driven by an explicit seeded generator so
output is reproducible byte for byte.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from random import Random

from .corpus import DocumentUnit
from .mining import TASK_TYPE_BY_SUBCATEGORY, MinedExample

# Sub-categories whose task can be turned around. Paraphrase stays one-way
# (the support/contradict phrasing is already generative in both senses) and
# an article ending has no natural inverse.
REVERSIBLE = frozenset(
    {"title", "topic", "word2text", "definition", "entail", "neutral", "contradict", "cause_effect", "effect_cause"}
)

DEFAULT_REVERSAL_RATE = 0.5
DEFAULT_CAP = 2

NLI_LABELS = {"entail": "Entailment", "neutral": "Neutral", "contradict": "Contradiction"}
NLI_CONNECTORS = {"entail": "Therefore", "neutral": "Maybe", "contradict": "However"}

_ALLOWED_PLACEHOLDERS = {
    "title": {"TITLE", "BODY", "DOMAIN"},
    "topic": {"SENT1", "SENT2", "VERBAL", "DOMAIN"},
    "word2text": {"KEYWORDS", "SENT", "DOMAIN"},
    "definition": {"WORD", "SENT", "VERBAL", "DOMAIN"},
    "entail": {"SENT1", "SENT2", "VERBAL", "LABEL", "CONNECTOR", "DOMAIN"},
    "neutral": {"SENT1", "SENT2", "VERBAL", "LABEL", "CONNECTOR", "DOMAIN"},
    "contradict": {"SENT1", "SENT2", "VERBAL", "LABEL", "CONNECTOR", "DOMAIN"},
    "cause_effect": {"SENT1", "SENT2", "VERBAL", "DOMAIN"},
    "effect_cause": {"SENT1", "SENT2", "VERBAL", "DOMAIN"},
    "similar": {"SENT1", "SENT2", "VERBAL", "DOMAIN"},
    "different": {"SENT1", "SENT2", "VERBAL", "DOMAIN"},
    "completion": {"ENDING", "DOMAIN"},
}

_PLACEHOLDER_RE = re.compile(r"\{([A-Z][A-Z0-9]*)\}")


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class Template:
    question: str
    answer: str


@dataclass
class TemplatePool:
    sub_category: str
    forward: list[Template] = field(default_factory=list)
    reverse: list[Template] = field(default_factory=list)


@dataclass
class TaskInstance:
    question: str
    answer: str
    sub_category: str
    task_type: str
    reversed: bool
    template_id: int
    provenance: MinedExample


def reverse_eligible(sub_category: str) -> bool:
    return sub_category in REVERSIBLE


def _check_placeholders(sub_category: str, text: str) -> None:
    for name in _PLACEHOLDER_RE.findall(text):
        if name not in _ALLOWED_PLACEHOLDERS[sub_category]:
            raise TemplateError(f"unknown placeholder {name} in {sub_category} template")


def load_template_pools(path=None) -> dict[str, TemplatePool]:
    """Load and validate the template pools (default: built-in data file).

    Every forward pool needs at least 3 paraphrases, and reverse pools exist
    exactly for the reversible sub-categories.
    """
    if path is None:
        data = json.loads(resources.files("rcgen.data").joinpath("templates.json").read_text("utf-8"))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    pools: dict[str, TemplatePool] = {}
    for row in data["templates"]:
        sub = row["sub_category"]
        if sub not in _ALLOWED_PLACEHOLDERS:
            raise TemplateError(f"unknown sub-category {sub!r}")
        _check_placeholders(sub, row["question"])
        _check_placeholders(sub, row["answer"])
        pool = pools.setdefault(sub, TemplatePool(sub_category=sub))
        template = Template(question=row["question"], answer=row["answer"])
        if row["direction"] == "forward":
            pool.forward.append(template)
        elif row["direction"] == "reverse":
            pool.reverse.append(template)
        else:
            raise TemplateError(f"bad direction {row['direction']!r}")
    for sub, pool in pools.items():
        if len(pool.forward) < 3:
            raise TemplateError(f"{sub} needs at least 3 forward templates, has {len(pool.forward)}")
        if reverse_eligible(sub) and not pool.reverse:
            raise TemplateError(f"{sub} is reversible but has no reverse templates")
        if not reverse_eligible(sub) and pool.reverse:
            raise TemplateError(f"{sub} is not reversible but has reverse templates")
    return pools


def _fills(example: MinedExample, unit: DocumentUnit) -> dict[str, str]:
    fills = {"DOMAIN": unit.domain}
    for name, slot in example.slots.items():
        fills[name] = slot.text
    if "WORD1" in fills:
        keywords = [fills[k] for k in ("WORD1", "WORD2", "WORD3") if k in fills]
        fills["KEYWORDS"] = ", ".join(keywords)
    if example.verbalizer_used is not None:
        fills["VERBAL"] = example.verbalizer_used
    if example.sub_category in NLI_LABELS:
        fills["LABEL"] = NLI_LABELS[example.sub_category]
        fills["CONNECTOR"] = NLI_CONNECTORS[example.sub_category]
    if example.sub_category == "title":
        fills["BODY"] = unit.body
    return fills


def _capitalize(value: str) -> str:
    return value[0].upper() + value[1:] if value and value[0].islower() else value


def _substitute(template: str, fills: dict[str, str], capitalize_sentence_starts: bool) -> str:
    def replace(match: re.Match) -> str:
        name = match.group(1)
        if name not in fills:
            raise TemplateError(f"no value for placeholder {name}")
        value = fills[name]
        if capitalize_sentence_starts:
            pos = match.start()
            at_start = pos == 0
            after_newline = pos > 0 and template[pos - 1] == "\n"
            after_sentence = pos > 1 and template[pos - 1] == " " and template[pos - 2] in ".!?"
            if at_start or after_newline or after_sentence:
                value = _capitalize(value)
        return value

    return _PLACEHOLDER_RE.sub(replace, template)


def render_task(
    example: MinedExample,
    pools: dict[str, TemplatePool],
    rng: Random,
    unit: DocumentUnit,
    reversal_rate: float = DEFAULT_REVERSAL_RATE,
) -> TaskInstance:
    """Pick a direction and a template, then fill in the mined slots.

    Question-position slots get their first letter capitalized when they sit
    at a sentence start; answers keep the mined surface untouched so
    extractive answers stay verbatim substrings of the unit.
    """
    pool = pools.get(example.sub_category)
    if pool is None:
        raise TemplateError(f"no template pool for sub-category {example.sub_category!r}")
    use_reverse = False
    if reverse_eligible(example.sub_category) and pool.reverse:
        use_reverse = rng.random() < reversal_rate
    templates = pool.reverse if use_reverse else pool.forward
    template_id = rng.randrange(len(templates))
    template = templates[template_id]
    fills = _fills(example, unit)
    question = _substitute(template.question, fills, capitalize_sentence_starts=True)
    answer = _substitute(template.answer, fills, capitalize_sentence_starts=False)
    if not question.strip() or not answer.strip():
        raise TemplateError(f"empty rendering for {example.sub_category}")
    return TaskInstance(
        question=question,
        answer=answer,
        sub_category=example.sub_category,
        task_type=TASK_TYPE_BY_SUBCATEGORY[example.sub_category],
        reversed=use_reverse,
        template_id=template_id,
        provenance=example,
    )


def cap_subcategories(
    instances: list[TaskInstance],
    cap: int = DEFAULT_CAP,
    rng: Random | None = None,
) -> tuple[list[TaskInstance], Counter]:
    """Keep at most ``cap`` instances per (unit, sub-category).

    Survivors are drawn uniformly without replacement and keep their
    original relative order. Returns (survivors, rejection counts).
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if rng is None:
        rng = Random(0)
    groups: dict[tuple, list[int]] = {}
    for i, instance in enumerate(instances):
        key = (instance.provenance.unit_ref, instance.sub_category)
        groups.setdefault(key, []).append(i)
    keep: set[int] = set()
    rejections: Counter = Counter()
    for key, indices in groups.items():
        if len(indices) > cap:
            keep.update(rng.sample(indices, cap))
            rejections[key[1]] += len(indices) - cap
        else:
            keep.update(indices)
    return [instance for i, instance in enumerate(instances) if i in keep], rejections
