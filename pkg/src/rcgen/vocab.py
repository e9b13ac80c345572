"""Domain vocabulary induction and keyword derivation.

The trainer is a plain byte-pair merge loop over whitespace-pretokenized
text: deterministic, dependency-free, and enough to compute the
domain-minus-general vocabulary difference the keyword filter needs.
"""

from __future__ import annotations

import os
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Sentence

# Leading markers used by common subword tokenizers for word-initial or
# word-continuation pieces; stripped so vocabularies compare as plain words.
_CONTINUATION_MARKERS = ("▁", "##")

DEFAULT_VOCAB_SIZE = 32000
DEFAULT_MIN_KEYWORD_CHARS = 10
DEFAULT_KEYWORD_THRESHOLD = 3

_WORD_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


@dataclass
class Vocabulary:
    pieces: set[str]
    provenance: str = "trained"  # or "loaded"

    @property
    def size(self) -> int:
        return len(self.pieces)


@dataclass
class KeywordSet:
    keywords: set[str]
    min_chars: int = DEFAULT_MIN_KEYWORD_CHARS
    domain: str = "custom"
    _folded: set[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._folded = {k.lower() for k in self.keywords}


def strip_marker(piece: str) -> str:
    for marker in _CONTINUATION_MARKERS:
        if piece.startswith(marker):
            return piece[len(marker):]
    return piece


def train_vocabulary(texts: Iterable[str], vocab_size: int = DEFAULT_VOCAB_SIZE) -> Vocabulary:
    """Induce subword pieces by iterative pair merging.

    Runs up to ``vocab_size`` merges (ties broken lexicographically, pairs
    seen only once never merge) and returns the merged pieces plus the base
    characters. Deterministic for a fixed corpus and size.
    """
    if vocab_size < 1000:
        raise ValueError("vocab_size must be >= 1000")
    word_counts: Counter[str] = Counter()
    for text in texts:
        word_counts.update(text.split())
    if not word_counts:
        raise ValueError("empty corpus")

    # Each distinct word is a symbol sequence; merges rewrite sequences in place.
    words = [list(w) for w in word_counts]
    counts = list(word_counts.values())
    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: defaultdict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, symbols in enumerate(words):
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] += counts[idx]
            pair_words[pair].add(idx)

    pieces: set[str] = set()
    for symbols in words:
        pieces.update(symbols)

    for _ in range(vocab_size):
        if not pair_counts:
            break
        best_count = max(pair_counts.values())
        if best_count < 2:
            break
        best = min(p for p, c in pair_counts.items() if c == best_count)
        merged = best[0] + best[1]
        pieces.add(merged)
        for idx in list(pair_words[best]):
            symbols = words[idx]
            count = counts[idx]
            out: list[str] = []
            i = 0
            while i < len(symbols):
                if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == best:
                    out.append(merged)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] -= count
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
                pair_words[pair].discard(idx)
            for pair in zip(out, out[1:]):
                pair_counts[pair] += count
                pair_words[pair].add(idx)
            words[idx] = out

    return Vocabulary(pieces=pieces, provenance="trained")


def save_vocabulary(vocab: Vocabulary, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for piece in sorted(vocab.pieces):
            fh.write(piece + "\n")


def load_vocabulary(path: str | os.PathLike) -> Vocabulary:
    pieces = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            piece = strip_marker(line.rstrip("\n"))
            if piece:
                pieces.add(piece)
    return Vocabulary(pieces=pieces, provenance="loaded")


def derive_keywords(
    domain_vocab: Vocabulary,
    general_vocab: Vocabulary,
    min_chars: int = DEFAULT_MIN_KEYWORD_CHARS,
    domain: str = "custom",
) -> KeywordSet:
    """Keywords are long domain pieces absent from the general vocabulary.

    Pieces shorter than ``min_chars`` or without any letter are dropped.
    """
    if not domain_vocab.pieces or not general_vocab.pieces:
        raise ValueError("both vocabularies must be non-empty")
    general = {strip_marker(p) for p in general_vocab.pieces}
    keywords = set()
    for piece in domain_vocab.pieces:
        piece = strip_marker(piece)
        if len(piece) < min_chars:
            continue
        if piece in general:
            continue
        if not any(ch.isalpha() for ch in piece):
            continue
        keywords.add(piece)
    return KeywordSet(keywords=keywords, min_chars=min_chars, domain=domain)


def count_keywords(sentence: Sentence, keywords: KeywordSet) -> tuple[int, list[str]]:
    """Count distinct keywords appearing as whole words, case-insensitively.

    Returns the count and the matched surface forms in sentence order (first
    occurrence of each keyword, as printed in the sentence).
    """
    matched: list[str] = []
    seen: set[str] = set()
    for match in _WORD_TOKEN_RE.finditer(sentence.text):
        folded = match.group().lower()
        if folded in keywords._folded and folded not in seen:
            seen.add(folded)
            matched.append(match.group())
    return len(matched), matched


def select_word2text_sentences(
    sentences: list[Sentence],
    keywords: KeywordSet,
    threshold: int = DEFAULT_KEYWORD_THRESHOLD,
) -> list[tuple[Sentence, list[str]]]:
    """Pick sentences with strictly more than ``threshold`` distinct keywords."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    selected = []
    for sentence in sentences:
        count, matched = count_keywords(sentence, keywords)
        if count > threshold:
            selected.append((sentence, matched))
    return selected
