"""Independent re-implementations used as test oracles.

Everything here works by explicit string scanning — no compiled mining
patterns, no library counting helpers — so a bug in the production path
cannot hide in its own oracle.
"""

from __future__ import annotations

TERMINATORS = ".!?"
SENT_MIN = 50
WORD_MIN = 10
WORD_FORBIDDEN = set('.!?\n,;"') | {" ", "\t", "\r", "\x0b", "\x0c"}


def split_terminator_run(text: str) -> tuple[str, str]:
    """Split into (prefix, trailing run of sentence terminators)."""
    i = len(text)
    while i > 0 and text[i - 1] in TERMINATORS:
        i -= 1
    return text[:i], text[i:]


def is_full_sentence_capture(text: str) -> bool:
    """Would the sentence regex capture this exact string? 50+ clean chars
    followed by a terminator run."""
    prefix, run = split_terminator_run(text)
    if not run or len(prefix) < SENT_MIN:
        return False
    return not any(c in TERMINATORS or c == "\n" for c in prefix)


def _strip_with_offset(text: str, start: int) -> tuple[str, int, int]:
    lstripped = text.lstrip()
    start += len(text) - len(lstripped)
    stripped = lstripped.rstrip()
    return stripped, start, start + len(stripped)


class OracleExample:
    def __init__(self, sub_category, verbalizer, slots):
        self.sub_category = sub_category
        self.verbalizer = verbalizer
        self.slots = slots  # name -> (text, start, end)

    def key(self):
        return (self.sub_category, self.verbalizer, tuple(sorted(self.slots.items())))

    def __repr__(self):
        return f"OracleExample({self.sub_category}, {self.verbalizer}, {self.slots})"


def _oracle_boundary(pattern, body, sentences):
    """Exhaustively test every adjacent sentence pair against every
    verbalizer, with greedy left-to-right non-overlap."""
    out = []
    i = 0
    while i < len(sentences) - 1:
        s1, s2 = sentences[i], sentences[i + 1]
        hit = None
        if body[s1.end:s2.start] == " " and is_full_sentence_capture(s1.text):
            for verbalizer in pattern.verbalizers:
                opener = verbalizer + ", "
                if s2.text.startswith(opener):
                    rest = s2.text[len(opener):]
                    if is_full_sentence_capture(rest):
                        hit = (verbalizer, rest, s2.start + len(opener))
                        break
        if hit is not None:
            verbalizer, rest, rest_start = hit
            rest_text, rstart, rend = _strip_with_offset(rest, rest_start)
            out.append(
                OracleExample(
                    pattern.sub_category,
                    verbalizer,
                    {
                        "SENT1": (s1.text, s1.start, s1.end),
                        "SENT2": (rest_text, rstart, rend),
                    },
                )
            )
            i += 2
        else:
            i += 1
    return out


def _word_start(core: str, boundary: int) -> int:
    j = boundary
    while j > 0 and core[j - 1] not in WORD_FORBIDDEN:
        j -= 1
    return j


def _oracle_infix(pattern, sentences):
    """Test every verbalizer occurrence inside every sentence.

    Only the final terminator-free stretch of a sentence can host a match
    (the right-hand capture must run to the sentence's closing punctuation),
    the left side must be a 50+ char clause (or a 10+ char word for the
    word-left pattern), and ties resolve the way a greedy leftmost regex
    would: clause-left keeps the rightmost split, word-left the leftmost.
    """
    word_left = pattern.pattern_template.startswith("{WORD}")
    out = []
    for s in sentences:
        core, run = split_terminator_run(s.text)
        if not run:
            continue
        seg_start = max(core.rfind(c) for c in TERMINATORS) + 1
        candidates = []
        for verbalizer in pattern.verbalizers:
            probe = f" {verbalizer} "
            search_from = seg_start
            while True:
                j = core.find(probe, search_from)
                if j == -1:
                    break
                right_start = j + len(probe)
                right = core[right_start:]
                if len(right) >= SENT_MIN:
                    if word_left:
                        wstart = _word_start(core, j)
                        if j - wstart >= WORD_MIN:
                            candidates.append((wstart, j, verbalizer, right_start))
                    else:
                        if j - seg_start >= SENT_MIN:
                            candidates.append((seg_start, j, verbalizer, right_start))
                search_from = j + 1
        if not candidates:
            continue
        if word_left:
            left_start, boundary, verbalizer, right_start = min(candidates)
        else:
            left_start, boundary, verbalizer, right_start = max(candidates, key=lambda c: c[1])
        left_name = "WORD" if word_left else "SENT1"
        right_name = "SENT" if word_left else "SENT2"
        left_text, lstart, lend = _strip_with_offset(core[left_start:boundary], s.start + left_start)
        right_text, rstart, rend = _strip_with_offset(core[right_start:] + run, s.start + right_start)
        out.append(
            OracleExample(
                pattern.sub_category,
                verbalizer,
                {left_name: (left_text, lstart, lend), right_name: (right_text, rstart, rend)},
            )
        )
    return out


def oracle_mine(patterns, body, sentences):
    """Mine with exhaustive per-pattern scans; same emission order contract
    as the production miner (pattern order, then position order)."""
    out = []
    for pattern in patterns:
        if "{VERBAL}," in pattern.pattern_template:
            out.extend(_oracle_boundary(pattern, body, sentences))
        else:
            out.extend(_oracle_infix(pattern, sentences))
    return out


def mined_key(example):
    """Comparable view of a production MinedExample."""
    slots = tuple(
        sorted((name, (slot.text, slot.start, slot.end)) for name, slot in example.slots.items())
    )
    return (example.sub_category, example.verbalizer_used, slots)


def oracle_key(example: OracleExample):
    return (example.sub_category, example.verbalizer, tuple(sorted(example.slots.items())))


ASCII_ALNUM = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")


def recount_keywords(text: str, keywords: set[str]) -> int:
    """Whole-word keyword recount by manual character walking."""
    folded = {k.lower() for k in keywords}
    found = set()
    word: list[str] = []
    for ch in text + " ":
        if ch in ASCII_ALNUM:
            word.append(ch)
        elif word:
            candidate = "".join(word).lower()
            if candidate in folded:
                found.add(candidate)
            word = []
    return len(found)


def naive_pair_merge(texts, vocab_size):
    """Desk-scale reference for the subword trainer: recount every pair from
    scratch each round instead of keeping incremental indexes."""
    from collections import Counter

    word_counts = Counter()
    for text in texts:
        word_counts.update(text.split())
    words = {w: list(w) for w in word_counts}
    pieces = set()
    for symbols in words.values():
        pieces.update(symbols)
    for _ in range(vocab_size):
        pair_counts = Counter()
        for w, symbols in words.items():
            for pair in zip(symbols, symbols[1:]):
                pair_counts[pair] += word_counts[w]
        if not pair_counts:
            break
        best_count = max(pair_counts.values())
        if best_count < 2:
            break
        best = min(p for p, c in pair_counts.items() if c == best_count)
        merged = best[0] + best[1]
        pieces.add(merged)
        for w, symbols in words.items():
            rewritten = []
            i = 0
            while i < len(symbols):
                if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == best:
                    rewritten.append(merged)
                    i += 2
                else:
                    rewritten.append(symbols[i])
                    i += 1
            words[w] = rewritten
    return pieces
