from __future__ import annotations

from random import Random

import pytest

from rcgen.probes import (
    DEFAULT_STEM_TEMPLATE,
    ProbeItem,
    filter_probe_candidates,
    group_by_subject,
    is_instruction_like,
    item_rng,
    make_four_choice,
)


class TestFilter:
    def test_question_word_removed(self):
        assert is_instruction_like("What is the mechanism of injury?")
        assert is_instruction_like("what is it")  # case-insensitive

    def test_declarative_kept(self):
        assert not is_instruction_like("The enzyme responsible for X is")

    def test_blank_marker_removed(self):
        assert is_instruction_like("Fill the gap: A __ B")

    def test_suffixes_after_trimming(self):
        assert is_instruction_like("Pick the best option:  ")
        assert is_instruction_like("The dose is -")
        assert is_instruction_like("It ends with?")

    def test_question_word_must_be_whole_word(self):
        assert not is_instruction_like("Whatever the cause, the sign is")
        assert not is_instruction_like("Howell syndrome presents with")

    def test_filter_is_fixpoint(self):
        items = [
            ("What starts with a question word", ["a", "b"], 0),
            ("A declarative stem", ["a", "b"], 1),
            ("Ends with a colon:", ["a", "b"], 0),
            ("Has a __ blank", ["a", "b"], 1),
            ("Another declarative stem", ["a", "b"], 0),
        ]
        kept = filter_probe_candidates(items)
        assert [q for q, _, _ in kept] == ["A declarative stem", "Another declarative stem"]
        assert filter_probe_candidates(kept) == kept


class TestMakeFourChoice:
    POOL = [f"topic-{i}" for i in range(100)]

    def test_structure(self):
        item = make_four_choice("Some provision text.", "topic-7", self.POOL, Random(1))
        assert len(item.options) == 4
        assert len(set(item.options)) == 4
        assert item.options[item.gold_index] == "topic-7"
        assert item.stem == "Some provision text. The topic is"
        assert item.subject == "topic-7"

    def test_pool_of_exactly_four(self):
        pool = ["a", "b", "c", "d"]
        item = make_four_choice("Stem.", "b", pool, Random(5))
        assert sorted(item.options) == pool

    def test_pool_too_small(self):
        with pytest.raises(ValueError):
            make_four_choice("Stem.", "a", ["a", "b", "c"], Random(0))

    def test_gold_missing(self):
        with pytest.raises(ValueError):
            make_four_choice("Stem.", "zz", ["a", "b", "c", "d"], Random(0))

    def test_seed_determinism(self):
        first = make_four_choice("Stem.", "topic-3", self.POOL, Random(9))
        second = make_four_choice("Stem.", "topic-3", self.POOL, Random(9))
        assert first == second

    def test_item_rng_is_order_independent(self):
        a = make_four_choice("Stem.", "topic-3", self.POOL, item_rng(7, "item-42"))
        _ = make_four_choice("Stem.", "topic-5", self.POOL, item_rng(7, "item-41"))
        b = make_four_choice("Stem.", "topic-3", self.POOL, item_rng(7, "item-42"))
        assert a == b

    def test_custom_stem_template(self):
        item = make_four_choice("X", "topic-1", self.POOL, Random(0), stem_template="{CONTRACT} -> label")
        assert item.stem == "X -> label"


class TestGroupBySubject:
    def items(self, subjects):
        return [ProbeItem(stem=f"s{i}", options=["a", "b", "c", "d"], gold_index=0, subject=s) for i, s in enumerate(subjects)]

    def test_partition_sizes(self):
        groups = group_by_subject(self.items(["anatomy", "surgery", "anatomy"]))
        assert {k: len(v) for k, v in groups.items()} == {"anatomy": 2, "surgery": 1}

    def test_empty(self):
        assert group_by_subject([]) == {}

    def test_matches_two_pass_partition(self):
        subjects = [f"subject-{i % 21}" for i in range(500)]
        items = self.items(subjects)
        groups = group_by_subject(items)
        for subject in set(subjects):
            expected = [it for it in items if it.subject == subject]
            assert groups[subject] == expected
        assert sum(len(v) for v in groups.values()) == len(items)
