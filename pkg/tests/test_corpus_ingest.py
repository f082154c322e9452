from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqplumb.corpus_ingest import (
    IngestError,
    Requirement,
    RequirementSet,
    SplitSpec,
    load_requirements,
    requirement_to_dict,
    split_requirements,
    tokenize_and_tag,
)


def _synthetic_set(n: int) -> RequirementSet:
    reqs = tuple(
        Requirement(id=f"s-{i}", text=f"The system shall do task {i}.") for i in range(1, n + 1)
    )
    return RequirementSet(name="s", requirements=reqs)


class TestLoadRequirements:
    def test_one_per_line(self, fixtures_dir):
        rs = load_requirements(fixtures_dir / "uavmini_requirements.txt")
        assert len(rs) == 14
        assert rs.requirements[0].id == "uavmini_requirements-1"
        assert rs.requirements[0].text.startswith("The drone shall hover")

    def test_99_line_file(self, tmp_path):
        p = tmp_path / "uav.txt"
        p.write_text("\n".join(f"req number {i}" for i in range(99)), "utf-8")
        assert len(load_requirements(p)) == 99

    def test_456_entry_numbered_file(self, tmp_path):
        p = tmp_path / "bas.txt"
        p.write_text("\n".join(f"{i}. statement {i}" for i in range(1, 457)), "utf-8")
        rs = load_requirements(p, "numbered-list")
        assert len(rs) == 456
        assert rs.requirements[0].text == "statement 1"

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("", "utf-8")
        with pytest.raises(IngestError, match="no requirements found"):
            load_requirements(p)

    def test_malformed_numbering_names_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("1. first\nsecond without number\n", "utf-8")
        with pytest.raises(IngestError, match="line 2"):
            load_requirements(p, "numbered-list")

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestError, match="unreadable"):
            load_requirements(tmp_path / "nope.txt")


class TestTokenizeAndTag:
    def test_drone_sentence(self, pos_lexicon):
        req = tokenize_and_tag(Requirement(id="r-1", text="The drone shall hover."), pos_lexicon)
        assert [t.pos for t in req.tokens] == ["DET", "NOUN", "VERB", "VERB"]
        assert [t.norm for t in req.tokens] == ["the", "drone", "shall", "hover"]

    def test_flight_pattern(self, pos_lexicon):
        req = tokenize_and_tag(Requirement(id="r-2", text="flight pattern"), pos_lexicon)
        assert [t.pos for t in req.tokens] == ["NOUN", "NOUN"]

    def test_unknown_word_defaults_to_noun(self, pos_lexicon):
        req = tokenize_and_tag(Requirement(id="r-3", text="the gizmoflux beeps"), pos_lexicon)
        assert req.tokens[1].pos == "NOUN"

    def test_suffix_heuristics(self, pos_lexicon):
        req = tokenize_and_tag(
            Requirement(id="r-4", text="navigation equipment quickly"), pos_lexicon
        )
        assert req.tokens[0].pos == "NOUN"  # -tion
        assert req.tokens[2].pos == "OTHER"  # -ly

    def test_idempotent(self, pos_lexicon):
        req = tokenize_and_tag(Requirement(id="r-5", text="The drone shall hover."), pos_lexicon)
        again = tokenize_and_tag(req, pos_lexicon)
        assert again == req

    def test_empty_text_rejected(self, pos_lexicon):
        with pytest.raises(IngestError):
            tokenize_and_tag(Requirement(id="r-6", text="   "), pos_lexicon)


class TestSplit:
    def test_uav_sizes(self):
        known, holdout = split_requirements(_synthetic_set(99), SplitSpec(0.7, seed=1))
        assert (len(known), len(holdout)) == (70, 29)

    def test_bas_sizes(self):
        known, holdout = split_requirements(_synthetic_set(456), SplitSpec(0.7, seed=1))
        assert (len(known), len(holdout)) == (320, 136)

    def test_deterministic(self):
        rs = _synthetic_set(40)
        spec = SplitSpec(0.7, seed=123, run_index=4)
        a = split_requirements(rs, spec)
        b = split_requirements(rs, spec)
        assert a == b
        # byte-identical serialization
        ser = lambda pair: json.dumps(
            [[requirement_to_dict(r) for r in s.requirements] for s in pair], sort_keys=True
        )
        assert ser(a) == ser(b)

    def test_run_index_changes_partition(self):
        rs = _synthetic_set(40)
        a = split_requirements(rs, SplitSpec(0.7, seed=5, run_index=0))
        b = split_requirements(rs, SplitSpec(0.7, seed=5, run_index=1))
        assert a[0].ids() != b[0].ids()

    def test_bad_ratio(self):
        with pytest.raises(IngestError):
            split_requirements(_synthetic_set(10), SplitSpec(ratio=1.0))

    @settings(max_examples=50, deadline=None)
    @given(n=st.integers(2, 200), ratio=st.floats(0.05, 0.95),
           seed=st.integers(0, 2**32 - 1), run=st.integers(0, 50))
    def test_partition_property(self, n, ratio, seed, run):
        rs = _synthetic_set(n)
        known, holdout = split_requirements(rs, SplitSpec(ratio, seed, run))
        k_ids, h_ids = set(known.ids()), set(holdout.ids())
        assert k_ids | h_ids == set(rs.ids())
        assert not (k_ids & h_ids)
        assert len(known) == math.ceil(ratio * n)
        assert len(known) >= 1
