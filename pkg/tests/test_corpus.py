import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsense.corpus import (
    POS,
    Instance,
    ParseError,
    Target,
    parse_instances,
    read_key_file,
    renormalize,
    write_key_file,
)


def record(**kwargs):
    base = {
        "instance_id": "sound.n.1",
        "lemma": "sound",
        "pos": "n",
        "tokens": ["I", "liked", "the", "sound", "of", "the", "harpsichord", "."],
        "target_index": 3,
    }
    base.update(kwargs)
    return json.dumps(base)


class TestParseInstances:
    def test_running_example(self):
        ds = parse_instances(record())
        (inst,) = ds.instances
        assert inst.target == Target("sound", POS.NOUN)
        assert inst.target_index == 3
        assert inst.tokens[3] == "sound"
        assert ds.gold == {}

    def test_empty_input(self):
        assert parse_instances("").instances == []

    def test_comments_and_blank_lines_skipped(self):
        text = "# header\n\n" + record() + "\n"
        assert len(parse_instances(text).instances) == 1

    def test_target_index_out_of_range(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_instances(record(target_index=99))

    def test_duplicate_id(self):
        text = record() + "\n" + record()
        with pytest.raises(ParseError, match="duplicate"):
            parse_instances(text)

    def test_malformed_json_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_instances(record() + "\nnot json")

    def test_missing_field(self):
        rec = json.loads(record())
        del rec["lemma"]
        with pytest.raises(ParseError, match="lemma"):
            parse_instances(json.dumps(rec))

    def test_gold_collected(self):
        ds = parse_instances(record(gold={"sense1": 0.75, "sense2": 0.25}))
        assert ds.gold["sound.n.1"] == {"sense1": 0.75, "sense2": 0.25}

    def test_gold_weight_positive(self):
        with pytest.raises(ParseError, match="> 0"):
            parse_instances(record(gold={"sense1": 0.0}))

    def test_tense_parsed(self):
        ds = parse_instances(record(lemma="become", pos="v", tense="past"))
        assert ds.instances[0].tense.value == "past"

    def test_grouping_by_target(self):
        lines = [
            record(),
            record(instance_id="sound.n.2"),
            record(instance_id="become.v.1", lemma="become", pos="v"),
        ]
        groups = parse_instances("\n".join(lines)).by_target()
        assert len(groups[Target("sound", POS.NOUN)]) == 2
        assert len(groups[Target("become", POS.VERB)]) == 1


class TestKeyFile:
    def test_read_two_clusters(self):
        labeling, targets = read_key_file("sound.n sound.n.12 cluster.1/0.75 cluster.3/0.25")
        assert labeling["sound.n.12"] == {"cluster.1": 0.75, "cluster.3": 0.25}
        assert targets["sound.n.12"] == Target("sound", POS.NOUN)

    def test_read_single_sense(self):
        labeling, _ = read_key_file("become.v become.v.3 sense4/1.0")
        assert labeling["become.v.3"] == {"sense4": 1.0}

    def test_read_no_labels_is_error(self):
        with pytest.raises(ParseError, match="line 1"):
            read_key_file("sound.n sound.n.12")

    def test_read_missing_separator(self):
        with pytest.raises(ParseError, match="'/'"):
            read_key_file("sound.n sound.n.12 cluster1")

    def test_read_non_numeric_weight(self):
        with pytest.raises(ParseError, match="non-numeric"):
            read_key_file("sound.n sound.n.12 c1/x")

    def test_write_example(self):
        text = write_key_file(
            {"sound.n.12": {"c1": 0.75, "c3": 0.25}},
            {"sound.n.12": Target("sound", POS.NOUN)},
        )
        assert text == "sound.n sound.n.12 c1/0.750000 c3/0.250000\n"

    def test_write_single_cluster(self):
        text = write_key_file({"x.1": {"c0": 1.0}}, {"x.1": Target("x", POS.VERB)})
        assert text == "x.v x.1 c0/1.000000\n"

    def test_write_without_target_is_error(self):
        with pytest.raises(ValueError, match="no target"):
            write_key_file({"x.1": {"c0": 1.0}}, {})

    def test_write_deterministic_ordering(self):
        assignment = {"b.2": {"z": 0.5, "a": 0.5}, "a.1": {"c": 1.0}}
        targets = {"b.2": Target("b", POS.NOUN), "a.1": Target("a", POS.NOUN)}
        text = write_key_file(assignment, targets)
        # instances sorted by id; equal weights ordered by label
        assert text.splitlines() == ["a.n a.1 c/1.000000", "b.n b.2 a/0.500000 z/0.500000"]
        assert text == write_key_file(dict(reversed(assignment.items())), targets)


@st.composite
def assignments(draw):
    n = draw(st.integers(1, 6))
    out = {}
    for i in range(n):
        m = draw(st.integers(1, 4))
        raw = [draw(st.floats(0.01, 1.0)) for _ in range(m)]
        total = sum(raw)
        out[f"w.n.{i}"] = {f"c{j}": v / total for j, v in enumerate(raw)}
    return out


class TestRoundTrip:
    @settings(max_examples=200)
    @given(assignments())
    def test_write_read_identity_within_5e7(self, assignment):
        targets = {i: Target("w", POS.NOUN) for i in assignment}
        labeling, _ = read_key_file(write_key_file(assignment, targets))
        assert set(labeling) == set(assignment)
        for instance_id, weights in assignment.items():
            parsed = labeling[instance_id]
            assert set(parsed) == set(weights)
            for label, w in weights.items():
                assert abs(parsed[label] - w) <= 5e-7

    def test_byte_identical_across_runs(self):
        assignment = {"a.1": {"c0": 1 / 3, "c1": 2 / 3}}
        targets = {"a.1": Target("a", POS.ADJECTIVE)}
        assert write_key_file(assignment, targets) == write_key_file(assignment, targets)


def test_renormalize():
    out = renormalize({"a": {"x": 2.0, "y": 6.0}})
    assert out["a"] == {"x": 0.25, "y": 0.75}
    with pytest.raises(ValueError):
        renormalize({"a": {"x": 0.0}})


def test_instance_invariants():
    with pytest.raises(ValueError):
        Instance("i", Target("w", POS.NOUN), (), 0)
    with pytest.raises(ValueError):
        Instance("i", Target("w", POS.NOUN), ("a",), 1)
    with pytest.raises(ValueError):
        Target("", POS.NOUN)
