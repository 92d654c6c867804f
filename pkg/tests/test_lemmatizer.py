import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsense.lemmatizer import RuleLemmatizer, identity_lemmatizer, load_exception_table

lem = RuleLemmatizer()


class TestExamples:
    @pytest.mark.parametrize(
        "word,lemma",
        [
            ("booked", "book"),
            ("booking", "book"),
            ("sound", "sound"),
            ("became", "become"),
            ("was", "be"),
            ("sounds", "sound"),
            ("sounded", "sound"),
            ("Feel", "feel"),
            ("felt", "feel"),
            ("flies", "fly"),
            ("dies", "die"),
            ("classes", "class"),
            ("boxes", "box"),
            ("churches", "church"),
            ("goes", "go"),
            ("running", "run"),
            ("stopped", "stop"),
            ("hoped", "hope"),
            ("hopped", "hop"),
            ("making", "make"),
            ("opened", "open"),
            ("studied", "study"),
            ("settled", "settle"),
            ("caused", "cause"),
            ("organized", "organize"),
            ("agreed", "agree"),
            ("seeing", "see"),
            ("thought", "think"),
            ("men", "man"),
            ("children", "child"),
        ],
    )
    def test_lemma(self, word, lemma):
        assert lem(word) == lemma

    def test_unknown_shape_lowercased_unchanged(self):
        assert lem("Harpsichord") == "harpsichord"
        assert lem("</s>") == "</s>"
        assert lem("1990") == "1990"

    def test_base_forms_are_fixed_points(self):
        for word in ["need", "exceed", "bring", "spring", "class", "focus", "analysis", "sing", "thing"]:
            assert lem(word) == word


class TestIdempotence:
    def test_table_values_are_fixed_points(self):
        for value in set(lem.table.values()):
            assert lem(value) == value, value

    def test_table_keys_resolve_in_one_step(self):
        for key, value in lem.table.items():
            assert lem(key) == value
            assert lem(lem(key)) == lem(key)

    @settings(max_examples=500)
    @given(
        st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=10),
        st.sampled_from(["", "s", "es", "ies", "ed", "ied", "ing", "ting", "ning"]),
    )
    def test_idempotent_on_random_inflections(self, stem, suffix):
        word = stem + suffix
        assert lem(lem(word)) == lem(word)


def test_identity_lemmatizer():
    assert identity_lemmatizer("Booked") == "Booked"


def test_custom_table_plugs_in():
    custom = RuleLemmatizer(table={"foo": "bar"})
    assert custom("foo") == "bar"
    assert custom("booked") == "book"  # rules still apply


def test_load_exception_table_rejects_bad_lines():
    with pytest.raises(ValueError, match="line 2"):
        load_exception_table("good\tentry\nbad-line")
    table = load_exception_table("# comment\nwas\tbe\n")
    assert table == {"was": "be"}
