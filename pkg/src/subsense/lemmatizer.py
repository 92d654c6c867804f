"""Rule-based English lemmatizer for normalizing LM-predicted substitutes.

Lookup order: exception table (bundled TSV, ``inflected<TAB>lemma``), then
suffix rules for plural/3sg -s, past -ed, and progressive -ing with
consonant-doubling and silent-e handling. Unknown shapes come back lowercased
and unchanged. Any callable ``(word, pos_hint) -> str`` can stand in for the
default rules.
"""

from __future__ import annotations

from importlib import resources
from typing import Dict, Optional

from .corpus import POS

_VOWELS = "aeiou"

# Trailing doubles kept intact when undoubling -ed/-ing stems.
_KEEP_DOUBLE = ("ll", "ss", "ff", "zz")


def _is_vowel(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return True
    # y acts as a vowel after a consonant ("try", "rhythm")
    return c == "y" and i > 0 and not _is_vowel(word, i - 1)


def _has_vowel(word: str) -> bool:
    return any(_is_vowel(word, i) for i in range(len(word)))


def _measure(word: str) -> int:
    """Number of vowel-consonant sequences, Porter style."""
    m = 0
    prev_vowel = False
    for i in range(len(word)):
        vowel = _is_vowel(word, i)
        if prev_vowel and not vowel:
            m += 1
        prev_vowel = vowel
    return m


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if word[-1] in "wxy":
        return False
    return (
        not _is_vowel(word, len(word) - 3)
        and _is_vowel(word, len(word) - 2)
        and not _is_vowel(word, len(word) - 1)
    )


def _restore_stem(stem: str) -> str:
    """Undo doubling / restore a silent e on an -ed/-ing stem."""
    if len(stem) >= 2 and stem[-1] == stem[-2] and not _is_vowel(stem, len(stem) - 1):
        if stem.endswith(_KEEP_DOUBLE):
            return stem
        return stem[:-1]
    # Endings that almost always imply a dropped e: lov+e, argu+e, danc+e,
    # organiz+e, rais+e, settl+e.
    if stem[-1] in "vucz":
        return stem + "e"
    if stem[-1] == "s" and not stem.endswith("ss"):
        return stem + "e"
    if stem[-1] == "l" and len(stem) >= 2 and not _is_vowel(stem, len(stem) - 2):
        return stem + "e"
    if _ends_cvc(stem) and _measure(stem) == 1:
        return stem + "e"
    return stem


def _strip_s(w: str) -> str:
    if w.endswith(("ss", "us", "is")):
        return w
    if w.endswith("ies"):
        return w[:-3] + "y" if len(w) > 4 else w[:-1]
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith(("xes", "zes", "ches", "shes", "oes")):
        return w[:-2]
    if len(w) > 3:
        return w[:-1]
    return w


def _strip_ed(w: str) -> str:
    if len(w) <= 4:
        return w
    if w.endswith("eed"):
        return w
    if w.endswith("ied"):
        return w[:-3] + "y"
    if w.endswith(("ued", "oed")):
        return w[:-1]
    stem = w[:-2]
    if not _has_vowel(stem):
        return w
    return _restore_stem(stem)


def _strip_ing(w: str) -> str:
    if len(w) < 5:
        return w
    if w.endswith("eing"):
        return w[:-3]
    stem = w[:-3]
    if not _has_vowel(stem):
        return w
    if stem.endswith("eed"):
        return stem  # feeding -> feed
    if stem.endswith("ed"):
        return stem + "e"  # preceding -> precede
    return _restore_stem(stem)


def _apply_rules(w: str) -> str:
    if w.endswith("s"):
        return _strip_s(w)
    if w.endswith("ed"):
        return _strip_ed(w)
    if w.endswith("ing"):
        return _strip_ing(w)
    return w


def load_exception_table(text: str) -> Dict[str, str]:
    table = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"exception table line {line_no}: expected inflected<TAB>lemma")
        table[parts[0].lower()] = parts[1].lower()
    return table


def _bundled_table() -> Dict[str, str]:
    text = resources.files("subsense.data").joinpath("irregular_forms.tsv").read_text("utf-8")
    return load_exception_table(text)


class RuleLemmatizer:
    """Default lemmatizer: exception table first, suffix rules second,
    iterated to a fixed point so the result is idempotent by construction
    (e.g. "founded" passes through "found" to the table entry "find").
    Terminates: every rewrite shortens the word or ends it in a letter no
    rule triggers on.
    """

    def __init__(self, table: Optional[Dict[str, str]] = None):
        self.table = _bundled_table() if table is None else dict(table)

    def __call__(self, word: str, pos_hint: Optional[POS] = None) -> str:
        w = word.lower()
        while True:
            if w in self.table:
                return self.table[w]
            stripped = _apply_rules(w)
            if stripped == w:
                return w
            w = stripped


def identity_lemmatizer(word: str, pos_hint: Optional[POS] = None) -> str:
    """Pass-through used when prediction lemmatization is disabled."""
    return word
