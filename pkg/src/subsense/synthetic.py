"""Pseudoword dataset generator.

Merges two unambiguous word families (fruit and instrument contexts) under a
single artificial token, yielding a corpus to train the n-gram backend on and
an instance file with free gold senses: the standard construction for testing
sense induction without annotated data.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .corpus import POS, Target, write_key_file

SLOT = "{}"

SENSES: Dict[str, Tuple[List[str], List[str]]] = {
    "fruit": (
        [
            "i ate the {} this morning .",
            "she bought a ripe {} at the market .",
            "he picked a fresh {} from the tree .",
            "they sliced the {} for breakfast .",
            "the {} tasted sweet and juicy .",
        ],
        ["apple", "pear", "plum", "peach", "mango", "cherry", "grape", "melon"],
    ),
    "music": (
        [
            "the {} player performed at the concert .",
            "he tuned the old {} before the show .",
            "she practiced the {} every evening .",
            "we heard the {} in the hall .",
            "a famous {} teacher visited the school .",
        ],
        ["piano", "violin", "cello", "flute", "harp", "oboe", "trumpet", "guitar"],
    ),
}


@dataclass
class SyntheticData:
    pseudoword: str
    corpus: List[List[str]]  # tokenized sentences for LM training
    instances_text: str      # line-delimited instance records with gold
    gold_text: str           # key-file rendering of the planted senses


def make_synthetic(seed: int = 0, instances_per_sense: int = 30) -> SyntheticData:
    rng = random.Random(seed)
    pseudoword = SENSES["fruit"][1][0] + SENSES["music"][1][0]

    corpus = []
    for templates, words in SENSES.values():
        for template in templates:
            for word in words:
                corpus.append(template.format(word).split())
    rng.shuffle(corpus)

    drafts = []
    for sense, (templates, _) in SENSES.items():
        for _ in range(instances_per_sense):
            drafts.append((sense, rng.choice(templates)))
    rng.shuffle(drafts)

    records = []
    gold = {}
    targets = {}
    target = Target(pseudoword, POS.NOUN)
    for idx, (sense, template) in enumerate(drafts):
        tokens = template.format(pseudoword).split()
        instance_id = f"{target.key}.{idx}"
        records.append(
            json.dumps(
                {
                    "instance_id": instance_id,
                    "lemma": pseudoword,
                    "pos": "n",
                    "tokens": tokens,
                    "target_index": tokens.index(pseudoword),
                    "gold": {sense: 1.0},
                },
                ensure_ascii=False,
            )
        )
        gold[instance_id] = {sense: 1.0}
        targets[instance_id] = target

    return SyntheticData(
        pseudoword=pseudoword,
        corpus=corpus,
        instances_text="\n".join(records) + "\n",
        gold_text=write_key_file(gold, targets),
    )
