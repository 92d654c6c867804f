"""Instance datasets, gold labelings, and the key-file format.

The instance format is line-delimited JSON (one record per line, ``#`` lines
are comments). Key files follow the ``lemma.pos instance_id label/weight ...``
convention used by sense-induction shared tasks.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

# instance_id -> {label: weight}; gold weights are positive, system weights
# are probabilities summing to 1 per instance.
Labeling = Dict[str, Dict[str, float]]

PROB_SUM_TOL = 1e-9


class ParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class POS(str, Enum):
    NOUN = "n"
    VERB = "v"
    ADJECTIVE = "j"

    @classmethod
    def parse(cls, text: str) -> "POS":
        try:
            return _POS_ALIASES[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown part of speech: {text!r}") from None


_POS_ALIASES = {
    "n": POS.NOUN,
    "noun": POS.NOUN,
    "v": POS.VERB,
    "verb": POS.VERB,
    "j": POS.ADJECTIVE,
    "a": POS.ADJECTIVE,
    "adj": POS.ADJECTIVE,
    "adjective": POS.ADJECTIVE,
}


class Tense(str, Enum):
    PAST = "past"
    PRESENT = "present"
    FUTURE = "future"
    OTHER = "other"


@dataclass(frozen=True, order=True)
class Target:
    lemma: str
    pos: POS

    def __post_init__(self):
        if not self.lemma:
            raise ValueError("target lemma must be non-empty")

    @property
    def key(self) -> str:
        return f"{self.lemma}.{self.pos.value}"

    @classmethod
    def from_key(cls, key: str) -> "Target":
        lemma, _, pos = key.rpartition(".")
        if not lemma:
            raise ValueError(f"target key must look like lemma.pos: {key!r}")
        return cls(lemma, POS.parse(pos))


@dataclass(frozen=True)
class Instance:
    instance_id: str
    target: Target
    tokens: Tuple[str, ...]
    target_index: int
    tense: Optional[Tense] = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"{self.instance_id}: tokens must be non-empty")
        if not 0 <= self.target_index < len(self.tokens):
            raise ValueError(
                f"{self.instance_id}: target_index {self.target_index} out of "
                f"range for {len(self.tokens)} tokens"
            )


@dataclass
class InstanceDataset:
    instances: List[Instance] = field(default_factory=list)
    gold: Labeling = field(default_factory=dict)

    def by_target(self) -> Dict[Target, List[Instance]]:
        groups: Dict[Target, List[Instance]] = defaultdict(list)
        for inst in self.instances:
            groups[inst.target].append(inst)
        return dict(groups)

    def targets(self) -> List[Target]:
        return sorted(self.by_target(), key=lambda t: t.key)


def parse_instances(text: str) -> InstanceDataset:
    """Parse a line-delimited instance file into a dataset.

    Gold senses, when present on records, are collected into the dataset's
    gold labeling. Raises ParseError for malformed lines, duplicate ids, and
    out-of-range target indices.
    """
    dataset = InstanceDataset()
    seen = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid JSON: {exc.msg}") from None
        if not isinstance(record, dict):
            raise ParseError(line_no, "record must be a JSON object")
        try:
            instance = _record_to_instance(record)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(line_no, str(exc)) from None
        if instance.instance_id in seen:
            raise ParseError(line_no, f"duplicate instance_id {instance.instance_id!r}")
        seen.add(instance.instance_id)
        dataset.instances.append(instance)

        gold = record.get("gold")
        if gold is not None:
            if not isinstance(gold, dict) or not gold:
                raise ParseError(line_no, "gold must be a non-empty object")
            senses = {}
            for label, weight in gold.items():
                weight = float(weight)
                if weight <= 0:
                    raise ParseError(line_no, f"gold weight for {label!r} must be > 0")
                senses[str(label)] = weight
            dataset.gold[instance.instance_id] = senses
    return dataset


def _record_to_instance(record: dict) -> Instance:
    missing = [f for f in ("instance_id", "lemma", "pos", "tokens", "target_index") if f not in record]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    tokens = record["tokens"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise ValueError("tokens must be a list of strings")
    tense = record.get("tense")
    return Instance(
        instance_id=str(record["instance_id"]),
        target=Target(str(record["lemma"]), POS.parse(str(record["pos"]))),
        tokens=tuple(tokens),
        target_index=int(record["target_index"]),
        tense=Tense(tense) if tense is not None else None,
    )


def read_key_file(text: str) -> Tuple[Labeling, Dict[str, Target]]:
    """Parse a key file into (labeling, instance_id -> Target).

    Each non-empty line is ``lemma.pos instance_id label/weight [...]``.
    """
    labeling: Labeling = {}
    targets: Dict[str, Target] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.strip().split(" ")
        if len(fields) < 3:
            raise ParseError(line_no, f"expected at least 3 fields, got {len(fields)}")
        try:
            target = Target.from_key(fields[0])
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None
        instance_id = fields[1]
        weights = {}
        for chunk in fields[2:]:
            label, sep, raw_weight = chunk.rpartition("/")
            if not sep or not label:
                raise ParseError(line_no, f"label/weight pair missing '/': {chunk!r}")
            try:
                weight = float(raw_weight)
            except ValueError:
                raise ParseError(line_no, f"non-numeric weight in {chunk!r}") from None
            weights[label] = weight
        if instance_id in labeling:
            raise ParseError(line_no, f"duplicate instance_id {instance_id!r}")
        labeling[instance_id] = weights
        targets[instance_id] = target
    return labeling, targets


def write_key_file(assignment: Labeling, targets: Dict[str, Target]) -> str:
    """Render a labeling as key-file text.

    Deterministic: instances in lexicographic id order, labels in descending
    weight (ties by label), weights printed with 6 decimals.
    """
    lines = []
    for instance_id in sorted(assignment):
        if instance_id not in targets:
            raise ValueError(f"no target known for instance {instance_id!r}")
        weights = assignment[instance_id]
        if not weights:
            raise ValueError(f"instance {instance_id!r} has no labels")
        ordered = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
        pairs = " ".join(f"{label}/{weight:.6f}" for label, weight in ordered)
        lines.append(f"{targets[instance_id].key} {instance_id} {pairs}")
    return "\n".join(lines) + "\n" if lines else ""


def renormalize(labeling: Labeling) -> Labeling:
    """Scale each instance's weights to sum to 1, dropping zero entries."""
    out: Labeling = {}
    for instance_id, weights in labeling.items():
        total = sum(weights.values())
        if total <= 0:
            raise ValueError(f"instance {instance_id!r} has non-positive total weight")
        out[instance_id] = {l: w / total for l, w in weights.items() if w > 0}
    return out
