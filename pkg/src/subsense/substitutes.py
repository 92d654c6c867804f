"""Building biLM queries and post-processing substitute distributions.

A target occurrence is represented by two distributions: what a forward LM
predicts at the target slot and what a backward LM predicts there. Queries
either use the plain context (target excluded) or a coordination pattern
built from the target word plus a conjunction, so that predictions reflect
the target itself as well as its context.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

from .corpus import POS, Instance

BOS = "<s>"
EOS = "</s>"

PROB_SUM_TOL = 1e-9

# Anything (word, pos_hint) -> lemma works as a lemmatizer.
Lemmatizer = Callable[[str, Optional[POS]], str]


class Direction(str, Enum):
    FORWARD = "fwd"
    BACKWARD = "bwd"


@dataclass(frozen=True)
class Query:
    """One LM request. Context tokens are in natural sentence order; the
    prediction slot follows the last token (forward) or precedes the first
    (backward)."""

    instance_id: str
    direction: Direction
    context_tokens: Tuple[str, ...]
    pattern_used: bool

    def __post_init__(self):
        if not self.context_tokens:
            raise ValueError("query context must be non-empty")

    @property
    def key(self) -> Tuple[str, "Direction", bool]:
        return (self.instance_id, self.direction, self.pattern_used)


@dataclass(frozen=True)
class SubstituteDistribution:
    instance_id: str
    direction: Direction
    entries: Tuple[Tuple[str, float], ...]  # descending probability

    def words(self) -> Tuple[str, ...]:
        return tuple(w for w, _ in self.entries)

    def total(self) -> float:
        return sum(p for _, p in self.entries)


def build_queries(instance: Instance, use_pattern: bool, conjunction: str = "and") -> Tuple[Query, Query]:
    """Return the (forward, backward) queries for one instance.

    Context-only mode excludes the target token on both sides. Pattern mode
    includes it and appends/prepends the conjunction, producing an incomplete
    "X and _" / "_ and X" coordination for the LM to complete.
    """
    tokens = instance.tokens
    i = instance.target_index
    if use_pattern:
        fwd_ctx = (BOS,) + tokens[: i + 1] + (conjunction,)
        bwd_ctx = (conjunction,) + tokens[i:] + (EOS,)
    else:
        fwd_ctx = (BOS,) + tokens[:i]
        bwd_ctx = tokens[i + 1 :] + (EOS,)
    fwd = Query(instance.instance_id, Direction.FORWARD, fwd_ctx, use_pattern)
    bwd = Query(instance.instance_id, Direction.BACKWARD, bwd_ctx, use_pattern)
    return fwd, bwd


def postprocess(
    raw: SubstituteDistribution,
    lemmatizer: Lemmatizer,
    cutoff: int = 50,
    pos_hint: Optional[POS] = None,
) -> SubstituteDistribution:
    """Cut a raw distribution to its top entries, lemmatize, merge duplicate
    lemmas, and renormalize to a proper distribution.

    Ordering is descending by merged probability, ties broken by lemma.
    Raises ValueError on an empty raw distribution (backend contract breach).
    """
    if not raw.entries:
        raise ValueError(f"empty raw distribution for {raw.instance_id} {raw.direction.value}")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    merged: dict = {}
    for word, prob in raw.entries[:cutoff]:
        lemma = lemmatizer(word, pos_hint)
        merged[lemma] = merged.get(lemma, 0.0) + prob
    total = sum(merged.values())
    if total <= 0:
        raise ValueError(f"non-positive probability mass for {raw.instance_id} {raw.direction.value}")
    entries = tuple(
        (lemma, prob / total)
        for lemma, prob in sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))
    )
    return SubstituteDistribution(raw.instance_id, raw.direction, entries)
