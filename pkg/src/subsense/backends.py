"""Substitute backends and the line-delimited wire formats.

Two backends ship with the package: a hermetic interpolated n-gram model for
tests and synthetic experiments, and a file backend replaying distributions
produced offline (e.g. by the neural bridge). Both are deterministic and safe
for concurrent predict calls.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Protocol, Sequence, Tuple

import numpy as np

from .corpus import ParseError
from .substitutes import BOS, EOS, Direction, Query, SubstituteDistribution

DistKey = Tuple[str, Direction, bool]
Entries = Tuple[Tuple[str, float], ...]


class LMBackend(Protocol):
    def predict(self, query: Query) -> SubstituteDistribution: ...


class NGramBackend:
    """Interpolated add-k n-gram biLM over a tokenized corpus.

    The forward model conditions on the last ``order - 1`` context tokens;
    the backward model is trained on reversed sentences and conditions on the
    first ``order - 1`` tokens after the slot. Probabilities mix all orders
    down to unigrams with equal weight, add-k smoothed at each level, so the
    distribution over the vocabulary sums to one for any context. Boundary
    markers are ordinary vocabulary tokens.
    """

    def __init__(self, corpus: Iterable[Sequence[str]], order: int = 3, add_k: float = 0.01, top_k: int = 100):
        if order < 2:
            raise ValueError("order must be >= 2")
        sentences = [tuple(s) for s in corpus]
        if not sentences:
            raise ValueError("training corpus is empty")
        self.order = order
        self.add_k = add_k
        self.top_k = top_k

        marked = [(BOS,) + s + (EOS,) for s in sentences]
        vocab = sorted({tok for s in marked for tok in s})
        self.vocab = vocab
        self._index = {w: i for i, w in enumerate(vocab)}
        self._fwd = self._count(marked)
        self._bwd = self._count([s[::-1] for s in marked])

    def _count(self, sentences):
        # counts[m][prefix] = Counter of next words, prefix length m (0..order-1)
        counts = [defaultdict(Counter) for _ in range(self.order)]
        for sent in sentences:
            for i, word in enumerate(sent):
                for m in range(self.order):
                    if i >= m:
                        counts[m][sent[i - m : i]][word] += 1
        return counts

    def _context(self, query: Query) -> Tuple[Tuple[str, ...], list]:
        n = self.order - 1
        if query.direction is Direction.FORWARD:
            ctx = tuple(query.context_tokens[-n:])
            return ctx, self._fwd
        ctx = tuple(query.context_tokens[:n])[::-1]
        return ctx, self._bwd

    def _scores(self, query: Query) -> np.ndarray:
        ctx, counts = self._context(query)
        V = len(self.vocab)
        k = self.add_k
        probs = np.zeros(V)
        for m in range(self.order):
            # contexts shorter than m never match a length-m prefix and fall
            # back to the add-k uniform term for that level
            prefix = ctx[-m:] if m and m <= len(ctx) else ()
            nexts = counts[m].get(prefix) if (m == 0 or len(prefix) == m) else None
            level = np.zeros(V)
            total = 0
            if nexts is not None:
                total = sum(nexts.values())
                for word, c in nexts.items():
                    level[self._index[word]] = c
            probs += (level + k) / (total + k * V)
        return probs / self.order

    def predict(self, query: Query) -> SubstituteDistribution:
        probs = self._scores(query)
        top = min(self.top_k, len(self.vocab))
        # sort by descending probability, ties by word, deterministically
        order = np.lexsort((np.array(self.vocab), -probs))[:top]
        entries = tuple((self.vocab[i], float(probs[i])) for i in order)
        return SubstituteDistribution(query.instance_id, query.direction, entries)

    def full_distribution(self, query: Query) -> Dict[str, float]:
        """Test hook: the complete normalized distribution over the vocabulary."""
        probs = self._scores(query)
        return {w: float(probs[self._index[w]]) for w in self.vocab}


def train_ngram_backend(
    corpus: Iterable[Sequence[str]], order: int = 3, add_k: float = 0.01, top_k: int = 100
) -> NGramBackend:
    return NGramBackend(corpus, order=order, add_k=add_k, top_k=top_k)


class FileBackend:
    """Replays raw distributions stored in the wire format, keyed by
    (instance_id, direction, pattern_used)."""

    def __init__(self, distributions: Dict[DistKey, Entries]):
        self._dists = distributions

    @classmethod
    def load(cls, path) -> "FileBackend":
        with open(path, encoding="utf-8") as fh:
            return cls(read_distribution_file(fh.read()))

    def predict(self, query: Query) -> SubstituteDistribution:
        key = query.key
        if key not in self._dists:
            raise LookupError(
                f"no stored distribution for instance={key[0]!r} "
                f"direction={key[1].value} pattern={key[2]}"
            )
        return SubstituteDistribution(query.instance_id, query.direction, self._dists[key])

    def __len__(self) -> int:
        return len(self._dists)


def read_distribution_file(text: str) -> Dict[DistKey, Entries]:
    """Parse distribution wire format: one JSON record per line with fields
    instance_id, direction ("fwd"/"bwd"), pattern (bool), entries ([[word, prob], ...],
    descending by probability)."""
    dists: Dict[DistKey, Entries] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid JSON: {exc.msg}") from None
        try:
            key = (
                str(record["instance_id"]),
                Direction(record["direction"]),
                bool(record["pattern"]),
            )
            entries = tuple((str(w), float(p)) for w, p in record["entries"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(line_no, f"bad distribution record: {exc}") from None
        if not entries:
            raise ParseError(line_no, "record has no entries")
        if any(p <= 0 for _, p in entries):
            raise ParseError(line_no, "probabilities must be positive")
        if any(entries[i][1] < entries[i + 1][1] for i in range(len(entries) - 1)):
            raise ParseError(line_no, "entries must be in descending probability order")
        if key in dists:
            raise ParseError(line_no, f"duplicate key {key}")
        dists[key] = entries
    return dists


def write_distribution_file(records: Iterable[Tuple[DistKey, Entries]]) -> str:
    lines = []
    for (instance_id, direction, pattern), entries in records:
        lines.append(
            json.dumps(
                {
                    "instance_id": instance_id,
                    "direction": direction.value,
                    "pattern": pattern,
                    "entries": [[w, p] for w, p in entries],
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n" if lines else ""


def write_query_file(queries: Iterable[Query]) -> str:
    """Query wire format consumed by the scoring bridge: one JSON record per
    line with instance_id, direction, pattern, context_tokens."""
    lines = []
    for q in queries:
        lines.append(
            json.dumps(
                {
                    "instance_id": q.instance_id,
                    "direction": q.direction.value,
                    "pattern": q.pattern_used,
                    "context_tokens": list(q.context_tokens),
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(lines) + "\n" if lines else ""


def read_query_file(text: str) -> List[Query]:
    queries = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            queries.append(
                Query(
                    instance_id=str(record["instance_id"]),
                    direction=Direction(record["direction"]),
                    context_tokens=tuple(str(t) for t in record["context_tokens"]),
                    pattern_used=bool(record["pattern"]),
                )
            )
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid JSON: {exc.msg}") from None
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(line_no, f"bad query record: {exc}") from None
    return queries
