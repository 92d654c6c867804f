"""Sampling bag-of-lemma representatives from an instance's two distributions.

Every draw gets its own uniform variate derived by hashing
(seed, instance_id, representative index, draw index) with BLAKE2b-64 and
mapping the digest to [0, 1). Sampling is therefore reproducible bit-for-bit
no matter how instances are ordered or parallelized.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .substitutes import SubstituteDistribution


@dataclass(frozen=True)
class SamplingConfig:
    k: int = 20                # representatives per instance
    samples_per_side: int = 4  # draws from each direction per representative
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.samples_per_side < 1:
            raise ValueError("samples_per_side must be >= 1")


@dataclass(frozen=True)
class Representative:
    """Multiset of sampled lemmas; the first half comes from the forward
    distribution, the second half from the backward one."""

    instance_id: str
    words: Tuple[str, ...]


def derived_uniform(seed: int, instance_id: str, rep: int, draw: int) -> float:
    """Stable hash (seed, instance_id, rep, draw) -> uniform in [0, 1)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(instance_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(struct.pack("<QQQ", seed & 0xFFFFFFFFFFFFFFFF, rep, draw))
    return int.from_bytes(h.digest(), "little") / 2.0**64


def _draw(cum: np.ndarray, u: float) -> int:
    idx = int(np.searchsorted(cum, u, side="right"))
    return min(idx, len(cum) - 1)


def sample_representatives(
    fwd: SubstituteDistribution,
    bwd: SubstituteDistribution,
    cfg: SamplingConfig,
) -> List[Representative]:
    """Draw cfg.k representatives of size 2*samples_per_side (with
    replacement, duplicates kept)."""
    if not fwd.entries or not bwd.entries:
        raise ValueError(f"empty distribution for instance {fwd.instance_id!r}")
    if fwd.instance_id != bwd.instance_id:
        raise ValueError("forward/backward distributions belong to different instances")

    instance_id = fwd.instance_id
    ell = cfg.samples_per_side
    sides = []
    for dist in (fwd, bwd):
        words = [w for w, _ in dist.entries]
        cum = np.cumsum([p for _, p in dist.entries])
        sides.append((words, cum))

    reps = []
    for r in range(cfg.k):
        sampled = []
        for d in range(2 * ell):
            words, cum = sides[0] if d < ell else sides[1]
            u = derived_uniform(cfg.seed, instance_id, r, d)
            sampled.append(words[_draw(cum, u)])
        reps.append(Representative(instance_id, tuple(sampled)))
    return reps
