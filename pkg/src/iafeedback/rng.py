"""Deterministic named substreams derived from a single master seed.

Every stochastic routine in the library takes an explicit generator, and the
harness derives one independent substream per (cell, trial, purpose) so that
runs are reproducible bit-for-bit regardless of execution order.
"""

import hashlib

import numpy as np

__all__ = ["substream", "tag_to_int"]


def tag_to_int(tag) -> int:
    """Map an arbitrary tag (str or int) to a stable 64-bit integer."""
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(str(tag).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(master_seed: int, *tags) -> np.random.Generator:
    """Return a generator for the substream named by ``tags``.

    Same (master_seed, tags) always yields the same stream; different tag
    tuples yield statistically independent streams.
    """
    entropy = [int(master_seed)] + [tag_to_int(t) for t in tags]
    return np.random.default_rng(np.random.SeedSequence(entropy))
