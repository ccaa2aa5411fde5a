"""Deterministic RNG substreams.

Every stochastic stage derives its generator from a master seed plus a
string path, so independent stages (train/test scenario streams, per-sample
dataset substreams, per-seed training runs) never share state and the output
of a stage does not depend on how many workers produced it.
"""

import hashlib

import numpy as np


def _path_entropy(*path):
    """Hash a label path to a stable 128-bit integer."""
    text = "/".join(str(p) for p in path)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


def substream(seed, *path):
    """Generator for (seed, *path); identical arguments give identical streams."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, _path_entropy(*path)])))


def spawn_seed(seed, *path):
    """64-bit child seed for (seed, *path), for handing to other components."""
    return int(substream(seed, *path).integers(0, 2**63 - 1))
