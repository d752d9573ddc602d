"""Named random substreams.

Every stochastic component draws from its own generator, derived from a
single top-level seed plus a stream name (and optional index).  Scenario
layout, exploration, and jammer decisions therefore stay reproducible
and independent: changing how often one stream is consumed never shifts
the others, and two runs that share a seed see identical scenarios even
when one of them has extra random consumers (e.g. a jammer) enabled.
"""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Generator for (seed, name, index); stable across runs and platforms."""
    if index < 0:
        raise ValueError("index must be >= 0")
    tag = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag, int(index)))
    return np.random.Generator(np.random.PCG64(ss))
