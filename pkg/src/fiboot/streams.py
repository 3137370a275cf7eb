"""Deterministic random-stream derivation.

All randomness in the package flows through ``make_stream``.  A stream is a
numpy ``Generator`` backed by the Philox 4x64 counter-based bit generator,
keyed by a master seed plus an arbitrary tuple of non-negative integers.
Standard normals come from numpy's ziggurat sampler.  This pairing is part of
the reproducibility contract: identical (master, key) always yields the same
draws, on any platform, and distinct keys yield independent streams.  Do not
change the bit generator or the normal sampler without bumping the package
major version.

Stream keys used by the experiment harness:

    (r, 0)            data-generating path for replication r
    (r, method_id)    bootstrap draws for replication r under one method

so adding bootstrap methods or reordering replications never perturbs any
existing stream.
"""

from __future__ import annotations

import numpy as np


def make_stream(master: int, *key: int) -> np.random.Generator:
    """Return the Generator identified by (master, key)."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
