"""Seeded, splittable random streams.

Every random draw in the package goes through :func:`make_rng` so that a
(seed, stream-key) pair fully determines the output.  The generator is
numpy's PCG64 fed by a SeedSequence; ``RNG_ALGORITHM`` is written into
every artifact that depends on randomness.
"""

import numpy as np

RNG_ALGORITHM = "numpy.PCG64+SeedSequence"

# stream keys; keep stable, they are part of the reproducibility contract
STREAM_ER = 1
STREAM_GW = 2
STREAM_ORACLE = 3
STREAM_PROBE = 4


def make_rng(seed, *keys):
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def metadata(seed=None):
    return {"rng": RNG_ALGORITHM, "seed": seed}
