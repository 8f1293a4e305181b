"""Seeded random streams keyed by ``(master_seed, index...)``.

Every random draw in the package flows from one master seed. Independent
tasks get child streams through ``SeedSequence`` spawn keys, so the output of
replication ``r`` does not depend on which worker ran it.
"""

import numpy as np

DESIGN = 0
REPLICATION = 1
EVALUATION = 2


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``(seed, *key)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


def replication_stream(seed: int, r: int) -> np.random.Generator:
    return stream(seed, REPLICATION, r)


def design_stream(seed: int) -> np.random.Generator:
    return stream(seed, DESIGN)


def evaluation_stream(seed: int) -> np.random.Generator:
    return stream(seed, EVALUATION)
