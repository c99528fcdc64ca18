"""Master-seed splitting. Every random draw in the toolkit comes from a child
of one ``SeedSequence`` so results never depend on execution order."""

import numpy as np

DEFAULT_SEED = 20240917

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(0, 2**63 - 1)))
    return np.random.SeedSequence(DEFAULT_SEED if seed is None else int(seed))


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(as_seed_sequence(seed))


def split_seed(seed: SeedLike, n: int) -> list[np.random.SeedSequence]:
    """n independent child sequences, stable for a given master seed."""
    return as_seed_sequence(seed).spawn(n)
