"""
Deterministic random streams.

A stream is identified by a (seed, stream_id) pair of unsigned 64-bit integers.
Generators are numpy PCG64 instances keyed through a SeedSequence whose spawn
key is the stream id, so equal pairs reproduce identical draws within one build
and there is no hidden global RNG state anywhere in the package.
"""

from dataclasses import dataclass

import numpy as np

from privacy.errors import InvalidDataError

_U64 = 2**64


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise InvalidDataError(f"{name} must be an integer, got {value!r}")
            if not 0 <= int(value) < _U64:
                raise InvalidDataError(f"{name} must fit in 64 unsigned bits, got {value}")
        # normalise numpy integers so equality and hashing behave
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream_id", int(self.stream_id))


def root_seed(seed: int) -> RngSeed:
    return RngSeed(seed=seed, stream_id=0)


def derive_stream(seed: RngSeed, child_id: int) -> RngSeed:
    """Return the child stream `child_id` of `seed`.

    The child id is mixed with the parent's stream id through SeedSequence's
    hashing, so siblings with different ids (and the parent itself) draw from
    unrelated streams.
    """
    if child_id < 0:
        raise InvalidDataError(f"child_id must be non-negative, got {child_id}")
    mixer = np.random.SeedSequence(entropy=seed.seed, spawn_key=(seed.stream_id, int(child_id)))
    stream_id = int(mixer.generate_state(1, dtype=np.uint64)[0])
    return RngSeed(seed=seed.seed, stream_id=stream_id)


def generator(seed: RngSeed) -> np.random.Generator:
    """Build the numpy Generator for a stream (PCG64, period 2**128)."""
    sequence = np.random.SeedSequence(entropy=seed.seed, spawn_key=(seed.stream_id,))
    return np.random.Generator(np.random.PCG64(sequence))
