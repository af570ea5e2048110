"""Reproducible random streams.

All randomness in the package flows from an :class:`RngSeed`.  A seed is a
pair ``(seed, stream)`` of unsigned 64-bit integers; the pair alone fixes
the generated sequence, so work can be split over processes or threads
without any shared generator state.
"""

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSeed:
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def child(self, *keys):
        """Derive an independent sub-stream identified by ``keys``.

        The derivation is a hash of ``(seed, stream, *keys)``, so
        ``child(3)`` is the same stream no matter how many other children
        were created before it.
        """
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *keys))
        return RngSeed(self.seed, int(ss.generate_state(1, np.uint64)[0]))

    def generator(self):
        """Return a fresh counter-based (Philox) generator for this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))


def as_seed(seed):
    """Coerce ``None``/int/RngSeed into an :class:`RngSeed`."""
    if isinstance(seed, RngSeed):
        return seed
    if seed is None:
        return RngSeed()
    return RngSeed(int(seed))
