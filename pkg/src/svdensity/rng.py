"""Counter-based random streams keyed by ``(seed, stream_id)``.

Each stream is a Philox4x64 generator whose 128-bit key packs the seed in
the low word and the stream id in the high word.  Streams with different
ids share nothing, so a Monte Carlo run can hand one stream to every
sample and get the same numbers no matter how samples are spread over
workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "box_muller"]

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) <= _U64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {v!r}")

    @property
    def key(self) -> int:
        return (int(self.stream_id) << 64) | int(self.seed)

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=self.key))

    def uniforms(self, size: int) -> np.ndarray:
        """The first ``size`` doubles in [0, 1) of this stream."""
        return self.generator().random(size)

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


def box_muller(u: np.ndarray) -> np.ndarray:
    """Complex standard normals from consecutive uniform pairs.

    Pair ``(u[2k], u[2k+1])`` gives one complex number whose real and
    imaginary parts are independent N(0, 1).
    """
    u = np.asarray(u, dtype=float).reshape(-1, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    return radius * np.cos(angle) + 1j * (radius * np.sin(angle))
