"""Counter-based random streams and Gaussian sampling primitives.

Every stochastic routine in the package draws from an :class:`RngStream`,
a thin wrapper around the Philox counter-based generator keyed by
``(master seed, stream index)``.  Stream assignment is therefore
independent of how work is split across workers: realization ``k`` always
sees the same numbers no matter which process runs it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "complex_gaussians", "real_gaussians"]


@dataclass(frozen=True)
class RngStream:
    """A reproducible, independently-keyed random stream.

    Identical ``(seed, stream)`` pairs produce bit-identical sequences;
    distinct pairs are statistically independent by the Philox block
    cipher construction.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if not 0 <= self.stream < 2**64:
            raise ValueError("stream index must fit in 64 bits")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream]))

    def child(self, stream: int) -> "RngStream":
        """Stream with the same master seed and a different index."""
        return RngStream(self.seed, stream)


def complex_gaussians(gen: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Iid circular complex Gaussians with ``<|z|^2> = variance``.

    Sampled in polar (Box-Muller) form ``sqrt(-v log u1) * exp(2 pi i u2)``,
    which keeps the draw-count per entry fixed regardless of shape.
    """
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if variance == 0:
        return np.zeros(shape, dtype=np.complex128)
    u1 = gen.random(shape)
    u2 = gen.random(shape)
    # 1 - u1 lies in (0, 1], so the log never sees zero
    radius = np.sqrt(-variance * np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def real_gaussians(gen: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Iid real Gaussians with the given variance, via Box-Muller."""
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if variance == 0:
        return np.zeros(shape)
    u1 = gen.random(shape)
    u2 = gen.random(shape)
    return np.sqrt(-2.0 * variance * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
