"""Key-index samplers for the lookup benchmarks.

Both samplers draw ranks in [1, n].  The Zipf sampler uses the classic
spliced inverse-CDF construction: a uniform draw is mapped through
precomputed constants so rank 1 has probability 1/zeta(n, theta), rank 2
follows, and the remaining mass lands on the analytic tail.
"""

from __future__ import annotations

import random

from .errors import RangeError


class UniformSampler:
    def __init__(self, n: int, seed: int):
        if n < 1:
            raise RangeError("sampler needs a positive domain, got %d" % n)
        self.n = n
        self._rng = random.Random(seed)

    def draw(self) -> int:
        return self._rng.randrange(1, self.n + 1)


class ZipfSampler:
    """Zipf(theta) over ranks 1..n, default skew 0.99."""

    def __init__(self, n: int, seed: int, theta: float = 0.99):
        if n < 1:
            raise RangeError("sampler needs a positive domain, got %d" % n)
        if not 0.0 < theta < 1.0:
            raise RangeError("theta must lie in (0, 1), got %r" % theta)
        self.n = n
        self.theta = theta
        self._rng = random.Random(seed)
        self.zetan = sum(1.0 / (i ** theta) for i in range(1, n + 1))
        self.alpha = 1.0 / (1.0 - theta)
        zeta2 = sum(1.0 / (i ** theta) for i in range(1, min(n, 2) + 1))
        self.eta = ((1.0 - (2.0 / n) ** (1.0 - theta))
                    / (1.0 - zeta2 / self.zetan))

    def probability(self, rank: int) -> float:
        """Exact model probability of a rank (for validation)."""
        if not 1 <= rank <= self.n:
            raise RangeError("rank %d outside [1, %d]" % (rank, self.n))
        return (1.0 / (rank ** self.theta)) / self.zetan

    def draw(self) -> int:
        u = self._rng.random()
        uz = u * self.zetan
        if uz < 1.0:
            return 1
        if uz < 1.0 + 0.5 ** self.theta:
            return 2
        rank = 1 + int(self.n * (self.eta * u - self.eta + 1.0) ** self.alpha)
        return min(rank, self.n)
