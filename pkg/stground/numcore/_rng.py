import numpy as np


class Rng:
    """
    Seeded random stream backed by numpy's Philox counter-based generator.

    Identical `(seed, keys)` give identical streams on every platform.
    `child(*keys)` derives an independent stream without consuming this one.
    Single-owner: do not share an instance between threads.
    """

    def __init__(self, seed, *keys):
        self.seed = int(seed) % 2**64
        self.keys = tuple(int(k) for k in keys)
        sequence = np.random.SeedSequence([self.seed, *self.keys])
        self._gen = np.random.Generator(np.random.Philox(sequence))

    def __repr__(self):
        return f"Rng(seed={self.seed}, keys={self.keys})"

    def child(self, *keys):
        return Rng(self.seed, *self.keys, *keys)

    def normal(self, size=None, scale=1.0):
        return self._gen.normal(0.0, scale, size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size=size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def random(self, size=None):
        return self._gen.random(size=size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def unit_vectors(self, n, dim):
        v = self._gen.normal(0.0, 1.0, size=(n, dim))
        return v / np.linalg.norm(v, axis=1, keepdims=True)
