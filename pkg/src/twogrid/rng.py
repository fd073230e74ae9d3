"""Deterministic pseudo-random generation for reproducible experiments.

The generator is a SplitMix64 stream feeding Box-Muller normal pairs.
Both algorithms are pinned so that a given seed produces bit-identical
matrices on every run and platform.
"""

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """SplitMix64 stream with 53-bit uniform and Gaussian output.

    Each Gaussian pair consumes two uniforms; complex matrix entries
    consume one pair each (real part first), filled row by row.
    """

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * 2.0 ** -53

    def normal_pair(self):
        """One Box-Muller pair of independent standard normals."""
        u1 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        r = np.sqrt(-2.0 * np.log(u1))
        return r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)

    def normals(self, count: int) -> np.ndarray:
        out = np.empty(count)
        i = 0
        while i < count:
            a, b = self.normal_pair()
            out[i] = a
            i += 1
            if i < count:
                out[i] = b
                i += 1
        return out

    def complex_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Matrix with independent standard normal real and imaginary parts."""
        flat = self.normals(2 * rows * cols)
        return flat[0::2].reshape(rows, cols) + 1j * flat[1::2].reshape(rows, cols)

    def real_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.normals(rows * cols).reshape(rows, cols)
