"""Counter-based SplitMix64 streams.

Every variate is a pure function of (key, counter), so any trial of a
Monte-Carlo study can be regenerated in isolation. Uniforms use the top 53
bits; Gaussians come from the polar (Marsaglia) method.

Constants:
    GOLDEN  = 0x9E3779B97F4A7C15  (Weyl increment, also the substream stride)
    MIX1    = 0xBF58476D1CE4E5B9
    MIX2    = 0x94D049BB133111EB
    KEYSALT = 0x5851F42D4C957F2D  (keeps the raw seed away from counter 0)
"""
from __future__ import annotations

import zlib

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
KEYSALT = 0x5851F42D4C957F2D

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)


def mix64(z):
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U30)) * np.uint64(MIX1)
        z = (z ^ (z >> _U27)) * np.uint64(MIX2)
    return z ^ (z >> _U31)


def substream(seed: int, trial: int) -> int:
    """Key of trial `trial` under master seed `seed`: seed xor trial*GOLDEN."""
    return (int(seed) ^ ((int(trial) * GOLDEN) & MASK64)) & MASK64


def label_key(seed: int, label: str) -> int:
    """Stable key for a named consumer (e.g. a verification check)."""
    h = zlib.crc32(label.encode("utf-8"))
    return substream(seed, h + 1)


class CounterRNG:
    """Stream of 64-bit words x_i = mix64(base + i*GOLDEN), i = 1, 2, ..."""

    def __init__(self, key: int):
        self.key = int(key) & MASK64
        self._base = int(mix64(np.array([self.key ^ KEYSALT], dtype=np.uint64))[0])
        self._counter = 0

    @property
    def counter(self) -> int:
        return self._counter

    def words(self, size: int) -> np.ndarray:
        idx = np.arange(self._counter + 1, self._counter + 1 + size, dtype=np.uint64)
        self._counter += size
        with np.errstate(over="ignore"):
            return mix64(np.uint64(self._base) + idx * np.uint64(GOLDEN))

    def uniform(self, size: int) -> np.ndarray:
        """Uniforms on [0, 1) with 53-bit resolution."""
        return (self.words(size) >> _U11).astype(np.float64) * (2.0 ** -53)

    def normal(self, size: int) -> np.ndarray:
        out = np.empty(size)
        filled = 0
        while filled < size:
            need = size - filled
            pairs = int(need / 2 / 0.78) + 8
            u = 2.0 * self.uniform(2 * pairs) - 1.0
            v, u = u[1::2], u[0::2]
            s = u * u + v * v
            ok = (s > 0.0) & (s < 1.0)
            u, v, s = u[ok], v[ok], s[ok]
            fac = np.sqrt(-2.0 * np.log(s) / s)
            z = np.empty(2 * u.size)
            z[0::2] = u * fac
            z[1::2] = v * fac
            take = min(need, z.size)
            out[filled:filled + take] = z[:take]
            filled += take
        return out


def normals(seed: int, size: int) -> np.ndarray:
    return CounterRNG(seed).normal(size)


def uniforms(seed: int, size: int) -> np.ndarray:
    return CounterRNG(seed).uniform(size)


def normal_batch(seed: int, trials: int, size: int, first_trial: int = 0) -> np.ndarray:
    """(trials, size) array; row t is normals(substream(seed, first_trial + t), size)."""
    out = np.empty((trials, size))
    for t in range(trials):
        out[t] = CounterRNG(substream(seed, first_trial + t)).normal(size)
    return out
