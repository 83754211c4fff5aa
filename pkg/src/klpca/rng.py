"""Counter-free, bit-reproducible Gaussian streams.

Each path ``p`` under seed ``s`` owns an independent xoshiro256** generator
whose 256-bit state is filled by four successive splitmix64 outputs started
from the key ``mix64(s ^ mix64(p))``. Generators for many paths advance in
lock-step as numpy ``uint64`` vectors, so the draws never depend on how the
work is scheduled.

splitmix64 (state += GOLDEN, then ``mix64``)::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

xoshiro256** step::

    out = rotl(s1 * 5, 7) * 9
    t = s1 << 17
    s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)

Uniforms are ``(out >> 11) * 2**-53`` in [0, 1); normals come from
Box-Muller on consecutive pairs ``(u1, u2)`` with ``r = sqrt(-2 log(1 - u1))``,
giving ``r cos(2 pi u2)`` then ``r sin(2 pi u2)``.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _u64(x):
    return np.uint64(x)


def mix64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):  # 0-d arrays warn on the intended wraparound
        z = (z ^ (z >> _u64(30))) * _M1
        z = (z ^ (z >> _u64(27))) * _M2
    return z ^ (z >> _u64(31))


def _rotl(x: np.ndarray, k: int) -> np.ndarray:
    return (x << _u64(k)) | (x >> _u64(64 - k))


class Xoshiro256:
    """Vector of independent xoshiro256** generators, one per substream."""

    def __init__(self, seed: int, stream_ids):
        ids = np.asarray(stream_ids, dtype=np.uint64)
        key = mix64(np.full(ids.shape, int(seed) & _MASK64, dtype=np.uint64) ^ mix64(ids))
        words = []
        state = key
        for _ in range(4):
            state = state + GOLDEN
            words.append(mix64(state))
        self.s = words

    def next_u64(self) -> np.ndarray:
        s0, s1, s2, s3 = self.s
        out = _rotl(s1 * _u64(5), 7) * _u64(9)
        t = s1 << _u64(17)
        s2 = s2 ^ s0
        s3 = s3 ^ s1
        s1 = s1 ^ s2
        s0 = s0 ^ s3
        s2 = s2 ^ t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return out

    def uniform(self) -> np.ndarray:
        return (self.next_u64() >> _u64(11)).astype(np.float64) * 2.0 ** -53


def gaussian_matrix(seed: int, n_streams: int, n_draws: int, first_stream: int = 0) -> np.ndarray:
    """``n_streams x n_draws`` standard normals; row ``i`` is substream
    ``first_stream + i``."""
    gen = Xoshiro256(seed, np.arange(first_stream, first_stream + n_streams, dtype=np.uint64))
    pairs = (n_draws + 1) // 2
    out = np.empty((n_streams, 2 * pairs))
    for j in range(pairs):
        u1 = gen.uniform()
        u2 = gen.uniform()
        r = np.sqrt(-2.0 * np.log1p(-u1))
        out[:, 2 * j] = r * np.cos(2.0 * np.pi * u2)
        out[:, 2 * j + 1] = r * np.sin(2.0 * np.pi * u2)
    return out[:, :n_draws]
