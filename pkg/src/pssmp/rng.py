"""Counter-based random streams for the Monte Carlo kernels.

Every sample or path gets its own stream whose key is derived by hashing
``(seed, stream_index)``.  A draw is ``mix_a(key ^ mix_b(counter))``, so the
numbers a path sees depend only on its key and on how many draws it has
consumed, never on block sizes or on how work is split across threads.

The state of a stream is a length-2 ``uint64`` array ``[key, counter]``.  All
samplers below are numba kernels that advance that array in place.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_F1 = np.uint64(0xFF51AFD7ED558CCD)
_F2 = np.uint64(0xC4CEB9FE1A85EC53)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_S33 = np.uint64(33)
_ONE = np.uint64(1)
_TWO53 = 1.0 / 9007199254740992.0

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# pure-Python reference hash (used for seed derivation and as a test oracle)
# ---------------------------------------------------------------------------

def _py_mix_a(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _py_mix_b(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 33)) * 0xFF51AFD7ED558CCD) & _MASK64
    z = ((z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53) & _MASK64
    return z ^ (z >> 33)


def derive_key(seed: int, stream: int) -> int:
    """Hash ``(seed, stream)`` to the 64-bit key of an independent stream."""
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream index must be nonnegative")
    h = _py_mix_a((seed & _MASK64) + 0x9E3779B97F4A7C15)
    return _py_mix_a((h ^ _py_mix_b(stream & _MASK64)) + 0x9E3779B97F4A7C15)


def derive_keys(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """Keys for streams ``offset .. offset + n - 1`` as a ``uint64`` array."""
    return _derive_keys(np.uint64(seed & _MASK64), np.uint64(offset), n)


@nb.njit(cache=True)
def _derive_keys(seed, offset, n):
    out = np.empty(n, dtype=np.uint64)
    h = mix_a(seed + _GOLDEN)
    for i in range(n):
        out[i] = mix_a((h ^ mix_b(offset + np.uint64(i))) + _GOLDEN)
    return out


def reference_draws(key: int, n: int, start: int = 0) -> list[int]:
    """Raw 64-bit outputs of a stream, computed in pure Python."""
    return [_py_mix_a(key ^ _py_mix_b(c)) for c in range(start, start + n)]


class RngState:
    """Single-owner handle on one counter-based stream."""

    __slots__ = ("state",)

    def __init__(self, key: int, counter: int = 0):
        self.state = np.array([key & _MASK64, counter & _MASK64], dtype=np.uint64)

    @classmethod
    def from_seed(cls, seed: int, stream: int = 0) -> "RngState":
        return cls(derive_key(seed, stream))

    @property
    def key(self) -> int:
        return int(self.state[0])

    @property
    def counter(self) -> int:
        return int(self.state[1])

    def uniform(self, size: int) -> np.ndarray:
        return _fill_uniform(self.state, size)

    def normal(self, size: int) -> np.ndarray:
        return _fill_normal(self.state, size)

    def __repr__(self) -> str:
        return f"RngState(key={self.key:#018x}, counter={self.counter})"


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@nb.njit(inline="always")
def mix_a(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(inline="always")
def mix_b(z):
    z = (z ^ (z >> _S33)) * _F1
    z = (z ^ (z >> _S33)) * _F2
    return z ^ (z >> _S33)


@nb.njit(inline="always")
def next_u64(state):
    c = state[1]
    state[1] = c + _ONE
    return mix_a(state[0] ^ mix_b(c))


@nb.njit(inline="always")
def uniform(state):
    """Uniform on the open interval (0, 1)."""
    return (float(next_u64(state) >> _S11) + 0.5) * _TWO53


@nb.njit
def std_normal(state):
    u1 = uniform(state)
    u2 = uniform(state)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@nb.njit
def std_exponential(state):
    return -math.log(uniform(state))


@nb.njit
def poisson(state, lam):
    if lam <= 0.0:
        return 0
    if lam < 30.0:
        # sequential inversion
        p = math.exp(-lam)
        cdf = p
        u = uniform(state)
        k = 0
        while u > cdf:
            k += 1
            p *= lam / k
            cdf += p
            if p < 1e-300 and cdf >= 1.0 - 1e-16:
                break
        return k
    # transformed rejection with squeeze (Hormann 1993)
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = uniform(state) - 0.5
        v = uniform(state)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - math.lgamma(k + 1.0)):
            return int(k)


@nb.njit
def std_gamma(state, shape):
    """Gamma(shape, 1) by Marsaglia and Tsang, boosted for shape < 1."""
    if shape < 1.0:
        g = std_gamma(state, shape + 1.0)
        return g * uniform(state) ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = std_normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = uniform(state)
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v
        if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v


@nb.njit
def std_stable(state, alpha, skew):
    """Chambers-Mallows-Stuck draw of S_alpha(1, skew, 0), alpha != 1."""
    v = math.pi * (uniform(state) - 0.5)
    w = std_exponential(state)
    t = skew * math.tan(0.5 * math.pi * alpha)
    b = math.atan(t) / alpha
    s = (1.0 + t * t) ** (0.5 / alpha)
    av = alpha * (v + b)
    return (s * math.sin(av) / math.cos(v) ** (1.0 / alpha)
            * (math.cos(v - av) / w) ** ((1.0 - alpha) / alpha))


@nb.njit(cache=True)
def _fill_uniform(state, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = uniform(state)
    return out


@nb.njit(cache=True)
def _fill_normal(state, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = std_normal(state)
    return out


@nb.njit(cache=True)
def fill_gamma(state, shape, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = std_gamma(state, shape)
    return out


@nb.njit(cache=True)
def fill_poisson(state, lam, n):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = poisson(state, lam)
    return out


@nb.njit(cache=True)
def fill_stable(state, alpha, skew, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = std_stable(state, alpha, skew)
    return out
