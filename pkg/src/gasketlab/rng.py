"""Counter-based random number generation.

Every random bit in the package derives from a 64-bit master seed through
the splitmix64 finalizer applied to (seed, counter) pairs.  Because each
draw is a pure hash of its counter, sampling is order-independent: a site,
trial or subcommand always sees the same bits no matter how the work is
chunked or parallelized.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U53 = np.uint64(11)
_INV53 = 1.0 / float(1 << 53)


def _finalize(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def hash_u64(seed: int, counters) -> np.ndarray:
    """splitmix64 of ``seed + (counter+1) * golden`` for each counter."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (c + np.uint64(1)) * _GAMMA
    return _finalize(state)


def uniform01(seed: int, counters) -> np.ndarray:
    """Uniform doubles in [0, 1), one per counter, from the top 53 bits."""
    return (hash_u64(seed, counters) >> _U53).astype(np.float64) * _INV53


def derive_seed(master: int, label: str, index: int = 0) -> int:
    """Deterministic sub-seed for a named stream (and optional index).

    Used by the CLI and the Monte Carlo drivers so that one master seed
    fixes every subsidiary stream.  The label is folded in byte by byte,
    which keeps the derivation stable across platforms.
    """
    state = np.uint64(master & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        for b in label.encode("utf-8"):
            state = _finalize((state + np.uint64(b + 1) * _GAMMA).reshape(1))[0]
        state = _finalize((state + np.uint64(index + 1) * _GAMMA).reshape(1))[0]
    return int(state)


def normals(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """n standard normal deviates via Box-Muller over counter pairs."""
    k = np.arange(offset, offset + n, dtype=np.uint64)
    u1 = uniform01(seed, 2 * k)
    u2 = uniform01(seed, 2 * k + np.uint64(1))
    r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(2.0 * np.pi * u2)
