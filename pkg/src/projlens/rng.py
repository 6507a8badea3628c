"""Deterministic random streams.

Every stochastic routine draws from a Philox counter-based generator whose key
is a hash of (seed, path). Distinct paths give independent streams, and a task
split across workers reproduces the serial stream because each block owns its
own key instead of sharing one cursor. Normal variates go through the inverse
CDF, so one uniform maps to exactly one normal.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1


def derive_key(seed: int, *path: int) -> int:
    """Collapse (seed, path...) into a 64-bit Philox key."""
    words = [int(seed) & _MASK64] + [int(p) & _MASK64 for p in path]
    buf = struct.pack(f"<{len(words)}Q", *words)
    return int.from_bytes(hashlib.blake2b(buf, digest_size=8).digest(), "little")


def stream(seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *path)))


def uniforms(gen: np.random.Generator, size) -> np.ndarray:
    """Uniforms on the open interval (0, 1); the half-ulp shift keeps ndtri finite."""
    return gen.random(size) + 2.0 ** -54


def normals(gen: np.random.Generator, size) -> np.ndarray:
    return ndtri(uniforms(gen, size))
