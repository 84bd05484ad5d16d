"""Seeded, portable random streams.

All randomness in a simulation run flows through streams derived from the
scenario seed. Derivation hashes the seed together with a path of labels
(e.g. ("step", 17)) through SHA-256 and seeds a stdlib Mersenne Twister
with the first 8 bytes. CPython guarantees ``random.Random(seed).random()``
produces the same sequence across versions and platforms, which makes run
logs byte-reproducible. Distinct seeds or paths give unrelated streams.
"""

from __future__ import annotations

import hashlib
import random
from typing import Iterable, Sequence, TypeVar

T = TypeVar("T")


def derive_seed(seed: int, *path: object) -> int:
    """Collapse (seed, *path) into a 64-bit stream seed via SHA-256."""
    material = "/".join(str(part) for part in (seed, *path))
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(seed: int, *path: object) -> random.Random:
    """A fresh random stream for the given seed and derivation path."""
    return random.Random(derive_seed(seed, *path))


def sample_prefix(items: Sequence[T], k: int, rng: random.Random) -> list[T]:
    """Uniform sample of k distinct items, consuming exactly k draws.

    Fisher-Yates prefix shuffle: draw i swaps position i with a uniform
    position in [i, n). Items are not mutated.
    """
    arr = list(items)
    n = len(arr)
    if k > n:
        raise ValueError(f"cannot sample {k} items from {n}")
    for i in range(k):
        j = i + int(rng.random() * (n - i))
        if j >= n:  # guard against u*(n-i) rounding up at the boundary
            j = n - 1
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:k]


def choice_index(weights: Iterable[float], rng: random.Random) -> int:
    """Inverse-CDF draw over the given weights, consuming one draw."""
    u = rng.random()
    acc = 0.0
    last = 0
    for i, w in enumerate(weights):
        acc += w
        last = i
        if u < acc:
            return i
    return last
