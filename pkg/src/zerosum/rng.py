"""Deterministic random streams.

All randomness in the library flows through `stream`, which derives an
independent Philox generator from a root seed plus a tuple of string/int
labels naming the purpose (e.g. ``stream(seed, "game")`` or
``stream(seed, "apsro", "qlearn", iteration)``). Philox is counter-based,
so streams are reproducible bit-for-bit across platforms and there is no
hidden global state.
"""

import hashlib

import numpy as np


def stream(seed: int, *labels) -> np.random.Generator:
    """Return a generator keyed by (seed, labels); same inputs, same stream."""
    material = repr((int(seed),) + tuple(labels)).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))
