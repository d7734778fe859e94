"""Deterministic, order-independent random streams.

Every stochastic component derives an independent stream from a global seed
plus a string key (provider id, note index, doc id, ...), so generation order
never influences sampled values and parallel execution stays reproducible.
"""

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def stable_key64(*parts):
    """Stable 64-bit key from arbitrary string/int parts (sha256-based)."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")


def stream(seed, *parts):
    """Independent numpy Generator for (seed, *parts)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & MASK64, stable_key64(*parts)]))


def splitmix64(state):
    """One splitmix64 step; returns (new_state, output). Pure-integer, portable."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, (z ^ (z >> 31)) & MASK64


def doc_stream_state(seed, doc_key64):
    """Initial splitmix64 state for a per-document sampling stream."""
    _, mixed = splitmix64((int(seed) ^ doc_key64) & MASK64)
    return mixed


def choose_weighted(rng, cum_weights):
    """Integer-only weighted choice: cum_weights is a cumulative int array."""
    total = int(cum_weights[-1])
    u = int(rng.integers(0, total))
    return int(np.searchsorted(cum_weights, u, side="right"))
