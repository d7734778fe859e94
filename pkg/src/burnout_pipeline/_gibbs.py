"""Numba kernels for the collapsed Gibbs sampler.

The sampler walks documents in a canonical order fixed by the caller; each
document consumes its own splitmix64 stream, so results are independent of
input ordering and of any parallel scheduling upstream.
"""

import numba
import numpy as np

_INV_2_53 = 1.0 / (1 << 53)


@numba.njit(cache=True, inline="always")
def _next_u64(states, d):
    s = states[d] + np.uint64(0x9E3779B97F4A7C15)
    states[d] = s
    z = s
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True, inline="always")
def _next_uniform(states, d):
    return (_next_u64(states, d) >> np.uint64(11)) * _INV_2_53


@numba.njit(cache=True)
def init_assignments(tokens, doc_starts, z, n_dk, n_kw, n_k, states):
    K = n_dk.shape[1]
    for d in range(doc_starts.shape[0] - 1):
        for t in range(doc_starts[d], doc_starts[d + 1]):
            u = _next_uniform(states, d)
            k = int(u * K)
            if k >= K:
                k = K - 1
            z[t] = k
            n_dk[d, k] += 1
            n_kw[k, tokens[t]] += 1
            n_k[k] += 1


@numba.njit(cache=True)
def sweep(tokens, doc_starts, z, n_dk, n_kw, n_k, states, alpha, beta):
    K = n_dk.shape[1]
    V = n_kw.shape[1]
    vbeta = V * beta
    probs = np.empty(K, dtype=np.float64)
    for d in range(doc_starts.shape[0] - 1):
        for t in range(doc_starts[d], doc_starts[d + 1]):
            w = tokens[t]
            k = z[t]
            n_dk[d, k] -= 1
            n_kw[k, w] -= 1
            n_k[k] -= 1
            total = 0.0
            for j in range(K):
                p = (n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + vbeta)
                total += p
                probs[j] = total
            u = _next_uniform(states, d) * total
            k = 0
            while k < K - 1 and probs[k] <= u:
                k += 1
            z[t] = k
            n_dk[d, k] += 1
            n_kw[k, w] += 1
            n_k[k] += 1
