"""TF-IDF vocabulary selection and LDA via collapsed Gibbs sampling."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _gibbs
from .rng import doc_stream_state, stable_key64

log = logging.getLogger(__name__)

BIGRAM_JOIN = "_"
DEFAULT_GRID = [(a, b)
                for a in (0.05, 0.1, 0.5, 1.0)
                for b in (0.005, 0.01, 0.1)]


class TopicConfigError(Exception):
    pass


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple
    index: dict
    df: dict
    tfidf_weight: dict

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class LdaState:
    K: int
    alpha: float
    beta: float
    z: np.ndarray        # per-token assignments, canonical doc order
    n_dk: np.ndarray
    n_kw: np.ndarray
    n_k: np.ndarray
    rng_seed: int
    doc_ids: tuple       # canonical (sorted) order matching n_dk rows


@dataclass(frozen=True)
class TopicModel:
    phi: np.ndarray      # K x V
    theta: np.ndarray    # D x K, in the caller's input doc order
    coherence: tuple
    top_terms: tuple     # per topic, ranked term tuples


@dataclass(frozen=True)
class ProviderTopicProfile:
    provider_id: str
    mean_theta: tuple
    top2: tuple          # ((index, weight), (index, weight))


def _candidate_terms(tokens):
    terms = list(tokens)
    terms.extend(tokens[i] + BIGRAM_JOIN + tokens[i + 1]
                 for i in range(len(tokens) - 1))
    return terms


def build_vocabulary(notes, top_k, min_df=1):
    """Top-k unigrams and adjacent bigrams by corpus-count * ln(N/df)."""
    if top_k < 2:
        raise TopicConfigError("top_k must be >= 2")
    if not notes:
        raise TopicConfigError("empty corpus")
    tf = {}
    df = {}
    n_docs = len(notes)
    for note in notes:
        terms = _candidate_terms(list(note.all_tokens))
        for t in terms:
            tf[t] = tf.get(t, 0) + 1
        for t in set(terms):
            df[t] = df.get(t, 0) + 1
    candidates = [t for t in tf if df[t] >= min_df]
    weights = {t: tf[t] * math.log(n_docs / df[t]) for t in candidates}
    ranked = sorted(candidates, key=lambda t: (-weights[t], t))
    if len(ranked) < top_k:
        log.warning("only %d candidate terms for top_k=%d", len(ranked), top_k)
    kept = ranked[:top_k]
    return Vocabulary(
        terms=tuple(kept),
        index={t: i for i, t in enumerate(kept)},
        df={t: df[t] for t in kept},
        tfidf_weight={t: weights[t] for t in kept},
    )


def doc_to_sequence(tokens, vocab):
    """Encode cleaned tokens as vocabulary indices: every selected unigram,
    plus every selected adjacent bigram (emitted after its first token)."""
    seq = []
    tokens = list(tokens)
    for i, tok in enumerate(tokens):
        if tok in vocab.index:
            seq.append(vocab.index[tok])
        if i + 1 < len(tokens):
            bg = tok + BIGRAM_JOIN + tokens[i + 1]
            if bg in vocab.index:
                seq.append(vocab.index[bg])
    return seq


def check_state_invariants(state, doc_lengths, tol=0):
    """Count conservation after a sweep; raises AssertionError on violation."""
    assert np.all(state.n_dk >= 0) and np.all(state.n_kw >= 0)
    dk_sums = state.n_dk.sum(axis=1)
    assert np.all(np.abs(dk_sums - np.asarray(doc_lengths)) <= tol)
    kw_sums = state.n_kw.sum(axis=1)
    assert np.all(np.abs(kw_sums - state.n_k) <= tol)


def gibbs_fit(docs, K, alpha, beta, iterations, seed, V=None, doc_ids=None,
              on_sweep=None, coherence_top_m=10):
    """Collapsed Gibbs LDA fit.

    docs: list of term-index sequences. Empty docs are dropped with a
    warning; theta keeps one row per retained doc in input order. Per-doc
    RNG streams derive from (seed, doc_id), so document order is irrelevant.
    """
    if K < 1:
        raise TopicConfigError("K must be >= 1")
    if alpha <= 0 or beta <= 0:
        raise TopicConfigError("alpha and beta must be positive")
    if iterations < 1:
        raise TopicConfigError("iterations must be >= 1")
    if doc_ids is None:
        doc_ids = [str(i) for i in range(len(docs))]
    if len(doc_ids) != len(docs):
        raise TopicConfigError("doc_ids length mismatch")

    kept = [(str(did), list(doc)) for did, doc in zip(doc_ids, docs) if len(doc)]
    dropped = len(docs) - len(kept)
    if dropped:
        log.warning("dropping %d empty documents before LDA fit", dropped)
    if not kept:
        raise TopicConfigError("no nonempty documents")

    order = sorted(range(len(kept)), key=lambda i: kept[i][0])
    canon_ids = tuple(kept[i][0] for i in order)
    canon_docs = [kept[i][1] for i in order]

    if V is None:
        V = max(max(d) for d in canon_docs) + 1
    tokens = np.concatenate([np.asarray(d, dtype=np.int32) for d in canon_docs])
    if tokens.min() < 0 or tokens.max() >= V:
        raise TopicConfigError("token index out of vocabulary range")
    doc_starts = np.zeros(len(canon_docs) + 1, dtype=np.int64)
    doc_starts[1:] = np.cumsum([len(d) for d in canon_docs])

    z = np.zeros(tokens.shape[0], dtype=np.int32)
    n_dk = np.zeros((len(canon_docs), K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    states = np.array(
        [doc_stream_state(seed, stable_key64("lda-doc", did)) for did in canon_ids],
        dtype=np.uint64,
    )

    _gibbs.init_assignments(tokens, doc_starts, z, n_dk, n_kw, n_k, states)
    doc_lengths = [len(d) for d in canon_docs]
    state = LdaState(K, alpha, beta, z, n_dk, n_kw, n_k, int(seed), canon_ids)
    for it in range(iterations):
        _gibbs.sweep(tokens, doc_starts, z, n_dk, n_kw, n_k, states,
                     float(alpha), float(beta))
        if on_sweep is not None:
            on_sweep(it, state, doc_lengths)

    phi = (n_kw + beta) / (n_k[:, None] + V * beta)
    theta_canon = (n_dk + alpha) / (np.array(doc_lengths)[:, None] + K * alpha)

    # back to input order of the retained docs
    theta = np.empty_like(theta_canon)
    for canon_pos, kept_pos in enumerate(order):
        theta[kept_pos] = theta_canon[canon_pos]

    top_terms_idx = tuple(
        tuple(sorted(range(V), key=lambda w: (-phi[k, w], w))[:coherence_top_m])
        for k in range(K)
    )
    coh = umass_coherence_from_indices(top_terms_idx, [set(d) for d in canon_docs])
    model = TopicModel(phi=phi, theta=theta, coherence=tuple(coh),
                       top_terms=top_terms_idx)
    return state, model


def umass_coherence_from_indices(top_terms_per_topic, doc_sets):
    """UMass coherence given ranked term indices and per-doc term sets."""
    coh = []
    for ranked in top_terms_per_topic:
        total = 0.0
        for a in range(len(ranked)):
            for b in range(a + 1, len(ranked)):
                hi, lo = ranked[a], ranked[b]
                d_hi = sum(1 for s in doc_sets if hi in s)
                d_co = sum(1 for s in doc_sets if hi in s and lo in s)
                # a smoothed-in term may never occur in the corpus
                total += math.log((d_co + 1) / max(d_hi, 1))
        coh.append(total)
    return coh


def umass_coherence(model, docs, top_m):
    """Per-topic UMass coherence of the model's top_m terms over docs."""
    if top_m < 2:
        raise TopicConfigError("top_m must be >= 2")
    V = model.phi.shape[1]
    ranked = tuple(
        tuple(sorted(range(V), key=lambda w: (-model.phi[k, w], w))[:top_m])
        for k in range(model.phi.shape[0])
    )
    return umass_coherence_from_indices(ranked, [set(d) for d in docs])


def tune_hyperparameters(docs, K, grid, iterations, seed, doc_ids=None,
                         top_m=10):
    """Fit one model per (alpha, beta); return the pair with best mean
    coherence, earliest grid order winning ties."""
    if not grid:
        raise TopicConfigError("empty hyperparameter grid")
    best = None
    for alpha, beta in grid:
        _, model = gibbs_fit(docs, K, alpha, beta, iterations, seed,
                             doc_ids=doc_ids, coherence_top_m=top_m)
        mean_coh = sum(model.coherence) / len(model.coherence)
        if best is None or mean_coh > best[0]:
            best = (mean_coh, (alpha, beta))
    return best[1]


def provider_topic_profiles(theta, doc_providers):
    """Average theta rows per provider; record the two largest entries."""
    grouped = {}
    for row, pid in zip(theta, doc_providers):
        grouped.setdefault(pid, []).append(row)
    out = []
    for pid in sorted(grouped):
        mean = np.mean(grouped[pid], axis=0)
        ranked = sorted(range(len(mean)), key=lambda i: (-mean[i], i))
        top2 = tuple((i, float(mean[i])) for i in ranked[:2])
        out.append(ProviderTopicProfile(pid, tuple(float(x) for x in mean), top2))
    return out
