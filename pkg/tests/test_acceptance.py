"""Acceptance suite: one test per release criterion, each printing a
single PASS/FAIL line (run with -s to see them as they complete)."""

import csv
import hashlib
import itertools
import json
import math
import time

import numpy as np
import pytest

from burnout_pipeline import cli
from burnout_pipeline.classifier import (
    confusion,
    evaluate,
    loss_and_grad,
    predict,
    report_from_counts,
    stratified_split,
    train,
)
from burnout_pipeline.features import ProviderProfile, silver_label
from burnout_pipeline.ingestion import WorkloadRecord
from burnout_pipeline.stress import CATEGORIES, StressLexicon, match_sentence
from burnout_pipeline.preprocess import split_sentences
from burnout_pipeline.synthgen import (
    make_planted_topics,
    planted_phi,
    sample_planted_docs,
)
from burnout_pipeline.topics import check_state_invariants, gibbs_fit

TAU_SENT = 0.75


def _verdict(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    """Two complete default-configuration pipeline runs on the seeded
    synthetic corpus, with the first run timed."""
    base = tmp_path_factory.mktemp("acceptance")
    runs = []
    elapsed = []
    for name in ("run1", "run2"):
        out = base / name
        t0 = time.time()
        rc = cli.main(["all", "--out", str(out), "--emit-sentences"])
        elapsed.append(time.time() - t0)
        assert rc == 0
        runs.append(out)
    return {"runs": runs, "elapsed": elapsed}


def test_lda_exact_micro_oracle():
    """Sampler marginals vs the enumerated collapsed posterior (2 docs,
    V=2, K=2): total variation < 0.05 over 10,000 seeded restarts, < 30 s."""
    docs = [[0, 0, 1], [1, 1, 0]]
    tokens = [(0, 0), (0, 0), (0, 1), (1, 1), (1, 1), (1, 0)]
    K = V = 2
    alpha = beta = 0.5

    def log_joint(z):
        n_dk = np.zeros((2, K))
        n_kw = np.zeros((K, V))
        n_k = np.zeros(K)
        for (d, w), k in zip(tokens, z):
            n_dk[d, k] += 1
            n_kw[k, w] += 1
            n_k[k] += 1
        lp = 0.0
        for d in range(2):
            for k in range(K):
                lp += math.lgamma(n_dk[d, k] + alpha)
        for k in range(K):
            for w in range(V):
                lp += math.lgamma(n_kw[k, w] + beta)
            lp -= math.lgamma(n_k[k] + V * beta)
        return lp

    states = list(itertools.product(range(K), repeat=6))
    lps = np.array([log_joint(z) for z in states])
    exact = np.exp(lps - lps.max())
    exact /= exact.sum()

    t0 = time.time()
    idx = {z: i for i, z in enumerate(states)}
    counts = np.zeros(len(states))
    for seed in range(10_000):
        state, _ = gibbs_fit(docs, K, alpha, beta, 25, seed=seed, V=V)
        counts[idx[tuple(int(x) for x in state.z)]] += 1
    runtime = time.time() - t0
    tv = 0.5 * float(np.abs(exact - counts / counts.sum()).sum())
    _verdict(f"LDA micro-oracle (TV={tv:.3f}, {runtime:.1f}s)",
             tv < 0.05 and runtime < 30.0)


def test_planted_topic_recovery():
    """3 planted topics over 60 pseudo-words, 300 docs, 1000 sweeps, seed 42:
    mean best-permutation cosine >= 0.85, < 60 s."""
    weights = make_planted_topics(3, 60)
    truth = planted_phi(weights)
    docs, _ = sample_planted_docs(300, weights, alpha=0.5, seed=42)
    t0 = time.time()
    _, model = gibbs_fit(docs, 3, alpha=0.1, beta=0.01, iterations=1000,
                         seed=42, V=60)
    runtime = time.time() - t0

    def cosine(a, b):
        return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

    best = -1.0
    for perm in itertools.permutations(range(3)):
        score = np.mean([cosine(model.phi[perm[k]], truth[k])
                         for k in range(3)])
        best = max(best, score)
    _verdict(f"planted-topic recovery (cosine={best:.3f}, {runtime:.1f}s)",
             best >= 0.85 and runtime < 60.0)


def test_count_conservation_and_normalization():
    """Counts stay conserved and phi/theta rows stay normalized to 1e-9
    after every sweep on randomized corpora."""
    ok = True
    for seed in range(5):
        rng = np.random.default_rng(seed)
        V = int(rng.integers(3, 15))
        K = int(rng.integers(2, 6))
        docs = [list(rng.integers(0, V, size=int(rng.integers(1, 25))))
                for _ in range(int(rng.integers(3, 20)))]

        def on_sweep(it, state, doc_lengths, V=V, K=K):
            check_state_invariants(state, doc_lengths, tol=0)
            phi = ((state.n_kw + state.beta) /
                   (state.n_k[:, None] + V * state.beta))
            theta = ((state.n_dk + state.alpha) /
                     (np.array(doc_lengths)[:, None] + K * state.alpha))
            assert np.max(np.abs(phi.sum(axis=1) - 1.0)) < 1e-9
            assert np.max(np.abs(theta.sum(axis=1) - 1.0)) < 1e-9

        try:
            gibbs_fit(docs, K, alpha=0.1, beta=0.01, iterations=10,
                      seed=seed, V=V, on_sweep=on_sweep)
        except AssertionError:
            ok = False
            break
    _verdict("count conservation and phi/theta normalization", ok)


def test_gradient_check():
    """Analytic gradient vs central finite differences (h=1e-5), relative
    error <= 1e-4 on 20 random instances."""
    h = 1e-5
    worst = 0.0
    rng = np.random.default_rng(1234)
    for _ in range(20):
        n = int(rng.integers(4, 40))
        d = int(rng.integers(1, 8))
        X = rng.normal(size=(n, d))
        y = rng.integers(0, 2, size=n).astype(float)
        w = rng.normal(size=d)
        b = float(rng.normal())
        l2 = float(rng.uniform(0.0, 3.0))
        active = np.ones(d)
        _, gw, gb = loss_and_grad(w, b, X, y, l2, active)
        num = np.zeros(d + 1)
        for j in range(d):
            wp, wm = w.copy(), w.copy()
            wp[j] += h
            wm[j] -= h
            lp, _, _ = loss_and_grad(wp, b, X, y, l2, active)
            lm, _, _ = loss_and_grad(wm, b, X, y, l2, active)
            num[j] = (lp - lm) / (2 * h)
        lp, _, _ = loss_and_grad(w, b + h, X, y, l2, active)
        lm, _, _ = loss_and_grad(w, b - h, X, y, l2, active)
        num[d] = (lp - lm) / (2 * h)
        ana = np.append(gw, gb)
        rel = (np.linalg.norm(ana - num) /
               max(np.linalg.norm(num), 1e-12))
        worst = max(worst, rel)
    _verdict(f"gradient check (max rel err={worst:.2e})", worst <= 1e-4)


def test_separable_sanity():
    """Train accuracy 1.0 on the 40-point 1-D separable set; loss
    monotonically non-increasing every epoch."""
    x = np.concatenate([np.linspace(-3, -1, 20), np.linspace(1, 3, 20)])
    y = np.concatenate([np.zeros(20), np.ones(20)])
    model = train(x[:, None], y, l2=0.01)
    _, flags = predict(model, x[:, None])
    acc = float(np.mean(flags == (y == 1)))
    monotone = bool(np.all(np.diff(model.loss_history) <= 1e-12))
    _verdict(f"separable sanity (acc={acc}, monotone={monotone})",
             acc == 1.0 and monotone)


def test_metrics_exhaustive_oracle():
    """Confusion counts and precision/recall/F1 match independent
    enumeration for every label/prediction pair of vectors of length <= 8."""
    ok = True
    for n in range(1, 9):
        for y_true in itertools.product((False, True), repeat=n):
            for y_pred in itertools.product((False, True), repeat=n):
                tp, fp, fn, tn = confusion(y_true, y_pred)
                e_tp = sum(t and p for t, p in zip(y_true, y_pred))
                e_fp = sum((not t) and p for t, p in zip(y_true, y_pred))
                e_fn = sum(t and (not p) for t, p in zip(y_true, y_pred))
                e_tn = n - e_tp - e_fp - e_fn
                if (tp, fp, fn, tn) != (e_tp, e_fp, e_fn, e_tn):
                    ok = False
                rep = report_from_counts(tp, fp, fn, tn)
                e_prec = e_tp / (e_tp + e_fp) if e_tp + e_fp else 0.0
                e_rec = e_tp / (e_tp + e_fn) if e_tp + e_fn else 0.0
                e_f1 = (2 * e_prec * e_rec / (e_prec + e_rec)
                        if e_prec + e_rec else 0.0)
                if abs(rep.precision - e_prec) > 1e-15 or \
                        abs(rep.recall - e_rec) > 1e-15 or \
                        abs(rep.f1 - e_f1) > 1e-15:
                    ok = False
            if not ok:
                break
    # evaluate() is the same arithmetic behind a trained model
    model = train(np.array([[-1.0]] * 3 + [[1.0]] * 3),
                  np.array([0.0, 0, 0, 1, 1, 1]))
    rep = evaluate(model, np.array([[-1.0], [1.0]]), [False, True])
    ok = ok and rep.f1 == 1.0
    _verdict("metrics exhaustive oracle (all vectors length <= 8)", ok)


def _dummy_profile(high, mentions):
    return ProviderProfile(
        provider_id="p", specialty="OTHER", note_count=3,
        mean_doc_confidence=0.5, neg_note_fraction=0.0,
        total_high_conf_neg_sentences=high, total_mentions=mentions,
        stress_mean_normalized=dict.fromkeys(CATEGORIES, 0.0),
        mean_theta=(0.5, 0.5), top2_topics=((0, 0.5), (1, 0.5)),
        workload=WorkloadRecord(provider_id="p"), workload_missing=1,
        linguistic={"word_count": 0, "sentence_count": 0,
                    "avg_token_length": 0, "type_token_ratio": 0,
                    "first_person_freq": 0, "third_person_freq": 0})


def test_labeling_rule_oracle(full_run):
    """silver_label equals a brute-force recount over raw sentence scores
    and lexicon matches for every provider; boundary thresholds hold."""
    out = full_run["runs"][0]
    provider_of = {}
    with open(out / "note_sentiment.jsonl", encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            provider_of[row["note_id"]] = row["provider_id"]

    high = {}
    with open(out / "sentence_scores.jsonl", encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            pid = provider_of[row["note_id"]]
            if row["label"] == "negative" and row["confidence"] >= TAU_SENT:
                high[pid] = high.get(pid, 0) + 1

    lexicon = StressLexicon.load()
    mentions = {}
    with open(out / "notes.jsonl", encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            pid = row["provider_id"]
            total = sum(
                sum(match_sentence(rs.text, lexicon).values())
                for rs in split_sentences(row["text"]))
            mentions[pid] = mentions.get(pid, 0) + total

    mismatches = 0
    n_providers = 0
    with open(out / "labels.csv", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            pid = row["provider_id"]
            n_providers += 1
            expect = high.get(pid, 0) >= 12 and mentions.get(pid, 0) >= 7
            if expect != (row["silver_label"] == "1"):
                mismatches += 1

    boundaries = (silver_label(_dummy_profile(12, 7)) is True
                  and silver_label(_dummy_profile(11, 7)) is False
                  and silver_label(_dummy_profile(12, 6)) is False)
    _verdict(f"labeling-rule oracle ({n_providers} providers, "
             f"{mismatches} mismatches)",
             mismatches == 0 and n_providers > 0 and boundaries)


def test_end_to_end_pinned_regression(full_run):
    """Default seeded run: F1 >= 0.80 vs planted truth, flag rate in
    [0.03, 0.07], < 5 min, byte-identical across two runs."""
    out1, out2 = full_run["runs"]
    runtime = full_run["elapsed"][0]

    truth = {}
    with open(out1 / "ground_truth.csv", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            truth[row["provider_id"]] = row["is_burnout"] == "1"
    flags = {}
    with open(out1 / "labels.csv", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            flags[row["provider_id"]] = row["silver_label"] == "1"
    flag_rate = sum(flags.values()) / len(flags)
    tp, fp, fn, tn = confusion([truth[p] for p in sorted(flags)],
                               [flags[p] for p in sorted(flags)])
    rep = report_from_counts(tp, fp, fn, tn)

    eval_truth = json.loads((out1 / "eval_truth.json").read_text())

    identical = True
    names1 = sorted(p.name for p in out1.iterdir())
    if names1 != sorted(p.name for p in out2.iterdir()):
        identical = False
    else:
        for name in names1:
            a = hashlib.sha256((out1 / name).read_bytes()).hexdigest()
            b = hashlib.sha256((out2 / name).read_bytes()).hexdigest()
            if a != b:
                identical = False
                break

    _verdict(
        f"end-to-end regression (F1={rep.f1:.3f}, truth-eval "
        f"F1={eval_truth['f1']:.3f}, flag rate={flag_rate:.3f}, "
        f"{runtime:.0f}s, identical={identical})",
        rep.f1 >= 0.80 and eval_truth["f1"] >= 0.80
        and 0.03 <= flag_rate <= 0.07 and runtime < 300.0 and identical)


def test_standardization_invariance(full_run):
    """Scaling any feature column by 1000 changes no predicted probability
    by more than 1e-9, on the real fused feature matrix."""
    out = full_run["runs"][0]
    with open(out / "profiles.csv", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = list(reader)
    X = np.array([[float(v) for v in r[2:-1]] for r in rows])
    y = np.array([float(r[-1]) for r in rows])
    base = train(X, y, l2=1.0)
    p0, _ = predict(base, X)
    worst = 0.0
    for j in range(X.shape[1]):
        X2 = X.copy()
        X2[:, j] *= 1000.0
        model = train(X2, y, l2=1.0)
        p1, _ = predict(model, X2)
        worst = max(worst, float(np.max(np.abs(p1 - p0))))
    _verdict(f"standardization invariance (max delta={worst:.2e})",
             worst <= 1e-9)


def test_stratified_split_contract():
    """90/10-class example: exactly 18+2 test members; a fixed seed
    reproduces the split byte-identically."""
    labels = {f"p{i:03d}": (i < 10) for i in range(100)}
    plan = stratified_split(labels, test_fraction=0.2, seed=0)
    pos = sum(labels[i] for i in plan.test_ids)
    neg = len(plan.test_ids) - pos
    again = stratified_split(labels, test_fraction=0.2, seed=0)
    payload = json.dumps({"train": plan.train_ids, "test": plan.test_ids})
    payload2 = json.dumps({"train": again.train_ids, "test": again.test_ids})
    _verdict(f"stratified split contract ({neg}+{pos} test members)",
             neg == 18 and pos == 2 and payload == payload2)
