"""Stratified split, from-scratch L2 logistic regression, and evaluation."""

import logging
from dataclasses import dataclass

import numpy as np

from .rng import stream

log = logging.getLogger(__name__)


class TrainingError(Exception):
    pass


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    test_fraction: float
    train_ids: tuple
    test_ids: tuple


@dataclass(frozen=True)
class TrainedClassifier:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    l2: float
    epochs_run: int
    final_loss: float
    threshold: float = 0.5
    loss_history: tuple = ()


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    threshold: float


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def stratified_split(labels, test_fraction=0.2, seed=0):
    """Per-class shuffles with round(test_fraction * class size) test members,
    adjusted by +/-1 to hit the global test size; a class with >= 2 members
    never ends up with an empty test slice."""
    ids = sorted(labels)
    classes = sorted({labels[i] for i in ids})
    if len(classes) == 1:
        log.warning("single class present; falling back to a plain random split")
        shuffled = list(ids)
        stream(seed, "split", "all").shuffle(shuffled)
        n_test = _round_half_up(test_fraction * len(ids))
        return SplitPlan(seed, test_fraction,
                         tuple(sorted(shuffled[n_test:])),
                         tuple(sorted(shuffled[:n_test])))

    by_class = {c: [i for i in ids if labels[i] == c] for c in classes}
    global_test = _round_half_up(test_fraction * len(ids))
    n_test = {c: _round_half_up(test_fraction * len(by_class[c])) for c in classes}
    for c in classes:
        if n_test[c] == 0 and len(by_class[c]) >= 2:
            n_test[c] = 1

    # Nudge class allocations (largest classes first) onto the global size.
    order = sorted(classes, key=lambda c: (-len(by_class[c]), str(c)))
    while sum(n_test.values()) > global_test:
        for c in order:
            floor = 1 if len(by_class[c]) >= 2 else 0
            if sum(n_test.values()) > global_test and n_test[c] > floor:
                n_test[c] -= 1
    while sum(n_test.values()) < global_test:
        for c in order:
            if sum(n_test.values()) < global_test and n_test[c] < len(by_class[c]) - 1:
                n_test[c] += 1

    test_ids = []
    for c in classes:
        members = list(by_class[c])
        stream(seed, "split", str(c)).shuffle(members)
        test_ids.extend(members[:n_test[c]])
    test = set(test_ids)
    return SplitPlan(seed, test_fraction,
                     tuple(i for i in ids if i not in test),
                     tuple(sorted(test_ids)))


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_grad(w, b, X, y, l2, active):
    """Mean cross-entropy + (l2/2n)||w||^2 with unregularized bias.

    active masks out constant features, whose weights stay exactly 0.
    """
    n = X.shape[0]
    z = X @ w + b
    p = _sigmoid(z)
    eps = 1e-12
    ce = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    loss = ce + (l2 / (2 * n)) * float(w @ w)
    resid = p - y
    gw = (X.T @ resid) / n + (l2 / n) * w
    gw = gw * active
    gb = float(np.mean(resid))
    return loss, gw, gb


def train(X, y, l2=1.0, max_epochs=1000, tol=1e-6, threshold=0.5):
    """Full-batch gradient descent with Armijo backtracking line search."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise TrainingError("feature/label shape mismatch")
    if not np.all(np.isfinite(X)):
        raise TrainingError("non-finite feature values")
    if len(np.unique(y)) < 2:
        raise TrainingError("training data must contain both classes")

    means = X.mean(axis=0)
    stds = X.std(axis=0)
    active = (stds > 0).astype(np.float64)
    stds_safe = np.where(stds > 0, stds, 1.0)
    Xs = (X - means) / stds_safe

    w = np.zeros(X.shape[1])
    b = 0.0
    loss, gw, gb = loss_and_grad(w, b, Xs, y, l2, active)
    history = [float(loss)]
    epochs = 0
    for _ in range(max_epochs):
        gmax = max(np.max(np.abs(gw)), abs(gb))
        if gmax < tol:
            break
        step = 1.0
        gnorm2 = float(gw @ gw) + gb * gb
        while True:
            w_new = w - step * gw
            b_new = b - step * gb
            new_loss, new_gw, new_gb = loss_and_grad(w_new, b_new, Xs, y, l2, active)
            if new_loss <= loss - 1e-4 * step * gnorm2 or step < 1e-12:
                break
            step *= 0.5
        if not np.isfinite(new_loss):
            raise TrainingError("non-finite loss; check feature scaling")
        if new_loss > loss + 1e-12:
            break  # line search exhausted; gradient tolerance unreachable
        w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
        history.append(float(loss))
        epochs += 1
    return TrainedClassifier(
        weights=w, bias=b, feature_means=means, feature_stds=stds_safe,
        l2=l2, epochs_run=epochs, final_loss=float(loss), threshold=threshold,
        loss_history=tuple(history),
    )


def predict(model, X):
    """Per-example probability and thresholded boolean."""
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != model.weights.shape[0]:
        raise TrainingError("feature length does not match model schema")
    Xs = (X - model.feature_means) / model.feature_stds
    p = _sigmoid(Xs @ model.weights + model.bias)
    flags = p >= model.threshold
    if single:
        return float(p[0]), bool(flags[0])
    return p, flags


def confusion(y_true, y_pred):
    tp = fp = fn = tn = 0
    for t, p in zip(y_true, y_pred):
        if p and t:
            tp += 1
        elif p and not t:
            fp += 1
        elif not p and t:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def report_from_counts(tp, fp, fn, tn, threshold=0.5):
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if (precision + recall) else 0.0)
    return EvalReport(tp, fp, fn, tn, precision, recall, f1, threshold)


def evaluate(model, X, y_true):
    if len(y_true) == 0:
        raise TrainingError("empty test set")
    _, flags = predict(model, np.asarray(X, dtype=np.float64))
    tp, fp, fn, tn = confusion([bool(v) for v in y_true], list(flags))
    return report_from_counts(tp, fp, fn, tn, model.threshold)
