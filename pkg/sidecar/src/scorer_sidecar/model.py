"""Model loading: any sequence-classification checkpoint, or a bundled
deterministic tiny transformer for fully offline runs.

Output mapping. Three-label models map onto (negative, neutral, positive)
via their id2label names when present, falling back to index order.
Two-label models (negative, positive) are lifted to a triple with
p_neu = 1 - |p_pos - p_neg| and the triple renormalized to sum to one: the
closer the binary head is to undecided, the more neutral mass the sentence
gets.
"""

import os
import string
import tempfile

import torch
from transformers import (
    AutoModelForSequenceClassification,
    AutoTokenizer,
    BertConfig,
    BertForSequenceClassification,
    BertTokenizer,
)

BUNDLED_NAME = "bundled-tiny"

_NEG_NAMES = ("negative", "neg", "label_0")
_NEU_NAMES = ("neutral", "neu")
_POS_NAMES = ("positive", "pos")


class ModelError(Exception):
    pass


def _char_vocab():
    """Character-level wordpiece vocabulary: every lowercase word tokenizes
    into distinct pieces instead of a single [UNK]."""
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    tokens += list(string.ascii_lowercase) + list(string.digits)
    tokens += ["##" + c for c in string.ascii_lowercase + string.digits]
    return tokens


def _probe_sentences(seed, n=96):
    """Deterministic pseudo-sentences used to calibrate the tiny head."""
    gen = torch.Generator().manual_seed(seed)
    letters = string.ascii_lowercase
    out = []
    for _ in range(n):
        words = []
        for _ in range(int(torch.randint(4, 12, (1,), generator=gen))):
            chars = torch.randint(0, 26, (int(torch.randint(2, 9, (1,),
                                                            generator=gen)),),
                                  generator=gen)
            words.append("".join(letters[c] for c in chars))
        out.append(" ".join(words))
    return out


def build_tiny(seed=0, sharpness=3.0):
    """Deterministic small transformer with a calibrated 3-way head.

    A randomly initialized head produces nearly constant logits, so it is
    centered and scaled per class against a fixed probe batch; the result
    gives confident, sentence-dependent scores and exercises the full
    plumbing without a downloaded checkpoint. This is a construction-time
    calibration, not training.
    """
    vocab = _char_vocab()
    tmp = tempfile.mkdtemp(prefix="tiny-scorer-")
    vocab_path = os.path.join(tmp, "vocab.txt")
    with open(vocab_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(vocab) + "\n")
    tokenizer = BertTokenizer(vocab_path, do_lower_case=True,
                              model_max_length=128)
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=64, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=128,
        max_position_embeddings=128, num_labels=3,
        id2label={0: "negative", 1: "neutral", 2: "positive"},
        label2id={"negative": 0, "neutral": 1, "positive": 2},
    )
    torch.manual_seed(seed)
    model = BertForSequenceClassification(config)
    model.eval()
    with torch.no_grad():
        enc = tokenizer(_probe_sentences(seed), return_tensors="pt",
                        padding=True, truncation=True)
        logits = model(**enc).logits
        mean = logits.mean(dim=0)
        std = logits.std(dim=0).clamp_min(1e-6)
        # fold (logits - mean) / std * sharpness into the linear head
        scale = sharpness / std
        model.classifier.weight.mul_(scale[:, None])
        model.classifier.bias.copy_((model.classifier.bias - mean) * scale)
    return tokenizer, model


def load_scorer(name_or_path, device="cpu"):
    """Returns (tokenizer, model, permutation) where permutation maps model
    output indices onto (negative, neutral, positive)."""
    if name_or_path == BUNDLED_NAME:
        tokenizer, model = build_tiny()
    else:
        tokenizer = AutoTokenizer.from_pretrained(name_or_path)
        model = AutoModelForSequenceClassification.from_pretrained(name_or_path)
        model.eval()
    model.to(device)

    n_labels = model.config.num_labels
    if n_labels not in (2, 3):
        raise ModelError(f"expected a 2- or 3-label classifier, got {n_labels}")
    id2label = {i: str(model.config.id2label.get(i, f"label_{i}")).lower()
                for i in range(n_labels)}

    def find(names, default):
        for i, lab in id2label.items():
            if any(lab.startswith(n) for n in names):
                return i
        return default

    if n_labels == 3:
        perm = (find(_NEG_NAMES, 0), find(_NEU_NAMES, 1), find(_POS_NAMES, 2))
        if len(set(perm)) != 3:
            perm = (0, 1, 2)
    else:
        perm = (find(_NEG_NAMES, 0), None, find(_POS_NAMES, 1))
        if perm[0] == perm[2]:
            perm = (0, None, 1)
    return tokenizer, model, perm


def probs_to_triple(probs, perm):
    """Map one softmax row onto a (p_neg, p_neu, p_pos) simplex point."""
    if perm[1] is not None:
        triple = (float(probs[perm[0]]), float(probs[perm[1]]),
                  float(probs[perm[2]]))
        s = sum(triple)
        return tuple(v / s for v in triple)
    p_neg, p_pos = float(probs[perm[0]]), float(probs[perm[2]])
    p_neu = 1.0 - abs(p_pos - p_neg)
    s = p_neg + p_neu + p_pos
    return (p_neg / s, p_neu / s, p_pos / s)
