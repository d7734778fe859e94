"""Three-class sentence sentiment behind a pluggable scorer contract.

The baseline scorer is a deterministic cue-count softmax with a constant
neutral logit; external score files (e.g. from the transformer sidecar) plug
into the same NoteSentiment shape, so downstream stages are scorer-agnostic.
"""

import json
import logging
import math
from dataclasses import dataclass, field

from . import resources

log = logging.getLogger(__name__)

NEGATIVE, NEUTRAL, POSITIVE = "negative", "neutral", "positive"
LABELS = (NEGATIVE, NEUTRAL, POSITIVE)

NEUTRAL_LOGIT = 0.15


@dataclass(frozen=True)
class SentimentScore:
    p_neg: float
    p_neu: float
    p_pos: float
    label: str
    confidence: float

    @classmethod
    def from_probs(cls, p_neg, p_neu, p_pos):
        probs = (p_neg, p_neu, p_pos)
        best = max(range(3), key=lambda i: (probs[i], -i))  # ties: neg > neu > pos
        return cls(p_neg, p_neu, p_pos, LABELS[best], probs[best])


@dataclass(frozen=True)
class NoteSentiment:
    note_id: str
    sentence_scores: tuple
    doc_confidence: float
    doc_label: str
    high_conf_neg_sentences: int


@dataclass(frozen=True)
class ScorerConfig:
    tau_sent: float = 0.75
    temperature: float = 1.0
    negative_cues: frozenset = field(default_factory=resources.negative_cues)
    positive_cues: frozenset = field(default_factory=resources.positive_cues)

    def __post_init__(self):
        if not (1 / 3 < self.tau_sent <= 1.0):
            raise ValueError("tau_sent must be in (1/3, 1]")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


def _softmax3(z0, z1, z2):
    m = max(z0, z1, z2)
    e0, e1, e2 = math.exp(z0 - m), math.exp(z1 - m), math.exp(z2 - m)
    s = e0 + e1 + e2
    return e0 / s, e1 / s, e2 / s


def score_sentence_baseline(tokens, config):
    """Cue-fraction logits through a temperature softmax; empty -> (0,1,0)."""
    if not tokens:
        return SentimentScore(0.0, 1.0, 0.0, NEUTRAL, 1.0)
    n = len(tokens)
    z_neg = sum(1 for t in tokens if t in config.negative_cues) / n
    z_pos = sum(1 for t in tokens if t in config.positive_cues) / n
    t = config.temperature
    p_neg, p_neu, p_pos = _softmax3(z_neg / t, NEUTRAL_LOGIT / t, z_pos / t)
    return SentimentScore.from_probs(p_neg, p_neu, p_pos)


def note_sentiment(note_id, sentence_scores, config):
    """Document score = max sentence confidence; ties -> earliest sentence."""
    if not sentence_scores:
        return NoteSentiment(note_id, (), 0.0, NEUTRAL, 0)
    best = max(range(len(sentence_scores)),
               key=lambda i: (sentence_scores[i].confidence, -i))
    high = sum(1 for s in sentence_scores
               if s.label == NEGATIVE and s.confidence >= config.tau_sent)
    return NoteSentiment(
        note_id=note_id,
        sentence_scores=tuple(sentence_scores),
        doc_confidence=sentence_scores[best].confidence,
        doc_label=sentence_scores[best].label,
        high_conf_neg_sentences=high,
    )


def score_note_baseline(note, config):
    """Score every raw sentence of a CleanNote with the baseline scorer.

    Sentence indices follow the raw sentence split; sentences whose cleaned
    token list is empty score as the degenerate neutral case.
    """
    token_map = {s.index: s.tokens for s in note.sentences}
    scores = [score_sentence_baseline(token_map.get(rs.index, ()), config)
              for rs in note.raw_sentences]
    return note_sentiment(note.note_id, scores, config)


def load_external_scores(path, notes, config):
    """Map a score JSONL file onto NoteSentiment; uncovered notes fall back
    to the baseline scorer with a warning."""
    by_note = {n.note_id: n for n in notes}
    rows = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            obj = json.loads(line)
            note_id = str(obj["note_id"])
            idx = int(obj["sentence_index"])
            p = [float(obj["p_neg"]), float(obj["p_neu"]), float(obj["p_pos"])]
            if note_id not in by_note:
                log.warning("score row %d: unknown note_id %s, rejected", lineno, note_id)
                continue
            if idx < 0 or idx >= len(by_note[note_id].raw_sentences):
                log.warning("score row %d: sentence_index out of range, rejected", lineno)
                continue
            if min(p) < 0:
                log.warning("score row %d: negative probability, rejected", lineno)
                continue
            total = sum(p)
            if abs(total - 1.0) > 1e-6:
                if total <= 0:
                    log.warning("score row %d: zero-mass triple, rejected", lineno)
                    continue
                log.warning("score row %d: probabilities sum to %.6f, renormalized",
                            lineno, total)
                p = [x / total for x in p]
            rows.setdefault(note_id, {})[idx] = SentimentScore.from_probs(*p)

    out = {}
    for note in notes:
        covered = rows.get(note.note_id)
        if covered is None:
            log.warning("note %s absent from score file, using baseline scorer",
                        note.note_id)
            out[note.note_id] = score_note_baseline(note, config)
            continue
        scores = []
        for rs in note.raw_sentences:
            sc = covered.get(rs.index)
            if sc is None:
                token_map = {s.index: s.tokens for s in note.sentences}
                sc = score_sentence_baseline(token_map.get(rs.index, ()), config)
            scores.append(sc)
        out[note.note_id] = note_sentiment(note.note_id, scores, config)
    return out


def aggregate_provider_sentiment(note_sentiments, note_provider):
    """Per-provider (mean doc confidence, negative-note fraction, total
    high-confidence negative sentences); zero-note providers excluded."""
    grouped = {}
    for ns in note_sentiments:
        grouped.setdefault(note_provider[ns.note_id], []).append(ns)
    out = {}
    for pid in sorted(grouped):
        group = sorted(grouped[pid], key=lambda ns: ns.note_id)
        n = len(group)
        out[pid] = (
            sum(ns.doc_confidence for ns in group) / n,
            sum(1 for ns in group if ns.doc_label == NEGATIVE) / n,
            sum(ns.high_conf_neg_sentences for ns in group),
        )
    return out


def corpus_sentiment_distribution(note_sentiments):
    """(frac_pos, frac_neu, frac_neg) of notes by document label."""
    if not note_sentiments:
        raise ValueError("empty corpus")
    n = len(note_sentiments)
    pos = sum(1 for ns in note_sentiments if ns.doc_label == POSITIVE)
    neu = sum(1 for ns in note_sentiments if ns.doc_label == NEUTRAL)
    neg = n - pos - neu
    return pos / n, neu / n, neg / n
