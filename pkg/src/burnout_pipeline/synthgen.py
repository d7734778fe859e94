"""Seeded synthetic corpus generator with planted ground truth.

Notes are token sequences over a closed synthetic vocabulary sampled from
planted topic mixtures, rendered into sentences behind a "Service:" header.
Flagged ("burnout") providers receive enough negative-cue sentences and
stress-lexicon phrases to clear the default labeling thresholds, plus heavier
workload rows. Every random draw comes from a stream keyed by
(seed, provider, note), so output is independent of generation order.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .rng import stream

log = logging.getLogger(__name__)

_CONSONANTS = "bcdfklmnprtvz"
_VOWELS = "aeiou"

# Raw "Service:" strings covering the twenty canonical specialties.
RAW_SERVICES = (
    "MEDICINE", "CARDIOLOGY", "SURGERY", "NEURO SURGERY", "NEUROLOGY",
    "PSYCHIATRY", "RADIOLOGY", "ORTHOPEDICS", "OBSTETRICS", "PEDIATRICS",
    "ONCOLOGY", "EMERGENCY", "ANESTHESIOLOGY", "UROLOGY", "VASCULAR SURGERY",
    "THORACIC SURGERY", "PLASTIC SURGERY", "TRAUMA", "GASTROENTEROLOGY",
    "PULMONOLOGY",
)

# Surface forms whose normalized tokens land in the shipped sentiment cue
# lexicons (vents) or stay cue-free (gratitude words are positive cues).
VENT_WORDS = (
    "exhausted", "overwhelmed", "tired", "stressful", "frustrated",
    "hopeless", "miserable", "fatigue", "burnout", "sleepless", "dread",
    "anxious", "exhausting", "overworked", "drain",
)
GRATITUDE_WORDS = (
    "grateful", "hopeful", "rewarding", "encouraged", "improved",
    "optimistic", "thankful", "proud", "joyful", "motivated",
)
# One stress-lexicon mention per sentence; none of these tokens lemmatize
# into sentiment cues, so they stay neutral for the scorer.
STRESS_SENTENCES = (
    "worked overtime again this week",
    "the unit was short-staffed today",
    "documentation backlog kept growing",
    "feeling burned out after rounds",
    "high census made rounds hard",
    "no sleep before the shift",
    "bed shortage delayed transfers",
    "too many patients on service",
    "barely slept between shifts",
    "paperwork piled up overnight",
)


class GenConfigError(Exception):
    pass


def make_topic_vocab(size):
    """Deterministic pseudo-words, fixed points of the lemmatizer."""
    words = []
    i = 0
    while len(words) < size:
        c1 = _CONSONANTS[i % len(_CONSONANTS)]
        v1 = _VOWELS[(i // len(_CONSONANTS)) % len(_VOWELS)]
        c2 = _CONSONANTS[(i // (len(_CONSONANTS) * len(_VOWELS))) % len(_CONSONANTS)]
        v2 = _VOWELS[(i * 7 + 3) % len(_VOWELS)]
        c3 = _CONSONANTS[(i * 11 + 5) % len(_CONSONANTS)]
        w = c1 + v1 + c2 + v2 + c3 + "ox"[i % 2]
        if w not in words:
            words.append(w)
        i += 1
    return tuple(words)


def make_planted_topics(n_topics, vocab_size, own_weight=8, base_weight=1):
    """Integer word weights per topic: a dedicated block of the vocabulary
    gets own_weight, the rest base_weight. Rows normalize to planted phi."""
    block = vocab_size // n_topics
    weights = np.full((n_topics, vocab_size), base_weight, dtype=np.int64)
    for k in range(n_topics):
        hi = (k + 1) * block if k < n_topics - 1 else vocab_size
        weights[k, k * block:hi] = own_weight
    return weights


def planted_phi(weights):
    w = np.asarray(weights, dtype=np.float64)
    return w / w.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 42
    n_providers: int = 200
    notes_min: int = 3
    notes_max: int = 30
    burnout_rate: float = 0.05
    n_true_topics: int = 3
    topic_vocab_size: int = 60
    topic_alpha: float = 0.5
    # per-note injection probabilities for normal providers
    normal_vent_rate: float = 0.02
    normal_stress_rate: float = 0.08
    normal_gratitude_rate: float = 0.03
    normal_single_cue_rate: float = 0.10
    # per-note injected sentence counts for burnout providers
    burnout_vents_per_note: int = 4
    burnout_stress_per_note: int = 3
    sentences_min: int = 8
    sentences_max: int = 16
    words_min: int = 6
    words_max: int = 12
    specialty_weights: tuple = field(default=tuple([1] * len(RAW_SERVICES)))

    def validate(self):
        rates = (self.burnout_rate, self.normal_vent_rate,
                 self.normal_stress_rate, self.normal_gratitude_rate,
                 self.normal_single_cue_rate)
        if any(not 0 <= r <= 1 for r in rates):
            raise GenConfigError("rates must lie in [0, 1]")
        if self.n_providers < 10:
            raise GenConfigError("n_providers must be >= 10")
        if not (1 <= self.notes_min <= self.notes_max):
            raise GenConfigError("bad notes_per_provider range")
        if len(self.specialty_weights) != len(RAW_SERVICES):
            raise GenConfigError("specialty_weights must cover all services")


@dataclass(frozen=True)
class GroundTruth:
    is_burnout: dict          # provider_id -> bool
    note_mixtures: dict       # note_id -> tuple of topic weights
    manifest: dict


def sample_planted_docs(n_docs, topic_weights, alpha, seed, words_min=30,
                        words_max=80, vocab=None):
    """Token-index documents drawn from Dirichlet(alpha) mixtures over the
    planted topics. Used by the pipeline generator and the recovery oracle."""
    K, V = topic_weights.shape
    cum = np.cumsum(topic_weights, axis=1)
    docs = []
    mixtures = []
    for d in range(n_docs):
        rng = stream(seed, "planted-doc", d)
        theta = rng.dirichlet([alpha] * K)
        mix_int = np.maximum((theta * 1_000_000).astype(np.int64), 1)
        mix_cum = np.cumsum(mix_int)
        n_words = int(rng.integers(words_min, words_max + 1))
        doc = []
        for _ in range(n_words):
            k = int(np.searchsorted(mix_cum, rng.integers(0, mix_cum[-1]),
                                    side="right"))
            w = int(np.searchsorted(cum[k], rng.integers(0, cum[k][-1]),
                                    side="right"))
            doc.append(w)
        docs.append(doc)
        mixtures.append(tuple(float(x) for x in theta))
    return docs, mixtures


def _topic_sentence(rng, cum_topic, mix_cum, vocab, n_words):
    words = []
    for _ in range(n_words):
        k = int(np.searchsorted(mix_cum, rng.integers(0, mix_cum[-1]),
                                side="right"))
        w = int(np.searchsorted(cum_topic[k], rng.integers(0, cum_topic[k][-1]),
                                side="right"))
        words.append(vocab[w])
    return words


def _render_note(rng, cfg, vocab, cum_topic, service, is_burnout):
    """Returns (text, mixture, injected_stress_count)."""
    K = cum_topic.shape[0]
    theta = rng.dirichlet([cfg.topic_alpha] * K)
    mix_cum = np.cumsum(np.maximum((theta * 1_000_000).astype(np.int64), 1))

    sentences = []
    n_body = int(rng.integers(cfg.sentences_min, cfg.sentences_max + 1))
    for _ in range(n_body):
        n_words = int(rng.integers(cfg.words_min, cfg.words_max + 1))
        words = _topic_sentence(rng, cum_topic, mix_cum, vocab, n_words)
        sentences.append(" ".join(words) + ".")

    stress_injected = 0
    if is_burnout:
        n_vent = cfg.burnout_vents_per_note + int(rng.integers(0, 3))
        for _ in range(n_vent):
            n_words = 4 + int(rng.integers(0, 4))
            words = [VENT_WORDS[int(rng.integers(0, len(VENT_WORDS)))]
                     for _ in range(n_words)]
            prefix = "i feel " if rng.integers(0, 2) else ""
            sentences.append(prefix + " ".join(words) + ".")
        n_stress = cfg.burnout_stress_per_note + int(rng.integers(0, 2))
        for _ in range(n_stress):
            sentences.append(
                STRESS_SENTENCES[int(rng.integers(0, len(STRESS_SENTENCES)))] + ".")
        stress_injected += n_stress
    else:
        if rng.random() < cfg.normal_vent_rate:
            words = [VENT_WORDS[int(rng.integers(0, len(VENT_WORDS)))]
                     for _ in range(5)]
            sentences.append(" ".join(words) + ".")
        if rng.random() < cfg.normal_stress_rate:
            sentences.append(
                STRESS_SENTENCES[int(rng.integers(0, len(STRESS_SENTENCES)))] + ".")
            stress_injected += 1
        if rng.random() < cfg.normal_gratitude_rate:
            words = [GRATITUDE_WORDS[int(rng.integers(0, len(GRATITUDE_WORDS)))]
                     for _ in range(6)]
            sentences.append(" ".join(words) + ".")
        if rng.random() < cfg.normal_single_cue_rate:
            # One lone cue inside a long sentence stays below the neutral
            # logit, so the document label is unaffected.
            n_words = max(9, cfg.words_max)
            words = _topic_sentence(rng, cum_topic, mix_cum, vocab, n_words)
            words[3] = VENT_WORDS[int(rng.integers(0, len(VENT_WORDS)))]
            sentences.append(" ".join(words) + ".")

    # Deterministic interleave: injected sentences are placed by index draws.
    order = list(range(len(sentences)))
    perm = list(rng.permutation(len(sentences)))
    body = [sentences[order[i]] for i in perm]
    text = f"Service: {service}\n\n" + " ".join(body) + "\n"
    return text, tuple(float(x) for x in theta), stress_injected


def generate(config, out_dir):
    """Write notes.jsonl, the three workload CSVs, ground_truth.csv and
    manifest.json under out_dir; returns GroundTruth."""
    import os

    cfg = config
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)

    vocab = make_topic_vocab(cfg.topic_vocab_size)
    topic_weights = make_planted_topics(cfg.n_true_topics, cfg.topic_vocab_size)
    cum_topic = np.cumsum(topic_weights, axis=1)

    provider_ids = [f"P{p:04d}" for p in range(cfg.n_providers)]
    n_burnout = int(round(cfg.burnout_rate * cfg.n_providers))
    shuffled = list(provider_ids)
    stream(cfg.seed, "burnout-assignment").shuffle(shuffled)
    burnout_set = set(shuffled[:n_burnout])

    notes_path = f"{out_dir}/notes.jsonl"
    adm_path = f"{out_dir}/admissions.csv"
    lab_path = f"{out_dir}/labevents.csv"
    proc_path = f"{out_dir}/procedureevents.csv"
    truth_path = f"{out_dir}/ground_truth.csv"
    manifest_path = f"{out_dir}/manifest.json"

    is_burnout = {}
    note_mixtures = {}
    provider_meta = {}
    stress_totals = {}

    with open(notes_path, "w", encoding="utf-8") as nf, \
         open(adm_path, "w", encoding="utf-8") as af, \
         open(lab_path, "w", encoding="utf-8") as lf, \
         open(proc_path, "w", encoding="utf-8") as pf:
        af.write("admit_provider_id,hadm_id,hospital_expire_flag,los_days\n")
        lf.write("order_provider_id,itemid\n")
        pf.write("caregiver_id,itemid\n")
        for pid in provider_ids:
            burn = pid in burnout_set
            is_burnout[pid] = burn
            prng = stream(cfg.seed, "provider", pid)
            span = cfg.notes_max - cfg.notes_min
            u = prng.integers(0, 1 << 30) / float(1 << 30)
            n_notes = cfg.notes_min + int(span * u ** 3)
            service = RAW_SERVICES[int(np.searchsorted(
                np.cumsum(cfg.specialty_weights),
                prng.integers(0, sum(cfg.specialty_weights)), side="right"))]
            provider_meta[pid] = {"notes": n_notes, "burnout": burn,
                                  "service": service}
            stress_totals[pid] = 0

            for i in range(n_notes):
                note_id = f"{pid}-N{i:03d}"
                rng = stream(cfg.seed, "note", pid, i)
                text, theta, stress_n = _render_note(
                    rng, cfg, vocab, cum_topic, service, burn)
                stress_totals[pid] += stress_n
                note_mixtures[note_id] = theta
                nf.write(json.dumps({
                    "note_id": note_id,
                    "provider_id": pid,
                    "text": text,
                    "service": service,
                }, sort_keys=True) + "\n")

            wrng = stream(cfg.seed, "workload", pid)
            expire_p = 0.20 if burn else 0.05
            for i in range(n_notes):
                expire = 1 if wrng.random() < expire_p else 0
                los_tenths = int(wrng.integers(10, 200 if burn else 120))
                af.write(f"{pid},H{pid}x{i:03d},{expire},{los_tenths / 10:.1f}\n")
            n_lab = int(wrng.integers(30, 61)) if burn else int(wrng.integers(5, 26))
            for i in range(n_lab):
                lf.write(f"{pid},{50000 + int(wrng.integers(0, 500))}\n")
            n_proc = int(wrng.integers(10, 25)) if burn else int(wrng.integers(1, 10))
            for i in range(n_proc):
                pf.write(f"{pid},{220000 + int(wrng.integers(0, 200))}\n")

    with open(truth_path, "w", encoding="utf-8") as tf:
        tf.write("provider_id,is_burnout\n")
        for pid in provider_ids:
            tf.write(f"{pid},{1 if is_burnout[pid] else 0}\n")

    burn_mentions = [stress_totals[p] for p in provider_ids if is_burnout[p]]
    norm_mentions = [stress_totals[p] for p in provider_ids if not is_burnout[p]]
    mean_burn = sum(burn_mentions) / len(burn_mentions) if burn_mentions else 0.0
    mean_norm = sum(norm_mentions) / len(norm_mentions) if norm_mentions else 0.0
    if burn_mentions and mean_burn <= mean_norm:
        raise GenConfigError(
            "generation sanity check failed: burnout stress means not elevated")

    manifest = {
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in vars(cfg).items()},
        "vocab": list(vocab),
        "topic_word_weights": topic_weights.tolist(),
        "planted_phi": planted_phi(topic_weights).tolist(),
        "providers": provider_meta,
        "note_mixtures": {k: list(v) for k, v in sorted(note_mixtures.items())},
        "stats": {
            "n_burnout": n_burnout,
            "mean_injected_stress_burnout": mean_burn,
            "mean_injected_stress_normal": mean_norm,
        },
    }
    with open(manifest_path, "w", encoding="utf-8") as mf:
        json.dump(manifest, mf, indent=1, sort_keys=True)
        mf.write("\n")

    return GroundTruth(is_burnout=is_burnout, note_mixtures=note_mixtures,
                       manifest=manifest)
