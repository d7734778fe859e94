"""Provider-level feature fusion, silver-standard labeling, MBI grouping."""

import logging
from dataclasses import dataclass, replace

from .ingestion import WorkloadRecord
from .stress import CATEGORIES as STRESS_CATEGORIES

log = logging.getLogger(__name__)

MBI_DIMENSIONS = (
    "Emotional Exhaustion",
    "Depersonalization",
    "Reduced Personal Accomplishment",
)

LINGUISTIC_FIELDS = (
    "word_count",
    "sentence_count",
    "avg_token_length",
    "type_token_ratio",
    "first_person_freq",
    "third_person_freq",
)

WORKLOAD_FIELDS = (
    "lab_order_count",
    "procedure_count",
    "admission_count",
    "mortality_count",
    "mortality_rate",
    "los_mean_days",
    "los_median_days",
)

# Feature names whose values feed the labeling rule itself; excluded from the
# classifier by default to avoid label leakage.
LABEL_INPUT_FEATURES = ("total_high_conf_neg_sentences", "total_mentions")


class MappingError(Exception):
    pass


@dataclass(frozen=True)
class ProviderProfile:
    provider_id: str
    specialty: str
    note_count: int
    mean_doc_confidence: float
    neg_note_fraction: float
    total_high_conf_neg_sentences: int
    total_mentions: int
    stress_mean_normalized: dict     # category -> mean per-1000-token rate
    mean_theta: tuple
    top2_topics: tuple
    workload: WorkloadRecord
    workload_missing: int
    linguistic: dict                 # field -> provider mean
    silver_label: bool = False


def feature_schema(n_topics):
    names = [
        "note_count",
        "mean_doc_confidence",
        "neg_note_fraction",
        "total_high_conf_neg_sentences",
        "total_mentions",
    ]
    names += [f"stress_{c}" for c in STRESS_CATEGORIES]
    names += [f"topic_{k}" for k in range(n_topics)]
    names += list(WORKLOAD_FIELDS)
    names.append("workload_missing")
    names += list(LINGUISTIC_FIELDS)
    return tuple(names)


def feature_vector(profile, include_label_inputs=True):
    """Fixed-order numeric vector; ordering is part of the file format."""
    values = {
        "note_count": profile.note_count,
        "mean_doc_confidence": profile.mean_doc_confidence,
        "neg_note_fraction": profile.neg_note_fraction,
        "total_high_conf_neg_sentences": profile.total_high_conf_neg_sentences,
        "total_mentions": profile.total_mentions,
        "workload_missing": profile.workload_missing,
    }
    for c in STRESS_CATEGORIES:
        values[f"stress_{c}"] = profile.stress_mean_normalized[c]
    for k, v in enumerate(profile.mean_theta):
        values[f"topic_{k}"] = v
    for f in WORKLOAD_FIELDS:
        values[f] = getattr(profile.workload, f)
    for f in LINGUISTIC_FIELDS:
        values[f] = profile.linguistic[f]
    names = feature_schema(len(profile.mean_theta))
    if not include_label_inputs:
        names = tuple(n for n in names if n not in LABEL_INPUT_FEATURES)
    return names, [float(values[n]) for n in names]


def _modal(values):
    counts = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sorted(counts, key=lambda v: (-counts[v], v))[0]


def fuse(note_records, sentiment_by_provider, stress_by_provider,
         topic_profiles, workload, n_topics):
    """One ProviderProfile per provider with at least one note.

    note_records: (note_id, provider_id, specialty, LinguisticMetrics) per
    note. Providers known only to workload tables are excluded and returned
    separately for the sidecar report.
    """
    by_provider = {}
    for note_id, pid, specialty, metrics in note_records:
        by_provider.setdefault(pid, []).append((note_id, specialty, metrics))
    topic_by_pid = {tp.provider_id: tp for tp in topic_profiles}

    profiles = []
    for pid in sorted(by_provider):
        notes = sorted(by_provider[pid])
        sent = sentiment_by_provider.get(pid, (0.0, 0.0, 0))
        stress_total, stress_means = stress_by_provider.get(
            pid, (0, dict.fromkeys(STRESS_CATEGORIES, 0.0)))
        tp = topic_by_pid.get(pid)
        if tp is None:
            mean_theta = tuple(1.0 / n_topics for _ in range(n_topics))
            top2 = ((0, 1.0 / n_topics), (1, 1.0 / n_topics))
        else:
            mean_theta, top2 = tp.mean_theta, tp.top2
        wl = workload.get(pid)
        missing = 0 if wl is not None else 1
        if wl is None:
            wl = WorkloadRecord(provider_id=pid)
        ling = {
            f: sum(getattr(m, f) for _, _, m in notes) / len(notes)
            for f in LINGUISTIC_FIELDS
        }
        profiles.append(ProviderProfile(
            provider_id=pid,
            specialty=_modal([s for _, s, _ in notes]),
            note_count=len(notes),
            mean_doc_confidence=sent[0],
            neg_note_fraction=sent[1],
            total_high_conf_neg_sentences=sent[2],
            total_mentions=stress_total,
            stress_mean_normalized=dict(stress_means),
            mean_theta=mean_theta,
            top2_topics=top2,
            workload=wl,
            workload_missing=missing,
            linguistic=ling,
        ))
    workload_only = sorted(set(workload) - set(by_provider))
    if workload_only:
        log.warning("%d providers appear only in workload tables", len(workload_only))
    return profiles, workload_only


def silver_label(profile, t_sentences=12, t_mentions=7, unit="sentences"):
    """Threshold conjunction on high-confidence negative counts and cause
    mentions. unit='notes' counts negative notes instead of sentences."""
    if t_sentences < 0 or t_mentions < 0:
        raise ValueError("thresholds must be >= 0")
    if unit == "sentences":
        count = profile.total_high_conf_neg_sentences
    elif unit == "notes":
        count = profile.neg_note_fraction * profile.note_count
    else:
        raise ValueError(f"unknown labeling unit {unit!r}")
    return count >= t_sentences and profile.total_mentions >= t_mentions


def label_corpus(profiles, t_sentences=12, t_mentions=7, unit="sentences"):
    """Apply silver_label to every profile; returns (labeled profiles,
    flagged profiles, flag rate)."""
    if not profiles:
        raise ValueError("no profiles to label")
    labeled = [replace(p, silver_label=silver_label(p, t_sentences, t_mentions, unit))
               for p in profiles]
    flagged = [p for p in labeled if p.silver_label]
    return labeled, flagged, len(flagged) / len(labeled)


def default_mbi_mapping(profiles, n_topics):
    """Table-style grouping; the accomplishment dimension points at the two
    topics most prevalent among flagged providers (all providers when none
    are flagged)."""
    pool = [p for p in profiles if p.silver_label] or list(profiles)
    sums = [0.0] * n_topics
    for p in pool:
        for k, v in enumerate(p.mean_theta):
            sums[k] += v
    ranked = sorted(range(n_topics), key=lambda k: (-sums[k], k))[:2]
    return {
        "Emotional Exhaustion": ["neg_note_fraction", "first_person_freq"],
        "Depersonalization": ["total_mentions", "word_count"],
        "Reduced Personal Accomplishment":
            [f"topic_{k}" for k in sorted(ranked)] + ["type_token_ratio"],
    }


def mbi_report(profiles, mapping):
    """Group profile features by MBI dimension.

    Returns (per-provider sub-vectors keyed by dimension, corpus summary of
    per-dimension feature means for flagged vs unflagged providers).
    """
    if not profiles:
        raise ValueError("no profiles")
    schema = set(feature_schema(len(profiles[0].mean_theta)))
    seen = {}
    for dim, feats in mapping.items():
        if dim not in MBI_DIMENSIONS:
            raise MappingError(f"unknown MBI dimension {dim!r}")
        for f in feats:
            if f not in schema:
                raise MappingError(f"mapping references unknown feature {f!r}")
            if f in seen:
                raise MappingError(f"feature {f!r} mapped to both "
                                   f"{seen[f]!r} and {dim!r}")
            seen[f] = dim

    vectors = {dim: {} for dim in mapping}
    values_by_name = {}
    for p in profiles:
        names, vec = feature_vector(p)
        values_by_name[p.provider_id] = dict(zip(names, vec))
    for dim, feats in mapping.items():
        for p in profiles:
            vectors[dim][p.provider_id] = [values_by_name[p.provider_id][f]
                                           for f in feats]
    summary = {}
    for dim, feats in mapping.items():
        summary[dim] = {}
        for f in feats:
            for flagged in (True, False):
                group = [values_by_name[p.provider_id][f] for p in profiles
                         if p.silver_label == flagged]
                key = "flagged_mean" if flagged else "unflagged_mean"
                summary[dim].setdefault(f, {})[key] = (
                    sum(group) / len(group) if group else 0.0)
    return vectors, summary
