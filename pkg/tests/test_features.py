import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burnout_pipeline.features import (
    LABEL_INPUT_FEATURES,
    LINGUISTIC_FIELDS,
    MappingError,
    ProviderProfile,
    default_mbi_mapping,
    feature_schema,
    feature_vector,
    fuse,
    label_corpus,
    mbi_report,
    silver_label,
)
from burnout_pipeline.ingestion import WorkloadRecord
from burnout_pipeline.preprocess import LinguisticMetrics
from burnout_pipeline.stress import CATEGORIES
from burnout_pipeline.topics import ProviderTopicProfile


def _metrics(wc=100):
    return LinguisticMetrics(word_count=wc, sentence_count=10,
                             avg_token_length=5.0, type_token_ratio=0.6,
                             first_person_freq=0.02, third_person_freq=0.05)


def _profile(high=0, mentions=0, neg_frac=0.0, note_count=5, n_topics=3):
    return ProviderProfile(
        provider_id="p1", specialty="Internal Medicine", note_count=note_count,
        mean_doc_confidence=0.8, neg_note_fraction=neg_frac,
        total_high_conf_neg_sentences=high, total_mentions=mentions,
        stress_mean_normalized=dict.fromkeys(CATEGORIES, 1.5),
        mean_theta=tuple([1.0 / n_topics] * n_topics),
        top2_topics=((0, 0.4), (1, 0.3)),
        workload=WorkloadRecord(provider_id="p1"),
        workload_missing=1,
        linguistic={f: getattr(_metrics(), f) for f in LINGUISTIC_FIELDS},
    )


def test_schema_length_and_order():
    names = feature_schema(5)
    assert names[0] == "note_count"
    assert names.index("stress_" + CATEGORIES[0]) == 5
    assert "topic_4" in names and "topic_5" not in names
    assert len(names) == 5 + len(CATEGORIES) + 5 + 7 + 1 + len(LINGUISTIC_FIELDS)


def test_feature_vector_matches_schema_and_excludes_label_inputs():
    p = _profile(high=3, mentions=2)
    names, vec = feature_vector(p)
    assert names == feature_schema(3) and len(names) == len(vec)
    d = dict(zip(names, vec))
    assert d["total_high_conf_neg_sentences"] == 3.0
    assert d["workload_missing"] == 1.0
    names2, vec2 = feature_vector(p, include_label_inputs=False)
    assert set(names) - set(names2) == set(LABEL_INPUT_FEATURES)
    assert len(vec2) == len(vec) - 2


def test_silver_label_boundary_cases():
    assert silver_label(_profile(high=12, mentions=7)) is True
    assert silver_label(_profile(high=11, mentions=7)) is False
    assert silver_label(_profile(high=12, mentions=6)) is False
    assert silver_label(_profile(high=0, mentions=0, note_count=1)) is False


def test_silver_label_notes_unit():
    p = _profile(neg_frac=0.8, mentions=9, note_count=20)
    # 16 negative notes >= 12
    assert silver_label(p, unit="notes") is True
    assert silver_label(p, 17, 7, unit="notes") is False
    with pytest.raises(ValueError):
        silver_label(p, unit="bogus")
    with pytest.raises(ValueError):
        silver_label(p, t_sentences=-1)


@given(st.integers(0, 30), st.integers(0, 15))
@settings(max_examples=100, deadline=None)
def test_silver_label_monotone_in_counts(high, mentions):
    base = silver_label(_profile(high=high, mentions=mentions))
    more = silver_label(_profile(high=high + 1, mentions=mentions + 1))
    if base:
        assert more


def test_label_corpus_rate_and_brute_force():
    profs = [_profile(high=h, mentions=m) for h, m in
             [(12, 7), (13, 6), (0, 9), (20, 20)]]
    labeled, flagged, rate = label_corpus(profs)
    expect = [h >= 12 and m >= 7 for h, m in [(12, 7), (13, 6), (0, 9), (20, 20)]]
    assert [p.silver_label for p in labeled] == expect
    assert len(flagged) == 2 and rate == 0.5
    with pytest.raises(ValueError):
        label_corpus([])


def _note_records():
    return [
        ("n1", "p1", "Cardiology", _metrics(100)),
        ("n2", "p1", "Surgery", _metrics(200)),
        ("n3", "p1", "Cardiology", _metrics(300)),
        ("n4", "p2", "Neurology", _metrics(50)),
    ]


def test_fuse_joins_all_families():
    sentiment = {"p1": (0.7, 0.5, 4), "p2": (0.9, 1.0, 2)}
    stress = {"p1": (6, dict.fromkeys(CATEGORIES, 2.0))}
    tps = [ProviderTopicProfile("p1", (0.5, 0.3, 0.2), ((0, 0.5), (1, 0.3)))]
    workload = {"p1": WorkloadRecord(provider_id="p1", lab_order_count=9),
                "p9": WorkloadRecord(provider_id="p9")}
    profiles, workload_only = fuse(_note_records(), sentiment, stress, tps,
                                   workload, n_topics=3)
    assert [p.provider_id for p in profiles] == ["p1", "p2"]
    p1, p2 = profiles
    assert p1.note_count == 3 and p1.specialty == "Cardiology"  # modal
    assert p1.total_high_conf_neg_sentences == 4 and p1.total_mentions == 6
    assert p1.workload.lab_order_count == 9 and p1.workload_missing == 0
    assert abs(p1.linguistic["word_count"] - 200.0) < 1e-12
    # p2 has no stress/topic/workload entries: documented fallbacks
    assert p2.total_mentions == 0
    assert p2.mean_theta == (1 / 3, 1 / 3, 1 / 3)
    assert p2.workload_missing == 1 and p2.workload.lab_order_count == 0
    assert workload_only == ["p9"]


def test_default_mbi_mapping_structure():
    profs = [_profile()]
    mapping = default_mbi_mapping(profs, n_topics=3)
    assert set(mapping) == {"Emotional Exhaustion", "Depersonalization",
                            "Reduced Personal Accomplishment"}
    rpa = mapping["Reduced Personal Accomplishment"]
    assert sum(f.startswith("topic_") for f in rpa) == 2
    flat = [f for feats in mapping.values() for f in feats]
    assert len(flat) == len(set(flat))


def test_mbi_report_vectors_and_summary():
    profs = [_profile(high=12, mentions=7), _profile()]
    mapping = default_mbi_mapping(profs, 3)
    labeled, _, _ = label_corpus(profs)
    vectors, summary = mbi_report(labeled, mapping)
    assert set(vectors) == set(mapping)
    ee = vectors["Emotional Exhaustion"]["p1"]
    assert len(ee) == len(mapping["Emotional Exhaustion"])
    assert set(summary) == set(mapping)


def test_mbi_report_validation():
    profs = [_profile()]
    with pytest.raises(MappingError):
        mbi_report(profs, {"Emotional Exhaustion": ["no_such_feature"]})
    with pytest.raises(MappingError):
        mbi_report(profs, {"Not A Dimension": ["note_count"]})
    with pytest.raises(MappingError):
        mbi_report(profs, {"Emotional Exhaustion": ["note_count"],
                           "Depersonalization": ["note_count"]})
    with pytest.raises(ValueError):
        mbi_report([], {})
