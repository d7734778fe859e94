"""End-to-end pipeline orchestration.

Subcommands: synth, ingest, score, features, train, evaluate, report, all.
Each stage writes its artifacts plus a stage-metadata block (input hashes,
seed, version) so reruns are byte-exact and stale inputs are detectable.
Exit codes: 0 ok, 2 missing dependency artifact, 3 config error, 4 data error.
"""

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import os
import sys

import numpy as np

from . import classifier, features, ingestion, preprocess, sentiment, stress
from . import synthgen, topics
from .config import ConfigError, load_config

log = logging.getLogger("burnout_pipeline")

VERSION = "0.1.0"

EXIT_OK = 0
EXIT_MISSING_ARTIFACT = 2
EXIT_CONFIG_ERROR = 3
EXIT_DATA_ERROR = 4


class MissingArtifact(Exception):
    def __init__(self, stage, path):
        super().__init__(f"stage {stage!r} requires missing artifact {path}")
        self.stage = stage


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _require(stage, *paths):
    for p in paths:
        if not os.path.exists(p):
            raise MissingArtifact(stage, p)


def _write_meta(out, stage, inputs, cfg, extra=None):
    meta = {
        "stage": stage,
        "version": VERSION,
        "seed": cfg.seed,
        "inputs": {os.path.basename(p): _sha256(p) for p in inputs},
    }
    if extra:
        meta.update(extra)
    with open(os.path.join(out, f"{stage}.meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _preprocess_config(cfg):
    from . import resources
    return preprocess.PreprocessConfig(
        stop_words=resources.stopwords(cfg.paths.stopwords),
        lemma_exceptions=resources.lemma_exceptions(cfg.paths.lemma_exceptions),
        outcome_terms=resources.outcome_terms(cfg.paths.outcome_terms),
    )


def _scorer_config(cfg):
    from . import resources
    return sentiment.ScorerConfig(
        tau_sent=cfg.sentiment.tau_sent,
        temperature=cfg.sentiment.temperature,
        negative_cues=resources.negative_cues(cfg.paths.negative_cues),
        positive_cues=resources.positive_cues(cfg.paths.positive_cues),
    )


# ---------------------------------------------------------------- stages ---

def stage_synth(cfg, out):
    synthgen.generate(cfg.synth, out)
    produced = ["notes.jsonl", "admissions.csv", "labevents.csv",
                "procedureevents.csv", "ground_truth.csv", "manifest.json"]
    _write_meta(out, "synth", [os.path.join(out, p) for p in produced], cfg)


def stage_ingest(cfg, out):
    notes_path = os.path.join(out, "notes.jsonl")
    tables = [os.path.join(out, n) for n in
              ("admissions.csv", "labevents.csv", "procedureevents.csv")]
    _require("ingest", notes_path, *tables)

    report = ingestion.load_notes(notes_path)
    spec_map = ingestion.SpecialtyMap.load(cfg.paths.specialty_map)
    pre_cfg = _preprocess_config(cfg)

    with open(os.path.join(out, "clean_notes.jsonl"), "w", encoding="utf-8") as fh:
        for raw in report.notes:
            note = preprocess.clean_note(raw.note_id, raw.text, pre_cfg)
            service = raw.service_raw or ingestion.parse_service_header(raw.text)
            row = {
                "note_id": raw.note_id,
                "provider_id": raw.provider_id,
                "specialty": ingestion.map_specialty(service, spec_map),
                "metrics": dataclasses.asdict(note.metrics),
                "raw_sentences": [
                    {"index": rs.index, "text": rs.text,
                     "start": rs.start, "end": rs.end}
                    for rs in note.raw_sentences
                ],
                "sentences": [
                    {"index": s.index, "tokens": list(s.tokens)}
                    for s in note.sentences
                ],
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    workload = ingestion.build_workload(*tables)
    with open(os.path.join(out, "workload.csv"), "w", encoding="utf-8") as fh:
        fh.write("provider_id," + ",".join(features.WORKLOAD_FIELDS) + "\n")
        for pid in sorted(workload):
            rec = workload[pid]
            fh.write(pid + "," + ",".join(
                _fmt(getattr(rec, f)) for f in features.WORKLOAD_FIELDS) + "\n")

    _write_meta(out, "ingest", [notes_path, *tables], cfg,
                extra={"rejected_lines": list(report.rejected_lines)})


def _load_clean_notes(out, stage):
    path = os.path.join(out, "clean_notes.jsonl")
    _require(stage, path)
    notes = []
    providers = {}
    specialties = {}
    metrics = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            raw_sentences = tuple(
                preprocess.RawSentence(r["index"], r["text"], r["start"], r["end"])
                for r in row["raw_sentences"])
            span = {r.index: (r.start, r.end) for r in raw_sentences}
            sentences = tuple(
                preprocess.Sentence(s["index"], tuple(s["tokens"]),
                                    span[s["index"]])
                for s in row["sentences"])
            all_tokens = tuple(t for s in sentences for t in s.tokens)
            m = preprocess.LinguisticMetrics(**row["metrics"])
            notes.append(preprocess.CleanNote(
                note_id=row["note_id"], sentences=sentences,
                all_tokens=all_tokens, metrics=m, raw_sentences=raw_sentences))
            providers[row["note_id"]] = row["provider_id"]
            specialties[row["note_id"]] = row["specialty"]
            metrics[row["note_id"]] = m
    return notes, providers, specialties, metrics


def stage_score(cfg, out, scores_path=None, emit_sentences=False):
    notes, providers, _, _ = _load_clean_notes(out, "score")
    scfg = _scorer_config(cfg)
    scores_path = scores_path or cfg.sentiment.scores_path
    if scores_path:
        _require("score", scores_path)
        sents = sentiment.load_external_scores(scores_path, notes, scfg)
    else:
        sents = {n.note_id: sentiment.score_note_baseline(n, scfg) for n in notes}

    with open(os.path.join(out, "sentence_scores.jsonl"), "w",
              encoding="utf-8") as fh:
        for n in notes:
            ns = sents[n.note_id]
            for i, sc in enumerate(ns.sentence_scores):
                fh.write(json.dumps({
                    "note_id": n.note_id, "sentence_index": i,
                    "p_neg": sc.p_neg, "p_neu": sc.p_neu, "p_pos": sc.p_pos,
                    "label": sc.label, "confidence": sc.confidence,
                }, sort_keys=True) + "\n")

    with open(os.path.join(out, "note_sentiment.jsonl"), "w",
              encoding="utf-8") as fh:
        for n in notes:
            ns = sents[n.note_id]
            fh.write(json.dumps({
                "note_id": n.note_id, "provider_id": providers[n.note_id],
                "doc_label": ns.doc_label, "doc_confidence": ns.doc_confidence,
                "high_conf_neg_sentences": ns.high_conf_neg_sentences,
            }, sort_keys=True) + "\n")

    if emit_sentences:
        with open(os.path.join(out, "sentences.jsonl"), "w",
                  encoding="utf-8") as fh:
            for n in notes:
                for rs in n.raw_sentences:
                    fh.write(json.dumps({
                        "note_id": n.note_id, "sentence_index": rs.index,
                        "text": rs.text, "start": rs.start, "end": rs.end,
                    }, sort_keys=True) + "\n")

    inputs = [os.path.join(out, "clean_notes.jsonl")]
    if scores_path:
        inputs.append(scores_path)
    _write_meta(out, "score", inputs, cfg,
                extra={"scorer": "external" if scores_path else "baseline"})


def _load_note_sentiments(out, stage):
    ns_path = os.path.join(out, "note_sentiment.jsonl")
    sc_path = os.path.join(out, "sentence_scores.jsonl")
    _require(stage, ns_path, sc_path)
    per_note_scores = {}
    with open(sc_path, encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            per_note_scores.setdefault(row["note_id"], []).append(
                sentiment.SentimentScore(row["p_neg"], row["p_neu"],
                                         row["p_pos"], row["label"],
                                         row["confidence"]))
    out_rows = []
    providers = {}
    with open(ns_path, encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            out_rows.append(sentiment.NoteSentiment(
                note_id=row["note_id"],
                sentence_scores=tuple(per_note_scores.get(row["note_id"], ())),
                doc_confidence=row["doc_confidence"],
                doc_label=row["doc_label"],
                high_conf_neg_sentences=row["high_conf_neg_sentences"]))
            providers[row["note_id"]] = row["provider_id"]
    return out_rows, providers


def _load_workload(out, stage):
    path = os.path.join(out, "workload.csv")
    _require(stage, path)
    workload = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            workload[row["provider_id"]] = ingestion.WorkloadRecord(
                provider_id=row["provider_id"],
                lab_order_count=int(row["lab_order_count"]),
                procedure_count=int(row["procedure_count"]),
                admission_count=int(row["admission_count"]),
                mortality_count=int(row["mortality_count"]),
                mortality_rate=float(row["mortality_rate"]),
                los_mean_days=float(row["los_mean_days"]),
                los_median_days=float(row["los_median_days"]),
            )
    return workload


def stage_features(cfg, out):
    notes, providers, specialties, metrics = _load_clean_notes(out, "features")
    note_sents, _ = _load_note_sentiments(out, "features")
    workload = _load_workload(out, "features")

    lexicon = stress.StressLexicon.load(cfg.paths.stress_lexicon)
    stress_counts = [stress.match_note(n, lexicon) for n in notes]
    with open(os.path.join(out, "stress_counts.jsonl"), "w",
              encoding="utf-8") as fh:
        for sc in stress_counts:
            fh.write(json.dumps({
                "note_id": sc.note_id, "per_category": sc.per_category,
                "total": sc.total, "normalized": sc.normalized,
            }, sort_keys=True) + "\n")

    tcfg = cfg.topics
    vocab = topics.build_vocabulary(notes, tcfg.vocab_top_k, tcfg.min_df)
    docs = [topics.doc_to_sequence(n.all_tokens, vocab) for n in notes]
    doc_ids = [n.note_id for n in notes]
    alpha, beta = tcfg.alpha, tcfg.beta
    if tcfg.tune:
        alpha, beta = topics.tune_hyperparameters(
            docs, tcfg.k, topics.DEFAULT_GRID, tcfg.iterations, cfg.seed,
            doc_ids=doc_ids, top_m=tcfg.top_m)
    state, model = topics.gibbs_fit(
        docs, tcfg.k, alpha, beta, tcfg.iterations, cfg.seed,
        V=len(vocab), doc_ids=doc_ids, coherence_top_m=tcfg.top_m)

    with open(os.path.join(out, "topic_vocabulary.txt"), "w",
              encoding="utf-8") as fh:
        for t in vocab.terms:
            fh.write(t + "\n")
    np.savetxt(os.path.join(out, "topic_phi.csv"), model.phi, delimiter=",")
    np.savetxt(os.path.join(out, "topic_theta.csv"), model.theta, delimiter=",")
    with open(os.path.join(out, "topic_meta.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "k": tcfg.k, "alpha": alpha, "beta": beta,
            "iterations": tcfg.iterations, "seed": cfg.seed,
            "vocab_size": len(vocab),
            "coherence": list(model.coherence),
            "top_terms": [[vocab.terms[w] for w in tt]
                          for tt in model.top_terms],
        }, fh, indent=1, sort_keys=True)
        fh.write("\n")

    retained = [n.note_id for n, d in zip(notes, docs) if d]
    theta_rows = model.theta
    doc_providers = [providers[nid] for nid in retained]
    profiles_topics = topics.provider_topic_profiles(theta_rows, doc_providers)

    sent_by_pid = sentiment.aggregate_provider_sentiment(note_sents, providers)
    stress_by_pid = stress.aggregate_provider_stress(stress_counts, providers)
    note_records = [(n.note_id, providers[n.note_id],
                     specialties[n.note_id], metrics[n.note_id])
                    for n in notes]
    profs, workload_only = features.fuse(
        note_records, sent_by_pid, stress_by_pid, profiles_topics,
        workload, tcfg.k)
    labeled, flagged, rate = features.label_corpus(
        profs, cfg.label.t_sentences, cfg.label.t_mentions, cfg.label.unit)

    schema = features.feature_schema(tcfg.k)
    with open(os.path.join(out, "profiles.csv"), "w", encoding="utf-8") as fh:
        fh.write("provider_id,specialty," + ",".join(schema) + ",silver_label\n")
        for p in labeled:
            _, vec = features.feature_vector(p)
            fh.write(p.provider_id + "," + p.specialty + "," +
                     ",".join(_fmt(v) for v in vec) +
                     f",{1 if p.silver_label else 0}\n")
    with open(os.path.join(out, "labels.csv"), "w", encoding="utf-8") as fh:
        fh.write("provider_id,silver_label\n")
        for p in labeled:
            fh.write(f"{p.provider_id},{1 if p.silver_label else 0}\n")
    with open(os.path.join(out, "workload_only_providers.csv"), "w",
              encoding="utf-8") as fh:
        fh.write("provider_id\n")
        for pid in workload_only:
            fh.write(pid + "\n")
    with open(os.path.join(out, "provider_topics.csv"), "w",
              encoding="utf-8") as fh:
        fh.write("provider_id," +
                 ",".join(f"topic_{k}" for k in range(tcfg.k)) +
                 ",top1_index,top1_weight,top2_index,top2_weight\n")
        for tp in profiles_topics:
            (i1, w1), (i2, w2) = tp.top2
            fh.write(tp.provider_id + "," +
                     ",".join(_fmt(v) for v in tp.mean_theta) +
                     f",{i1},{_fmt(w1)},{i2},{_fmt(w2)}\n")

    _write_meta(out, "features",
                [os.path.join(out, "clean_notes.jsonl"),
                 os.path.join(out, "note_sentiment.jsonl"),
                 os.path.join(out, "workload.csv")],
                cfg, extra={"flag_rate": rate, "n_flagged": len(flagged),
                            "alpha": alpha, "beta": beta})


def _load_profiles(out, stage):
    path = os.path.join(out, "profiles.csv")
    _require(stage, path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    feature_names = header[2:-1]
    ids = [r[0] for r in rows]
    specialties = {r[0]: r[1] for r in rows}
    X = np.array([[float(v) for v in r[2:-1]] for r in rows])
    y = {r[0]: r[-1] == "1" for r in rows}
    return ids, specialties, feature_names, X, y


def _classifier_matrix(cfg, feature_names, X):
    if cfg.classifier.include_label_inputs:
        keep = list(range(len(feature_names)))
    else:
        keep = [i for i, n in enumerate(feature_names)
                if n not in features.LABEL_INPUT_FEATURES]
    return [feature_names[i] for i in keep], X[:, keep]


def stage_train(cfg, out):
    ids, _, feature_names, X, y = _load_profiles(out, "train")
    names, Xc = _classifier_matrix(cfg, feature_names, X)
    labels = {pid: y[pid] for pid in ids}
    plan = classifier.stratified_split(labels, cfg.classifier.test_fraction,
                                       cfg.seed)
    idx = {pid: i for i, pid in enumerate(ids)}
    train_rows = [idx[p] for p in plan.train_ids]
    model = classifier.train(
        Xc[train_rows], np.array([1.0 if y[p] else 0.0 for p in plan.train_ids]),
        l2=cfg.classifier.l2, max_epochs=cfg.classifier.max_epochs,
        tol=cfg.classifier.tol, threshold=cfg.classifier.threshold)

    with open(os.path.join(out, "model.csv"), "w", encoding="utf-8") as fh:
        fh.write("feature,mean,std,weight\n")
        for n, m, s, w in zip(names, model.feature_means,
                              model.feature_stds, model.weights):
            fh.write(f"{n},{_fmt(float(m))},{_fmt(float(s))},{_fmt(float(w))}\n")
        fh.write(f"__bias__,0.0,1.0,{_fmt(float(model.bias))}\n")
    with open(os.path.join(out, "split.json"), "w", encoding="utf-8") as fh:
        json.dump({"seed": cfg.seed, "test_fraction": cfg.classifier.test_fraction,
                   "train_ids": list(plan.train_ids),
                   "test_ids": list(plan.test_ids)}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    _write_meta(out, "train",
                [os.path.join(out, "profiles.csv"),
                 os.path.join(out, "labels.csv")],
                cfg, extra={"epochs_run": model.epochs_run,
                            "final_loss": model.final_loss})


def _load_model(out, stage, cfg):
    path = os.path.join(out, "model.csv")
    _require(stage, path)
    names, means, stds, weights = [], [], [], []
    bias = 0.0
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["feature"] == "__bias__":
                bias = float(row["weight"])
                continue
            names.append(row["feature"])
            means.append(float(row["mean"]))
            stds.append(float(row["std"]))
            weights.append(float(row["weight"]))
    model = classifier.TrainedClassifier(
        weights=np.array(weights), bias=bias,
        feature_means=np.array(means), feature_stds=np.array(stds),
        l2=cfg.classifier.l2, epochs_run=0, final_loss=0.0,
        threshold=cfg.classifier.threshold)
    return names, model


def stage_evaluate(cfg, out):
    ids, _, feature_names, X, y = _load_profiles(out, "evaluate")
    split_path = os.path.join(out, "split.json")
    _require("evaluate", split_path)
    names, Xc = _classifier_matrix(cfg, feature_names, X)
    model_names, model = _load_model(out, "evaluate", cfg)
    if model_names != names:
        raise ingestion.IngestError("model feature schema mismatch")
    with open(split_path, encoding="utf-8") as fh:
        plan = json.load(fh)
    idx = {pid: i for i, pid in enumerate(ids)}
    test_ids = plan["test_ids"]
    Xt = Xc[[idx[p] for p in test_ids]]
    yt = [y[p] for p in test_ids]
    report = classifier.evaluate(model, Xt, yt)
    payload = {
        "tp": report.tp, "fp": report.fp, "fn": report.fn, "tn": report.tn,
        "precision": report.precision, "recall": report.recall,
        "f1": report.f1, "threshold": report.threshold, "seed": cfg.seed,
        "n_train": len(plan["train_ids"]), "n_test": len(test_ids),
    }
    with open(os.path.join(out, "eval.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")

    truth_path = os.path.join(out, "ground_truth.csv")
    if os.path.exists(truth_path):
        truth = {}
        with open(truth_path, encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                truth[row["provider_id"]] = row["is_burnout"] == "1"
        tt = [truth.get(p, False) for p in test_ids]
        report_t = classifier.evaluate(model, Xt, tt)
        with open(os.path.join(out, "eval_truth.json"), "w",
                  encoding="utf-8") as fh:
            json.dump({
                "tp": report_t.tp, "fp": report_t.fp, "fn": report_t.fn,
                "tn": report_t.tn, "precision": report_t.precision,
                "recall": report_t.recall, "f1": report_t.f1,
                "threshold": report_t.threshold, "seed": cfg.seed,
            }, fh, indent=1, sort_keys=True)
            fh.write("\n")

    _write_meta(out, "evaluate",
                [os.path.join(out, "model.csv"), split_path,
                 os.path.join(out, "profiles.csv")], cfg)


def stage_report(cfg, out):
    ids, specialties, feature_names, X, y = _load_profiles(out, "report")
    note_sents, providers = _load_note_sentiments(out, "report")
    _require("report", os.path.join(out, "eval.json"),
             os.path.join(out, "provider_topics.csv"),
             os.path.join(out, "clean_notes.jsonl"))

    # (a) corpus sentiment distribution
    pos, neu, neg = sentiment.corpus_sentiment_distribution(note_sents)
    with open(os.path.join(out, "sentiment_distribution.csv"), "w",
              encoding="utf-8") as fh:
        fh.write("label,fraction\n")
        fh.write(f"positive,{_fmt(pos)}\nneutral,{_fmt(neu)}\nnegative,{_fmt(neg)}\n")

    # (b) top providers by note count
    counts = {}
    for ns in note_sents:
        pid = providers[ns.note_id]
        counts[pid] = counts.get(pid, 0) + 1
    top10 = sorted(counts, key=lambda p: (-counts[p], p))[:10]
    with open(os.path.join(out, "top_providers.csv"), "w",
              encoding="utf-8") as fh:
        fh.write("provider_id,note_count\n")
        for pid in top10:
            fh.write(f"{pid},{counts[pid]}\n")

    # (c) topic profiles for the top-10 providers
    topic_rows = {}
    with open(os.path.join(out, "provider_topics.csv"), encoding="utf-8",
              newline="") as fh:
        for row in csv.DictReader(fh):
            topic_rows[row["provider_id"]] = row
    k = sum(1 for c in (topic_rows[next(iter(topic_rows))] if topic_rows else {})
            if c.startswith("topic_"))
    with open(os.path.join(out, "provider_topic_profiles.csv"), "w",
              encoding="utf-8") as fh:
        cols = [f"topic_{i}" for i in range(k)]
        fh.write("provider_id,note_count," + ",".join(cols) + "\n")
        for pid in top10:
            row = topic_rows.get(pid)
            vals = [row[c] for c in cols] if row else ["" for _ in cols]
            fh.write(f"{pid},{counts[pid]}," + ",".join(vals) + "\n")

    # (d) per-specialty fraction of high-severity notes
    note_specialty = {}
    with open(os.path.join(out, "clean_notes.jsonl"), encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            note_specialty[row["note_id"]] = row["specialty"]
    tau = cfg.sentiment.tau_sent
    per_spec = {}
    for ns in note_sents:
        spec = note_specialty[ns.note_id]
        total, severe = per_spec.get(spec, (0, 0))
        is_severe = (ns.doc_label == sentiment.NEGATIVE
                     and ns.doc_confidence >= tau)
        per_spec[spec] = (total + 1, severe + (1 if is_severe else 0))
    with open(os.path.join(out, "specialty_severity.csv"), "w",
              encoding="utf-8") as fh:
        fh.write("specialty,n_notes,high_severity_fraction\n")
        for spec in sorted(per_spec):
            total, severe = per_spec[spec]
            fh.write(f"{spec},{total},{_fmt(severe / total)}\n")

    # (e) MBI summary
    profs = _profiles_from_csv(out)
    mapping = features.default_mbi_mapping(profs, k)
    _, summary = features.mbi_report(profs, mapping)
    with open(os.path.join(out, "mbi_summary.csv"), "w", encoding="utf-8") as fh:
        fh.write("dimension,feature,flagged_mean,unflagged_mean\n")
        for dim in features.MBI_DIMENSIONS:
            for feat in mapping[dim]:
                s = summary[dim][feat]
                fh.write(f"{dim},{feat},{_fmt(s['flagged_mean'])},"
                         f"{_fmt(s['unflagged_mean'])}\n")

    # (f) eval passthrough
    with open(os.path.join(out, "eval.json"), encoding="utf-8") as fh:
        payload = fh.read()
    with open(os.path.join(out, "report_eval.json"), "w", encoding="utf-8") as fh:
        fh.write(payload)

    _write_meta(out, "report",
                [os.path.join(out, "profiles.csv"),
                 os.path.join(out, "note_sentiment.jsonl"),
                 os.path.join(out, "eval.json")], cfg)


def _profiles_from_csv(out):
    """Rebuild ProviderProfile objects from profiles.csv for reporting."""
    ids, specialties, feature_names, X, y = _load_profiles(out, "report")
    profs = []
    for i, pid in enumerate(ids):
        vals = dict(zip(feature_names, X[i]))
        n_topics = sum(1 for n in feature_names if n.startswith("topic_"))
        mean_theta = tuple(vals[f"topic_{k}"] for k in range(n_topics))
        ranked = sorted(range(n_topics), key=lambda k: (-mean_theta[k], k))
        profs.append(features.ProviderProfile(
            provider_id=pid,
            specialty=specialties[pid],
            note_count=int(vals["note_count"]),
            mean_doc_confidence=vals["mean_doc_confidence"],
            neg_note_fraction=vals["neg_note_fraction"],
            total_high_conf_neg_sentences=int(
                vals["total_high_conf_neg_sentences"]),
            total_mentions=int(vals["total_mentions"]),
            stress_mean_normalized={
                c: vals[f"stress_{c}"] for c in stress.CATEGORIES},
            mean_theta=mean_theta,
            top2_topics=tuple((k, mean_theta[k]) for k in ranked[:2]),
            workload=ingestion.WorkloadRecord(
                provider_id=pid,
                **{f: (int(vals[f]) if "count" in f else vals[f])
                   for f in features.WORKLOAD_FIELDS}),
            workload_missing=int(vals["workload_missing"]),
            linguistic={f: vals[f] for f in features.LINGUISTIC_FIELDS},
            silver_label=y[pid],
        ))
    return profs


STAGES = ["synth", "ingest", "score", "features", "train", "evaluate", "report"]


def run(command, cfg, out, scores_path=None, emit_sentences=False):
    os.makedirs(out, exist_ok=True)
    if command == "all":
        for stage in STAGES:
            run(stage, cfg, out, scores_path=scores_path,
                emit_sentences=emit_sentences)
        return
    if command == "synth":
        stage_synth(cfg, out)
    elif command == "ingest":
        stage_ingest(cfg, out)
    elif command == "score":
        stage_score(cfg, out, scores_path=scores_path,
                    emit_sentences=emit_sentences)
    elif command == "features":
        stage_features(cfg, out)
    elif command == "train":
        stage_train(cfg, out)
    elif command == "evaluate":
        stage_evaluate(cfg, out)
    elif command == "report":
        stage_report(cfg, out)
    else:
        raise ConfigError(f"unknown command {command!r}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="burnout-pipeline",
        description="Narrative burnout-risk pipeline over discharge summaries.")
    parser.add_argument("command", choices=STAGES + ["all"])
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="override global seed")
    parser.add_argument("--out", default="out", help="artifact directory")
    parser.add_argument("--scores", help="external sentence-score JSONL file")
    parser.add_argument("--emit-sentences", action="store_true",
                        help="export sentence boundaries during 'score'")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = {"seed": args.seed} if args.seed is not None else None
        cfg = load_config(args.config, overrides)
        run(args.command, cfg, args.out, scores_path=args.scores,
            emit_sentences=args.emit_sentences)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG_ERROR
    except MissingArtifact as exc:
        log.error("%s", exc)
        return EXIT_MISSING_ARTIFACT
    except (ingestion.IngestError, stress.LexiconError, synthgen.GenConfigError,
            topics.TopicConfigError, classifier.TrainingError, ValueError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
