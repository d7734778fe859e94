"""Batch scoring of exported sentence spans into a score JSONL file."""

import json
import logging

import torch

from .model import probs_to_triple

log = logging.getLogger(__name__)


class InputError(Exception):
    pass


def read_notes(path):
    texts = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                texts[str(row["note_id"])] = row["text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"notes line {lineno}: {exc}") from exc
    if not texts:
        raise InputError("notes file contains no notes")
    return texts


def read_boundaries(path, texts):
    """Sentence rows as exported by the pipeline; every span is checked
    against the note text so the sidecar can never score drifted offsets."""
    rows = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                note_id = str(row["note_id"])
                idx = int(row["sentence_index"])
                text = row["text"]
                start, end = int(row["start"]), int(row["end"])
            except (json.JSONDecodeError, KeyError, TypeError,
                    ValueError) as exc:
                raise InputError(f"boundaries line {lineno}: {exc}") from exc
            if note_id not in texts:
                raise InputError(
                    f"boundaries line {lineno}: unknown note_id {note_id!r}")
            if texts[note_id][start:end] != text:
                raise InputError(
                    f"boundaries line {lineno}: span does not match note text")
            key = (note_id, idx)
            if key in seen:
                raise InputError(f"boundaries line {lineno}: duplicate {key}")
            seen.add(key)
            rows.append((note_id, idx, text))
    if not rows:
        raise InputError("boundaries file contains no sentences")
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def score_rows(rows, tokenizer, model, perm, batch_size=64, device="cpu"):
    out = []
    with torch.no_grad():
        for lo in range(0, len(rows), batch_size):
            batch = rows[lo:lo + batch_size]
            enc = tokenizer([r[2] for r in batch], return_tensors="pt",
                            padding=True, truncation=True)
            enc = {k: v.to(device) for k, v in enc.items()}
            probs = torch.softmax(model(**enc).logits, dim=-1).cpu().numpy()
            for (note_id, idx, _), p in zip(batch, probs):
                p_neg, p_neu, p_pos = probs_to_triple(p, perm)
                out.append({"note_id": note_id, "sentence_index": idx,
                            "p_neg": p_neg, "p_neu": p_neu, "p_pos": p_pos})
    return out


def write_scores(path, scored, model_name):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# scorer=transformer-sidecar model={model_name}\n")
        for row in scored:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    log.info("wrote %d score rows to %s", len(scored), path)
