"""Seven-category burnout stressor lexicon matching over raw sentence text."""

import re
from dataclasses import dataclass

from . import resources

CATEGORIES = (
    "long_hours",
    "staffing_shortage",
    "documentation_burden",
    "emotional_strain",
    "workload_pressure",
    "sleep_deprivation",
    "resource_constraints",
)


class LexiconError(Exception):
    pass


def _compile_pattern(pattern):
    """Literal phrase with optional bounded '*' wildcards (one word-ish run)."""
    parts = []
    for piece in pattern.strip().lower().split("*"):
        parts.append(re.escape(piece).replace(r"\ ", r"\s+"))
    body = r"[\w-]{1,20}".join(parts)
    return re.compile(r"(?<![\w-])(?:%s)(?![\w-])" % body)


@dataclass(frozen=True)
class StressLexicon:
    patterns: tuple  # (category, compiled regex, source text)

    @classmethod
    def load(cls, path=None):
        rows = resources.stress_lexicon_rows(path)
        pats = []
        seen_cats = []
        for row in rows:
            cat, pat = row["category"], row["pattern"]
            if cat not in CATEGORIES:
                raise LexiconError(f"unknown stressor category {cat!r}")
            if cat not in seen_cats:
                seen_cats.append(cat)
            if not pat.strip().strip("*"):
                raise LexiconError(f"pattern {pat!r} would match the empty string")
            try:
                rx = _compile_pattern(pat)
            except re.error as exc:
                raise LexiconError(f"pattern {pat!r} does not compile: {exc}") from exc
            pats.append((cat, rx, pat))
        if tuple(seen_cats) and set(seen_cats) != set(CATEGORIES):
            missing = set(CATEGORIES) - set(seen_cats)
            raise LexiconError(f"lexicon missing categories: {sorted(missing)}")
        return cls(patterns=tuple(pats))


@dataclass(frozen=True)
class StressCounts:
    note_id: str
    per_category: dict   # category -> count
    total: int
    normalized: dict     # category -> mentions per 1000 cleaned tokens


_PUNCT_RE = re.compile(r"[^\w\s-]")


def _prepare(sentence_text):
    # Lowercase, punctuation to space, intra-word hyphens preserved.
    return _PUNCT_RE.sub(" ", sentence_text.lower())


def match_sentence(sentence_text, lexicon):
    """Non-overlapping leftmost-longest matching of all patterns."""
    text = _prepare(sentence_text)
    counts = dict.fromkeys(CATEGORIES, 0)
    pos = 0
    n = len(text)
    while pos < n:
        best = None  # (start, -length, category)
        for cat, rx, _ in lexicon.patterns:
            m = rx.search(text, pos)
            if m is None:
                continue
            key = (m.start(), -(m.end() - m.start()))
            if best is None or key < best[0]:
                best = (key, cat, m.end())
        if best is None:
            break
        counts[best[1]] += 1
        pos = best[2]
    return counts


def match_note(note, lexicon):
    """Per-sentence matching aggregated per document; normalization uses the
    cleaned token count."""
    counts = dict.fromkeys(CATEGORIES, 0)
    for rs in note.raw_sentences:
        for cat, c in match_sentence(rs.text, lexicon).items():
            counts[cat] += c
    total = sum(counts.values())
    ntok = len(note.all_tokens)
    normalized = {
        cat: (1000.0 * c / ntok if ntok else 0.0) for cat, c in counts.items()
    }
    return StressCounts(note.note_id, counts, total, normalized)


def aggregate_provider_stress(stress_counts, note_provider):
    """Per-provider (total mentions, per-category mean normalized counts)."""
    grouped = {}
    for sc in stress_counts:
        grouped.setdefault(note_provider[sc.note_id], []).append(sc)
    out = {}
    for pid in sorted(grouped):
        group = grouped[pid]
        n = len(group)
        total = sum(sc.total for sc in group)
        means = {cat: sum(sc.normalized[cat] for sc in group) / n
                 for cat in CATEGORIES}
        out[pid] = (total, means)
    return out
