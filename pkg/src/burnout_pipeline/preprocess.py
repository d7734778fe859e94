"""Deterministic text normalization and baseline linguistic metrics.

The cleaning pipeline is fixed-order: de-id placeholder removal, lowercasing,
alphanumeric tokenization, numeric collapsing, outcome-term removal, stop-word
removal, then a rule/table stemmer-lemmatizer. No external NLP toolkit.
"""

import re
from dataclasses import dataclass, field

from . import resources

NUM_TOKEN = "<num>"

# Abbreviations whose trailing period does not end a sentence.
ABBREVIATIONS = ("dr.", "mr.", "mrs.", "vs.", "e.g.", "i.e.", "mg.", "ml.")

FIRST_PERSON = frozenset(
    ["i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"]
)
THIRD_PERSON = frozenset(
    ["he", "him", "his", "himself", "she", "her", "hers", "herself",
     "they", "them", "their", "theirs", "themselves", "it", "its", "itself"]
)

_PLACEHOLDER_RE = re.compile(r"\[\*\*.*?\*\*\]|_{3,}", re.DOTALL)
# Alpha and digit runs tokenize separately so every numeric run collapses
# to the <num> placeholder and no output token mixes letters and digits.
_TOKEN_RE = re.compile(r"[a-z]+|[0-9]+")
_VOWELS = set("aeiou")


@dataclass(frozen=True)
class PreprocessConfig:
    stop_words: frozenset = field(default_factory=resources.stopwords)
    lemma_exceptions: dict = field(default_factory=resources.lemma_exceptions)
    outcome_terms: frozenset = field(default_factory=resources.outcome_terms)


@dataclass(frozen=True)
class RawSentence:
    index: int
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple
    raw_span: tuple  # (start, end) character offsets into the original text


@dataclass(frozen=True)
class LinguisticMetrics:
    word_count: int
    sentence_count: int
    avg_token_length: float
    type_token_ratio: float
    first_person_freq: float
    third_person_freq: float


@dataclass(frozen=True)
class CleanNote:
    note_id: str
    sentences: tuple          # Sentence, only those with nonempty tokens
    all_tokens: tuple         # concatenation of sentence tokens in order
    metrics: LinguisticMetrics
    raw_sentences: tuple      # RawSentence for every retained raw sentence


def _abbreviation_guard(text, dot_idx):
    """True when the period at dot_idx sits inside a known abbreviation."""
    ws = dot_idx
    while ws > 0 and not text[ws - 1].isspace():
        ws -= 1
    candidate = text[ws:dot_idx + 1].lower()
    for abbr in ABBREVIATIONS:
        if abbr == candidate:
            return True
        if abbr.startswith(candidate) and len(abbr) > len(candidate):
            return True
    return False


def split_sentences(text):
    """Split on '.', '!', '?' and newline runs; returns RawSentence list.

    Whitespace-only segments are dropped; offsets index the trimmed span in
    the original text.
    """
    sentences = []
    seg_start = 0
    i = 0
    n = len(text)

    def flush(end, term_end):
        nonlocal seg_start
        seg = text[seg_start:end]
        lstrip = len(seg) - len(seg.lstrip())
        rstrip = len(seg) - len(seg.rstrip())
        if seg.strip():
            s = seg_start + lstrip
            e = end - rstrip
            sentences.append(RawSentence(len(sentences), text[s:e], s, e))
        seg_start = term_end

    while i < n:
        c = text[i]
        if c in "!?":
            flush(i + 1, i + 1)
            i += 1
        elif c == ".":
            if _abbreviation_guard(text, i):
                i += 1
            else:
                flush(i + 1, i + 1)
                i += 1
        elif c == "\n":
            j = i
            while j < n and text[j] in "\r\n":
                j += 1
            flush(i, j)
            i = j
        else:
            i += 1
    flush(n, n)
    return sentences


def lemmatize(token, exceptions=None):
    """Table lookup first, then ordered suffix rules. Stemmer approximation."""
    if exceptions and token in exceptions:
        return exceptions[token]
    if token.endswith("ies") and len(token) > 3:
        return token[:-3] + "y"
    if token.endswith("sses"):
        return token[:-2]
    if token.endswith("s") and not token.endswith(("ss", "us")) and len(token) > 2:
        return token[:-1]
    if token.endswith("ing") and len(token) - 3 >= 3:
        return token[:-3]
    if token.endswith("ed") and len(token) - 2 >= 3:
        # Vowel+consonant before the suffix marks a dropped final 'e'
        # (receive->received), so only the 'd' comes off; otherwise the whole
        # 'ed' does (admitted->admitt, worked->work).
        a, b = token[-4], token[-3]
        if a in _VOWELS and b not in _VOWELS:
            return token[:-1]
        return token[:-2]
    return token


def strip_placeholders(text):
    return _PLACEHOLDER_RE.sub(" ", text)


def base_tokens(sentence_text):
    """Pipeline steps 1-4: placeholders, lowercase, split, numeric collapse.

    Pronoun counting runs on this stream, before stop-word removal.
    """
    cleaned = strip_placeholders(sentence_text).lower()
    out = []
    for tok in _TOKEN_RE.findall(cleaned):
        out.append(NUM_TOKEN if tok.isdigit() else tok)
    return out


def normalize_tokens(sentence_text, config):
    """Full fixed-order normalization of one raw sentence into tokens."""
    out = []
    for tok in base_tokens(sentence_text):
        if tok == NUM_TOKEN:
            out.append(tok)
            continue
        if tok in config.outcome_terms:
            continue
        if tok in config.stop_words:
            continue
        out.append(lemmatize(tok, config.lemma_exceptions))
    return out


def compute_metrics(pre_stop_tokens, clean_tokens, sentence_count):
    """Six baseline metrics; counts on the pre-stop-word stream, richness on
    cleaned tokens. Zero denominators yield 0."""
    word_count = len(pre_stop_tokens)
    if word_count:
        fp = sum(1 for t in pre_stop_tokens if t in FIRST_PERSON) / word_count
        tp = sum(1 for t in pre_stop_tokens if t in THIRD_PERSON) / word_count
    else:
        fp = tp = 0.0
    if clean_tokens:
        ttr = len(set(clean_tokens)) / len(clean_tokens)
    else:
        ttr = 0.0
    lens = [len(t) for t in clean_tokens if t != NUM_TOKEN]
    avg_len = sum(lens) / len(lens) if lens else 0.0
    return LinguisticMetrics(
        word_count=word_count,
        sentence_count=sentence_count,
        avg_token_length=avg_len,
        type_token_ratio=ttr,
        first_person_freq=fp,
        third_person_freq=tp,
    )


def clean_note(note_id, text, config=None):
    """Run the whole preprocessing pipeline on one note."""
    config = config or PreprocessConfig()
    raw = tuple(split_sentences(text))
    sentences = []
    all_tokens = []
    pre_stop = []
    for rs in raw:
        pre_stop.extend(base_tokens(rs.text))
        toks = normalize_tokens(rs.text, config)
        if toks:
            sentences.append(Sentence(rs.index, tuple(toks), (rs.start, rs.end)))
            all_tokens.extend(toks)
    metrics = compute_metrics(pre_stop, all_tokens, len(raw))
    return CleanNote(
        note_id=note_id,
        sentences=tuple(sentences),
        all_tokens=tuple(all_tokens),
        metrics=metrics,
        raw_sentences=raw,
    )
