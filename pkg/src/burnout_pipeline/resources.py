"""Loaders for the versioned data files shipped with the package."""

import csv
from importlib import resources


def _data_path(name):
    return resources.files("burnout_pipeline").joinpath("data", name)


def read_wordlist(path=None, name=None):
    """One token per line; blank lines and '#' comments ignored."""
    src = path if path is not None else _data_path(name)
    words = []
    with open(src, encoding="utf-8") as fh:
        for line in fh:
            w = line.strip()
            if w and not w.startswith("#"):
                words.append(w)
    return words


def read_csv_rows(path=None, name=None):
    src = path if path is not None else _data_path(name)
    with open(src, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def stopwords(path=None):
    return frozenset(read_wordlist(path=path, name="stopwords.txt"))


def outcome_terms(path=None):
    return frozenset(read_wordlist(path=path, name="outcome_terms.txt"))


def lemma_exceptions(path=None):
    rows = read_csv_rows(path=path, name="lemma_exceptions.csv")
    return {r["form"]: r["lemma"] for r in rows}


def negative_cues(path=None):
    return frozenset(read_wordlist(path=path, name="cues_negative.txt"))


def positive_cues(path=None):
    return frozenset(read_wordlist(path=path, name="cues_positive.txt"))


def stress_lexicon_rows(path=None):
    return read_csv_rows(path=path, name="stress_lexicon.csv")


def specialty_map_rows(path=None):
    return read_csv_rows(path=path, name="specialty_map.csv")
