"""Pipeline configuration: one JSON file, unknown keys rejected."""

import dataclasses
import json
from dataclasses import dataclass, field

from .synthgen import GenConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class SentimentSection:
    # The note-level sentiment threshold in the source method is not
    # recoverable; tau_sent stays configurable. The pipeline default
    # temperature sharpens the baseline scorer so cue-dense sentences can
    # reach high confidence.
    tau_sent: float = 0.75
    temperature: float = 0.25
    scores_path: str = None


@dataclass(frozen=True)
class TopicsSection:
    k: int = 5
    alpha: float = 0.1
    beta: float = 0.01
    iterations: int = 1000
    vocab_top_k: int = 2000
    min_df: int = 5
    tune: bool = False
    top_m: int = 10


@dataclass(frozen=True)
class LabelSection:
    t_sentences: int = 12
    t_mentions: int = 7
    unit: str = "sentences"  # or "notes"


@dataclass(frozen=True)
class ClassifierSection:
    l2: float = 1.0
    max_epochs: int = 1000
    tol: float = 1e-6
    threshold: float = 0.5
    test_fraction: float = 0.2
    include_label_inputs: bool = False


@dataclass(frozen=True)
class PathsSection:
    stopwords: str = None
    lemma_exceptions: str = None
    outcome_terms: str = None
    stress_lexicon: str = None
    specialty_map: str = None
    negative_cues: str = None
    positive_cues: str = None


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 42
    sentiment: SentimentSection = field(default_factory=SentimentSection)
    topics: TopicsSection = field(default_factory=TopicsSection)
    label: LabelSection = field(default_factory=LabelSection)
    classifier: ClassifierSection = field(default_factory=ClassifierSection)
    paths: PathsSection = field(default_factory=PathsSection)
    synth: GenConfig = field(default_factory=GenConfig)


_SECTION_TYPES = {
    "sentiment": SentimentSection,
    "topics": TopicsSection,
    "label": LabelSection,
    "classifier": ClassifierSection,
    "paths": PathsSection,
    "synth": GenConfig,
}


def _build(cls, data, where):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")
    coerced = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        v = data[f.name]
        if f.name == "specialty_weights" and isinstance(v, list):
            v = tuple(v)
        coerced[f.name] = v
    try:
        return cls(**coerced)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in {where}: {exc}") from exc


def load_config(path=None, overrides=None):
    data = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    if overrides:
        data.update(overrides)

    top_names = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(data) - top_names
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {sorted(unknown)}")
    kwargs = {}
    if "seed" in data:
        kwargs["seed"] = int(data["seed"])
    for name, cls in _SECTION_TYPES.items():
        if name in data:
            if not isinstance(data[name], dict):
                raise ConfigError(f"section {name!r} must be an object")
            section = dict(data[name])
            if name == "synth" and "seed" not in section:
                section["seed"] = kwargs.get("seed", PipelineConfig.seed)
            kwargs[name] = _build(cls, section, f"section {name!r}")
    cfg = PipelineConfig(**kwargs)
    if "synth" not in kwargs:
        cfg = dataclasses.replace(cfg, synth=GenConfig(seed=cfg.seed))
    if cfg.label.unit not in ("sentences", "notes"):
        raise ConfigError("label.unit must be 'sentences' or 'notes'")
    if not (1 / 3 < cfg.sentiment.tau_sent <= 1.0):
        raise ConfigError("sentiment.tau_sent must lie in (1/3, 1]")
    if cfg.sentiment.temperature <= 0:
        raise ConfigError("sentiment.temperature must be positive")
    return cfg
