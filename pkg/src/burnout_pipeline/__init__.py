"""Narrative burnout-risk surveillance pipeline for ICU discharge summaries."""

__version__ = "0.1.0"
