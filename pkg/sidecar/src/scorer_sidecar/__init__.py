"""Transformer sentence-sentiment sidecar.

Reads a notes JSONL file plus the sentence-boundary JSONL exported by the
main pipeline, scores every exported sentence with a sequence-classification
transformer, and writes a score JSONL file the pipeline ingests through its
external-scores interface. The sidecar never re-splits text: it scores the
exact sentence spans it is given.
"""

__version__ = "0.1.0"
