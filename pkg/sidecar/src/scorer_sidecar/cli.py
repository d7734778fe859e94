import argparse
import logging
import os
import sys

from .model import BUNDLED_NAME, ModelError, load_scorer
from .scoring import InputError, read_boundaries, read_notes, score_rows, \
    write_scores

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISSING_INPUT = 2
EXIT_DATA_ERROR = 4


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="scorer-sidecar",
        description="Score exported sentence spans with a transformer and "
                    "emit a pipeline-compatible score JSONL file.")
    parser.add_argument("notes", help="notes JSONL file")
    parser.add_argument("sentences",
                        help="sentence-boundary JSONL file exported by the "
                             "pipeline (required; the sidecar never re-splits)")
    parser.add_argument("--out", default="scores.jsonl",
                        help="output score JSONL path")
    parser.add_argument("--model", default=BUNDLED_NAME,
                        help="sequence-classification checkpoint name or "
                             f"path, or '{BUNDLED_NAME}' for the offline "
                             "demonstration model")
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    for path in (args.notes, args.sentences):
        if not os.path.exists(path):
            log.error("missing input file: %s", path)
            return EXIT_MISSING_INPUT
    if args.batch_size < 1:
        log.error("batch size must be >= 1")
        return EXIT_DATA_ERROR
    try:
        texts = read_notes(args.notes)
        rows = read_boundaries(args.sentences, texts)
        tokenizer, model, perm = load_scorer(args.model, args.device)
        scored = score_rows(rows, tokenizer, model, perm,
                            batch_size=args.batch_size, device=args.device)
        write_scores(args.out, scored, args.model)
    except (InputError, ModelError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_DATA_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
