"""simpkit: dataset construction and evaluation toolkit for sentence-level
text simplification.

Subpackages:
  corpus      segmentation, candidate filtering, dataset assembly/splits
  metrics     BLEU, SARI, FKGL with pinned conventions
  promptgen   prompt templates and the staged generation pipeline
  evalharness backends, evaluation runs, checkpoint sweeps, comparisons
  humaneval   dual-annotator rubric scoring, agreement, consensus, HTTP API
  cli         the `simpkit` command-line entry point
"""

__version__ = "0.1.0"
