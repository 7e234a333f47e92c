"""Motif candidate matching and usage classification for news corpora.

The pipeline: a rule-based lexical matcher proposes motif candidates at
high recall, per-document NLP layer caches feed a fixed-schema feature
extractor, and a linear max-margin classifier assigns each candidate one
of four usage categories (motific, referential, eponymic, unrelated).
Evaluation and annotator-agreement statistics round out the toolkit.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .corpus import (
    AnnotationRecord,
    Candidate,
    Culture,
    Document,
    LayerBundle,
    MotifEntry,
    MotifType,
    Span,
    UsageLabel,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "Candidate",
    "Culture",
    "Document",
    "KERNEL_BACKEND",
    "LayerBundle",
    "MotifEntry",
    "MotifType",
    "Span",
    "UsageLabel",
    "__version__",
]
