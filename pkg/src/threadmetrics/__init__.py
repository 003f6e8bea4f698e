"""Behavioral analytics for threaded discussion dumps (posts + comments)."""

from .classifiers import ClassifierConfig, CyborgClass, EvolutionClass
from .ingest import CommentRecord, IngestStats, Period, PostRecord
from .pipeline import AnalysisConfig, run_analysis
from .synth import CorpusSpec, generate_corpus

__all__ = [
    "AnalysisConfig",
    "ClassifierConfig",
    "CommentRecord",
    "CorpusSpec",
    "CyborgClass",
    "EvolutionClass",
    "IngestStats",
    "Period",
    "PostRecord",
    "generate_corpus",
    "run_analysis",
]

__version__ = "0.1.0"
