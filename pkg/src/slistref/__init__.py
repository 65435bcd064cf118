"""Incremental pronoun resolution over hand-annotated documents.

Two engine families share one document model and one compatibility test:
an incremental salience-list resolver (:func:`run_slist`) that processes
referring expressions word by word, and a centering baseline
(:func:`run_bfp`) with sentence-grained or clause-grained utterances.
Runs are scored against gold coreference chains with a wrong-resolution
taxonomy (:mod:`slistref.evaluate`) and reported through the ``slistref``
command line.
"""

from .compatibility import (CandidateContext, agreement_match,
                            binding_permits, compatible, context_for)
from .document import (Agreement, Clause, Document, DocumentError, Markable,
                       ParseError, DanglingReferenceError, Segment, Token,
                       ValidationError, derive_segments, is_excluded,
                       is_resolvable, load_document, load_document_file,
                       referring_expressions_in_order, segment_of_sentence)
from .evaluate import (CATEGORIES, ResolutionRecord, ScoreTable,
                       classify_errors, score)
from .slist import (FAMILIARITY_CLASSES, FamiliarityTracker, Realization,
                    SList, SListRun, classify_realization, precedes,
                    run_slist, status_set, updated_realization)
from .centering import (CenteringRun, CenteringUtterance, PrevContext,
                        Reading, Transition, classify_transition,
                        filter_readings, generate_readings, rank_cf,
                        rank_readings, run_bfp, split_utterances_bfp)
from .kameyama import ClauseUtterance, split_utterances_kameyama

__version__ = "0.1.0"

__all__ = [
    "Agreement", "CandidateContext", "CATEGORIES", "FAMILIARITY_CLASSES",
    "CenteringRun",
    "CenteringUtterance", "Clause", "ClauseUtterance", "DanglingReferenceError",
    "Document", "DocumentError", "FamiliarityTracker", "Markable",
    "ParseError", "PrevContext", "Reading", "Realization", "ResolutionRecord",
    "ScoreTable", "Segment", "SList", "SListRun", "Token", "Transition",
    "ValidationError", "agreement_match", "binding_permits",
    "classify_errors", "classify_realization", "classify_transition",
    "compatible", "context_for", "derive_segments", "filter_readings",
    "segment_of_sentence",
    "generate_readings", "is_excluded", "is_resolvable", "load_document",
    "load_document_file", "precedes", "rank_cf", "rank_readings",
    "referring_expressions_in_order", "run_bfp", "run_slist", "score",
    "split_utterances_bfp", "split_utterances_kameyama", "status_set",
    "updated_realization", "__version__",
]
