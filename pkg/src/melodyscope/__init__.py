"""Melodyscope: semi-automatic melodic pattern analysis for digital sheet music.

Parse MusicXML into an exact-rational score model, separate voices,
apply chains of the eight atomic melodic operators to a selected
pattern, search all voices for occurrences, and organize results in a
transformation graph with annotations, persistence, and coverage
heatmap exports.
"""

from .errors import MelodyscopeError
from .model import (
    NoteEvent,
    PatternInstance,
    RestEvent,
    Score,
    Voice,
    make_voice,
    select_range,
)
from .musicxml import ScoreMeta, load_corpus, parse_musicxml
from .operators import (
    ConstraintState,
    MatchResult,
    OperatorId,
    apply_operator,
    chain,
    match_window,
    normalize,
)
from .search import PatternSet, find_occurrences, operator_availability
from .graph import TransformationGraph
from .session import AnalysisSession, Annotation, heatmap, load_session, save_session
from .voices import separate, skyline_pass

__version__ = "0.1.0"

__all__ = [
    "MelodyscopeError",
    "NoteEvent",
    "RestEvent",
    "Voice",
    "Score",
    "PatternInstance",
    "make_voice",
    "select_range",
    "ScoreMeta",
    "parse_musicxml",
    "load_corpus",
    "OperatorId",
    "ConstraintState",
    "MatchResult",
    "normalize",
    "apply_operator",
    "chain",
    "match_window",
    "PatternSet",
    "find_occurrences",
    "operator_availability",
    "TransformationGraph",
    "AnalysisSession",
    "Annotation",
    "heatmap",
    "save_session",
    "load_session",
    "separate",
    "skyline_pass",
    "__version__",
]
