"""Exception hierarchy shared across the engine.

Every error carries a machine-readable ``code`` and the HTTP status the
service layer maps it to, so API responses stay consistent with the
documented error contract.
"""

from __future__ import annotations


class MelodyscopeError(Exception):
    """Base class for all engine errors."""

    code = "bad_request"
    http_status = 400


class NotFound(MelodyscopeError):
    """Base for lookups of ids that do not exist."""

    code = "not_found"
    http_status = 404


# -- score model --------------------------------------------------------


class MonophonyViolation(MelodyscopeError):
    """Two notes in one voice sound at the same time."""


class NotSameVoice(MelodyscopeError):
    """A selection endpoint belongs to a different voice."""


class EmptySelection(MelodyscopeError):
    """Selection covers fewer than two notes (same note or inverted order)."""


# -- MusicXML ingest -----------------------------------------------------


class MalformedDocument(MelodyscopeError):
    """Document is not parseable XML or lacks required structure."""


class UnsupportedRoot(MelodyscopeError):
    """Document root is not ``score-partwise`` (e.g. timewise or opus)."""


class UnsupportedFeature(MelodyscopeError):
    """An element outside the supported MusicXML subset was required.

    ``element`` names the offending element.
    """

    code = "unsupported_feature"
    http_status = 422

    def __init__(self, element: str, message: str = ""):
        self.element = element
        super().__init__(message or f"unsupported MusicXML feature: {element}")


class NonPositive(MelodyscopeError):
    """A duration or divisions value that must be positive is not."""


# -- operators -----------------------------------------------------------


class TooShort(MelodyscopeError):
    """Pattern has fewer than two notes."""


class DegenerateChain(MelodyscopeError):
    """Operator chain frees both pitch and time, matching everything."""

    code = "degenerate_chain"


class ChainTooDeep(MelodyscopeError):
    """Operator chain exceeds the configured depth cap."""


class LengthMismatch(MelodyscopeError):
    """Candidate window length differs from the constraint state length."""


# -- transformation graph -------------------------------------------------


class UnknownNode(NotFound):
    """Graph node id does not exist."""


class DuplicateSet(MelodyscopeError):
    """An identical selection is already rooted in the graph."""


class OriginMismatch(MelodyscopeError):
    """Result set's recorded origin does not match the expansion request."""


class UnknownFormat(MelodyscopeError):
    """Requested export format is not supported."""


# -- sessions -------------------------------------------------------------


class UnknownSet(NotFound):
    """Pattern set id does not exist in the session."""


class DescriptionTooLong(MelodyscopeError):
    """Annotation description exceeds 280 characters."""


class LabelTooLong(MelodyscopeError):
    """Annotation label exceeds 40 characters."""


class BadColor(MelodyscopeError):
    """Color is not a ``#RRGGBB`` hex string."""


class VersionMismatch(MelodyscopeError):
    """Persisted session document has an unsupported version."""

    code = "version_mismatch"
    http_status = 409


class ScoreMismatch(MelodyscopeError):
    """Session document belongs to a different score."""

    code = "score_mismatch"
    http_status = 409


class SchemaError(MelodyscopeError):
    """Session document is truncated or structurally invalid."""
