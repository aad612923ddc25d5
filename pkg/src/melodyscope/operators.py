"""The melodic operator algebra.

A selected pattern is normalized into a :class:`ConstraintState`, a
canonical query form holding the pattern's pitch and duration symbols
plus a pitch mode and a time mode. The eight atomic operators are
transforms on that state; chains are left folds of single applications.
Matching a candidate window against a state is a pure predicate.

Mode semantics:

- pitch ``exact``: window pitches equal the state pitches.
- pitch ``transposable``: interval sequences equal and the shift is
  nonzero (a zero shift is repetition, not transposition).
- pitch ``free``: any pitches.
- time ``exact``: window durations equal the state durations.
- time ``scalable_up``/``scalable_down``: one rational factor f > 1
  (resp. 0 < f < 1) scales every state duration onto the window.
- time ``free``: any durations.

A state with both modes free would match everything; it is rejected as
degenerate at every construction path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ChainTooDeep, DegenerateChain, LengthMismatch, TooShort


class OperatorId(enum.Enum):
    """The eight atomic melodic operators."""

    TRANSPOSITION = "O1"
    MIRROR_X = "O2"
    MIRROR_Y = "O3"
    AUGMENTATION = "O4"
    DIMINUTION = "O5"
    SAME_PITCH = "O6"
    RHYTHM_ONLY = "O7"
    REPETITION = "O8"

    @property
    def label(self) -> str:
        return _OPERATOR_LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "OperatorId":
        """Accept 'O1'..'O8' (case-insensitive)."""
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown operator {text!r}; expected O1..O8") from None


_OPERATOR_LABELS = {
    OperatorId.TRANSPOSITION: "Transposition",
    OperatorId.MIRROR_X: "Mirror on X-Axis",
    OperatorId.MIRROR_Y: "Mirror on Y-Axis",
    OperatorId.AUGMENTATION: "Augmentation",
    OperatorId.DIMINUTION: "Diminution",
    OperatorId.SAME_PITCH: "Same Pitch",
    OperatorId.RHYTHM_ONLY: "Rhythm Only",
    OperatorId.REPETITION: "Repetition",
}

ALL_OPERATORS: tuple[OperatorId, ...] = tuple(OperatorId)

# Chains deeper than this are refused by default; long chains overfit.
DEFAULT_MAX_CHAIN_DEPTH = 4


class PitchMode(enum.Enum):
    EXACT = "exact"
    TRANSPOSABLE = "transposable"
    FREE = "free"


class TimeMode(enum.Enum):
    EXACT = "exact"
    SCALABLE_UP = "scalable_up"
    SCALABLE_DOWN = "scalable_down"
    FREE = "free"


PatternNotes = Sequence[tuple[int, Fraction | int]]


@dataclass(frozen=True)
class ConstraintState:
    """Canonical query form of a pattern under a chain of operators."""

    pitches: tuple[int, ...]
    durations: tuple[Fraction, ...]
    pitch_mode: PitchMode = PitchMode.EXACT
    time_mode: TimeMode = TimeMode.EXACT
    applied_chain: tuple[OperatorId, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pitches", tuple(int(p) for p in self.pitches))
        object.__setattr__(
            self, "durations", tuple(Fraction(d) for d in self.durations)
        )
        object.__setattr__(self, "applied_chain", tuple(self.applied_chain))
        if len(self.pitches) < 2:
            raise TooShort("a pattern needs at least two notes")
        if len(self.pitches) != len(self.durations):
            raise ValueError("pitches and durations must have equal length")
        if any(d <= 0 for d in self.durations):
            raise ValueError("durations must be positive")
        if self.pitch_mode is PitchMode.FREE and self.time_mode is TimeMode.FREE:
            raise DegenerateChain(
                "chain "
                + ",".join(op.value for op in self.applied_chain)
                + " frees both pitch and time; the query would match everything"
            )

    def __len__(self) -> int:
        return len(self.pitches)

    @property
    def intervals(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.pitches, self.pitches[1:]))


@dataclass(frozen=True)
class MatchResult:
    """Outcome of testing one window against a state.

    ``shift`` is set only for transposable matches, ``scale`` only for
    scalable ones.
    """

    matched: bool
    shift: int | None = None
    scale: Fraction | None = None

    def __bool__(self) -> bool:
        return self.matched


NO_MATCH = MatchResult(False)


def normalize(pattern_notes: PatternNotes) -> ConstraintState:
    """Normalize a selected pattern into its exact/exact constraint state.

    Raises:
        TooShort: for patterns of fewer than two notes.
    """
    pitches = tuple(p for p, _ in pattern_notes)
    durations = tuple(Fraction(d) for _, d in pattern_notes)
    if len(pitches) < 2:
        raise TooShort("a pattern needs at least two notes")
    return ConstraintState(pitches=pitches, durations=durations)


def apply_operator(state: ConstraintState, op: OperatorId) -> ConstraintState:
    """Apply one atomic operator, returning a new state.

    Raises:
        DegenerateChain: if the result would free both pitch and time.
    """
    chain_after = state.applied_chain + (op,)
    if op is OperatorId.TRANSPOSITION:
        return replace(state, pitch_mode=PitchMode.TRANSPOSABLE, applied_chain=chain_after)
    if op is OperatorId.MIRROR_X:
        first = state.pitches[0]
        mirrored = tuple(2 * first - p for p in state.pitches)
        return replace(state, pitches=mirrored, applied_chain=chain_after)
    if op is OperatorId.MIRROR_Y:
        return replace(
            state,
            pitches=state.pitches[::-1],
            durations=state.durations[::-1],
            applied_chain=chain_after,
        )
    if op is OperatorId.AUGMENTATION:
        return replace(state, time_mode=TimeMode.SCALABLE_UP, applied_chain=chain_after)
    if op is OperatorId.DIMINUTION:
        return replace(state, time_mode=TimeMode.SCALABLE_DOWN, applied_chain=chain_after)
    if op is OperatorId.SAME_PITCH:
        return replace(state, time_mode=TimeMode.FREE, applied_chain=chain_after)
    if op is OperatorId.RHYTHM_ONLY:
        return replace(state, pitch_mode=PitchMode.FREE, applied_chain=chain_after)
    if op is OperatorId.REPETITION:
        return replace(state, applied_chain=chain_after)
    raise ValueError(f"unhandled operator {op!r}")


def chain(
    state: ConstraintState,
    ops: Iterable[OperatorId],
    max_depth: int | None = DEFAULT_MAX_CHAIN_DEPTH,
) -> ConstraintState:
    """Left fold of apply_operator over a non-empty operator sequence.

    Raises:
        ChainTooDeep: if the resulting chain would exceed ``max_depth``
            (pass None to lift the cap).
    """
    ops = tuple(ops)
    if not ops:
        raise ValueError("operator chain must not be empty")
    if max_depth is not None and len(state.applied_chain) + len(ops) > max_depth:
        raise ChainTooDeep(
            f"chain of depth {len(state.applied_chain) + len(ops)} exceeds "
            f"the cap of {max_depth}"
        )
    for op in ops:
        state = apply_operator(state, op)
    return state


def match_window(
    state: ConstraintState, window: PatternNotes
) -> MatchResult:
    """Decide whether a candidate window satisfies the state's constraints.

    Raises:
        LengthMismatch: if the window length differs from the state.
    """
    if len(window) != len(state):
        raise LengthMismatch(
            f"window has {len(window)} notes, state expects {len(state)}"
        )
    w_pitches = tuple(p for p, _ in window)
    w_durations = tuple(Fraction(d) for _, d in window)

    shift: int | None = None
    if state.pitch_mode is PitchMode.EXACT:
        if w_pitches != state.pitches:
            return NO_MATCH
    elif state.pitch_mode is PitchMode.TRANSPOSABLE:
        shift = w_pitches[0] - state.pitches[0]
        if shift == 0:
            return NO_MATCH
        if any(w - p != shift for w, p in zip(w_pitches, state.pitches)):
            return NO_MATCH

    scale: Fraction | None = None
    if state.time_mode is TimeMode.EXACT:
        if w_durations != state.durations:
            return NO_MATCH
    elif state.time_mode in (TimeMode.SCALABLE_UP, TimeMode.SCALABLE_DOWN):
        scale = w_durations[0] / state.durations[0]
        if state.time_mode is TimeMode.SCALABLE_UP and not scale > 1:
            return NO_MATCH
        if state.time_mode is TimeMode.SCALABLE_DOWN and not 0 < scale < 1:
            return NO_MATCH
        if any(w != scale * d for w, d in zip(w_durations, state.durations)):
            return NO_MATCH

    return MatchResult(True, shift=shift, scale=scale)
