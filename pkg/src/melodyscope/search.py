"""Sliding-window pattern search across voices.

Search is a plain scan of every length-n contiguous window of every
voice with early-exit predicate evaluation; corpora are single
compositions, so no indexing is needed. Result order is canonical
(voice order in the given list, then start index) regardless of how the
per-voice scans are executed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Sequence

from .errors import DegenerateChain
from .model import PatternInstance, Voice
from .operators import (
    ALL_OPERATORS,
    ConstraintState,
    OperatorId,
    apply_operator,
    match_window,
)


@dataclass(frozen=True)
class SetOrigin:
    """How a pattern set came to be: a user selection, or derived from a
    parent set by one operator."""

    kind: Literal["selection", "derived"]
    parent_set_id: str | None = None
    operator: OperatorId | None = None

    @classmethod
    def selection(cls) -> "SetOrigin":
        return cls(kind="selection")

    @classmethod
    def derived(cls, parent_set_id: str, operator: OperatorId) -> "SetOrigin":
        return cls(kind="derived", parent_set_id=parent_set_id, operator=operator)


@dataclass(frozen=True)
class PatternSet:
    """A deduplicated set of same-length pattern instances plus provenance."""

    id: str
    instances: tuple[PatternInstance, ...]
    origin: SetOrigin
    chain: tuple[OperatorId, ...] = ()

    def __post_init__(self):
        deduped: list[PatternInstance] = []
        seen: set[PatternInstance] = set()
        for inst in self.instances:
            if inst not in seen:
                seen.add(inst)
                deduped.append(inst)
        object.__setattr__(self, "instances", tuple(deduped))
        object.__setattr__(self, "chain", tuple(self.chain))
        lengths = {inst.length for inst in self.instances}
        if len(lengths) > 1:
            raise ValueError("all instances of a set must share one length")

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def pattern_length(self) -> int:
        return self.instances[0].length if self.instances else 0

    def instance_keys(self) -> frozenset[PatternInstance]:
        return frozenset(self.instances)


def enumerate_windows(
    voice: Voice, n: int
) -> Iterator[tuple[int, tuple[tuple[int, Fraction], ...]]]:
    """Yield (start_index, (pitch, duration) window) for every length-n
    contiguous window of the voice."""
    if n < 2:
        raise ValueError("window length must be >= 2")
    notes = voice.notes
    for start in range(len(notes) - n + 1):
        window = tuple((note.pitch, note.duration) for note in notes[start : start + n])
        yield start, window


def find_occurrences(
    voices: Sequence[Voice],
    state: ConstraintState,
    set_id: str | None = None,
    origin: SetOrigin | None = None,
) -> PatternSet:
    """Find every window in every voice matching the constraint state.

    Instances come back sorted by (position of the voice in ``voices``,
    start index); overlapping instances are permitted. An empty set is a
    valid result.
    """
    instances: list[PatternInstance] = []
    n = len(state)
    for voice in voices:
        for start, window in enumerate_windows(voice, n):
            if match_window(state, window).matched:
                instances.append(
                    PatternInstance(voice=voice.id, start_index=start, length=n)
                )
    if origin is None:
        origin = SetOrigin.selection()
    if set_id is None:
        set_id = _digest_id(state, instances)
    return PatternSet(
        id=set_id,
        instances=tuple(instances),
        origin=origin,
        chain=state.applied_chain,
    )


def operator_availability(
    voices: Sequence[Voice], state: ConstraintState
) -> dict[OperatorId, int]:
    """Occurrence count each operator would produce from this state.

    Drives the operator-selection panel: a button is enabled iff its
    count is positive. Degenerate chains count as zero.
    """
    availability: dict[OperatorId, int] = {}
    for op in ALL_OPERATORS:
        try:
            next_state = apply_operator(state, op)
        except DegenerateChain:
            availability[op] = 0
            continue
        availability[op] = len(find_occurrences(voices, next_state))
    return availability


def _digest_id(state: ConstraintState, instances: Sequence[PatternInstance]) -> str:
    """Deterministic fallback id for sets created outside a session."""
    h = hashlib.sha1()
    h.update(",".join(op.value for op in state.applied_chain).encode())
    h.update(repr([(i.voice, i.start_index, i.length) for i in instances]).encode())
    return "set-" + h.hexdigest()[:10]
