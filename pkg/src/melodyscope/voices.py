"""Split polyphonic part streams into strictly monophonic voices.

Encoded MusicXML voice numbers are trusted when they already describe
monophonic lines; otherwise the part falls back to repeated envelope
(skyline) extraction: peel the greedy top line, recurse on the
remainder. Both paths conserve the input note multiset exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .model import NoteEvent, RestEvent, Voice, make_voice


@dataclass(frozen=True)
class SimultaneityStack:
    """All notes sounding at one onset (chord members plus held notes)."""

    onset: Fraction
    notes: tuple[NoteEvent, ...]

    def __post_init__(self):
        if not self.notes:
            raise ValueError("a simultaneity stack cannot be empty")


def simultaneity_stacks(events: Sequence[NoteEvent]) -> list[SimultaneityStack]:
    """Group events into per-onset stacks of simultaneously sounding notes."""
    ordered = sorted(events, key=lambda n: (n.onset, -n.pitch, n.id))
    stacks: list[SimultaneityStack] = []
    onsets = sorted({n.onset for n in ordered})
    for onset in onsets:
        sounding = tuple(n for n in ordered if n.onset <= onset < n.end)
        stacks.append(SimultaneityStack(onset=onset, notes=sounding))
    return stacks


def skyline_pass(
    events: Sequence[NoteEvent], voice_id: str = "v1"
) -> tuple[Voice, tuple[NoteEvent, ...]]:
    """Peel the greedy top line off an event stream.

    Scan onsets in ascending order; at each onset where no already
    selected note is still sounding, take the highest-pitched note
    starting there (ties: longer duration, then lower event id). The
    unselected events are returned as the remainder.
    """
    if not events:
        raise ValueError("skyline_pass needs at least one event")
    by_onset: dict[Fraction, list[NoteEvent]] = {}
    for event in events:
        by_onset.setdefault(event.onset, []).append(event)

    selected: list[NoteEvent] = []
    current_end = Fraction(-1)
    for onset in sorted(by_onset):
        if onset < current_end:
            continue
        candidates = by_onset[onset]
        best = min(candidates, key=lambda n: (-n.pitch, -n.duration, n.id))
        selected.append(best)
        current_end = best.end

    chosen_ids = {n.id for n in selected}
    remainder = tuple(
        n for n in sorted(events, key=lambda n: (n.onset, -n.pitch, n.id))
        if n.id not in chosen_ids
    )
    return make_voice(selected, rests=_gap_rests(selected), voice_id=voice_id), remainder


def separate(
    part_events: Sequence[NoteEvent],
    rests: Sequence[RestEvent] = (),
    voice_prefix: str = "v",
) -> list[Voice]:
    """Separate one part's events into monophonic voices.

    If every event carries a voice hint and the hinted groups are each
    monophonic, the hints are used as-is (composer-encoded voicing is
    ground truth); rests follow their hints. Otherwise repeated skyline
    extraction assigns the notes and rests are rebuilt from the gaps.

    Output voices are named ``{voice_prefix}1..k`` in descending mean
    pitch order, the envelope first on ties.
    """
    if not part_events:
        return []

    groups = _hinted_groups(part_events)
    if groups is not None:
        hinted_rests: dict[str, list[RestEvent]] = {hint: [] for hint in groups}
        for rest in rests:
            hinted_rests.setdefault(rest.voice, []).append(rest)
        lines = [
            make_voice(events, rests=hinted_rests.get(hint, ()), voice_id=hint)
            for hint, events in groups.items()
        ]
    else:
        lines = []
        remaining: Sequence[NoteEvent] = tuple(part_events)
        while remaining:
            line, remaining = skyline_pass(remaining)
            lines.append(line)

    # Mean-pitch ordering is the contract; the stable sort keeps the
    # envelope first when means tie.
    lines.sort(key=lambda v: -v.mean_pitch)
    return [
        _rename_voice(line, f"{voice_prefix}{i}")
        for i, line in enumerate(lines, start=1)
    ]


def _hinted_groups(events: Sequence[NoteEvent]) -> dict[str, list[NoteEvent]] | None:
    """Group by encoded voice hint if hints are usable, else None.

    Hints are usable when every event has one and no hinted group
    overlaps internally.
    """
    if any(not e.voice for e in events):
        return None
    groups: dict[str, list[NoteEvent]] = {}
    for event in sorted(events, key=lambda n: (n.onset, n.id)):
        groups.setdefault(event.voice, []).append(event)
    for members in groups.values():
        for a, b in zip(members, members[1:]):
            if a.end > b.onset:
                return None
    return groups


def _gap_rests(notes: Sequence[NoteEvent]) -> tuple[RestEvent, ...]:
    """Synthesize rests for the silent gaps between consecutive notes."""
    rests = []
    for a, b in zip(notes, notes[1:]):
        if a.end < b.onset:
            rests.append(RestEvent(onset=a.end, duration=b.onset - a.end))
    return tuple(rests)


def _rename_voice(voice: Voice, new_id: str) -> Voice:
    return Voice(
        id=new_id,
        notes=tuple(replace(n, voice=new_id) for n in voice.notes),
        rests=tuple(replace(r, voice=new_id) for r in voice.rests),
    )
