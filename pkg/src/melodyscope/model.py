"""Immutable symbolic score model with exact rational time.

Pitch is a chromatic MIDI semitone number (C4 = 60). All times are
``fractions.Fraction`` in units of quarter notes from the score start;
no floating point ever enters time arithmetic, so equality tests in
pattern matching are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable

from .errors import EmptySelection, MonophonyViolation, NotSameVoice

RatLike = Fraction | int


def _as_fraction(value: RatLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("time values must be exact rationals, not floats")
    return Fraction(value)


@dataclass(frozen=True)
class NoteEvent:
    """A single sounding note.

    ``onset`` and ``duration`` are quarter notes; ``voice`` names the
    containing voice once separation has run (empty or a MusicXML voice
    hint before that).
    """

    id: str
    pitch: int
    onset: Fraction
    duration: Fraction
    voice: str = ""
    source_part: str = ""

    def __post_init__(self):
        object.__setattr__(self, "onset", _as_fraction(self.onset))
        object.__setattr__(self, "duration", _as_fraction(self.duration))
        if self.duration <= 0:
            raise ValueError(f"note {self.id}: duration must be > 0")
        if self.onset < 0:
            raise ValueError(f"note {self.id}: onset must be >= 0")

    @property
    def end(self) -> Fraction:
        return self.onset + self.duration

    def overlaps(self, other: "NoteEvent") -> bool:
        return self.onset < other.end and other.onset < self.end


@dataclass(frozen=True)
class RestEvent:
    """Explicit absence of sound within one voice."""

    onset: Fraction
    duration: Fraction
    voice: str = ""

    def __post_init__(self):
        object.__setattr__(self, "onset", _as_fraction(self.onset))
        object.__setattr__(self, "duration", _as_fraction(self.duration))
        if self.duration <= 0:
            raise ValueError("rest duration must be > 0")

    @property
    def end(self) -> Fraction:
        return self.onset + self.duration


@dataclass(frozen=True)
class Voice:
    """A strictly monophonic line of notes plus its rests.

    Construction validates the monophony invariant: notes sorted by
    onset and no two notes overlapping in time.
    """

    id: str
    notes: tuple[NoteEvent, ...]
    rests: tuple[RestEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "notes", tuple(self.notes))
        object.__setattr__(self, "rests", tuple(self.rests))
        for a, b in zip(self.notes, self.notes[1:]):
            if b.onset < a.onset:
                raise ValueError(f"voice {self.id}: notes not sorted by onset")
            if a.end > b.onset:
                raise MonophonyViolation(
                    f"voice {self.id}: notes {a.id} and {b.id} overlap "
                    f"([{a.onset}, {a.end}) vs [{b.onset}, {b.end}))"
                )

    def __len__(self) -> int:
        return len(self.notes)

    def index_of(self, note_id: str) -> int:
        for i, note in enumerate(self.notes):
            if note.id == note_id:
                return i
        raise NotSameVoice(f"note {note_id!r} is not in voice {self.id!r}")

    def window(self, start: int, length: int) -> tuple[NoteEvent, ...]:
        if start < 0 or start + length > len(self.notes):
            raise IndexError(f"window [{start}, {start + length}) out of range")
        return self.notes[start : start + length]

    @property
    def mean_pitch(self) -> Fraction:
        if not self.notes:
            return Fraction(0)
        return Fraction(sum(n.pitch for n in self.notes), len(self.notes))


@dataclass(frozen=True)
class PartInfo:
    """Descriptor of one MusicXML part."""

    id: str
    name: str = ""


@dataclass(frozen=True)
class Score:
    """One composition: metadata, part descriptors, separated voices."""

    id: str
    title: str = ""
    composer: str = ""
    parts: tuple[PartInfo, ...] = ()
    voices: tuple[Voice, ...] = ()
    page_breaks: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        object.__setattr__(self, "voices", tuple(self.voices))
        object.__setattr__(
            self, "page_breaks", tuple(_as_fraction(b) for b in self.page_breaks)
        )
        seen: set[str] = set()
        for voice in self.voices:
            if voice.id in seen:
                raise ValueError(f"duplicate voice id {voice.id!r}")
            seen.add(voice.id)
            for note in voice.notes:
                if note.voice != voice.id:
                    raise ValueError(
                        f"note {note.id} carries voice {note.voice!r} "
                        f"but lives in voice {voice.id!r}"
                    )

    def voice(self, voice_id: str) -> Voice:
        for v in self.voices:
            if v.id == voice_id:
                return v
        raise NotSameVoice(f"score {self.id!r} has no voice {voice_id!r}")

    @property
    def note_count(self) -> int:
        return sum(len(v) for v in self.voices)


@dataclass(frozen=True, order=True)
class PatternInstance:
    """A contiguous window of notes inside one voice.

    ``length >= 2``: a pattern needs at least a first and a last note.
    """

    voice: str
    start_index: int
    length: int

    def __post_init__(self):
        if self.start_index < 0:
            raise ValueError("start_index must be >= 0")
        if self.length < 2:
            raise EmptySelection("a pattern needs at least two notes")

    @property
    def end_index(self) -> int:
        """Index one past the last covered note."""
        return self.start_index + self.length

    def note_indices(self) -> range:
        return range(self.start_index, self.end_index)

    def overlaps(self, other: "PatternInstance") -> bool:
        return (
            self.voice == other.voice
            and self.start_index < other.end_index
            and other.start_index < self.end_index
        )


def make_voice(
    events: Iterable[NoteEvent],
    rests: Iterable[RestEvent] = (),
    voice_id: str | None = None,
) -> Voice:
    """Build a Voice from note events, sorting by onset.

    Events may arrive in any order; they are sorted, never reordered
    around each other in time. Overlapping notes are a contract error.

    Raises:
        MonophonyViolation: if two notes sound simultaneously.
    """
    notes = sorted(events, key=lambda n: (n.onset, n.id))
    if voice_id is None:
        voice_id = (notes[0].voice if notes else "") or "v1"
    notes = tuple(
        n if n.voice == voice_id else replace(n, voice=voice_id) for n in notes
    )
    rest_list = tuple(
        r if r.voice == voice_id else replace(r, voice=voice_id)
        for r in sorted(rests, key=lambda r: r.onset)
    )
    return Voice(id=voice_id, notes=notes, rests=rest_list)


def select_range(voice: Voice, first_note_id: str, last_note_id: str) -> PatternInstance:
    """Select the contiguous pattern spanning first and last note, inclusive.

    Raises:
        NotSameVoice: if either id is not in this voice.
        EmptySelection: if the ids coincide or are in inverted order.
    """
    first = voice.index_of(first_note_id)
    last = voice.index_of(last_note_id)
    if first >= last:
        raise EmptySelection(
            f"selection [{first_note_id}..{last_note_id}] does not cover "
            "two notes in order"
        )
    return PatternInstance(voice=voice.id, start_index=first, length=last - first + 1)


def instance_notes(voice: Voice, instance: PatternInstance) -> tuple[NoteEvent, ...]:
    """The notes an instance covers; instance must belong to this voice."""
    if instance.voice != voice.id:
        raise NotSameVoice(
            f"instance voice {instance.voice!r} does not match {voice.id!r}"
        )
    return voice.window(instance.start_index, instance.length)


def instance_pattern(
    voice: Voice, instance: PatternInstance
) -> tuple[tuple[int, Fraction], ...]:
    """(pitch, duration) pairs of the instance's notes."""
    return tuple((n.pitch, n.duration) for n in instance_notes(voice, instance))
