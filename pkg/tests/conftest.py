"""Shared builders for voices, scores, and random generators."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from melodyscope.model import NoteEvent, Score, Voice, make_voice

FIXTURES = Path(__file__).parent / "fixtures"

DURATION_CHOICES = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))


def build_voice(pattern, voice_id="v1", start=Fraction(0)):
    """Voice from consecutive (pitch, duration) pairs, no gaps."""
    onset = Fraction(start)
    events = []
    for i, (pitch, duration) in enumerate(pattern):
        events.append(
            NoteEvent(
                id=f"{voice_id}.n{i:04d}",
                pitch=pitch,
                onset=onset,
                duration=Fraction(duration),
                voice=voice_id,
            )
        )
        onset += Fraction(duration)
    return make_voice(events, voice_id=voice_id)


def quarter_voice(pitches, voice_id="v1"):
    return build_voice([(p, Fraction(1)) for p in pitches], voice_id=voice_id)


def random_pattern(rng, length=None, lo=48, hi=84):
    length = length if length is not None else rng.randint(2, 6)
    return [
        (rng.randint(lo, hi), rng.choice(DURATION_CHOICES)) for _ in range(length)
    ]


def random_voice(rng, voice_id="v1", max_notes=50, lo=48, hi=84):
    n = rng.randint(2, max_notes)
    return build_voice(random_pattern(rng, length=n, lo=lo, hi=hi), voice_id=voice_id)


def random_voice_with_pattern(rng, voice_id="v1"):
    """A random voice guaranteed to contain a plantable pattern: the
    pattern itself is a window of the voice."""
    voice = random_voice(rng, voice_id=voice_id)
    length = rng.randint(2, min(6, len(voice.notes)))
    start = rng.randint(0, len(voice.notes) - length)
    pattern = [
        (note.pitch, note.duration)
        for note in voice.notes[start : start + length]
    ]
    return voice, pattern, start


def score_of_voices(voices, score_id="test-score", page_breaks=()):
    return Score(
        id=score_id,
        title="Test Score",
        voices=tuple(voices),
        page_breaks=tuple(page_breaks),
    )


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
