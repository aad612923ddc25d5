"""Parse a documented subset of partwise MusicXML into the score model.

Supported: ``score-partwise`` documents, ``attributes/divisions`` and
``time``, ``note`` (pitch step/alter/octave, duration, voice, chord,
rest, tie), and ``backup``/``forward`` cursor moves. Tuplet durations
come out exact for free because all time is rational. Compressed
``.mxl`` containers are unwrapped via ``META-INF/container.xml``.

Everything else is skipped with a diagnostic rather than failing the
parse; the diagnostics channel is a callable receiving plain strings
(defaults to this module's logger).

Conventions applied at ingest: tied notes are merged into one event
with the summed duration, grace notes are dropped, and each part's
stream is voice-separated before the Score is assembled, so the
returned voices are always strictly monophonic.
"""

from __future__ import annotations

import io
import logging
import zipfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable
from xml.etree import ElementTree

from .errors import MalformedDocument, NonPositive, UnsupportedFeature, UnsupportedRoot
from .model import NoteEvent, PartInfo, RestEvent, Score
from .voices import separate

log = logging.getLogger(__name__)

DiagnosticSink = Callable[[str], None]

_STEP_SEMITONES = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

# Page markers in the voice-timeline need stable positions, not
# typographic truth; pagination is synthesized every N measures.
DEFAULT_PAGE_BREAK_MEASURES = 4

_CORPUS_SUFFIXES = (".musicxml", ".xml", ".mxl")


@dataclass(frozen=True)
class ScoreMeta:
    """Corpus listing entry for one parseable file."""

    id: str
    title: str
    composer: str
    part_count: int
    note_count: int
    source_path: str


def duration_to_quarters(duration_divs: int, divisions: int) -> Fraction:
    """Convert a duration in division units to quarter notes, reduced.

    Raises:
        NonPositive: on zero or negative inputs.
    """
    if divisions <= 0:
        raise NonPositive(f"divisions must be > 0, got {divisions}")
    if duration_divs <= 0:
        raise NonPositive(f"duration must be > 0, got {duration_divs}")
    return Fraction(duration_divs, divisions)


def parse_musicxml(
    source,
    score_id: str | None = None,
    page_break_measures: int = DEFAULT_PAGE_BREAK_MEASURES,
    on_diagnostic: DiagnosticSink | None = None,
) -> Score:
    """Parse MusicXML bytes, text, a path, or a file object into a Score.

    Raises:
        UnsupportedRoot: for timewise/opus documents.
        MalformedDocument: on XML errors or missing ``divisions``.
        UnsupportedFeature: e.g. microtonal ``alter`` values.
    """
    emit = on_diagnostic if on_diagnostic is not None else log.warning
    data, source_name = _read_source(source)
    if data[:4] == b"PK\x03\x04":
        data = _unwrap_mxl(data)
    try:
        root = ElementTree.fromstring(data)
    except ElementTree.ParseError as exc:
        raise MalformedDocument(f"not well-formed XML: {exc}") from exc
    if root.tag != "score-partwise":
        raise UnsupportedRoot(
            f"expected score-partwise root, got <{root.tag}>"
        )

    title = _text(root.find("work/work-title")) or _text(root.find("movement-title"))
    composer = ""
    for creator in root.findall("identification/creator"):
        if creator.get("type", "composer") == "composer":
            composer = _text(creator)
            break

    parts: list[PartInfo] = []
    part_names: dict[str, str] = {}
    for score_part in root.findall("part-list/score-part"):
        pid = score_part.get("id", f"P{len(parts) + 1}")
        part_names[pid] = _text(score_part.find("part-name"))

    voices = []
    first_part_measure_starts: list[Fraction] | None = None
    for index, part_elem in enumerate(root.findall("part")):
        part_id = part_elem.get("id", f"P{index + 1}")
        parts.append(PartInfo(id=part_id, name=part_names.get(part_id, "")))
        events, rests, measure_starts = _parse_part(part_elem, part_id, emit)
        if first_part_measure_starts is None:
            first_part_measure_starts = measure_starts
        voices.extend(separate(events, rests, voice_prefix=f"{part_id}.v"))

    page_breaks = []
    starts = first_part_measure_starts or []
    for k in range(page_break_measures, len(starts), page_break_measures):
        page_breaks.append(starts[k])

    if score_id is None:
        score_id = Path(source_name).stem if source_name else (title or "score")
    return Score(
        id=score_id,
        title=title,
        composer=composer,
        parts=tuple(parts),
        voices=tuple(voices),
        page_breaks=tuple(page_breaks),
    )


def load_corpus(
    manifest: str | Path | Iterable[str | Path],
    on_diagnostic: DiagnosticSink | None = None,
) -> list[ScoreMeta]:
    """List the parseable scores in a directory or explicit file listing.

    Unparseable files are reported on the diagnostics channel and
    skipped, never fatal.
    """
    emit = on_diagnostic if on_diagnostic is not None else log.warning
    if isinstance(manifest, (str, Path)) and Path(manifest).is_dir():
        paths = sorted(
            p for p in Path(manifest).iterdir()
            if p.suffix.lower() in _CORPUS_SUFFIXES
        )
    else:
        paths = [Path(p) for p in manifest]

    metas: list[ScoreMeta] = []
    for path in paths:
        try:
            score = parse_musicxml(path, on_diagnostic=emit)
        except Exception as exc:
            emit(f"{path}: {exc}")
            continue
        metas.append(
            ScoreMeta(
                id=score.id,
                title=score.title,
                composer=score.composer,
                part_count=len(score.parts),
                note_count=score.note_count,
                source_path=str(path),
            )
        )
    return metas


# -- internals -------------------------------------------------------------


def _read_source(source) -> tuple[bytes, str]:
    """Normalize the polymorphic source argument to (bytes, name)."""
    if isinstance(source, bytes):
        return source, ""
    if isinstance(source, Path):
        return source.read_bytes(), str(source)
    if isinstance(source, str):
        if source.lstrip().startswith("<"):
            return source.encode("utf-8"), ""
        return Path(source).read_bytes(), source
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
        return data, getattr(source, "name", "")
    raise TypeError(f"cannot read MusicXML from {type(source).__name__}")


def _unwrap_mxl(data: bytes) -> bytes:
    """Extract the root MusicXML document from a compressed container."""
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise MalformedDocument(f"bad .mxl container: {exc}") from exc
    names = archive.namelist()
    root_path = ""
    if "META-INF/container.xml" in names:
        try:
            container = ElementTree.fromstring(archive.read("META-INF/container.xml"))
        except ElementTree.ParseError as exc:
            raise MalformedDocument(f"bad container.xml: {exc}") from exc
        rootfile = container.find("rootfiles/rootfile")
        if rootfile is not None:
            root_path = rootfile.get("full-path", "")
    if not root_path:
        candidates = [
            n for n in names
            if not n.startswith("META-INF/") and n.lower().endswith((".xml", ".musicxml"))
        ]
        if not candidates:
            raise MalformedDocument("no MusicXML document inside .mxl container")
        root_path = candidates[0]
    if root_path not in names:
        raise MalformedDocument(f"container points at missing member {root_path!r}")
    return archive.read(root_path)


@dataclass
class _PendingNote:
    """Mutable accumulator so tie merging can extend durations."""

    id: str
    pitch: int
    onset: Fraction
    duration: Fraction
    voice_hint: str
    part_id: str


def _parse_part(
    part_elem, part_id: str, emit: DiagnosticSink
) -> tuple[list[NoteEvent], list[RestEvent], list[Fraction]]:
    """Walk one part's measures, producing events, rests, measure starts."""
    divisions: int | None = None
    time_sig = (4, 4)
    cursor = Fraction(0)
    measure_start = Fraction(0)
    measure_starts: list[Fraction] = []
    notes: list[_PendingNote] = []
    rests: list[RestEvent] = []
    open_ties: dict[tuple[str, int], _PendingNote] = {}
    skipped: set[str] = set()
    seq = 0
    last_noted_onset = Fraction(0)

    for measure in part_elem.findall("measure"):
        number = measure.get("number", "?")
        measure_starts.append(measure_start)
        cursor = measure_start
        max_cursor = measure_start

        for elem in measure:
            if elem.tag == "attributes":
                div_elem = elem.find("divisions")
                if div_elem is not None:
                    divisions = _int_text(div_elem, part_id, number, "divisions")
                    if divisions <= 0:
                        raise MalformedDocument(
                            f"{part_id} measure {number}: divisions must be > 0"
                        )
                time_elem = elem.find("time")
                if time_elem is not None:
                    beats = _int_text(time_elem.find("beats"), part_id, number, "beats")
                    beat_type = _int_text(
                        time_elem.find("beat-type"), part_id, number, "beat-type"
                    )
                    time_sig = (beats, beat_type)
                for child in elem:
                    if child.tag not in ("divisions", "time") and child.tag not in skipped:
                        skipped.add(child.tag)
                        emit(f"{part_id} measure {number}: skipped <{child.tag}>")
            elif elem.tag == "note":
                if divisions is None and elem.find("duration") is not None:
                    raise MalformedDocument(
                        f"{part_id} measure {number}: note before any <divisions>"
                    )
                cursor, last_noted_onset, seq = _parse_note(
                    elem, part_id, number, divisions or 1, cursor, last_noted_onset,
                    seq, notes, rests, open_ties, emit,
                )
                max_cursor = max(max_cursor, cursor)
            elif elem.tag in ("backup", "forward"):
                if divisions is None:
                    raise MalformedDocument(
                        f"{part_id} measure {number}: <{elem.tag}> before <divisions>"
                    )
                amount = _int_text(elem.find("duration"), part_id, number, "duration")
                step = duration_to_quarters(amount, divisions)
                cursor = cursor - step if elem.tag == "backup" else cursor + step
                if cursor < measure_start:
                    emit(
                        f"{part_id} measure {number}: <backup> crosses the "
                        "measure start; clamped"
                    )
                    cursor = measure_start
                max_cursor = max(max_cursor, cursor)
            else:
                if elem.tag not in skipped:
                    skipped.add(elem.tag)
                    emit(f"{part_id} measure {number}: skipped <{elem.tag}>")

        measure_len = max_cursor - measure_start
        if measure_len == 0:
            beats, beat_type = time_sig
            measure_len = Fraction(beats * 4, beat_type)
        measure_start += measure_len

    if open_ties:
        emit(f"{part_id}: {len(open_ties)} tie(s) left open at end of part")

    events = []
    for pending in notes:
        try:
            events.append(
                NoteEvent(
                    id=pending.id,
                    pitch=pending.pitch,
                    onset=pending.onset,
                    duration=pending.duration,
                    voice=pending.voice_hint,
                    source_part=pending.part_id,
                )
            )
        except ValueError as exc:
            raise MalformedDocument(f"{part_id}: {exc}") from exc
    return events, rests, measure_starts


def _parse_note(
    elem,
    part_id: str,
    measure_number: str,
    divisions: int,
    cursor: Fraction,
    last_noted_onset: Fraction,
    seq: int,
    notes: list[_PendingNote],
    rests: list[RestEvent],
    open_ties: dict[tuple[str, int], _PendingNote],
    emit: DiagnosticSink,
) -> tuple[Fraction, Fraction, int]:
    """Handle one <note>; returns the updated (cursor, last onset, seq)."""
    where = f"{part_id} measure {measure_number}"
    if elem.find("grace") is not None:
        emit(f"{where}: dropped grace note")
        return cursor, last_noted_onset, seq

    duration_elem = elem.find("duration")
    if duration_elem is None:
        emit(f"{where}: skipped <note> without <duration>")
        return cursor, last_noted_onset, seq
    try:
        qdur = duration_to_quarters(
            _int_text(duration_elem, part_id, measure_number, "duration"), divisions
        )
    except NonPositive as exc:
        raise MalformedDocument(f"{where}: {exc}") from exc
    voice_hint = _text(elem.find("voice"))
    is_chord = elem.find("chord") is not None
    onset = last_noted_onset if is_chord else cursor

    if elem.find("rest") is not None or elem.find("cue") is not None:
        rests.append(RestEvent(onset=onset, duration=qdur, voice=voice_hint))
        if not is_chord:
            cursor = onset + qdur
            last_noted_onset = onset
        return cursor, last_noted_onset, seq

    pitch_elem = elem.find("pitch")
    if pitch_elem is None:
        raise UnsupportedFeature(
            "unpitched", f"{where}: unpitched notes are not supported"
        )
    step = _text(pitch_elem.find("step")).upper()
    if step not in _STEP_SEMITONES:
        raise MalformedDocument(f"{where}: bad pitch step {step!r}")
    octave = _int_text(pitch_elem.find("octave"), part_id, measure_number, "octave")
    alter_text = _text(pitch_elem.find("alter")) or "0"
    try:
        alter = int(alter_text)
    except ValueError:
        raise UnsupportedFeature(
            "alter", f"{where}: non-integer alter {alter_text!r} (microtone)"
        ) from None
    midi_pitch = (octave + 1) * 12 + _STEP_SEMITONES[step] + alter

    tie_types = {tie.get("type") for tie in elem.findall("tie")}
    key = (voice_hint, midi_pitch)

    merged = False
    if "stop" in tie_types:
        open_note = open_ties.get(key)
        if open_note is not None and open_note.onset + open_note.duration == onset:
            open_note.duration += qdur
            merged = True
            if "start" not in tie_types:
                del open_ties[key]
        else:
            emit(f"{where}: tie stop without matching start; kept as new note")

    if not merged:
        pending = _PendingNote(
            id=f"{part_id}.n{seq:04d}",
            pitch=midi_pitch,
            onset=onset,
            duration=qdur,
            voice_hint=voice_hint,
            part_id=part_id,
        )
        seq += 1
        notes.append(pending)
        if "start" in tie_types:
            open_ties[key] = pending

    if not is_chord:
        cursor = onset + qdur
        last_noted_onset = onset
    return cursor, last_noted_onset, seq


def _text(elem) -> str:
    return (elem.text or "").strip() if elem is not None else ""


def _int_text(elem, part_id: str, measure_number: str, what: str) -> int:
    raw = _text(elem)
    try:
        return int(raw)
    except ValueError:
        raise MalformedDocument(
            f"{part_id} measure {measure_number}: bad integer {what} {raw!r}"
        ) from None
