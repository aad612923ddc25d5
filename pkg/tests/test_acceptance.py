"""Acceptance suite: one test per release criterion.

Each test prints a PASS line on success (run with ``pytest -s`` to see
them); a failing criterion fails its test. Counts, bounds, and
tolerances are pinned here and must not be weakened.
"""

import json
import random
import shutil
import time
import zipfile
from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from melodyscope.errors import ChainTooDeep, DegenerateChain
from melodyscope.model import NoteEvent
from melodyscope.musicxml import duration_to_quarters, parse_musicxml
from melodyscope.operators import (
    OperatorId,
    apply_operator,
    chain,
    normalize,
)
from melodyscope.search import find_occurrences
from melodyscope.service import ServiceConfig, create_app
from melodyscope.session import (
    AnalysisSession,
    heatmap,
    heatmap_csv,
    load_session,
    save_session,
)
from melodyscope.voices import separate

from conftest import (
    FIXTURES,
    build_voice,
    quarter_voice,
    random_voice_with_pattern,
    score_of_voices,
)
from oracle import BruteDegenerate, brute_occurrences, is_monophonic

O = OperatorId
FIXTURE = FIXTURES / "two_part_four_measures.musicxml"


def passed(line):
    print(f"PASS {line}")


def instance_keys(pattern_set):
    return {(i.voice, i.start_index, i.length) for i in pattern_set.instances}


def test_criterion_1_oracle_equivalence():
    """500 random voices x 8 single operators x depth-2 chains: engine
    search equals the brute-force enumerator exactly, in under 60 s."""
    rng = random.Random(1001)
    operators = list(OperatorId)
    started = time.monotonic()
    checked = 0
    for _ in range(500):
        voice, pattern, _ = random_voice_with_pattern(rng)
        chains = [[op] for op in operators]
        chains += [[rng.choice(operators), rng.choice(operators)] for _ in range(4)]
        for chain_ops in chains:
            brute_degenerate = engine_degenerate = False
            expected = set()
            try:
                expected = brute_occurrences(
                    [voice], pattern, [op.value for op in chain_ops]
                )
            except BruteDegenerate:
                brute_degenerate = True
            got = set()
            try:
                state = normalize(pattern)
                for op in chain_ops:
                    state = apply_operator(state, op)
                got = instance_keys(find_occurrences([voice], state))
            except DegenerateChain:
                engine_degenerate = True
            assert engine_degenerate == brute_degenerate, chain_ops
            assert got == expected, (pattern, chain_ops)
            checked += 1
    elapsed = time.monotonic() - started
    assert elapsed < 60, f"oracle equivalence took {elapsed:.1f}s"
    passed(
        f"criterion 1: oracle equivalence on {checked} (voice, chain) pairs "
        f"in {elapsed:.1f}s"
    )


def test_criterion_2_operator_algebra():
    """O2 and O3 are involutions on 1000 random patterns; O6+O7 in either
    order is always degenerate."""
    rng = random.Random(1002)
    for _ in range(1000):
        length = rng.randint(2, 8)
        pattern = [
            (
                rng.randint(48, 84),
                Fraction(rng.choice([1, 1, 1, 2]), rng.choice([1, 2, 4])),
            )
            for _ in range(length)
        ]
        base = normalize(pattern)
        for op in (O.MIRROR_X, O.MIRROR_Y):
            twice = chain(base, [op, op])
            assert twice.pitches == base.pitches
            assert twice.durations == base.durations
            assert twice.pitch_mode is base.pitch_mode
            assert twice.time_mode is base.time_mode
        with pytest.raises(DegenerateChain):
            chain(base, [O.SAME_PITCH, O.RHYTHM_ONLY])
        with pytest.raises(DegenerateChain):
            chain(base, [O.RHYTHM_ONLY, O.SAME_PITCH])
    passed("criterion 2: mirror involutions and degeneracy guard on 1000 patterns")


def test_criterion_3_transposed_accompaniment_fixture():
    """An 8-note figure plus exactly one transposed copy: O1 and O8 each
    count 1; expanding O1 gives 2 nodes, 1 solid edge, 0 bridges."""
    figure = [60, 62, 64, 65, 67, 69, 71, 72]
    voice = quarter_voice(figure + [p + 7 for p in figure], voice_id="v1")
    score = score_of_voices([voice], score_id="accompaniment")
    session = AnalysisSession(session_id="uc-prelude", score=score)
    node, _ = session.select("v1", voice.notes[0].id, voice.notes[7].id)

    availability = session.operators_for(node.id)
    assert availability[O.TRANSPOSITION] == 1
    assert availability[O.REPETITION] == 1

    session.apply(node.id, O.TRANSPOSITION)
    assert len(session.graph.nodes) == 2
    assert len(session.graph.edges) == 1
    assert len(session.graph.bridges) == 0
    session.graph.validate()
    passed("criterion 3: transposed-accompaniment fixture (O1=1, O8=1, MTG 2/1/0)")


def test_criterion_4_recurrence_fixture():
    """A 10-note theme embedded verbatim three times yields exactly 3
    instances under exact repetition; count verified by brute force."""
    theme = [
        (64, Fraction(1)),
        (59, Fraction(1, 2)),
        (60, Fraction(1, 2)),
        (62, Fraction(1)),
        (60, Fraction(1, 2)),
        (59, Fraction(1, 2)),
        (57, Fraction(1)),
        (57, Fraction(1, 2)),
        (60, Fraction(1, 2)),
        (64, Fraction(1)),
    ]
    filler_a = [(52, Fraction(2)), (55, Fraction(2)), (52, Fraction(1))]
    filler_b = [(50, Fraction(1)), (53, Fraction(2))]
    content = theme + filler_a + theme + filler_b + theme
    voice = build_voice(content, voice_id="v1")
    score = score_of_voices([voice], score_id="recurrence")

    state = chain(normalize(theme), [O.REPETITION])
    result = find_occurrences(score.voices, state)
    assert len(result) == 3
    expected = brute_occurrences(score.voices, theme, ["O8"])
    assert instance_keys(result) == expected
    assert len(expected) == 3
    passed("criterion 4: recurrence fixture finds the theme exactly 3 times")


def test_criterion_5_parser(tmp_path):
    """Shipped 2x4 fixture parses to 32 notes with exact onsets; divisions
    reduce; .mxl round-trips to the identical Score."""
    score = parse_musicxml(FIXTURE)
    assert score.note_count == 32
    assert len(score.parts) == 2
    onsets = sorted({n.onset for v in score.voices for n in v.notes})
    assert onsets == [Fraction(k) for k in range(16)]

    import math

    for divisions in (1, 2, 4, 8, 480):
        for duration in (1, 2, 3, divisions, 2 * divisions, 3 * divisions):
            value = duration_to_quarters(duration, divisions)
            assert value == Fraction(duration, divisions)
            assert math.gcd(value.numerator, value.denominator) == 1

    mxl = tmp_path / "fixture.mxl"
    with zipfile.ZipFile(mxl, "w") as zf:
        zf.writestr(
            "META-INF/container.xml",
            '<?xml version="1.0"?><container><rootfiles>'
            '<rootfile full-path="score.musicxml"/></rootfiles></container>',
        )
        zf.writestr("score.musicxml", FIXTURE.read_bytes())
    assert parse_musicxml(mxl, score_id="twin") == parse_musicxml(
        FIXTURE, score_id="twin"
    )
    passed("criterion 5: parser fixture, divisions reduction, mxl round trip")


def test_criterion_6_voice_separation():
    """Conservation and monophony on 1000 random polyphonic inputs;
    idempotence on monophonic input; documented chord-stack example."""
    rng = random.Random(1006)

    def multiset(events):
        table = {}
        for e in events:
            key = (e.pitch, e.onset, e.duration)
            table[key] = table.get(key, 0) + 1
        return table

    for _ in range(1000):
        events = []
        seq = 0
        for track in range(rng.randint(1, 5)):
            onset = Fraction(0)
            for _ in range(rng.randint(1, 15)):
                duration = Fraction(rng.choice([1, 2, 4]), rng.choice([1, 2, 4]))
                if rng.random() < 0.7:
                    events.append(
                        NoteEvent(
                            id=f"t{track}.e{seq:04d}",
                            pitch=rng.randint(36, 90),
                            onset=onset,
                            duration=duration,
                        )
                    )
                    seq += 1
                onset += duration
        voices = separate(events)
        assert multiset(events) == multiset([n for v in voices for n in v.notes])
        assert all(is_monophonic(v) for v in voices)

    # Idempotence: separating an already monophonic line is the identity.
    mono = [
        NoteEvent(id=f"m{i}", pitch=60 + i, onset=Fraction(i), duration=Fraction(1))
        for i in range(10)
    ]
    again = separate(mono)
    assert len(again) == 1
    assert [n.pitch for n in again[0].notes] == [60 + i for i in range(10)]

    # Two-note chords C4+E4 repeated four times: skyline takes the E4 line.
    stacked = []
    for i in range(4):
        stacked.append(NoteEvent(id=f"c{i}", pitch=60, onset=Fraction(i), duration=Fraction(1)))
        stacked.append(NoteEvent(id=f"e{i}", pitch=64, onset=Fraction(i), duration=Fraction(1)))
    top, bottom = separate(stacked)
    assert [n.pitch for n in top.notes] == [64, 64, 64, 64]
    assert [n.pitch for n in bottom.notes] == [60, 60, 60, 60]
    passed("criterion 6: separation conserved and monophonic on 1000 inputs")


def _random_session(rng, validate_each=False):
    """Random score plus a random mutation sequence against one session."""
    voices = []
    for v in range(rng.randint(1, 3)):
        length = rng.randint(8, 25)
        pattern = [
            (rng.randint(48, 84), Fraction(rng.choice([1, 1, 2]), rng.choice([1, 2])))
            for _ in range(length)
        ]
        voices.append(build_voice(pattern, voice_id=f"v{v + 1}"))
    score = score_of_voices(voices, score_id=f"random-{rng.randint(0, 10**6)}")
    session = AnalysisSession(session_id="random", score=score)

    nodes = []
    for _ in range(rng.randint(1, 8)):
        roll = rng.random()
        if roll < 0.45 or not nodes:
            voice = rng.choice(score.voices)
            length = rng.randint(2, min(6, len(voice.notes)))
            start = rng.randint(0, len(voice.notes) - length)
            try:
                node, _ = session.select(
                    voice.id,
                    voice.notes[start].id,
                    voice.notes[start + length - 1].id,
                )
                nodes.append(node.id)
            except Exception:
                pass
        elif roll < 0.8:
            node_id = rng.choice(nodes)
            try:
                node, _, _, _ = session.apply(node_id, rng.choice(list(OperatorId)))
                nodes.append(node.id)
            except (ChainTooDeep, DegenerateChain):
                pass
        else:
            node_id = rng.choice(nodes)
            try:
                session.delete_set(session.graph.node(node_id).pattern_set_id)
            except Exception:
                pass
            alive = {n.id for n in session.graph.nodes}
            nodes = [nid for nid in nodes if nid in alive]
        if validate_each:
            session.graph.validate()
    return session


def test_criterion_7_heatmap_conservation():
    """Total heatmap mass equals total instance length over 200 random
    sessions; CSV header is bit-exact."""
    rng = random.Random(1007)
    for _ in range(200):
        session = _random_session(rng)
        rows = heatmap(session)
        mass = sum(r.count for r in rows)
        expected = sum(
            inst.length
            for ps in session.pattern_sets.values()
            for inst in ps.instances
        )
        assert mass == expected
    csv_text = heatmap_csv(heatmap(_random_session(rng)))
    assert csv_text.splitlines()[0] == "voice_id,note_index,onset,count"
    passed("criterion 7: heatmap mass conserved on 200 random sessions")


def test_criterion_8_session_persistence():
    """save -> load -> save is byte-identical on 100 random sessions, and
    the graph invariant sweep holds after every mutation."""
    rng = random.Random(1008)
    for _ in range(100):
        session = _random_session(rng, validate_each=True)
        session.graph.validate()
        blob = save_session(session)
        reloaded = load_session(blob, session.score)
        assert save_session(reloaded) == blob
        reloaded.graph.validate()
    passed("criterion 8: byte-identical persistence on 100 random sessions")


def test_criterion_9_api_contract(tmp_path):
    """Documented endpoints return documented shapes; a degenerate chain
    is HTTP 400 with code degenerate_chain. No UI involved."""
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    shutil.copy(FIXTURE, corpus / FIXTURE.name)
    app = create_app(
        ServiceConfig(corpus_dir=corpus, session_dir=tmp_path / "sessions")
    )
    with TestClient(app) as client:
        metas = client.get("/scores").json()
        assert [set(m) for m in metas] == [
            {"id", "title", "composer", "part_count", "note_count", "source_path"}
        ]
        score_id = metas[0]["id"]

        render = client.get(f"/scores/{score_id}").json()
        assert {"id", "title", "composer", "parts", "voices", "page_breaks"} <= set(render)
        note = render["voices"][0]["notes"][0]
        assert "/" in note["onset"] and "/" in note["duration"]

        session_id = client.post("/sessions", json={"score_id": score_id}).json()[
            "session_id"
        ]
        notes = render["voices"][0]["notes"]
        selection = client.post(
            f"/sessions/{session_id}/selections",
            json={
                "voice": render["voices"][0]["id"],
                "first_note_id": notes[0]["id"],
                "last_note_id": notes[3]["id"],
            },
        ).json()
        assert {"node_id", "set"} <= set(selection)

        ops = client.get(
            f"/sessions/{session_id}/nodes/{selection['node_id']}/operators"
        ).json()
        assert set(ops) == {f"O{i}" for i in range(1, 9)}

        applied = client.post(
            f"/sessions/{session_id}/nodes/{selection['node_id']}/apply",
            json={"operator": "O7"},
        ).json()
        assert {"node_id", "edge", "set", "bridges"} <= set(applied)

        bad = client.post(
            f"/sessions/{session_id}/nodes/{applied['node_id']}/apply",
            json={"operator": "O6"},
        )
        assert bad.status_code == 400
        assert bad.json()["code"] == "degenerate_chain"

        annotation = client.patch(
            f"/sessions/{session_id}/sets/{selection['set']['id']}",
            json={"label": "theme", "description": "d" * 280},
        ).json()
        assert set(annotation) == {"label", "color", "description"}

        doc = client.get(f"/sessions/{session_id}").json()
        assert set(doc) == {
            "version", "id", "score_id", "sets", "graph", "annotations", "timestamps",
        }
        assert client.put(f"/sessions/{session_id}", json=doc).status_code == 200

        graph_payload = json.loads(
            client.get(f"/sessions/{session_id}/graph?format=json").text
        )
        assert {"nodes", "edges", "bridges"} == set(graph_payload)
        assert "digraph" in client.get(f"/sessions/{session_id}/graph?format=dot").text

        csv_text = client.get(f"/sessions/{session_id}/heatmap?format=csv").text
        assert csv_text.startswith("voice_id,note_index,onset,count")

        removed = client.delete(
            f"/sessions/{session_id}/sets/{selection['set']['id']}"
        ).json()
        assert set(removed) == {"removed"}
    passed("criterion 9: API contract, degenerate chain -> 400 degenerate_chain")
