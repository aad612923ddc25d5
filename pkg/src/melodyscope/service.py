"""HTTP/JSON service exposing scores, sessions, search, graph, exports.

Every response body is UTF-8 JSON (CSV for the csv heatmap encoding).
Rationals always travel as "num/den" strings. Errors carry a documented
machine-readable ``code``. Sessions persist to ``session_dir`` on every
mutation so an analysis survives restarts.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import MelodyscopeError, NotFound, SchemaError, UnknownFormat
from .graph import BridgeEdge, MtgEdge, MtgNode
from .model import Score, Voice
from .musicxml import load_corpus, parse_musicxml
from .operators import OperatorId
from .search import PatternSet
from .session import (
    AnalysisSession,
    Annotation,
    heatmap,
    heatmap_csv,
    heatmap_json,
    load_session,
    rational_str,
    save_session,
)


@dataclass
class ServiceConfig:
    corpus_dir: Path
    session_dir: Path
    port: int = 8000
    cors_origins: tuple[str, ...] = ()


class UnknownScore(NotFound):
    """Score id not present in the corpus."""


class UnknownSession(NotFound):
    """Session id not present."""


class _State:
    """Corpus cache plus live sessions; one mutation lock per session."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.scores: dict[str, Score] = {}
        self.meta_by_id: dict[str, dict] = {}
        self.sessions: dict[str, AnalysisSession] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.session_seq = 0
        self._corpus_lock = threading.Lock()
        self._scanned = False

    def scan_corpus(self) -> list[dict]:
        with self._corpus_lock:
            if not self._scanned:
                for meta in load_corpus(self.config.corpus_dir):
                    self.meta_by_id[meta.id] = {
                        "id": meta.id,
                        "title": meta.title,
                        "composer": meta.composer,
                        "part_count": meta.part_count,
                        "note_count": meta.note_count,
                        "source_path": meta.source_path,
                    }
                self._scanned = True
        return list(self.meta_by_id.values())

    def score(self, score_id: str) -> Score:
        self.scan_corpus()
        if score_id not in self.meta_by_id:
            raise UnknownScore(f"no score {score_id!r} in corpus")
        with self._corpus_lock:
            if score_id not in self.scores:
                path = self.meta_by_id[score_id]["source_path"]
                self.scores[score_id] = parse_musicxml(Path(path))
        return self.scores[score_id]

    def session(self, session_id: str) -> AnalysisSession:
        if session_id not in self.sessions:
            loaded = self._load_persisted(session_id)
            if loaded is None:
                raise UnknownSession(f"no session {session_id!r}")
            self.sessions[session_id] = loaded
            self.locks[session_id] = threading.Lock()
        return self.sessions[session_id]

    def new_session(self, score_id: str) -> AnalysisSession:
        score = self.score(score_id)
        self.session_seq += 1
        session_id = f"sess-{self.session_seq}"
        while (self.config.session_dir / f"{session_id}.json").exists():
            self.session_seq += 1
            session_id = f"sess-{self.session_seq}"
        session = AnalysisSession(session_id=session_id, score=score)
        self.sessions[session_id] = session
        self.locks[session_id] = threading.Lock()
        self.persist(session)
        return session

    def persist(self, session: AnalysisSession) -> None:
        self.config.session_dir.mkdir(parents=True, exist_ok=True)
        path = self.config.session_dir / f"{session.id}.json"
        path.write_text(save_session(session), encoding="utf-8")

    def _load_persisted(self, session_id: str) -> AnalysisSession | None:
        path = self.config.session_dir / f"{session_id}.json"
        if not path.exists():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        score = self.score(doc.get("score_id", ""))
        return load_session(doc, score)


# -- JSON shapes -----------------------------------------------------------


def note_json(note) -> dict:
    return {
        "id": note.id,
        "pitch": note.pitch,
        "onset": rational_str(note.onset),
        "duration": rational_str(note.duration),
    }


def voice_json(voice: Voice) -> dict:
    return {
        "id": voice.id,
        "notes": [note_json(n) for n in voice.notes],
        "rests": [
            {
                "onset": rational_str(r.onset),
                "duration": rational_str(r.duration),
            }
            for r in voice.rests
        ],
    }


def score_json(score: Score) -> dict:
    return {
        "id": score.id,
        "title": score.title,
        "composer": score.composer,
        "parts": [{"id": p.id, "name": p.name} for p in score.parts],
        "voices": [voice_json(v) for v in score.voices],
        "page_breaks": [rational_str(b) for b in score.page_breaks],
    }


def set_json(pattern_set: PatternSet, annotation: Annotation | None = None) -> dict:
    payload = {
        "id": pattern_set.id,
        "instances": [
            {
                "voice": inst.voice,
                "start_index": inst.start_index,
                "length": inst.length,
            }
            for inst in pattern_set.instances
        ],
        "origin": {
            "kind": pattern_set.origin.kind,
            "parent_set_id": pattern_set.origin.parent_set_id,
            "operator": (
                pattern_set.origin.operator.value
                if pattern_set.origin.operator
                else None
            ),
        },
        "chain": [op.value for op in pattern_set.chain],
    }
    if annotation is not None:
        payload["annotation"] = annotation_json(annotation)
    return payload


def annotation_json(annotation: Annotation) -> dict:
    return {
        "label": annotation.label,
        "color": annotation.color,
        "description": annotation.description,
    }


def node_json(node: MtgNode) -> dict:
    return {
        "id": node.id,
        "pattern_set_id": node.pattern_set_id,
        "kind": node.kind,
        "label": node.label,
    }


def edge_json(edge: MtgEdge) -> dict:
    return {
        "from": edge.from_node,
        "to": edge.to_node,
        "operator": edge.operator.value,
        "style": edge.style,
    }


def bridge_json(bridge: BridgeEdge) -> dict:
    return {
        "a": bridge.node_a,
        "b": bridge.node_b,
        "shared_count": bridge.shared_count,
        "style": bridge.style,
    }


# -- request bodies -----------------------------------------------------------


class SessionCreate(BaseModel):
    score_id: str


class SelectionRequest(BaseModel):
    voice: str
    first_note_id: str
    last_note_id: str


class ApplyRequest(BaseModel):
    operator: str


class AnnotationPatch(BaseModel):
    label: str | None = None
    color: str | None = None
    description: str | None = None


# -- app -----------------------------------------------------------------------


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="melodyscope", version="0.1.0")
    state = _State(config)
    app.state.engine = state

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(MelodyscopeError)
    async def engine_error_handler(request: Request, exc: MelodyscopeError):
        body = {"code": exc.code, "message": str(exc)}
        detail = getattr(exc, "element", None)
        if detail is not None:
            body["detail"] = detail
        return JSONResponse(status_code=exc.http_status, content=body)

    @app.get("/scores")
    def list_scores():
        return state.scan_corpus()

    @app.get("/scores/{score_id}")
    def get_score(score_id: str):
        return score_json(state.score(score_id))

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreate):
        session = state.new_session(body.score_id)
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = state.session(session_id)
        return Response(
            content=save_session(session), media_type="application/json"
        )

    @app.put("/sessions/{session_id}")
    def put_session(session_id: str, body: dict):
        if not isinstance(body, dict):
            raise SchemaError("session document must be a JSON object")
        score = state.score(str(body.get("score_id", "")))
        session = load_session(body, score)
        session.id = session_id
        lock = state.locks.setdefault(session_id, threading.Lock())
        with lock:
            state.sessions[session_id] = session
            state.persist(session)
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/selections", status_code=201)
    def post_selection(session_id: str, body: SelectionRequest):
        session = state.session(session_id)
        with state.locks[session_id]:
            node, pattern_set = session.select(
                body.voice, body.first_note_id, body.last_note_id
            )
            state.persist(session)
        return {
            "node_id": node.id,
            "set": set_json(pattern_set, session.annotations.get(pattern_set.id)),
        }

    @app.get("/sessions/{session_id}/nodes/{node_id}/operators")
    def get_operators(session_id: str, node_id: str):
        session = state.session(session_id)
        availability = session.operators_for(node_id)
        return {op.value: count for op, count in availability.items()}

    @app.post("/sessions/{session_id}/nodes/{node_id}/apply", status_code=201)
    def post_apply(session_id: str, node_id: str, body: ApplyRequest):
        session = state.session(session_id)
        operator = OperatorId.parse(body.operator)
        with state.locks[session_id]:
            node, edge, pattern_set, bridges = session.apply(node_id, operator)
            state.persist(session)
        return {
            "node_id": node.id,
            "edge": edge_json(edge),
            "set": set_json(pattern_set, session.annotations.get(pattern_set.id)),
            "bridges": [bridge_json(b) for b in bridges],
        }

    @app.patch("/sessions/{session_id}/sets/{set_id}")
    def patch_set(session_id: str, set_id: str, body: AnnotationPatch):
        session = state.session(session_id)
        with state.locks[session_id]:
            annotation = session.annotate(
                set_id,
                label=body.label,
                color=body.color,
                description=body.description,
            )
            state.persist(session)
        return annotation_json(annotation)

    @app.delete("/sessions/{session_id}/sets/{set_id}")
    def delete_set(session_id: str, set_id: str):
        session = state.session(session_id)
        with state.locks[session_id]:
            removed = session.delete_set(set_id)
            state.persist(session)
        return {"removed": removed}

    @app.get("/sessions/{session_id}/sets/{set_id}/stats")
    def get_stats(session_id: str, set_id: str):
        session = state.session(session_id)
        stats = session.set_stats(set_id)
        return {
            "total": stats.total,
            "unique": stats.unique,
            "overlapping": stats.overlapping,
            "pattern_length": stats.pattern_length,
        }

    @app.get("/sessions/{session_id}/graph")
    def get_graph(session_id: str, format: str = "json"):
        session = state.session(session_id)
        document = session.graph.export(format)
        if format == "dot":
            return Response(content=document, media_type="text/vnd.graphviz")
        return Response(content=document, media_type="application/json")

    @app.get("/sessions/{session_id}/heatmap")
    def get_heatmap(session_id: str, format: str = "csv"):
        session = state.session(session_id)
        rows = heatmap(session)
        if format == "csv":
            return Response(content=heatmap_csv(rows), media_type="text/csv")
        if format == "json":
            return Response(content=heatmap_json(rows), media_type="application/json")
        raise UnknownFormat(f"unknown heatmap format {format!r}")

    return app
