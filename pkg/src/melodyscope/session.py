"""Analysis sessions: annotations, statistics, persistence, heatmaps.

One session binds a score to a transformation graph plus per-set
annotations. Sessions serialize to a versioned JSON document whose
save/load round trip is byte-identical (timestamps are preserved, not
regenerated).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Iterable

from .errors import (
    BadColor,
    ChainTooDeep,
    DescriptionTooLong,
    LabelTooLong,
    SchemaError,
    ScoreMismatch,
    UnknownSet,
    VersionMismatch,
)
from .graph import BridgeEdge, MtgEdge, MtgNode, TransformationGraph
from .model import PatternInstance, Score, instance_pattern, select_range
from .operators import (
    DEFAULT_MAX_CHAIN_DEPTH,
    ConstraintState,
    OperatorId,
    apply_operator,
    normalize,
)
from .search import PatternSet, SetOrigin, find_occurrences, operator_availability

SESSION_SCHEMA_VERSION = "1"

MAX_LABEL_LENGTH = 40
MAX_DESCRIPTION_LENGTH = 280

_COLOR_RE = re.compile(r"^#[0-9a-fA-F]{6}$")

# Distinct pastels cycled over pattern sets in creation order; a user
# override always wins.
PASTEL_PALETTE = (
    "#fbb4ae",
    "#b3cde3",
    "#ccebc5",
    "#decbe4",
    "#fed9a6",
    "#ffffcc",
    "#e5d8bd",
    "#fddaec",
    "#f2f2f2",
    "#b3e2cd",
    "#fdcdac",
    "#cbd5e8",
)


@dataclass(frozen=True)
class Annotation:
    """User-facing labeling of one pattern set."""

    label: str = ""
    color: str = PASTEL_PALETTE[0]
    description: str = ""

    def __post_init__(self):
        if len(self.label) > MAX_LABEL_LENGTH:
            raise LabelTooLong(
                f"label exceeds {MAX_LABEL_LENGTH} characters ({len(self.label)})"
            )
        if len(self.description) > MAX_DESCRIPTION_LENGTH:
            raise DescriptionTooLong(
                f"description exceeds {MAX_DESCRIPTION_LENGTH} characters "
                f"({len(self.description)})"
            )
        if not _COLOR_RE.match(self.color):
            raise BadColor(f"color {self.color!r} is not #RRGGBB")


@dataclass
class SetStats:
    total: int
    unique: int
    overlapping: int
    pattern_length: int


class AnalysisSession:
    """One score, one transformation graph, plus annotations."""

    def __init__(
        self,
        session_id: str,
        score: Score,
        created: str | None = None,
        modified: str | None = None,
        max_chain_depth: int = DEFAULT_MAX_CHAIN_DEPTH,
    ):
        self.id = session_id
        self.score = score
        self.graph = TransformationGraph()
        self.annotations: dict[str, Annotation] = {}
        self.max_chain_depth = max_chain_depth
        now = created if created is not None else _utc_now()
        self.created = now
        self.modified = modified if modified is not None else now
        self._set_seq = 0

    # -- core state -----------------------------------------------------

    @property
    def score_id(self) -> str:
        return self.score.id

    @property
    def pattern_sets(self) -> dict[str, PatternSet]:
        return self.graph.pattern_sets

    def pattern_set(self, set_id: str) -> PatternSet:
        try:
            return self.graph.pattern_sets[set_id]
        except KeyError:
            raise UnknownSet(f"no pattern set {set_id!r}") from None

    # -- selection and expansion ----------------------------------------

    def select(
        self, voice_id: str, first_note_id: str, last_note_id: str
    ) -> tuple[MtgNode, PatternSet]:
        """Root a new selection from a first/last note pick."""
        voice = self.score.voice(voice_id)
        instance = select_range(voice, first_note_id, last_note_id)
        pattern_set = PatternSet(
            id=self._next_set_id(),
            instances=(instance,),
            origin=SetOrigin.selection(),
            chain=(),
        )
        node = self.graph.add_selection(pattern_set)
        self._assign_default_annotation(pattern_set.id)
        self._touch()
        return node, pattern_set

    def operators_for(self, node_id: str) -> dict[OperatorId, int]:
        """Availability counts for the operator panel at one node.

        At the chain-depth cap every operator reads zero so the panel
        disables consistently with what apply would refuse.
        """
        pattern_set = self.graph.set_for_node(node_id)
        if len(pattern_set.chain) >= self.max_chain_depth:
            return {op: 0 for op in OperatorId}
        state = self.state_for(pattern_set.id)
        return operator_availability(self.score.voices, state)

    def apply(
        self, node_id: str, operator: OperatorId
    ) -> tuple[MtgNode, MtgEdge, PatternSet, tuple[BridgeEdge, ...]]:
        """Expand a node by one operator; idempotent per (node, operator).

        Raises:
            ChainTooDeep: when the parent already sits at the depth cap.
        """
        parent = self.graph.node(node_id)
        parent_chain = self.graph.pattern_sets[parent.pattern_set_id].chain
        if len(parent_chain) >= self.max_chain_depth:
            raise ChainTooDeep(
                f"node {node_id} already carries a depth-{len(parent_chain)} "
                f"chain; the cap is {self.max_chain_depth}"
            )
        existing = self.graph.find_derived(node_id, operator)
        if existing is not None:
            edge = next(
                e for e in self.graph.edges
                if e.from_node == node_id and e.operator is operator
            )
            return existing, edge, self.pattern_set(existing.pattern_set_id), self.graph.bridges

        state = apply_operator(self.state_for(parent.pattern_set_id), operator)
        result = find_occurrences(
            self.score.voices,
            state,
            set_id=self._next_set_id(),
            origin=SetOrigin.derived(parent.pattern_set_id, operator),
        )
        node, edge = self.graph.expand(node_id, operator, result)
        self._assign_default_annotation(result.id)
        self._touch()
        return node, edge, result, self.graph.bridges

    def state_for(self, set_id: str) -> ConstraintState:
        """Reconstruct a set's constraint state from its root selection.

        The root's single instance supplies the pattern symbols; the
        stored chain is replayed on top.
        """
        pattern_set = self.pattern_set(set_id)
        root = pattern_set
        while root.origin.kind == "derived":
            root = self.pattern_set(root.origin.parent_set_id)
        root_instance = root.instances[0]
        voice = self.score.voice(root_instance.voice)
        state = normalize(instance_pattern(voice, root_instance))
        for op in pattern_set.chain:
            state = apply_operator(state, op)
        return state

    # -- annotations ------------------------------------------------------

    def annotate(
        self,
        set_id: str,
        label: str | None = None,
        color: str | None = None,
        description: str | None = None,
    ) -> Annotation:
        """Merge the given fields into the set's annotation."""
        self.pattern_set(set_id)
        current = self.annotations.get(set_id, Annotation())
        merged = Annotation(
            label=label if label is not None else current.label,
            color=color if color is not None else current.color,
            description=description if description is not None else current.description,
        )
        self.annotations[set_id] = merged
        self._touch()
        return merged

    def set_stats(self, set_id: str) -> SetStats:
        """Occurrence statistics shown in the pattern-configuration panel."""
        pattern_set = self.pattern_set(set_id)
        instances = pattern_set.instances
        overlapping = 0
        for i, inst in enumerate(instances):
            if any(inst.overlaps(other) for j, other in enumerate(instances) if i != j):
                overlapping += 1
        total = len(instances)
        return SetStats(
            total=total,
            unique=total - overlapping,
            overlapping=overlapping,
            pattern_length=pattern_set.pattern_length,
        )

    def delete_set(self, set_id: str) -> list[str]:
        """Delete a set, its derived subtree, and their annotations."""
        self.pattern_set(set_id)
        removed = self.graph.remove_set(set_id)
        for sid in removed:
            self.annotations.pop(sid, None)
        self._touch()
        return removed

    # -- heatmap -----------------------------------------------------------

    def coverage_counts(self) -> dict[tuple[str, int], int]:
        """Per (voice, note index) count of instances covering that note."""
        counts: dict[tuple[str, int], int] = {}
        for pattern_set in self.pattern_sets.values():
            for instance in pattern_set.instances:
                for idx in instance.note_indices():
                    key = (instance.voice, idx)
                    counts[key] = counts.get(key, 0) + 1
        return counts

    # -- bookkeeping ---------------------------------------------------------

    def _next_set_id(self) -> str:
        self._set_seq += 1
        return f"s{self._set_seq}"

    def _assign_default_annotation(self, set_id: str) -> None:
        color = PASTEL_PALETTE[(self._set_seq - 1) % len(PASTEL_PALETTE)]
        self.annotations[set_id] = Annotation(color=color)

    def _touch(self) -> None:
        self.modified = _utc_now()

    def restore_seq(self) -> None:
        """Recover id counters after loading a persisted document."""
        numbers = [
            int(sid[1:]) for sid in self.pattern_sets if sid[1:].isdigit()
        ]
        self._set_seq = max(numbers, default=0)


# -- persistence -------------------------------------------------------------


def save_session(session: AnalysisSession) -> str:
    """Serialize to the versioned JSON document (deterministic bytes)."""
    doc = {
        "version": SESSION_SCHEMA_VERSION,
        "id": session.id,
        "score_id": session.score_id,
        "sets": {
            sid: {
                "id": ps.id,
                "instances": [
                    {
                        "voice": inst.voice,
                        "start_index": inst.start_index,
                        "length": inst.length,
                    }
                    for inst in ps.instances
                ],
                "origin": {
                    "kind": ps.origin.kind,
                    "parent_set_id": ps.origin.parent_set_id,
                    "operator": ps.origin.operator.value if ps.origin.operator else None,
                },
                "chain": [op.value for op in ps.chain],
            }
            for sid, ps in session.pattern_sets.items()
        },
        "graph": session.graph.to_dict(),
        "annotations": {
            sid: {
                "label": ann.label,
                "color": ann.color,
                "description": ann.description,
            }
            for sid, ann in session.annotations.items()
        },
        "timestamps": {"created": session.created, "modified": session.modified},
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def load_session(document: str | bytes | dict, score: Score) -> AnalysisSession:
    """Rebuild a session from its JSON document.

    Raises:
        SchemaError: on truncated or structurally invalid documents.
        VersionMismatch: if the document version is unsupported.
        ScoreMismatch: if the document belongs to a different score.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"unreadable session document: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("session document must be a JSON object")

    version = doc.get("version")
    if version != SESSION_SCHEMA_VERSION:
        raise VersionMismatch(
            f"unsupported session version {version!r} "
            f"(supported: {SESSION_SCHEMA_VERSION!r})"
        )
    score_id = doc.get("score_id")
    if score_id != score.id:
        raise ScoreMismatch(
            f"session belongs to score {score_id!r}, not {score.id!r}"
        )

    try:
        timestamps = doc["timestamps"]
        session = AnalysisSession(
            session_id=doc["id"],
            score=score,
            created=timestamps["created"],
            modified=timestamps["modified"],
        )
        sets: dict[str, PatternSet] = {}
        for sid, raw in doc["sets"].items():
            origin_raw = raw["origin"]
            origin = SetOrigin(
                kind=origin_raw["kind"],
                parent_set_id=origin_raw["parent_set_id"],
                operator=(
                    OperatorId(origin_raw["operator"])
                    if origin_raw["operator"]
                    else None
                ),
            )
            sets[sid] = PatternSet(
                id=raw["id"],
                instances=tuple(
                    PatternInstance(
                        voice=i["voice"],
                        start_index=i["start_index"],
                        length=i["length"],
                    )
                    for i in raw["instances"]
                ),
                origin=origin,
                chain=tuple(OperatorId(o) for o in raw["chain"]),
            )
        for raw in doc["graph"]["nodes"]:
            node = MtgNode(
                id=raw["id"],
                pattern_set_id=raw["pattern_set_id"],
                kind=raw["kind"],
                label=raw.get("label"),
            )
            session.graph.register(node, sets[node.pattern_set_id])
        for raw in doc["graph"]["edges"]:
            session.graph.register_edge(
                MtgEdge(
                    from_node=raw["from"],
                    to_node=raw["to"],
                    operator=OperatorId(raw["operator"]),
                )
            )
        session.graph.refresh_bridges()
        for sid, raw in doc["annotations"].items():
            session.annotations[sid] = Annotation(
                label=raw["label"],
                color=raw["color"],
                description=raw["description"],
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"invalid session document: {exc}") from exc

    session.restore_seq()
    return session


# -- heatmap export ------------------------------------------------------------

HEATMAP_CSV_HEADER = "voice_id,note_index,onset,count"


@dataclass(frozen=True)
class HeatmapRow:
    voice_id: str
    note_index: int
    onset: Fraction
    count: int
    count_b: int | None = None


def heatmap(
    session: AnalysisSession, other: AnalysisSession | None = None
) -> list[HeatmapRow]:
    """Coverage table: one row per note of every voice of the score.

    Pair mode (``other`` given) appends a second count column for
    side-by-side comparison of two analyses of the same score.
    """
    if other is not None and other.score_id != session.score_id:
        raise ScoreMismatch(
            f"cannot compare sessions of scores {session.score_id!r} "
            f"and {other.score_id!r}"
        )
    counts = session.coverage_counts()
    counts_b = other.coverage_counts() if other is not None else None
    rows = []
    for voice in session.score.voices:
        for idx, note in enumerate(voice.notes):
            rows.append(
                HeatmapRow(
                    voice_id=voice.id,
                    note_index=idx,
                    onset=note.onset,
                    count=counts.get((voice.id, idx), 0),
                    count_b=(
                        counts_b.get((voice.id, idx), 0)
                        if counts_b is not None
                        else None
                    ),
                )
            )
    return rows


def heatmap_csv(rows: Iterable[HeatmapRow]) -> str:
    """CSV encoding with the documented header; onset as num/den."""
    rows = list(rows)
    pair = bool(rows) and rows[0].count_b is not None
    header = HEATMAP_CSV_HEADER + (",count_b" if pair else "")
    lines = [header]
    for row in rows:
        cells = [
            row.voice_id,
            str(row.note_index),
            rational_str(row.onset),
            str(row.count),
        ]
        if pair:
            cells.append(str(row.count_b))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def heatmap_json(rows: Iterable[HeatmapRow]) -> str:
    payload = []
    for row in rows:
        entry = {
            "voice_id": row.voice_id,
            "note_index": row.note_index,
            "onset": rational_str(row.onset),
            "count": row.count,
        }
        if row.count_b is not None:
            entry["count_b"] = row.count_b
        payload.append(entry)
    return json.dumps(payload, sort_keys=True)


def rational_str(value: Fraction) -> str:
    """Wire encoding of a rational: always explicit num/den."""
    return f"{value.numerator}/{value.denominator}"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")
