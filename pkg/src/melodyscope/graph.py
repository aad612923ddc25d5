"""The melodic transformation graph.

A provenance DAG over pattern sets: selection nodes are roots, derived
nodes hang off exactly one solid edge labeled with the operator that
produced them. Undirected dashed bridges connect any two nodes whose
result sets share instances; bridges are recomputed eagerly on every
mutation because graphs stay small (tens of nodes).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    DuplicateSet,
    OriginMismatch,
    UnknownFormat,
    UnknownNode,
)
from .operators import OperatorId
from .search import PatternSet


@dataclass(frozen=True)
class MtgNode:
    """One graph node: a selection or an operator result set."""

    id: str
    pattern_set_id: str
    kind: str  # "selection" | "derived"
    label: str | None = None


@dataclass(frozen=True)
class MtgEdge:
    """Solid directed edge recording one operator application."""

    from_node: str
    to_node: str
    operator: OperatorId
    style: str = "solid"


@dataclass(frozen=True)
class BridgeEdge:
    """Dashed undirected edge between nodes sharing instances.

    Stored once per unordered pair, with ``node_a`` created before
    ``node_b``.
    """

    node_a: str
    node_b: str
    shared_count: int
    style: str = "dashed"


class TransformationGraph:
    """Mutable graph owned by one analysis session.

    Mutations are serialized by the owning session; reads of a snapshot
    (exports) are safe to share.
    """

    def __init__(self):
        self._nodes: dict[str, MtgNode] = {}
        self._sets: dict[str, PatternSet] = {}
        self._edges: list[MtgEdge] = []
        self._bridges: list[BridgeEdge] = []
        self._node_seq = 0

    # -- read access --------------------------------------------------

    @property
    def nodes(self) -> tuple[MtgNode, ...]:
        return tuple(self._nodes.values())

    @property
    def edges(self) -> tuple[MtgEdge, ...]:
        return tuple(self._edges)

    @property
    def bridges(self) -> tuple[BridgeEdge, ...]:
        return tuple(self._bridges)

    @property
    def pattern_sets(self) -> dict[str, PatternSet]:
        return dict(self._sets)

    def node(self, node_id: str) -> MtgNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no graph node {node_id!r}") from None

    def set_for_node(self, node_id: str) -> PatternSet:
        return self._sets[self.node(node_id).pattern_set_id]

    def node_for_set(self, set_id: str) -> MtgNode | None:
        for node in self._nodes.values():
            if node.pattern_set_id == set_id:
                return node
        return None

    def find_derived(self, node_id: str, operator: OperatorId) -> MtgNode | None:
        """Existing child of (node, operator), if that expansion already ran."""
        for edge in self._edges:
            if edge.from_node == node_id and edge.operator is operator:
                return self._nodes[edge.to_node]
        return None

    # -- mutations ----------------------------------------------------

    def add_selection(self, pattern_set: PatternSet) -> MtgNode:
        """Root a new selection node.

        Raises:
            DuplicateSet: if an identical selection is already rooted.
        """
        if pattern_set.origin.kind != "selection":
            raise OriginMismatch("add_selection requires a selection-origin set")
        for node in self._nodes.values():
            if node.kind != "selection":
                continue
            if self._sets[node.pattern_set_id].instances == pattern_set.instances:
                raise DuplicateSet(
                    f"selection already rooted as node {node.id!r}"
                )
        node = self._new_node(pattern_set, kind="selection")
        self._recompute_bridges()
        return node

    def expand(
        self, node_id: str, operator: OperatorId, result_set: PatternSet
    ) -> tuple[MtgNode, MtgEdge]:
        """Attach an operator result below a node with a solid edge.

        Re-expanding the same (node, operator) is idempotent and returns
        the existing node and edge.

        Raises:
            UnknownNode: if the parent does not exist.
            OriginMismatch: if the result set's origin disagrees.
        """
        parent = self.node(node_id)
        origin = result_set.origin
        if (
            origin.kind != "derived"
            or origin.parent_set_id != parent.pattern_set_id
            or origin.operator is not operator
        ):
            raise OriginMismatch(
                f"result set origin {origin} does not match expansion of "
                f"{parent.pattern_set_id!r} by {operator.value}"
            )
        existing = self.find_derived(node_id, operator)
        if existing is not None:
            if self._sets[existing.pattern_set_id].instances != result_set.instances:
                raise OriginMismatch(
                    "re-expansion produced a different result set; "
                    "search must be deterministic"
                )
            edge = next(
                e for e in self._edges
                if e.from_node == node_id and e.operator is operator
            )
            return existing, edge
        node = self._new_node(result_set, kind="derived")
        edge = MtgEdge(from_node=parent.id, to_node=node.id, operator=operator)
        self._edges.append(edge)
        self._recompute_bridges()
        return node, edge

    def remove_set(self, set_id: str) -> list[str]:
        """Remove the node owning ``set_id`` and its whole derived subtree.

        Returns the removed pattern set ids (root first, then children in
        creation order). Incident bridges go away with the nodes.
        """
        root = self.node_for_set(set_id)
        if root is None:
            raise UnknownNode(f"no node for pattern set {set_id!r}")
        doomed_nodes = [root.id]
        frontier = [root.id]
        while frontier:
            current = frontier.pop(0)
            for edge in self._edges:
                if edge.from_node == current and edge.to_node not in doomed_nodes:
                    doomed_nodes.append(edge.to_node)
                    frontier.append(edge.to_node)
        removed_set_ids = [self._nodes[nid].pattern_set_id for nid in doomed_nodes]
        for nid in doomed_nodes:
            del self._nodes[nid]
        for sid in removed_set_ids:
            del self._sets[sid]
        self._edges = [
            e for e in self._edges
            if e.from_node not in doomed_nodes and e.to_node not in doomed_nodes
        ]
        self._recompute_bridges()
        return removed_set_ids

    # -- analysis -----------------------------------------------------

    def compute_bridges(self) -> list[BridgeEdge]:
        """One bridge per unordered node pair with intersecting instances."""
        order = {node_id: i for i, node_id in enumerate(self._nodes)}
        node_ids = list(self._nodes)
        bridges: list[BridgeEdge] = []
        for i, a in enumerate(node_ids):
            keys_a = self._sets[self._nodes[a].pattern_set_id].instance_keys()
            for b in node_ids[i + 1 :]:
                keys_b = self._sets[self._nodes[b].pattern_set_id].instance_keys()
                shared = len(keys_a & keys_b)
                if shared:
                    first, second = (a, b) if order[a] < order[b] else (b, a)
                    bridges.append(
                        BridgeEdge(node_a=first, node_b=second, shared_count=shared)
                    )
        return bridges

    def components(self) -> list[list[str]]:
        """Partition node ids by connectivity over solid edges and bridges."""
        neighbors: dict[str, set[str]] = {nid: set() for nid in self._nodes}
        for edge in self._edges:
            neighbors[edge.from_node].add(edge.to_node)
            neighbors[edge.to_node].add(edge.from_node)
        for bridge in self._bridges:
            neighbors[bridge.node_a].add(bridge.node_b)
            neighbors[bridge.node_b].add(bridge.node_a)
        order = {nid: i for i, nid in enumerate(self._nodes)}
        seen: set[str] = set()
        parts: list[list[str]] = []
        for nid in self._nodes:
            if nid in seen:
                continue
            component = []
            stack = [nid]
            seen.add(nid)
            while stack:
                current = stack.pop()
                component.append(current)
                for nxt in neighbors[current]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            parts.append(sorted(component, key=order.__getitem__))
        return parts

    def export(self, format: str = "json") -> str:
        """Serialize the graph topology as JSON or Graphviz DOT."""
        if format == "json":
            return json.dumps(self.to_dict(), sort_keys=True)
        if format == "dot":
            return self._to_dot()
        raise UnknownFormat(f"unknown graph export format {format!r}")

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": node.id,
                    "pattern_set_id": node.pattern_set_id,
                    "kind": node.kind,
                    "label": node.label,
                    "chain": [op.value for op in self._sets[node.pattern_set_id].chain],
                    "instance_count": len(self._sets[node.pattern_set_id]),
                }
                for node in self._nodes.values()
            ],
            "edges": [
                {
                    "from": e.from_node,
                    "to": e.to_node,
                    "operator": e.operator.value,
                    "style": e.style,
                }
                for e in self._edges
            ],
            "bridges": [
                {
                    "a": b.node_a,
                    "b": b.node_b,
                    "shared_count": b.shared_count,
                    "style": b.style,
                }
                for b in self._bridges
            ],
        }

    def _to_dot(self) -> str:
        lines = ["digraph mtg {"]
        for node in self._nodes.values():
            count = len(self._sets[node.pattern_set_id])
            shape = "box" if node.kind == "selection" else "ellipse"
            lines.append(
                f'  {node.id} [label="{node.id} ({count})", shape={shape}];'
            )
        for edge in self._edges:
            lines.append(
                f'  {edge.from_node} -> {edge.to_node} [label="{edge.operator.value}"];'
            )
        for bridge in self._bridges:
            lines.append(
                f"  {bridge.node_a} -> {bridge.node_b} "
                f'[style=dashed, dir=none, label="{bridge.shared_count}"];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"

    def validate(self) -> None:
        """Invariant sweep; raises ValueError on any violation."""
        in_degree = {nid: 0 for nid in self._nodes}
        for edge in self._edges:
            if edge.from_node not in self._nodes or edge.to_node not in self._nodes:
                raise ValueError(f"edge {edge} references a missing node")
            in_degree[edge.to_node] += 1
        for node in self._nodes.values():
            if node.pattern_set_id not in self._sets:
                raise ValueError(f"node {node.id} references a missing set")
            expected = 0 if node.kind == "selection" else 1
            if in_degree[node.id] != expected:
                raise ValueError(
                    f"{node.kind} node {node.id} has in-degree {in_degree[node.id]}"
                )
        self._check_acyclic()
        recomputed = {
            (b.node_a, b.node_b): b.shared_count for b in self.compute_bridges()
        }
        stored = {(b.node_a, b.node_b): b.shared_count for b in self._bridges}
        if stored != recomputed:
            raise ValueError("stored bridges disagree with recomputation")
        for bridge in self._bridges:
            if bridge.shared_count < 1 or bridge.node_a == bridge.node_b:
                raise ValueError(f"bad bridge {bridge}")

    # -- persistence hooks (used by the session layer) ------------------

    def register(self, node: MtgNode, pattern_set: PatternSet) -> None:
        """Insert a preexisting node verbatim (session load path)."""
        self._nodes[node.id] = node
        self._sets[pattern_set.id] = pattern_set
        self._node_seq = max(self._node_seq, _numeric_suffix(node.id))

    def register_edge(self, edge: MtgEdge) -> None:
        self._edges.append(edge)

    def refresh_bridges(self) -> None:
        self._recompute_bridges()

    # -- helpers --------------------------------------------------------

    def _new_node(self, pattern_set: PatternSet, kind: str) -> MtgNode:
        self._node_seq += 1
        node = MtgNode(
            id=f"n{self._node_seq}", pattern_set_id=pattern_set.id, kind=kind
        )
        self._nodes[node.id] = node
        self._sets[pattern_set.id] = pattern_set
        return node

    def _recompute_bridges(self) -> None:
        self._bridges = self.compute_bridges()

    def _check_acyclic(self) -> None:
        children: dict[str, list[str]] = {nid: [] for nid in self._nodes}
        for edge in self._edges:
            children[edge.from_node].append(edge.to_node)
        state: dict[str, int] = {}

        def visit(nid: str) -> None:
            state[nid] = 1
            for child in children[nid]:
                mark = state.get(child, 0)
                if mark == 1:
                    raise ValueError("solid edges form a cycle")
                if mark == 0:
                    visit(child)
            state[nid] = 2

        for nid in self._nodes:
            if state.get(nid, 0) == 0:
                visit(nid)


def _numeric_suffix(node_id: str) -> int:
    digits = "".join(ch for ch in node_id if ch.isdigit())
    return int(digits) if digits else 0
