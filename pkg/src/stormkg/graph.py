"""Typed property graph over storm events, with time and space indices.

Node kinds and edge labels form a fixed schema; ``add_edge`` rejects any
edge whose endpoint kinds do not match its label's signature, and
``validate`` re-checks the whole graph after mutations.  The structural
edges (hasEvent, hasType, inTheme) are laid down by ``build_graph``; the
semantic edges (during, causes, generalizes) are added later by the
matching and mining passes.

Window and region queries answer from indices (an interval tree over event
spans, hash buckets for state/FIPS, a one-degree grid for coordinates) but
are contractually equivalent to a naive scan with the plain predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, NamedTuple, Sequence, Union

from .ingest import EventRecord, GeoPoint
from .themes import Theme, normalize_event_type

__all__ = [
    "BoundingBox",
    "EDGE_SIGNATURES",
    "EdgeSignatureError",
    "FipsSet",
    "GeoRegion",
    "GraphConstructionError",
    "KnowledgeGraph",
    "Node",
    "NodeKind",
    "StateSet",
    "TimeInterval",
    "build_graph",
    "region_matches",
]


class NodeKind(Enum):
    EVENT = "Event"
    EPISODE = "Episode"
    DISASTER = "Disaster"
    EVENT_TYPE = "EventType"
    THEME = "Theme"


class Node(NamedTuple):
    kind: NodeKind
    key: object


#: label -> (source kind, destination kind)
EDGE_SIGNATURES: dict[str, tuple[NodeKind, NodeKind]] = {
    "hasEvent": (NodeKind.EPISODE, NodeKind.EVENT),
    "hasType": (NodeKind.EVENT, NodeKind.EVENT_TYPE),
    "inTheme": (NodeKind.EVENT_TYPE, NodeKind.THEME),
    "during": (NodeKind.EVENT, NodeKind.DISASTER),
    "causes": (NodeKind.EVENT, NodeKind.EVENT),
    "generalizes": (NodeKind.EVENT_TYPE, NodeKind.EVENT_TYPE),
}


class GraphConstructionError(ValueError):
    pass


class EdgeSignatureError(ValueError):
    pass


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval of aware UTC datetimes."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} is after end {self.end}")

    def intersects(self, other: "TimeInterval") -> bool:
        return self.start <= other.end and self.end >= other.start


@dataclass(frozen=True)
class StateSet:
    """Administrative region: a non-empty set of state names."""

    states: frozenset[str]

    def __init__(self, states: Iterable[str]) -> None:
        object.__setattr__(self, "states", frozenset(s.strip().upper() for s in states))
        if not self.states or any(not s for s in self.states):
            raise ValueError("StateSet needs non-empty state names")


@dataclass(frozen=True)
class FipsSet:
    """Administrative region: a non-empty set of (state, county FIPS) pairs."""

    pairs: frozenset[tuple[str, int]]

    def __init__(self, pairs: Iterable[tuple[str, int]]) -> None:
        object.__setattr__(
            self, "pairs", frozenset((s.strip().upper(), int(f)) for s, f in pairs)
        )
        if not self.pairs or any(not s for s, _ in self.pairs):
            raise ValueError("FipsSet needs non-empty (state, fips) pairs")


@dataclass(frozen=True)
class BoundingBox:
    """Coordinate region; matches only events that carry coordinates."""

    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def __post_init__(self) -> None:
        if self.min_lat > self.max_lat:
            raise ValueError("min_lat above max_lat")
        if self.min_lon > self.max_lon:
            raise ValueError("min_lon above max_lon")

    def contains(self, point: GeoPoint) -> bool:
        return (
            self.min_lat <= point.latitude <= self.max_lat
            and self.min_lon <= point.longitude <= self.max_lon
        )


GeoRegion = Union[StateSet, FipsSet, BoundingBox]


def region_matches(record: EventRecord, region: GeoRegion) -> bool:
    """Plain membership predicate, the reference semantics for region queries.

    Administrative regions compare state (and FIPS) fields, so events
    without coordinates still match.  A bounding box can only compare
    coordinates; events with neither begin nor end point never match one.
    """
    if isinstance(region, StateSet):
        return record.state.strip().upper() in region.states
    if isinstance(region, FipsSet):
        return (record.state.strip().upper(), record.cz_fips) in region.pairs
    if isinstance(region, BoundingBox):
        for point in (record.begin_point, record.end_point):
            if point is not None and region.contains(point):
                return True
        return False
    raise TypeError(f"not a GeoRegion: {region!r}")


class _IntervalTree:
    """Static centered interval tree over closed [start, end] spans."""

    __slots__ = ("center", "left", "right", "by_start", "by_end")

    def __init__(self, items: Sequence[tuple[datetime, datetime, int]]) -> None:
        starts = sorted(x[0] for x in items)
        center = starts[len(starts) // 2]
        left_items = [x for x in items if x[1] < center]
        right_items = [x for x in items if x[0] > center]
        here = [x for x in items if x[0] <= center and x[1] >= center]
        self.center = center
        self.by_start = sorted(here)
        self.by_end = sorted(here, key=lambda x: x[1], reverse=True)
        self.left = _IntervalTree(left_items) if left_items else None
        self.right = _IntervalTree(right_items) if right_items else None

    def query(self, start: datetime, end: datetime, out: set[int]) -> None:
        if end < self.center:
            # spans here all cover center > end, so overlap iff start here <= end
            for s, _e, eid in self.by_start:
                if s > end:
                    break
                out.add(eid)
            if self.left is not None:
                self.left.query(start, end, out)
        elif start > self.center:
            for _s, e, eid in self.by_end:
                if e < start:
                    break
                out.add(eid)
            if self.right is not None:
                self.right.query(start, end, out)
        else:
            for _s, _e, eid in self.by_start:
                out.add(eid)
            if self.left is not None:
                self.left.query(start, end, out)
            if self.right is not None:
                self.right.query(start, end, out)


def _grid_cell(point: GeoPoint) -> tuple[int, int]:
    return (math.floor(point.latitude), math.floor(point.longitude))


class KnowledgeGraph:
    """Graph store plus payload maps and query indices.  Build via ``build_graph``."""

    def __init__(self) -> None:
        self._nodes: set[Node] = set()
        self._edges: set[tuple[str, Node, Node]] = set()
        self._records: dict[int, EventRecord] = {}
        self._episodes: dict[int, list[int]] = {}
        self._type_display: dict[str, str] = {}
        self._themes: dict[str, Theme] = {}
        self._disasters: dict[str, object] = {}
        self._has_type: dict[Node, Node] = {}
        self._interval_tree: _IntervalTree | None = None
        self._by_state: dict[str, set[int]] = {}
        self._by_fips: dict[tuple[str, int], set[int]] = {}
        self._grid: dict[tuple[int, int], set[int]] = {}

    # -- node/edge primitives ------------------------------------------------

    def add_node(self, node: Node) -> None:
        self._nodes.add(node)

    def has_node(self, node: Node) -> bool:
        return node in self._nodes

    def add_edge(self, label: str, src: Node, dst: Node) -> None:
        signature = EDGE_SIGNATURES.get(label)
        if signature is None:
            raise EdgeSignatureError(f"unknown edge label {label!r}")
        if src not in self._nodes:
            raise EdgeSignatureError(f"source node {src} not in graph")
        if dst not in self._nodes:
            raise EdgeSignatureError(f"destination node {dst} not in graph")
        if (src.kind, dst.kind) != signature:
            raise EdgeSignatureError(
                f"{label} edge requires {signature[0].value} -> {signature[1].value}, "
                f"got {src.kind.value} -> {dst.kind.value}"
            )
        if label == "causes" and src == dst:
            raise EdgeSignatureError("causes edge may not be reflexive")
        if label == "hasType":
            existing = self._has_type.get(src)
            if existing is not None and existing != dst:
                raise EdgeSignatureError(f"event {src.key} already has a type")
            self._has_type[src] = dst
        self._edges.add((label, src, dst))

    def edges(self, label: str | None = None) -> frozenset[tuple[str, Node, Node]]:
        if label is None:
            return frozenset(self._edges)
        return frozenset(e for e in self._edges if e[0] == label)

    def has_edge(self, label: str, src: Node, dst: Node) -> bool:
        return (label, src, dst) in self._edges

    def validate(self) -> None:
        """Re-check every schema invariant; raises EdgeSignatureError on violation."""
        seen_types: dict[Node, Node] = {}
        for label, src, dst in self._edges:
            signature = EDGE_SIGNATURES.get(label)
            if signature is None:
                raise EdgeSignatureError(f"unknown edge label {label!r}")
            if src not in self._nodes or dst not in self._nodes:
                raise EdgeSignatureError(f"{label} edge has a dangling endpoint")
            if (src.kind, dst.kind) != signature:
                raise EdgeSignatureError(f"{label} edge violates its signature")
            if label == "causes" and src == dst:
                raise EdgeSignatureError("reflexive causes edge")
            if label == "hasType":
                if seen_types.setdefault(src, dst) != dst:
                    raise EdgeSignatureError(f"event {src.key} has two types")

    # -- payload accessors ----------------------------------------------------

    def record(self, event_id: int) -> EventRecord:
        rec = self._records.get(event_id)
        if rec is None:
            raise KeyError(f"unknown event {event_id}")
        return rec

    def event_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._records))

    def episode_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._episodes))

    def episode_events(self, episode_id: int) -> tuple[int, ...]:
        members = self._episodes.get(episode_id)
        if members is None:
            raise KeyError(f"unknown episode {episode_id}")
        return tuple(sorted(members))

    def event_type_display(self, normalized: str) -> str:
        return self._type_display[normalized]

    def theme(self, name: str) -> Theme:
        return self._themes[name]

    def disaster_names(self) -> tuple[str, ...]:
        return tuple(sorted(self._disasters))

    # -- node constructors for the semantic passes -----------------------------

    def event_node(self, event_id: int) -> Node:
        node = Node(NodeKind.EVENT, event_id)
        if node not in self._nodes:
            raise KeyError(f"unknown event {event_id}")
        return node

    def type_node(self, type_name: str) -> Node:
        node = Node(NodeKind.EVENT_TYPE, normalize_event_type(type_name))
        if node not in self._nodes:
            raise KeyError(f"unknown event type {type_name!r}")
        return node

    def add_during_edge(self, event_id: int, disaster) -> None:
        """Record that an event happened during a disaster (node added lazily)."""
        dnode = Node(NodeKind.DISASTER, disaster.canonical_name)
        if dnode not in self._nodes:
            self.add_node(dnode)
            self._disasters[disaster.canonical_name] = disaster
        self.add_edge("during", self.event_node(event_id), dnode)

    def add_causes_edge(self, cause_id: int, effect_id: int) -> None:
        self.add_edge("causes", self.event_node(cause_id), self.event_node(effect_id))

    def add_generalizes_edge(self, cause_type: str, effect_type: str) -> None:
        self.add_edge("generalizes", self.type_node(cause_type), self.type_node(effect_type))

    # -- index queries ----------------------------------------------------------

    def events_in_window(self, window: TimeInterval) -> set[int]:
        """Events whose [begin, end] span overlaps the closed window."""
        out: set[int] = set()
        if self._interval_tree is not None:
            self._interval_tree.query(window.start, window.end, out)
        return out

    def events_in_region(self, region: GeoRegion) -> set[int]:
        """Events matching ``region`` under the ``region_matches`` semantics."""
        if isinstance(region, StateSet):
            out = set()
            for state in region.states:
                out |= self._by_state.get(state, set())
            return out
        if isinstance(region, FipsSet):
            out = set()
            for pair in region.pairs:
                out |= self._by_fips.get(pair, set())
            return out
        if isinstance(region, BoundingBox):
            candidates: set[int] = set()
            for cell_lat in range(math.floor(region.min_lat), math.floor(region.max_lat) + 1):
                for cell_lon in range(math.floor(region.min_lon), math.floor(region.max_lon) + 1):
                    candidates |= self._grid.get((cell_lat, cell_lon), set())
            return {eid for eid in candidates if region_matches(self._records[eid], region)}
        raise TypeError(f"not a GeoRegion: {region!r}")

    # -- construction -------------------------------------------------------------

    def _index_events(self) -> None:
        items = [(r.begin_time, r.end_time, r.event_id) for r in self._records.values()]
        self._interval_tree = _IntervalTree(items) if items else None
        for rec in self._records.values():
            self._by_state.setdefault(rec.state.strip().upper(), set()).add(rec.event_id)
            self._by_fips.setdefault(
                (rec.state.strip().upper(), rec.cz_fips), set()
            ).add(rec.event_id)
            for point in (rec.begin_point, rec.end_point):
                if point is not None:
                    self._grid.setdefault(_grid_cell(point), set()).add(rec.event_id)


def build_graph(
    records: Iterable[EventRecord],
    themes: Iterable[Theme] = (),
    disasters: Iterable = (),
) -> KnowledgeGraph:
    """Populate a graph: nodes and structural edges for records, themes, disasters.

    Event types get one node per distinct normalized name; theme member
    types are added as nodes even when no record carries them, so theme
    structure is always fully represented.  Duplicate event ids are a
    construction error.
    """
    g = KnowledgeGraph()
    themes = tuple(themes)

    for rec in records:
        if rec.event_id in g._records:
            raise GraphConstructionError(f"duplicate event id {rec.event_id}")
        g._records[rec.event_id] = rec
        g.add_node(Node(NodeKind.EVENT, rec.event_id))
        if rec.episode_id is not None:
            g._episodes.setdefault(rec.episode_id, []).append(rec.event_id)

    for episode_id in g._episodes:
        g.add_node(Node(NodeKind.EPISODE, episode_id))

    for rec in g._records.values():
        key = normalize_event_type(rec.event_type)
        g._type_display.setdefault(key, rec.event_type)
    for theme in themes:
        for member in theme.member_types:
            g._type_display.setdefault(normalize_event_type(member), member)
    for key in g._type_display:
        g.add_node(Node(NodeKind.EVENT_TYPE, key))

    for theme in themes:
        g._themes[theme.name] = theme
        g.add_node(Node(NodeKind.THEME, theme.name))

    for disaster in disasters:
        g._disasters[disaster.canonical_name] = disaster
        g.add_node(Node(NodeKind.DISASTER, disaster.canonical_name))

    for episode_id, members in g._episodes.items():
        for event_id in members:
            g.add_edge("hasEvent", Node(NodeKind.EPISODE, episode_id), Node(NodeKind.EVENT, event_id))
    for rec in g._records.values():
        g.add_edge(
            "hasType",
            Node(NodeKind.EVENT, rec.event_id),
            Node(NodeKind.EVENT_TYPE, normalize_event_type(rec.event_type)),
        )
    for theme in themes:
        for member in theme.member_types:
            g.add_edge(
                "inTheme",
                Node(NodeKind.EVENT_TYPE, normalize_event_type(member)),
                Node(NodeKind.THEME, theme.name),
            )

    g._index_events()
    return g
