"""End-to-end cascade queries: which theme-1 events and theme-2 events were
linked during a disaster, and what type-level patterns do the links form.

The pipeline expands both theme keywords, matches events to the disaster,
keeps the matched events whose types fall in either theme, mines and links
within each episode, and generalizes the instance links to type patterns.
Exports are byte-deterministic: rerunning the same query on the same data
must reproduce identical JSON and DOT artifacts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from typing import Mapping

from .causality import (
    CausalLink,
    ConnectorThesaurus,
    Level,
    NarrativeKind,
    collect_episode_mentions,
    generalize_causality,
    link_events_in_episode,
)
from .disasters import DEFAULT_BUFFER_DAYS, DisasterRegistry, match_disaster
from .graph import KnowledgeGraph
from .ingest import EventRecord
from .themes import Theme, ThemeRegistry, normalize_event_type

__all__ = [
    "CascadeAnswer",
    "CascadeQuery",
    "EventSummary",
    "answer_cascade",
    "export_dot",
    "export_json",
    "mine_all_episodes",
]


@dataclass(frozen=True)
class CascadeQuery:
    theme1_keyword: str
    theme2_keyword: str
    disaster_name: str
    buffer_days: int = DEFAULT_BUFFER_DAYS

    def __post_init__(self) -> None:
        for field_name in ("theme1_keyword", "theme2_keyword", "disaster_name"):
            if not getattr(self, field_name).strip():
                raise ValueError(f"{field_name} must be non-empty")
        if self.buffer_days < 0:
            raise ValueError("buffer_days must be non-negative")


@dataclass(frozen=True)
class EventSummary:
    """What an answer shows about a link endpoint.  The excerpt is capped at
    the evidence sentences, never the full narrative."""

    event_id: int
    event_type: str
    state: str
    begin_time: datetime
    end_time: datetime
    latitude: float | None
    longitude: float | None
    injuries_direct: int
    injuries_indirect: int
    deaths_direct: int
    deaths_indirect: int
    damage_property_usd: int
    damage_crops_usd: int
    excerpt: str


@dataclass(frozen=True)
class CascadeAnswer:
    theme1: Theme
    theme2: Theme
    disaster_name: str | None
    buffer_days: int | None
    matched_event_ids: tuple[int, ...]
    links: tuple[CausalLink, ...]
    patterns: tuple[CausalLink, ...]
    summaries: Mapping[int, EventSummary]
    query: CascadeQuery | None = None


def _summarize(record: EventRecord, links: tuple[CausalLink, ...]) -> EventSummary:
    sentences: list[str] = []
    for link in links:
        if record.event_id in (link.cause_event_id, link.effect_event_id):
            for mention in link.evidence:
                if mention.sentence not in sentences:
                    sentences.append(mention.sentence)
    point = record.begin_point
    return EventSummary(
        event_id=record.event_id,
        event_type=record.event_type,
        state=record.state,
        begin_time=record.begin_time,
        end_time=record.end_time,
        latitude=point.latitude if point else None,
        longitude=point.longitude if point else None,
        injuries_direct=record.injuries_direct,
        injuries_indirect=record.injuries_indirect,
        deaths_direct=record.deaths_direct,
        deaths_indirect=record.deaths_indirect,
        damage_property_usd=record.damage_property_usd,
        damage_crops_usd=record.damage_crops_usd,
        excerpt=" ".join(sentences),
    )


def _finish_links(
    graph: KnowledgeGraph, links: list[CausalLink]
) -> tuple[tuple[CausalLink, ...], tuple[CausalLink, ...], dict[int, EventSummary]]:
    links.sort(
        key=lambda l: (
            graph.record(l.cause_event_id).begin_time,
            l.cause_event_id,
            graph.record(l.effect_event_id).begin_time,
            l.effect_event_id,
        )
    )
    ordered = tuple(links)
    patterns = tuple(generalize_causality(ordered))
    for pattern in patterns:
        graph.add_generalizes_edge(str(pattern.cause_type), str(pattern.effect_type))
    summaries: dict[int, EventSummary] = {}
    for link in ordered:
        for event_id in (link.cause_event_id, link.effect_event_id):
            if event_id not in summaries:
                summaries[event_id] = _summarize(graph.record(event_id), ordered)
    return ordered, patterns, summaries


def answer_cascade(
    graph: KnowledgeGraph,
    registry: ThemeRegistry,
    disasters: DisasterRegistry,
    thesaurus: ConnectorThesaurus,
    query: CascadeQuery,
    *,
    synonyms: Mapping[str, str] | None = None,
) -> CascadeAnswer:
    """Run the full pipeline for one query."""
    theme1 = registry.resolve(query.theme1_keyword)
    theme2 = registry.resolve(query.theme2_keyword)
    disaster = disasters.resolve(query.disaster_name)

    matched = match_disaster(graph, disaster, query.buffer_days)
    themed_types = theme1.normalized_members() | theme2.normalized_members()
    restricted = {
        event_id
        for event_id in matched
        if normalize_event_type(graph.record(event_id).event_type) in themed_types
    }

    by_episode: dict[int, set[int]] = {}
    for event_id in restricted:
        episode_id = graph.record(event_id).episode_id
        if episode_id is not None:
            by_episode.setdefault(episode_id, set()).add(event_id)

    links: list[CausalLink] = []
    for episode_id in sorted(by_episode):
        candidates = by_episode[episode_id]
        mentions = collect_episode_mentions(graph, episode_id, thesaurus, candidates)
        links.extend(
            link_events_in_episode(
                graph,
                episode_id,
                mentions,
                theme1,
                theme2,
                candidate_ids=candidates,
                synonyms=synonyms,
                disaster=disaster.canonical_name,
            )
        )

    ordered, patterns, summaries = _finish_links(graph, links)
    return CascadeAnswer(
        theme1=theme1,
        theme2=theme2,
        disaster_name=disaster.canonical_name,
        buffer_days=query.buffer_days,
        matched_event_ids=tuple(sorted(matched)),
        links=ordered,
        patterns=patterns,
        summaries=summaries,
        query=query,
    )


def mine_all_episodes(
    graph: KnowledgeGraph,
    registry: ThemeRegistry,
    thesaurus: ConnectorThesaurus,
    theme1_keyword: str,
    theme2_keyword: str,
    *,
    synonyms: Mapping[str, str] | None = None,
) -> CascadeAnswer:
    """Mine every episode for links between two themes, with no disaster filter."""
    theme1 = registry.resolve(theme1_keyword)
    theme2 = registry.resolve(theme2_keyword)
    links: list[CausalLink] = []
    for episode_id in graph.episode_ids():
        mentions = collect_episode_mentions(graph, episode_id, thesaurus)
        links.extend(
            link_events_in_episode(
                graph, episode_id, mentions, theme1, theme2, synonyms=synonyms
            )
        )
    ordered, patterns, summaries = _finish_links(graph, links)
    return CascadeAnswer(
        theme1=theme1,
        theme2=theme2,
        disaster_name=None,
        buffer_days=None,
        matched_event_ids=(),
        links=ordered,
        patterns=patterns,
        summaries=summaries,
        query=None,
    )


def _iso(when: datetime) -> str:
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def _summary_dict(summary: EventSummary) -> dict:
    return {
        "event_id": summary.event_id,
        "event_type": summary.event_type,
        "state": summary.state,
        "begin_time": _iso(summary.begin_time),
        "end_time": _iso(summary.end_time),
        "latitude": summary.latitude,
        "longitude": summary.longitude,
        "injuries_direct": summary.injuries_direct,
        "injuries_indirect": summary.injuries_indirect,
        "deaths_direct": summary.deaths_direct,
        "deaths_indirect": summary.deaths_indirect,
        "damage_property_usd": summary.damage_property_usd,
        "damage_crops_usd": summary.damage_crops_usd,
        "excerpt": summary.excerpt,
    }


def export_json(answer: CascadeAnswer) -> str:
    """Serialize an answer with stable key order and ISO-8601 UTC stamps."""
    doc = {
        "query": {
            "theme1": answer.theme1.name,
            "theme2": answer.theme2.name,
            "disaster": answer.disaster_name,
            "buffer_days": answer.buffer_days,
        },
        "matched_event_ids": list(answer.matched_event_ids),
        "links": [
            {
                "cause": _summary_dict(answer.summaries[link.cause_event_id]),
                "effect": _summary_dict(answer.summaries[link.effect_event_id]),
                "connectors": list(link.rule_trace.connectors) if link.rule_trace else [],
                "evidence": [
                    {
                        "sentence": mention.sentence,
                        "connector": mention.connector,
                        "cause_span": mention.cause_span,
                        "effect_span": mention.effect_span,
                        "source_event_id": mention.source_event_id,
                        "narrative_kind": mention.narrative_kind.value,
                    }
                    for mention in link.evidence
                ],
            }
            for link in answer.links
        ],
        "patterns": [
            {
                "cause_type": pattern.cause_type,
                "effect_type": pattern.effect_type,
                "support": pattern.support_count,
            }
            for pattern in answer.patterns
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(answer: CascadeAnswer) -> str:
    """Render instance links as a DOT digraph named ``cascade``.

    Nodes are the distinct link endpoints, labeled with type, id, and begin
    date; fill color separates the themes (theme 1 beige, theme 2 red,
    matching the usual flood/heavy-rain rendering).  An answer with no
    links renders an empty digraph.
    """
    lines = ["digraph cascade {"]
    if answer.links:
        lines.append("  rankdir=LR;")
        lines.append("  node [style=filled];")
        theme1_members = answer.theme1.normalized_members()
        seen: set[int] = set()
        for link in answer.links:
            for event_id in (link.cause_event_id, link.effect_event_id):
                seen.add(event_id)
        for event_id in sorted(seen):
            summary = answer.summaries[event_id]
            color = (
                "beige"
                if normalize_event_type(summary.event_type) in theme1_members
                else "red"
            )
            label = (
                f"{_dot_escape(summary.event_type)}\\n"
                f"#{summary.event_id}\\n{summary.begin_time:%Y-%m-%d}"
            )
            lines.append(f'  "{event_id}" [label="{label}", fillcolor="{color}"];')
        for link in answer.links:
            label = _dot_escape(
                ", ".join(link.rule_trace.connectors) if link.rule_trace else ""
            )
            lines.append(
                f'  "{link.cause_event_id}" -> "{link.effect_event_id}" [label="{label}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
