"""Match events to named disasters by narrative mention, time, and place.

An event belongs to a disaster only when all three constraints hold: one of
the disaster's aliases appears on a word boundary in the event or episode
narrative, the event's buffered time span overlaps the disaster's active
window, and the event co-occurs spatially with the impact region.  Keyword
matching alone is noisy in both directions ("sandy soils" mentions Sandy, a
2018 flood can reference it in comparison), which is exactly why the
conjunction is required.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable

from .graph import BoundingBox, FipsSet, GeoRegion, KnowledgeGraph, StateSet, TimeInterval, region_matches
from .ingest import EventRecord

__all__ = [
    "DisasterRegistry",
    "DisasterRegistryError",
    "DisasterSpec",
    "UnknownDisasterError",
    "load_disasters",
    "match_disaster",
    "narrative_mentions",
    "parse_iso_instant",
    "spatially_cooccurs",
    "temporal_window",
]

DEFAULT_BUFFER_DAYS = 7


class UnknownDisasterError(ValueError):
    pass


class DisasterRegistryError(ValueError):
    pass


@dataclass(frozen=True)
class DisasterSpec:
    """A named disaster: aliases, active window, impact region."""

    canonical_name: str
    aliases: frozenset[str]
    active_window: TimeInterval
    impact_region: GeoRegion

    def __init__(
        self,
        canonical_name: str,
        aliases: Iterable[str],
        active_window: TimeInterval,
        impact_region: GeoRegion,
    ) -> None:
        name = canonical_name.strip()
        if not name:
            raise ValueError("disaster needs a non-empty canonical name")
        all_aliases = frozenset(a.strip() for a in aliases if a.strip()) | {name}
        object.__setattr__(self, "canonical_name", name)
        object.__setattr__(self, "aliases", all_aliases)
        object.__setattr__(self, "active_window", active_window)
        object.__setattr__(self, "impact_region", impact_region)

    def alias_pattern(self) -> re.Pattern[str]:
        alternatives = "|".join(re.escape(a) for a in sorted(self.aliases, key=len, reverse=True))
        return re.compile(rf"\b(?:{alternatives})\b", re.IGNORECASE)


def narrative_mentions(record: EventRecord, disaster: DisasterSpec) -> bool:
    """True when any alias occurs, case-insensitively on word boundaries,
    in the event narrative or the episode narrative."""
    pattern = disaster.alias_pattern()
    return bool(
        pattern.search(record.event_narrative) or pattern.search(record.episode_narrative)
    )


def temporal_window(record: EventRecord, buffer_days: int) -> TimeInterval:
    """The event's span widened by ``buffer_days`` whole days on each side."""
    if buffer_days < 0:
        raise ValueError("buffer_days must be non-negative")
    delta = timedelta(days=buffer_days)
    return TimeInterval(record.begin_time - delta, record.end_time + delta)


def spatially_cooccurs(record: EventRecord, region: GeoRegion) -> bool:
    """Same semantics as region queries on the graph; see ``region_matches``."""
    return region_matches(record, region)


def match_disaster(
    graph: KnowledgeGraph,
    disaster: DisasterSpec,
    buffer_days: int = DEFAULT_BUFFER_DAYS,
) -> set[int]:
    """Events satisfying the three-way conjunction; adds a during edge per match.

    The temporal index is consulted with the disaster window widened by the
    buffer, which selects exactly the events whose own buffered window
    overlaps the unwidened disaster window.
    """
    if buffer_days < 0:
        raise ValueError("buffer_days must be non-negative")
    delta = timedelta(days=buffer_days)
    widened = TimeInterval(
        disaster.active_window.start - delta, disaster.active_window.end + delta
    )
    matched: set[int] = set()
    for event_id in graph.events_in_window(widened):
        record = graph.record(event_id)
        if narrative_mentions(record, disaster) and spatially_cooccurs(
            record, disaster.impact_region
        ):
            matched.add(event_id)
            graph.add_during_edge(event_id, disaster)
    return matched


class DisasterRegistry:
    """Lookup of disaster specs by canonical name or alias (case-insensitive)."""

    def __init__(self, specs: Iterable[DisasterSpec]) -> None:
        self.specs: tuple[DisasterSpec, ...] = tuple(specs)
        self._by_alias: dict[str, DisasterSpec] = {}
        for spec in self.specs:
            for alias in spec.aliases | {spec.canonical_name}:
                self._by_alias[alias.lower()] = spec

    def resolve(self, name: str) -> DisasterSpec:
        spec = self._by_alias.get(name.strip().lower())
        if spec is None:
            known = ", ".join(sorted(s.canonical_name for s in self.specs)) or "none"
            raise UnknownDisasterError(f"unknown disaster {name!r}; known: {known}")
        return spec


def parse_iso_instant(value: str, *, end_of_day: bool = False) -> datetime:
    """Parse an ISO-8601 date or datetime to aware UTC.

    A bare date means midnight, or the last second of the day when it closes
    a window.  Naive datetimes are taken as UTC.
    """
    text = value.strip().replace("Z", "+00:00")
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise ValueError(f"bad ISO-8601 instant {value!r}") from None
    if len(text) == 10 and end_of_day:  # bare date closing a window
        parsed = parsed.replace(hour=23, minute=59, second=59)
    if parsed.tzinfo is None:
        return parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def _region_from_entry(entry: dict, context: str) -> GeoRegion:
    keys = [k for k in ("states", "fips", "bbox") if k in entry]
    if len(keys) != 1:
        raise DisasterRegistryError(
            f"{context}: exactly one of 'states', 'fips', or 'bbox' is required"
        )
    key = keys[0]
    try:
        if key == "states":
            return StateSet(entry["states"])
        if key == "fips":
            return FipsSet((s, int(f)) for s, f in entry["fips"])
        min_lat, min_lon, max_lat, max_lon = (float(x) for x in entry["bbox"])
        return BoundingBox(min_lat, min_lon, max_lat, max_lon)
    except (TypeError, ValueError) as exc:
        raise DisasterRegistryError(f"{context}: bad {key!r} region: {exc}") from None


def load_disasters(path: str | Path) -> DisasterRegistry:
    """Load a JSON disaster registry.

    The file is a list of objects with keys ``name``, optional ``aliases``,
    ``window`` (a [start, end] pair of ISO-8601 instants; bare dates span
    the whole day), and exactly one of ``states``, ``fips``, or ``bbox``
    ([min_lat, min_lon, max_lat, max_lon]).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DisasterRegistryError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise DisasterRegistryError(f"{path}: expected a JSON list of disasters")
    specs = []
    for i, entry in enumerate(doc):
        context = f"{path}: entry {i}"
        if not isinstance(entry, dict):
            raise DisasterRegistryError(f"{context}: expected an object")
        name = entry.get("name")
        if not isinstance(name, str) or not name.strip():
            raise DisasterRegistryError(f"{context}: 'name' must be a non-empty string")
        window = entry.get("window")
        if not isinstance(window, list) or len(window) != 2:
            raise DisasterRegistryError(f"{context}: 'window' must be a [start, end] pair")
        try:
            interval = TimeInterval(
                parse_iso_instant(str(window[0])),
                parse_iso_instant(str(window[1]), end_of_day=True),
            )
        except ValueError as exc:
            raise DisasterRegistryError(f"{context}: {exc}") from None
        aliases = entry.get("aliases", [])
        if not isinstance(aliases, list) or any(not isinstance(a, str) for a in aliases):
            raise DisasterRegistryError(f"{context}: 'aliases' must be a list of strings")
        specs.append(
            DisasterSpec(
                canonical_name=name,
                aliases=aliases,
                active_window=interval,
                impact_region=_region_from_entry(entry, context),
            )
        )
    return DisasterRegistry(specs)
