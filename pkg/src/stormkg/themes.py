"""Themes group related NWS event types so one keyword can stand for many.

Type names are compared after dropping case and every non-alphanumeric
character, so ``Storm Surge/Tide``, ``StormSurgeTide`` and ``storm surge
tide`` all name the same type.  The registry stores the spaced NWS spellings.

Note on ``Sneakerwave``: it appears in published data files but not in the
48-type directive vocabulary; the built-in hurricane theme keeps it, and the
normalized comparison makes the spelling irrelevant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

__all__ = [
    "FLOOD_THEME",
    "HURRICANE_THEME",
    "NWS_EVENT_TYPES",
    "Theme",
    "ThemeConfigError",
    "ThemeRegistry",
    "UnknownThemeError",
    "default_registry",
    "load_theme_config",
    "normalize_event_type",
]

#: The 48 event types of NWS Directive 10-1605.  Data files add a few legacy
#: spellings on top of these (plain "Hurricane", the marine tropical types,
#: "Sneakerwave"); registering a theme makes its member types known too.
NWS_EVENT_TYPES = (
    "Astronomical Low Tide", "Avalanche", "Blizzard", "Coastal Flood",
    "Cold/Wind Chill", "Debris Flow", "Dense Fog", "Dense Smoke", "Drought",
    "Dust Devil", "Dust Storm", "Excessive Heat", "Extreme Cold/Wind Chill",
    "Flash Flood", "Flood", "Freezing Fog", "Frost/Freeze", "Funnel Cloud",
    "Hail", "Heat", "Heavy Rain", "Heavy Snow", "High Surf", "High Wind",
    "Hurricane (Typhoon)", "Ice Storm", "Lake-Effect Snow", "Lakeshore Flood",
    "Lightning", "Marine Hail", "Marine High Wind", "Marine Strong Wind",
    "Marine Thunderstorm Wind", "Rip Current", "Seiche", "Sleet",
    "Storm Surge/Tide", "Strong Wind", "Thunderstorm Wind", "Tornado",
    "Tropical Depression", "Tropical Storm", "Tsunami", "Volcanic Ash",
    "Waterspout", "Wildfire", "Winter Storm", "Winter Weather",
)

_NORM_RE = re.compile(r"[^a-z0-9]+")


def normalize_event_type(name: str) -> str:
    """Lowercase and strip everything that is not a letter or digit."""
    return _NORM_RE.sub("", name.lower())


class UnknownThemeError(ValueError):
    """A keyword names neither a registered theme nor a known event type."""


class ThemeConfigError(ValueError):
    """A theme config file line could not be parsed."""


@dataclass(frozen=True)
class Theme:
    """A named, non-empty set of event types.  Names are lowercase."""

    name: str
    member_types: frozenset[str]

    def __init__(self, name: str, member_types: Iterable[str]) -> None:
        object.__setattr__(self, "name", name.strip().lower())
        object.__setattr__(self, "member_types", frozenset(t.strip() for t in member_types))
        if not self.name:
            raise ValueError("theme name must be non-empty")
        if not self.member_types or any(not t for t in self.member_types):
            raise ValueError(f"theme {self.name!r} needs non-empty member types")

    def normalized_members(self) -> frozenset[str]:
        return frozenset(normalize_event_type(t) for t in self.member_types)


FLOOD_THEME = Theme("flood", ["Flood", "Flash Flood", "Coastal Flood", "Lakeshore Flood"])

HURRICANE_THEME = Theme(
    "hurricane",
    [
        "Hurricane",
        "Heavy Rain",
        "High Surf",
        "Marine Hurricane/Typhoon",
        "Marine Tropical Depression",
        "Marine Tropical Storm",
        "Sneakerwave",
        "Storm Surge/Tide",
        "Tropical Depression",
        "Tropical Storm",
    ],
)


class ThemeRegistry:
    """Keyword -> theme lookup with a per-type fallback.

    ``expand`` resolves a keyword to its theme's member types.  A keyword
    that is no theme but names a known event type (directive vocabulary or
    any registered member type) expands to itself as a singleton.  Passing
    ``vocabulary`` turns on strict membership validation in ``register``.
    """

    def __init__(
        self,
        vocabulary: Iterable[str] | None = None,
        include_defaults: bool = True,
    ) -> None:
        self._themes: dict[str, Theme] = {}
        self._vocabulary = frozenset(normalize_event_type(t) for t in vocabulary) if vocabulary is not None else None
        self._known_types: dict[str, str] = {normalize_event_type(t): t for t in NWS_EVENT_TYPES}
        if vocabulary is not None:
            for t in vocabulary:
                self._known_types.setdefault(normalize_event_type(t), t)
        if include_defaults:
            self.register(FLOOD_THEME)
            self.register(HURRICANE_THEME)

    def register(self, theme: Theme) -> None:
        """Add or replace a theme (same name replaces wholesale)."""
        if self._vocabulary is not None:
            unknown = sorted(
                t for t in theme.member_types
                if normalize_event_type(t) not in self._vocabulary
            )
            if unknown:
                raise ValueError(
                    f"theme {theme.name!r} has member types outside the "
                    f"vocabulary: {', '.join(unknown)}"
                )
        self._themes[theme.name] = theme
        for t in theme.member_types:
            self._known_types.setdefault(normalize_event_type(t), t)

    def themes(self) -> tuple[Theme, ...]:
        return tuple(self._themes[name] for name in sorted(self._themes))

    def theme_names(self) -> tuple[str, ...]:
        return tuple(sorted(self._themes))

    def resolve(self, keyword: str) -> Theme:
        """Return the theme for ``keyword``, or a singleton fallback theme."""
        key = keyword.strip().lower()
        if not key:
            raise UnknownThemeError("empty theme keyword")
        theme = self._themes.get(key)
        if theme is not None:
            return theme
        display = self._known_types.get(normalize_event_type(key))
        if display is not None:
            return Theme(key, [display])
        raise UnknownThemeError(
            f"unknown theme {keyword!r}; registered themes: "
            + ", ".join(sorted(self._themes))
        )

    def expand(self, keyword: str) -> frozenset[str]:
        return self.resolve(keyword).member_types


def load_theme_config(path: str | Path) -> list[Theme]:
    """Parse ``name: type, type, ...`` lines; ``#`` comments and blanks skipped."""
    themes = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            name, sep, rest = stripped.partition(":")
            if not sep:
                raise ThemeConfigError(f"{path}:{lineno}: expected 'name: type, type, ...'")
            members = [t.strip() for t in rest.split(",") if t.strip()]
            try:
                themes.append(Theme(name, members))
            except ValueError as exc:
                raise ThemeConfigError(f"{path}:{lineno}: {exc}") from None
    return themes


def default_registry(config_path: str | Path | None = None) -> ThemeRegistry:
    """Built-in themes, plus any from ``config_path`` (which may override)."""
    registry = ThemeRegistry()
    if config_path is not None:
        for theme in load_theme_config(config_path):
            registry.register(theme)
    return registry
