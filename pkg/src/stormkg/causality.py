"""Mine cause-effect links between events from narrative text.

The pipeline is deliberately rule-based and transparent: narratives are
split into sentences, sentences are scanned for connector phrases from a
direction-tagged thesaurus ("caused" reads left-to-right, "due to" reads
right-to-left), and the text on either side of a connector becomes the
cause/effect span of a mention.  Mentions turn into links between concrete
events of an episode when the spans contain vocabulary of the two queried
themes and the candidate cause does not start after the candidate effect
ends.  Instance links are finally grouped into type-level patterns with
support counts.

Everything here is deterministic: same inputs, same outputs, same order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .graph import KnowledgeGraph
from .themes import Theme, normalize_event_type

__all__ = [
    "CausalLink",
    "CausalMention",
    "ConnectorThesaurus",
    "DEFAULT_FORWARD_CONNECTORS",
    "DEFAULT_REVERSE_CONNECTORS",
    "Direction",
    "Level",
    "NarrativeKind",
    "RuleTrace",
    "SynonymParseError",
    "ThesaurusParseError",
    "collect_episode_mentions",
    "extract_causal_mentions",
    "generalize_causality",
    "link_events_in_episode",
    "load_synonyms",
    "load_thesaurus",
    "split_sentences",
    "theme_terms",
]


class Direction(Enum):
    FORWARD = "Forward"   # cause text precedes the connector
    REVERSE = "Reverse"   # cause text follows the connector


DEFAULT_FORWARD_CONNECTORS = (
    "lead to", "led to", "leads to", "result in", "resulted in", "cause",
    "caused", "causes", "causing", "induce", "induced", "produce",
    "produced", "spawn", "spawned", "trigger", "triggered", "bring",
    "brought",
)

DEFAULT_REVERSE_CONNECTORS = (
    "caused by", "due to", "as a result of", "resulting from", "induced by",
    "from",
)


class ThesaurusParseError(ValueError):
    pass


class SynonymParseError(ValueError):
    pass


class ConnectorThesaurus:
    """Connector phrases tagged with a reading direction.

    Patterns are lowercase and unique; matching is case-insensitive on word
    boundaries, and when several patterns start at the same position the
    longest wins (so "caused by" beats "caused").
    """

    def __init__(self, entries: Iterable[tuple[str, Direction]]) -> None:
        self._directions: dict[str, Direction] = {}
        for pattern, direction in entries:
            cleaned = pattern.strip().lower()
            if not cleaned:
                raise ValueError("connector patterns must be non-empty")
            self._directions[cleaned] = direction
        if not self._directions:
            raise ValueError("thesaurus must have at least one connector")
        alternatives = "|".join(
            re.escape(p) for p in sorted(self._directions, key=len, reverse=True)
        )
        self._regex = re.compile(rf"\b(?:{alternatives})\b", re.IGNORECASE)

    @property
    def patterns(self) -> tuple[str, ...]:
        return tuple(sorted(self._directions))

    def direction_of(self, pattern: str) -> Direction:
        return self._directions[pattern.lower()]

    def finditer(self, text: str):
        """Non-overlapping matches, leftmost first, longest at each position."""
        return self._regex.finditer(text)


def default_thesaurus() -> ConnectorThesaurus:
    entries = [(p, Direction.FORWARD) for p in DEFAULT_FORWARD_CONNECTORS]
    entries += [(p, Direction.REVERSE) for p in DEFAULT_REVERSE_CONNECTORS]
    return ConnectorThesaurus(entries)


_DIRECTION_NAMES = {
    "forward": Direction.FORWARD,
    "reverse": Direction.REVERSE,
}


def load_thesaurus(path: str | Path | None = None) -> ConnectorThesaurus:
    """Built-in connectors merged with ``direction<TAB>phrase`` lines from ``path``.

    File entries override built-ins with the same pattern; duplicates within
    the file collapse to the last occurrence.
    """
    entries = [(p, Direction.FORWARD) for p in DEFAULT_FORWARD_CONNECTORS]
    entries += [(p, Direction.REVERSE) for p in DEFAULT_REVERSE_CONNECTORS]
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                direction_raw, sep, phrase = line.partition("\t")
                if not sep or not phrase.strip():
                    raise ThesaurusParseError(
                        f"{path}:{lineno}: expected 'direction<TAB>phrase'"
                    )
                direction = _DIRECTION_NAMES.get(direction_raw.strip().lower())
                if direction is None:
                    raise ThesaurusParseError(
                        f"{path}:{lineno}: direction must be Forward or Reverse, "
                        f"got {direction_raw.strip()!r}"
                    )
                entries.append((phrase.strip(), direction))
    return ConnectorThesaurus(entries)


class NarrativeKind(Enum):
    EVENT = "event"
    EPISODE = "episode"


@dataclass(frozen=True)
class CausalMention:
    """One connector occurrence inside one sentence.

    Spans are lowercase, trimmed of surrounding punctuation and of leading
    articles/conjunctions; they never overlap because they come from
    opposite sides of the connector.
    """

    sentence: str
    connector: str
    cause_span: str
    effect_span: str
    source_event_id: int | None = None
    narrative_kind: NarrativeKind = NarrativeKind.EVENT

    def __post_init__(self) -> None:
        if self.connector not in self.sentence.lower():
            raise ValueError(f"connector {self.connector!r} not in sentence")
        if not self.cause_span or not self.effect_span:
            raise ValueError("mention spans must be non-empty")


#: Sentence-final periods after these tokens do not end a sentence.  "mph."
#: is deliberately absent: narratives end sentences with measurements all
#: the time, and treating it as an abbreviation would glue them together.
ABBREVIATION_STOPLIST = frozenset(
    {
        "u.s.", "u.s.a.", "st.", "mt.", "ft.", "mr.", "mrs.", "dr.", "jr.",
        "sr.", "no.", "vs.", "approx.", "dept.", "e.g.", "i.e.",
    }
)

_BOUNDARY_RE = re.compile(r"[.!?](?=\s+[A-Z])")


def split_sentences(text: str) -> list[str]:
    """Split on ``. ! ?`` followed by whitespace and a capital letter.

    Periods ending a token on the abbreviation stop-list do not split.
    Joining the output (modulo the consumed whitespace) reproduces the
    input; empty and whitespace-only input give an empty list.
    """
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        pos = match.start()
        if text[pos] == ".":
            token = text[start : pos + 1].rsplit(None, 1)[-1]
            if token.lower() in ABBREVIATION_STOPLIST:
                continue
        sentence = text[start : pos + 1].strip()
        if sentence:
            sentences.append(sentence)
        start = pos + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


_LEADING_FILLER = frozenset({"the", "a", "an", "and", "but", "or", "then", "also"})
_PUNCT_CHARS = ".,;:!?()[]'\"-"


def _trim_span(raw: str) -> str:
    span = raw.strip().strip(_PUNCT_CHARS).strip().lower()
    words = span.split()
    while words and words[0] in _LEADING_FILLER:
        words.pop(0)
    return " ".join(words).strip(_PUNCT_CHARS).strip()


def extract_causal_mentions(
    sentence: str,
    thesaurus: ConnectorThesaurus,
    *,
    source_event_id: int | None = None,
    narrative_kind: NarrativeKind = NarrativeKind.EVENT,
) -> list[CausalMention]:
    """One mention per connector occurrence in ``sentence``.

    For a Forward connector the cause span is the text to its left and the
    effect span the text to its right; Reverse swaps the roles.  Occurrences
    whose left or right side trims away to nothing yield no mention.
    """
    mentions: list[CausalMention] = []
    for match in thesaurus.finditer(sentence):
        connector = match.group(0).lower()
        left = _trim_span(sentence[: match.start()])
        right = _trim_span(sentence[match.end() :])
        if not left or not right:
            continue
        if thesaurus.direction_of(connector) is Direction.FORWARD:
            cause, effect = left, right
        else:
            cause, effect = right, left
        mentions.append(
            CausalMention(
                sentence=sentence,
                connector=connector,
                cause_span=cause,
                effect_span=effect,
                source_event_id=source_event_id,
                narrative_kind=narrative_kind,
            )
        )
    return mentions


#: Generic qualifiers that would make every marine or wind type look alike.
THEME_TERM_STOP_WORDS = frozenset({"marine", "high"})

_WORD_SPLIT_RE = re.compile(r"[^a-z0-9]+")


def theme_terms(theme: Theme, synonyms: Mapping[str, str] | None = None) -> frozenset[str]:
    """Lowercase vocabulary for recognizing a theme inside mention spans.

    The base terms are the content words of the member type names minus the
    stop words; a synonym maps an extra keyword to a member type and counts
    only when that type belongs to the theme.  Terms match spans by
    substring, so "rain" covers "rains" and "flood" covers "flooding".
    """
    terms: set[str] = set()
    for member in theme.member_types:
        for word in _WORD_SPLIT_RE.split(member.lower()):
            if word and word not in THEME_TERM_STOP_WORDS:
                terms.add(word)
    if synonyms:
        members = theme.normalized_members()
        for keyword, target in synonyms.items():
            if normalize_event_type(target) in members:
                terms.add(keyword.strip().lower())
    return frozenset(terms)


def load_synonyms(path: str | Path) -> dict[str, str]:
    """Parse ``keyword -> Event Type`` lines into a mapping."""
    synonyms: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            keyword, sep, target = stripped.partition("->")
            if not sep or not keyword.strip() or not target.strip():
                raise SynonymParseError(f"{path}:{lineno}: expected 'keyword -> Event Type'")
            synonyms[keyword.strip().lower()] = target.strip()
    return synonyms


def _span_has_term(span: str, terms: frozenset[str]) -> bool:
    return any(term in span for term in terms)


def collect_episode_mentions(
    graph: KnowledgeGraph,
    episode_id: int,
    thesaurus: ConnectorThesaurus,
    event_ids: Iterable[int] | None = None,
) -> list[CausalMention]:
    """All mentions from an episode's narratives.

    Event narratives are mined per event (ascending id).  The episode
    narrative is shared by every member row, so each distinct episode
    narrative text is mined once and attributed to the smallest event id
    that carries it.
    """
    members = graph.episode_events(episode_id)
    selected = sorted(set(event_ids) & set(members)) if event_ids is not None else list(members)
    mentions: list[CausalMention] = []
    for event_id in selected:
        record = graph.record(event_id)
        for sentence in split_sentences(record.event_narrative):
            mentions.extend(
                extract_causal_mentions(
                    sentence,
                    thesaurus,
                    source_event_id=event_id,
                    narrative_kind=NarrativeKind.EVENT,
                )
            )
    seen_episode_texts: set[str] = set()
    for event_id in selected:
        narrative = graph.record(event_id).episode_narrative
        if not narrative or narrative in seen_episode_texts:
            continue
        seen_episode_texts.add(narrative)
        for sentence in split_sentences(narrative):
            mentions.extend(
                extract_causal_mentions(
                    sentence,
                    thesaurus,
                    source_event_id=event_id,
                    narrative_kind=NarrativeKind.EPISODE,
                )
            )
    return mentions


class Level(Enum):
    INSTANCE = "Instance"
    TYPE_LEVEL = "TypeLevel"


@dataclass(frozen=True)
class RuleTrace:
    """Which rules fired for a link: the theme pair, connectors, disaster."""

    theme_pair: tuple[str, str]
    connectors: tuple[str, ...]
    disaster: str | None = None


@dataclass(frozen=True)
class CausalLink:
    level: Level
    cause_event_id: int | None = None
    effect_event_id: int | None = None
    cause_type: str | None = None
    effect_type: str | None = None
    evidence: tuple[CausalMention, ...] = ()
    rule_trace: RuleTrace | None = None
    support_count: int | None = None

    def __post_init__(self) -> None:
        if self.level is Level.INSTANCE:
            if self.cause_event_id is None or self.effect_event_id is None:
                raise ValueError("instance links need both event ids")
            if self.cause_event_id == self.effect_event_id:
                raise ValueError("an event cannot cause itself")
            if not self.evidence:
                raise ValueError("instance links need evidence")
        else:
            if not self.cause_type or not self.effect_type:
                raise ValueError("type-level links need both type names")
            if self.support_count is None or self.support_count < 1:
                raise ValueError("type-level links need support_count >= 1")


def link_events_in_episode(
    graph: KnowledgeGraph,
    episode_id: int,
    mentions: Sequence[CausalMention],
    theme_a: Theme,
    theme_b: Theme,
    *,
    candidate_ids: Iterable[int] | None = None,
    synonyms: Mapping[str, str] | None = None,
    disaster: str | None = None,
) -> list[CausalLink]:
    """Instance links between events of one episode, one per ordered pair.

    A pair (cause, effect) qualifies when the two event types fall in
    opposite themes, at least one mention's cause span carries a term of the
    cause event's theme while its effect span carries a term of the effect
    event's theme, and the cause does not begin after the effect ends.  All
    qualifying pairs are emitted (deliberate over-generation; downstream
    consumers see every supported reading).  Each link adds a causes edge.
    """
    members = graph.episode_events(episode_id)
    if candidate_ids is not None:
        members = tuple(sorted(set(candidate_ids) & set(members)))
    terms = {
        theme_a.name: theme_terms(theme_a, synonyms),
        theme_b.name: theme_terms(theme_b, synonyms),
    }
    norm_members = {
        theme_a.name: theme_a.normalized_members(),
        theme_b.name: theme_b.normalized_members(),
    }
    links: list[CausalLink] = []
    for cause_id in members:
        for effect_id in members:
            if cause_id == effect_id:
                continue
            cause_rec = graph.record(cause_id)
            effect_rec = graph.record(effect_id)
            if cause_rec.begin_time > effect_rec.end_time:
                continue
            cause_norm = normalize_event_type(cause_rec.event_type)
            effect_norm = normalize_event_type(effect_rec.event_type)
            evidence: list[CausalMention] = []
            fired: list[tuple[str, str]] = []
            for cause_theme, effect_theme in (
                (theme_a.name, theme_b.name),
                (theme_b.name, theme_a.name),
            ):
                if cause_norm not in norm_members[cause_theme]:
                    continue
                if effect_norm not in norm_members[effect_theme]:
                    continue
                matched_any = False
                for mention in mentions:
                    if _span_has_term(mention.cause_span, terms[cause_theme]) and _span_has_term(
                        mention.effect_span, terms[effect_theme]
                    ):
                        if mention not in evidence:
                            evidence.append(mention)
                        matched_any = True
                if matched_any:
                    fired.append((cause_theme, effect_theme))
            if not evidence:
                continue
            connectors = tuple(dict.fromkeys(m.connector for m in evidence))
            links.append(
                CausalLink(
                    level=Level.INSTANCE,
                    cause_event_id=cause_id,
                    effect_event_id=effect_id,
                    cause_type=cause_rec.event_type,
                    effect_type=effect_rec.event_type,
                    evidence=tuple(evidence),
                    rule_trace=RuleTrace(
                        theme_pair=fired[0],
                        connectors=connectors,
                        disaster=disaster,
                    ),
                )
            )
            graph.add_causes_edge(cause_id, effect_id)
    return links


def generalize_causality(links: Sequence[CausalLink]) -> list[CausalLink]:
    """Group instance links by (cause type, effect type) into patterns.

    The support count of a pattern is the number of instance links in its
    group; patterns come back sorted by descending support, then
    lexicographically by the type pair.
    """
    groups: dict[tuple[str, str], int] = {}
    for link in links:
        if link.level is not Level.INSTANCE:
            raise ValueError("generalize_causality takes instance links")
        key = (str(link.cause_type), str(link.effect_type))
        groups[key] = groups.get(key, 0) + 1
    ordered = sorted(groups.items(), key=lambda item: (-item[1], item[0]))
    return [
        CausalLink(
            level=Level.TYPE_LEVEL,
            cause_type=cause_type,
            effect_type=effect_type,
            support_count=count,
        )
        for (cause_type, effect_type), count in ordered
    ]
