"""Knowledge graph construction and causal link mining over NWS Storm Events data."""

from .causality import (
    CausalLink,
    CausalMention,
    ConnectorThesaurus,
    Direction,
    Level,
    NarrativeKind,
    RuleTrace,
    SynonymParseError,
    ThesaurusParseError,
    collect_episode_mentions,
    default_thesaurus,
    extract_causal_mentions,
    generalize_causality,
    link_events_in_episode,
    load_synonyms,
    load_thesaurus,
    split_sentences,
    theme_terms,
)
from .disasters import (
    DEFAULT_BUFFER_DAYS,
    DisasterRegistry,
    DisasterRegistryError,
    DisasterSpec,
    UnknownDisasterError,
    load_disasters,
    match_disaster,
    narrative_mentions,
    spatially_cooccurs,
    temporal_window,
)
from .graph import (
    BoundingBox,
    EdgeSignatureError,
    FipsSet,
    GeoRegion,
    GraphConstructionError,
    KnowledgeGraph,
    Node,
    NodeKind,
    StateSet,
    TimeInterval,
    build_graph,
)
from .ingest import (
    CZType,
    EventRecord,
    FormatError,
    GeoPoint,
    RowError,
    format_damage,
    normalize_time,
    parse_damage,
    parse_details_csv,
    parse_details_file,
)
from .query import (
    CascadeAnswer,
    CascadeQuery,
    answer_cascade,
    export_dot,
    export_json,
    mine_all_episodes,
)
from .themes import (
    FLOOD_THEME,
    HURRICANE_THEME,
    NWS_EVENT_TYPES,
    Theme,
    ThemeConfigError,
    ThemeRegistry,
    UnknownThemeError,
    default_registry,
    load_theme_config,
    normalize_event_type,
)

__version__ = "0.1.0"
