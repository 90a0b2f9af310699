"""Command line front end.

Subcommands: ``query`` (the cascade question), ``ingest-check`` (parse
report for data files), ``mine-all`` (episode-wide mining with no disaster
filter).  The artifact goes to stdout or ``--out``; progress and
diagnostics go to stderr.  Exit codes: 0 success (an empty answer is a
success), 2 missing input file, 3 unknown theme or disaster, 4 parse
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .causality import (
    ConnectorThesaurus,
    SynonymParseError,
    ThesaurusParseError,
    load_synonyms,
    load_thesaurus,
)
from .disasters import (
    DEFAULT_BUFFER_DAYS,
    DisasterRegistry,
    DisasterRegistryError,
    UnknownDisasterError,
    load_disasters,
)
from .graph import GraphConstructionError, KnowledgeGraph, build_graph
from .ingest import EventRecord, FormatError, RowError, parse_details_file
from .query import CascadeQuery, answer_cascade, export_dot, export_json, mine_all_episodes
from .themes import ThemeConfigError, ThemeRegistry, UnknownThemeError, default_registry

__all__ = ["PipelineConfig", "main", "run_ingest_check", "run_mine_all", "run_query_command"]

EXIT_OK = 0
EXIT_MISSING_FILE = 2
EXIT_UNKNOWN_NAME = 3
EXIT_PARSE_FAILURE = 4


@dataclass
class PipelineConfig:
    """Everything a run needs; built from flags, usable directly from code."""

    data_paths: tuple[Path, ...]
    disasters_path: Path | None = None
    themes_path: Path | None = None
    thesaurus_path: Path | None = None
    synonyms_path: Path | None = None
    buffer_days: int = DEFAULT_BUFFER_DAYS
    output_format: str = "json"
    out_path: Path | None = None

    def __post_init__(self) -> None:
        self.data_paths = tuple(Path(p) for p in self.data_paths)
        if not self.data_paths:
            raise ValueError("at least one data path is required")
        if self.buffer_days < 0:
            raise ValueError("buffer_days must be non-negative")
        if self.output_format not in ("json", "dot"):
            raise ValueError(f"unknown output format {self.output_format!r}")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _require_file(path: Path | None, role: str) -> Path:
    if path is None:
        raise FileNotFoundError(f"no {role} file given")
    if not Path(path).is_file():
        raise FileNotFoundError(f"{role} file not found: {path}")
    return Path(path)


def _load_records(config: PipelineConfig) -> list[EventRecord]:
    records: list[EventRecord] = []
    for path in config.data_paths:
        _require_file(path, "data")
        file_records, row_errors = parse_details_file(path)
        _log(f"parsed {path}: {len(file_records)} records, {len(row_errors)} row errors")
        for error in row_errors:
            _log(f"  {path} row {error.row}: {error.reason}")
        records.extend(file_records)
    return records


def _assemble(config: PipelineConfig, need_disasters: bool):
    registry = default_registry(
        _require_file(config.themes_path, "themes") if config.themes_path else None
    )
    thesaurus = load_thesaurus(
        _require_file(config.thesaurus_path, "thesaurus") if config.thesaurus_path else None
    )
    synonyms = (
        load_synonyms(_require_file(config.synonyms_path, "synonyms"))
        if config.synonyms_path
        else {}
    )
    disasters = None
    if need_disasters:
        disasters = load_disasters(_require_file(config.disasters_path, "disasters"))
    records = _load_records(config)
    graph = build_graph(
        records, registry.themes(), disasters.specs if disasters else ()
    )
    _log(f"graph: {len(graph.event_ids())} events, {len(graph.episode_ids())} episodes")
    return graph, registry, disasters, thesaurus, synonyms


def _emit(config: PipelineConfig, artifact: str) -> None:
    if config.out_path is not None:
        Path(config.out_path).write_text(artifact, encoding="utf-8", newline="\n")
        _log(f"wrote {config.out_path}")
    else:
        sys.stdout.write(artifact)


def run_query_command(config: PipelineConfig, e1: str, e2: str, d: str) -> int:
    """Answer "cascading e1 and e2 events during d" and emit the artifact."""
    graph, registry, disasters, thesaurus, synonyms = _assemble(config, need_disasters=True)
    assert disasters is not None
    query = CascadeQuery(
        theme1_keyword=e1,
        theme2_keyword=e2,
        disaster_name=d,
        buffer_days=config.buffer_days,
    )
    answer = answer_cascade(graph, registry, disasters, thesaurus, query, synonyms=synonyms)
    _log(
        f"matched {len(answer.matched_event_ids)} events to {answer.disaster_name}; "
        f"{len(answer.links)} links, {len(answer.patterns)} patterns"
    )
    _emit(config, export_dot(answer) if config.output_format == "dot" else export_json(answer))
    return EXIT_OK


def run_mine_all(config: PipelineConfig, e1: str, e2: str) -> int:
    graph, registry, _disasters, thesaurus, synonyms = _assemble(config, need_disasters=False)
    answer = mine_all_episodes(graph, registry, thesaurus, e1, e2, synonyms=synonyms)
    _log(f"mined {len(answer.links)} links, {len(answer.patterns)} patterns")
    _emit(config, export_dot(answer) if config.output_format == "dot" else export_json(answer))
    return EXIT_OK


def run_ingest_check(config: PipelineConfig) -> int:
    """Parse each data file and report record and error counts."""
    report_lines = []
    for path in config.data_paths:
        _require_file(path, "data")
        records, row_errors = parse_details_file(path)
        report_lines.append(f"{path}: {len(records)} records, {len(row_errors)} row errors")
        for error in row_errors:
            report_lines.append(f"  row {error.row}: {error.reason}")
    _emit(config, "\n".join(report_lines) + "\n")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stormkg",
        description="Storm event knowledge graph and cascade queries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_configs: bool = True) -> None:
        p.add_argument(
            "--data",
            action="append",
            required=True,
            metavar="PATH",
            help="details CSV (gzip or plain); repeatable",
        )
        p.add_argument("--out", metavar="PATH", help="write the artifact here instead of stdout")
        if with_configs:
            p.add_argument("--themes", metavar="PATH", help="theme config (default: built-ins)")
            p.add_argument(
                "--thesaurus", metavar="PATH", help="connector thesaurus (default: built-ins)"
            )
            p.add_argument("--synonyms", metavar="PATH", help="theme term synonyms")
            p.add_argument(
                "--format",
                choices=("json", "dot"),
                default="json",
                help="artifact format (default: json)",
            )

    q = sub.add_parser("query", help="find cascading theme-1/theme-2 events during a disaster")
    q.add_argument("e1", help="first theme keyword, e.g. flood")
    q.add_argument("e2", help="second theme keyword, e.g. hurricane")
    q.add_argument("disaster", help="disaster name or alias, e.g. 'Hurricane Sandy'")
    add_common(q)
    q.add_argument("--disasters", required=True, metavar="PATH", help="disaster registry JSON")
    q.add_argument(
        "--buffer-days",
        type=int,
        default=DEFAULT_BUFFER_DAYS,
        metavar="N",
        help=f"temporal buffer in days (default: {DEFAULT_BUFFER_DAYS})",
    )

    m = sub.add_parser("mine-all", help="mine every episode, no disaster filter")
    m.add_argument("e1", help="first theme keyword")
    m.add_argument("e2", help="second theme keyword")
    add_common(m)

    c = sub.add_parser("ingest-check", help="parse data files and report record/error counts")
    add_common(c, with_configs=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "buffer_days", 0) < 0:
        _log("error: --buffer-days must be non-negative")
        return EXIT_PARSE_FAILURE
    try:
        config = PipelineConfig(
            data_paths=tuple(args.data),
            disasters_path=Path(args.disasters) if getattr(args, "disasters", None) else None,
            themes_path=Path(args.themes) if getattr(args, "themes", None) else None,
            thesaurus_path=Path(args.thesaurus) if getattr(args, "thesaurus", None) else None,
            synonyms_path=Path(args.synonyms) if getattr(args, "synonyms", None) else None,
            buffer_days=getattr(args, "buffer_days", DEFAULT_BUFFER_DAYS),
            output_format=getattr(args, "format", "json"),
            out_path=Path(args.out) if args.out else None,
        )
        if args.command == "query":
            return run_query_command(config, args.e1, args.e2, args.disaster)
        if args.command == "mine-all":
            return run_mine_all(config, args.e1, args.e2)
        return run_ingest_check(config)
    except FileNotFoundError as exc:
        _log(f"error: {exc}")
        return EXIT_MISSING_FILE
    except (UnknownThemeError, UnknownDisasterError) as exc:
        _log(f"error: {exc}")
        return EXIT_UNKNOWN_NAME
    except (
        FormatError,
        ThemeConfigError,
        ThesaurusParseError,
        SynonymParseError,
        DisasterRegistryError,
        GraphConstructionError,
    ) as exc:
        _log(f"error: {exc}")
        return EXIT_PARSE_FAILURE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
