#!/usr/bin/env python3
"""Run the Hurricane Sandy cascade query on the bundled fixture and write
both artifacts.  Mirrors the README walkthrough, but from the library API."""

from __future__ import annotations

import argparse
from pathlib import Path

from stormkg import (
    CascadeQuery,
    answer_cascade,
    build_graph,
    default_registry,
    default_thesaurus,
    export_dot,
    export_json,
    load_disasters,
    parse_details_file,
)

REPO = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="artifact directory (default: out)")
    args = parser.parse_args()

    records, errors = parse_details_file(REPO / "data" / "storm_details_sandy_fixture.csv")
    print(f"parsed {len(records)} records ({len(errors)} rejected rows)")
    graph = build_graph(records)
    disasters = load_disasters(REPO / "data" / "disasters.json")

    query = CascadeQuery("flood", "hurricane", "Hurricane Sandy")
    answer = answer_cascade(graph, default_registry(), disasters, default_thesaurus(), query)

    print(f"matched {len(answer.matched_event_ids)} events to {answer.disaster_name}")
    for link in answer.links:
        trace = link.rule_trace
        connectors = ", ".join(trace.connectors) if trace else "?"
        print(
            f"  {link.cause_type} #{link.cause_event_id}"
            f" -[{connectors}]-> {link.effect_type} #{link.effect_event_id}"
        )
    for pattern in answer.patterns:
        print(f"  pattern: {pattern.cause_type} -> {pattern.effect_type}"
              f" (support {pattern.support_count})")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "sandy_cascade.json"
    dot_path = out_dir / "sandy_cascade.dot"
    json_path.write_text(export_json(answer), encoding="utf-8", newline="\n")
    dot_path.write_text(export_dot(answer), encoding="utf-8", newline="\n")
    print(f"wrote {json_path} and {dot_path}")


if __name__ == "__main__":
    main()
