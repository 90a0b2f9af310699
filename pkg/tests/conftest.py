from __future__ import annotations

import csv
import io
from datetime import datetime, timezone
from pathlib import Path

import pytest
from hypothesis import settings

from stormkg import CZType, EventRecord, GeoPoint, build_graph, default_registry, parse_details_file

settings.register_profile("suite", deadline=None, max_examples=100)
settings.load_profile("suite")

DATA = Path(__file__).resolve().parent.parent / "data"
SANDY_CSV = DATA / "storm_details_sandy_fixture.csv"
MALFORMED_CSV = DATA / "storm_details_malformed.csv"
DISASTERS_JSON = DATA / "disasters.json"

CSV_HEADER = [
    "EVENT_ID", "EPISODE_ID", "EVENT_TYPE", "STATE", "CZ_TYPE", "CZ_FIPS",
    "CZ_NAME", "BEGIN_DATE_TIME", "END_DATE_TIME", "CZ_TIMEZONE",
    "BEGIN_LAT", "BEGIN_LON", "END_LAT", "END_LON", "INJURIES_DIRECT",
    "INJURIES_INDIRECT", "DEATHS_DIRECT", "DEATHS_INDIRECT",
    "DAMAGE_PROPERTY", "DAMAGE_CROPS", "EVENT_NARRATIVE", "EPISODE_NARRATIVE",
]

_ROW_DEFAULTS = {
    "EVENT_ID": "1",
    "EPISODE_ID": "100",
    "EVENT_TYPE": "Heavy Rain",
    "STATE": "NEW JERSEY",
    "CZ_TYPE": "C",
    "CZ_FIPS": "13",
    "CZ_NAME": "ESSEX",
    "BEGIN_DATE_TIME": "29-OCT-12 10:00:00",
    "END_DATE_TIME": "30-OCT-12 04:00:00",
    "CZ_TIMEZONE": "EST-5",
    "BEGIN_LAT": "40.74",
    "BEGIN_LON": "-74.17",
    "END_LAT": "",
    "END_LON": "",
    "INJURIES_DIRECT": "0",
    "INJURIES_INDIRECT": "0",
    "DEATHS_DIRECT": "0",
    "DEATHS_INDIRECT": "0",
    "DAMAGE_PROPERTY": "0.00K",
    "DAMAGE_CROPS": "0.00K",
    "EVENT_NARRATIVE": "",
    "EPISODE_NARRATIVE": "",
}


def csv_row(**overrides: str) -> dict[str, str]:
    """One details row as a column dict; overrides are column names."""
    row = dict(_ROW_DEFAULTS)
    for key, value in overrides.items():
        column = key.upper()
        assert column in row, column
        row[column] = value
    return row


def details_csv(rows: list[dict[str, str]], header: list[str] | None = None) -> bytes:
    columns = header if header is not None else CSV_HEADER
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_ALL)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row.get(c.upper(), "") for c in columns])
    return buf.getvalue().encode("utf-8")


def make_record(event_id: int = 1, **overrides) -> EventRecord:
    base = dict(
        event_id=event_id,
        episode_id=100,
        event_type="Heavy Rain",
        state="NEW JERSEY",
        cz_type=CZType.COUNTY,
        cz_fips=13,
        cz_name="ESSEX",
        begin_time=datetime(2012, 10, 29, 15, 0, tzinfo=timezone.utc),
        end_time=datetime(2012, 10, 30, 9, 0, tzinfo=timezone.utc),
        begin_point=GeoPoint(40.74, -74.17),
        end_point=None,
        injuries_direct=0,
        injuries_indirect=0,
        deaths_direct=0,
        deaths_indirect=0,
        damage_property_usd=0,
        damage_crops_usd=0,
        event_narrative="",
        episode_narrative="",
    )
    base.update(overrides)
    return EventRecord(**base)


@pytest.fixture(scope="session")
def sandy_records():
    records, errors = parse_details_file(SANDY_CSV)
    assert not errors
    return records


@pytest.fixture
def sandy_graph(sandy_records):
    # fresh graph per test: matching and mining mutate it
    return build_graph(sandy_records, default_registry().themes())
