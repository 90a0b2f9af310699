"""Ingest layer: damage codes, local timestamps, and the CSV reader."""

from __future__ import annotations

import gzip
import io
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CSV_HEADER, csv_row, details_csv
from stormkg import FormatError, GeoPoint, parse_details_csv
from stormkg.ingest import format_damage, normalize_time, parse_damage

UTC = timezone.utc


class TestParseDamage:
    @pytest.mark.parametrize(
        ("raw", "usd"),
        [
            ("", 0),
            ("   ", 0),
            ("0", 0),
            ("0.00K", 0),
            ("10.00K", 10_000),
            ("10.00k", 10_000),
            ("2.5M", 2_500_000),
            ("1B", 1_000_000_000),
            ("1.5b", 1_500_000_000),
            ("5000", 5000),
            ("0.33K", 330),
            ("  75.00K ", 75_000),
        ],
    )
    def test_examples(self, raw, usd):
        assert parse_damage(raw) == usd

    def test_rounds_half_up_to_whole_dollars(self):
        assert parse_damage("0.0015K") == 2
        assert parse_damage("0.0025K") == 3
        assert parse_damage("1.2344K") == 1234

    @pytest.mark.parametrize("raw", ["12X", "K", "-5K", "1.2.3K", "10 K", "1,000", "$5"])
    def test_rejects_junk(self, raw):
        with pytest.raises(ValueError, match="unrecognized damage value"):
            parse_damage(raw)


class TestFormatDamage:
    @pytest.mark.parametrize(
        ("usd", "text"),
        [
            (0, "0.00K"),
            (10_000, "10.00K"),
            (75_000, "75.00K"),
            (2_000_000, "2.00M"),
            (2_500_000, "2500.00K"),
            (1_000_000_000, "1.00B"),
            (1234, "1234"),
        ],
    )
    def test_examples(self, usd, text):
        assert format_damage(usd) == text

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            format_damage(-1)

    @given(st.integers(min_value=0, max_value=10**13))
    def test_round_trips_every_amount(self, usd):
        assert parse_damage(format_damage(usd)) == usd

    @given(st.integers(min_value=1, max_value=999))
    def test_canonical_form_for_whole_multiples(self, n):
        assert format_damage(n * 1_000) == f"{n}.00K"
        assert format_damage(n * 1_000_000) == f"{n}.00M"
        assert format_damage(n * 1_000_000_000) == f"{n}.00B"


_MON = ("JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC")


class TestNormalizeTime:
    def test_est_offset(self):
        assert normalize_time("29-OCT-12 18:00:00", "EST-5") == datetime(
            2012, 10, 29, 23, 0, tzinfo=UTC
        )

    def test_two_digit_years_pivot_at_50(self):
        assert normalize_time("01-JAN-51 00:00:00", "CST-6") == datetime(
            1951, 1, 1, 6, 0, tzinfo=UTC
        )
        assert normalize_time("25-DEC-00 18:00:00", "CST-6") == datetime(
            2000, 12, 26, 0, 0, tzinfo=UTC
        )

    def test_gmt_is_identity(self):
        assert normalize_time("12-MAR-10 18:00:00", "GMT+0") == datetime(
            2010, 3, 12, 18, 0, tzinfo=UTC
        )

    def test_conversion_can_cross_the_century(self):
        assert normalize_time("31-DEC-99 23:59:59", "PST-8") == datetime(
            2000, 1, 1, 7, 59, 59, tzinfo=UTC
        )

    def test_month_case_insensitive(self):
        assert normalize_time("29-Oct-12 18:00:00", "EST-5").month == 10

    @pytest.mark.parametrize(
        ("stamp", "tz"),
        [
            ("29-OCT-12", "EST-5"),
            ("29-XXX-12 10:00:00", "EST-5"),
            ("32-JAN-12 10:00:00", "EST-5"),
            ("29-OCT-12 10:00:00", "EST"),
            ("29-OCT-12 10:00:00", "-5"),
            ("2012-10-29 10:00:00", "EST-5"),
        ],
    )
    def test_rejects_junk(self, stamp, tz):
        with pytest.raises(ValueError):
            normalize_time(stamp, tz)

    @given(
        st.datetimes(
            min_value=datetime(1950, 1, 1),
            max_value=datetime(2049, 12, 31, 23, 59, 59),
        ).map(lambda d: d.replace(microsecond=0)),
        st.integers(min_value=-11, max_value=11),
    )
    def test_agrees_with_stdlib_zone_arithmetic(self, local, offset):
        stamp = (
            f"{local.day:02d}-{_MON[local.month - 1]}-{local.year % 100:02d} "
            f"{local.hour:02d}:{local.minute:02d}:{local.second:02d}"
        )
        expected = local.replace(tzinfo=timezone(timedelta(hours=offset))).astimezone(UTC)
        assert normalize_time(stamp, f"ZZZ{offset:+d}") == expected


def parse_bytes(data: bytes):
    return parse_details_csv(io.BytesIO(data))


class TestParseDetailsCsv:
    def test_parses_records(self):
        data = details_csv(
            [
                csv_row(),
                csv_row(
                    event_id="2",
                    event_type="Flood",
                    begin_date_time="29-OCT-12 14:00:00",
                    end_date_time="30-OCT-12 09:00:00",
                    damage_property="75.00K",
                    event_narrative="The heavy rains caused minor flooding.",
                ),
            ]
        )
        records, errors = parse_bytes(data)
        assert not errors
        assert [r.event_id for r in records] == [1, 2]
        first = records[0]
        assert first.event_type == "Heavy Rain"
        assert first.episode_id == 100
        assert first.begin_time == datetime(2012, 10, 29, 15, 0, tzinfo=UTC)
        assert first.end_time == datetime(2012, 10, 30, 9, 0, tzinfo=UTC)
        assert first.begin_point == GeoPoint(40.74, -74.17)
        assert first.end_point is None
        assert records[1].damage_property_usd == 75_000
        assert records[1].event_narrative == "The heavy rains caused minor flooding."

    def test_gzip_detected_by_magic_bytes(self):
        data = details_csv([csv_row(), csv_row(event_id="2")])
        plain, _ = parse_bytes(data)
        zipped, errors = parse_bytes(gzip.compress(data))
        assert not errors
        assert zipped == plain

    def test_utf8_bom_stripped(self):
        records, errors = parse_bytes(b"\xef\xbb\xbf" + details_csv([csv_row()]))
        assert not errors and records[0].event_id == 1

    def test_header_case_insensitive_and_extras_ignored(self):
        header = [c.lower() for c in CSV_HEADER] + ["WFO", "SOURCE"]
        row = csv_row()
        row["WFO"] = "PHI"
        row["SOURCE"] = "Trained Spotter"
        records, errors = parse_bytes(details_csv([row], header=header))
        assert not errors and len(records) == 1

    def test_missing_columns_rejected(self):
        header = [c for c in CSV_HEADER if c not in ("DAMAGE_CROPS", "STATE")]
        with pytest.raises(FormatError, match="missing required columns: STATE, DAMAGE_CROPS"):
            parse_bytes(details_csv([csv_row()], header=header))

    def test_empty_input_rejected(self):
        with pytest.raises(FormatError, match="empty input"):
            parse_bytes(b"")

    def test_short_row_reported_with_row_number(self):
        data = details_csv([csv_row()]).rstrip(b"\n") + b'\n"13","broken row"\n'
        records, errors = parse_bytes(data)
        assert len(records) == 1
        assert [(e.row, e.reason) for e in errors] == [(3, "expected 22 fields, got 2")]

    def test_blank_episode_id_means_none(self):
        records, _ = parse_bytes(details_csv([csv_row(episode_id="")]))
        assert records[0].episode_id is None

    def test_blank_counts_mean_zero(self):
        records, _ = parse_bytes(details_csv([csv_row(injuries_direct="", deaths_indirect="")]))
        assert records[0].injuries_direct == 0
        assert records[0].deaths_indirect == 0

    def test_negative_count_rejected(self):
        _, errors = parse_bytes(details_csv([csv_row(deaths_direct="-1")]))
        assert len(errors) == 1 and "negative" in errors[0].reason

    def test_incomplete_coordinate_pair_rejected(self):
        _, errors = parse_bytes(details_csv([csv_row(begin_lat="40.7", begin_lon="")]))
        assert len(errors) == 1 and "incomplete begin coordinate pair" in errors[0].reason

    def test_out_of_range_latitude_rejected(self):
        _, errors = parse_bytes(details_csv([csv_row(begin_lat="95.0", begin_lon="-74.0")]))
        assert len(errors) == 1
        assert "latitude 95.0 out of range" in errors[0].reason

    def test_cz_type_accepts_codes_and_words(self):
        records, errors = parse_bytes(
            details_csv(
                [
                    csv_row(cz_type="County"),
                    csv_row(event_id="2", cz_type="zone"),
                    csv_row(event_id="3", cz_type="M"),
                ]
            )
        )
        assert not errors
        assert [r.cz_type.value for r in records] == ["County", "Zone", "Marine"]

    def test_unknown_cz_type_rejected(self):
        _, errors = parse_bytes(details_csv([csv_row(cz_type="X")]))
        assert len(errors) == 1 and "CZ_TYPE" in errors[0].reason

    def test_begin_after_end_rejected(self):
        _, errors = parse_bytes(
            details_csv(
                [csv_row(begin_date_time="30-OCT-12 10:00:00", end_date_time="29-OCT-12 10:00:00")]
            )
        )
        assert len(errors) == 1 and "is after end_time" in errors[0].reason

    def test_narrative_with_commas_and_quotes(self):
        text = 'Winds, near 70 mph, downed "many" trees.'
        records, errors = parse_bytes(details_csv([csv_row(event_narrative=text)]))
        assert not errors and records[0].event_narrative == text

    @given(
        st.lists(
            st.tuples(st.integers(min_value=1, max_value=10**6), st.booleans()),
            max_size=25,
            unique_by=lambda t: t[0],
        )
    )
    def test_every_data_row_is_a_record_or_an_error(self, spec):
        rows = [
            csv_row(event_id=str(eid)) if ok else csv_row(event_id=str(eid), damage_property="?")
            for eid, ok in spec
        ]
        records, errors = parse_bytes(details_csv(rows))
        assert len(records) + len(errors) == len(rows)
        assert [r.event_id for r in records] == [eid for eid, ok in spec if ok]
        # header is row 1, so data row i (0-based) is row i + 2
        assert [e.row for e in errors] == [i + 2 for i, (_, ok) in enumerate(spec) if not ok]
        for record in records:
            assert record.begin_time.tzinfo is UTC
            assert record.begin_time <= record.end_time
