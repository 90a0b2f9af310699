"""Full-pipeline answers on the bundled Sandy fixture, plus the JSON and DOT
exporters (shape, content, determinism, escaping)."""

from __future__ import annotations

import json
import re
from datetime import datetime, timezone

import pytest

from conftest import DISASTERS_JSON, SANDY_CSV
from stormkg import (
    CascadeAnswer,
    CascadeQuery,
    CausalLink,
    CausalMention,
    Level,
    RuleTrace,
    Theme,
    UnknownDisasterError,
    UnknownThemeError,
    answer_cascade,
    build_graph,
    default_registry,
    default_thesaurus,
    export_dot,
    export_json,
    load_disasters,
    mine_all_episodes,
    parse_details_csv,
)
from stormkg.query import EventSummary

UTC = timezone.utc
SANDY_MATCHED = (412001, 412002, 412003, 412004, 412005, 412006, 412007, 412008, 412044)


@pytest.fixture(scope="module")
def disasters():
    return load_disasters(DISASTERS_JSON)


@pytest.fixture()
def sandy_answer(sandy_graph, disasters):
    query = CascadeQuery("flood", "hurricane", "Hurricane Sandy")
    return answer_cascade(
        sandy_graph, default_registry(), disasters, default_thesaurus(), query
    )


class TestAnswerCascade:
    def test_matched_events(self, sandy_answer):
        assert sandy_answer.matched_event_ids == SANDY_MATCHED
        assert sandy_answer.disaster_name == "Hurricane Sandy"
        assert sandy_answer.buffer_days == 7

    def test_single_link_rain_to_flood(self, sandy_answer):
        assert len(sandy_answer.links) == 1
        link = sandy_answer.links[0]
        assert (link.cause_event_id, link.effect_event_id) == (412001, 412002)
        assert (link.cause_type, link.effect_type) == ("Heavy Rain", "Flood")
        assert link.rule_trace.connectors == ("caused",)
        assert link.rule_trace.disaster == "Hurricane Sandy"

    def test_pattern(self, sandy_answer):
        assert [(p.cause_type, p.effect_type, p.support_count) for p in sandy_answer.patterns] == [
            ("Heavy Rain", "Flood", 1)
        ]
        assert sandy_answer.patterns[0].level is Level.TYPE_LEVEL

    def test_summaries_cover_only_link_endpoints(self, sandy_answer):
        assert set(sandy_answer.summaries) == {412001, 412002}
        flood = sandy_answer.summaries[412002]
        assert flood.event_type == "Flood"
        assert flood.state == "NEW JERSEY"
        assert flood.damage_property_usd == 75_000
        assert flood.latitude == pytest.approx(40.72)
        assert flood.longitude == pytest.approx(-74.2)
        assert flood.begin_time == datetime(2012, 10, 29, 19, 0, tzinfo=UTC)
        assert flood.end_time == datetime(2012, 10, 30, 14, 0, tzinfo=UTC)
        expected_excerpt = "The heavy rains caused minor flooding of low lying roadways in Newark."
        assert flood.excerpt == expected_excerpt
        assert sandy_answer.summaries[412001].excerpt == expected_excerpt

    def test_causes_edge_lands_in_graph(self, sandy_graph, disasters):
        query = CascadeQuery("flood", "hurricane", "Sandy")  # alias resolves too
        answer_cascade(sandy_graph, default_registry(), disasters, default_thesaurus(), query)
        cause = sandy_graph.event_node(412001)
        effect = sandy_graph.event_node(412002)
        assert sandy_graph.has_edge("causes", cause, effect)
        sandy_graph.validate()

    def test_match_without_links(self, sandy_graph, disasters):
        # Andrew matches one event whose type belongs to neither theme, so
        # the restriction leaves nothing to mine.
        query = CascadeQuery("flood", "hurricane", "Hurricane Andrew")
        answer = answer_cascade(
            sandy_graph, default_registry(), disasters, default_thesaurus(), query
        )
        assert answer.matched_event_ids == (412018,)
        assert answer.links == ()
        assert answer.patterns == ()
        assert dict(answer.summaries) == {}
        assert export_dot(answer) == "digraph cascade {\n}\n"

    def test_unknown_theme_propagates(self, sandy_graph, disasters):
        query = CascadeQuery("plasma", "hurricane", "Hurricane Sandy")
        with pytest.raises(UnknownThemeError, match="plasma"):
            answer_cascade(sandy_graph, default_registry(), disasters, default_thesaurus(), query)

    def test_unknown_disaster_propagates(self, sandy_graph, disasters):
        query = CascadeQuery("flood", "hurricane", "Hurricane Bob")
        with pytest.raises(UnknownDisasterError, match="Hurricane Bob"):
            answer_cascade(sandy_graph, default_registry(), disasters, default_thesaurus(), query)

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            (dict(theme1_keyword="  "), "theme1_keyword"),
            (dict(theme2_keyword=""), "theme2_keyword"),
            (dict(disaster_name=" "), "disaster_name"),
            (dict(buffer_days=-1), "non-negative"),
        ],
    )
    def test_query_validation(self, kwargs, message):
        base = dict(
            theme1_keyword="flood", theme2_keyword="hurricane", disaster_name="Hurricane Sandy"
        )
        base.update(kwargs)
        with pytest.raises(ValueError, match=message):
            CascadeQuery(**base)


class TestMineAll:
    def test_links_across_all_episodes(self, sandy_graph):
        answer = mine_all_episodes(
            sandy_graph, default_registry(), default_thesaurus(), "flood", "hurricane"
        )
        assert [(l.cause_event_id, l.effect_event_id) for l in answer.links] == [
            (412001, 412002),
            (412042, 412043),
        ]
        assert [(p.cause_type, p.effect_type, p.support_count) for p in answer.patterns] == [
            ("Heavy Rain", "Flood", 2)
        ]
        assert answer.matched_event_ids == ()
        assert answer.disaster_name is None
        assert answer.buffer_days is None

    def test_json_carries_null_disaster(self, sandy_graph):
        answer = mine_all_episodes(
            sandy_graph, default_registry(), default_thesaurus(), "flood", "hurricane"
        )
        doc = json.loads(export_json(answer))
        assert doc["query"]["disaster"] is None
        assert doc["query"]["buffer_days"] is None
        assert doc["matched_event_ids"] == []
        assert len(doc["links"]) == 2


class TestExportJson:
    def test_document_shape(self, sandy_answer):
        text = export_json(sandy_answer)
        assert text.endswith("}\n")
        assert '\n  "query"' in text  # indent=2
        doc = json.loads(text)
        assert list(doc) == ["query", "matched_event_ids", "links", "patterns"]
        assert doc["query"] == {
            "theme1": "flood",
            "theme2": "hurricane",
            "disaster": "Hurricane Sandy",
            "buffer_days": 7,
        }
        assert doc["matched_event_ids"] == list(SANDY_MATCHED)

    def test_link_entry(self, sandy_answer):
        doc = json.loads(export_json(sandy_answer))
        (entry,) = doc["links"]
        assert list(entry) == ["cause", "effect", "connectors", "evidence"]
        assert entry["cause"]["event_id"] == 412001
        assert entry["effect"]["event_id"] == 412002
        assert entry["connectors"] == ["caused"]
        (evidence,) = entry["evidence"]
        assert list(evidence) == [
            "sentence",
            "connector",
            "cause_span",
            "effect_span",
            "source_event_id",
            "narrative_kind",
        ]
        assert evidence["connector"] == "caused"
        assert evidence["source_event_id"] == 412002
        assert evidence["narrative_kind"] == "event"
        assert doc["patterns"] == [{"cause_type": "Heavy Rain", "effect_type": "Flood", "support": 1}]

    def test_times_are_iso_utc(self, sandy_answer):
        doc = json.loads(export_json(sandy_answer))
        stamp = doc["links"][0]["cause"]["begin_time"]
        assert re.fullmatch(r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z", stamp)
        assert doc["links"][0]["effect"]["begin_time"] == "2012-10-29T19:00:00Z"

    def test_byte_determinism_across_rebuilds(self, disasters):
        outputs = []
        for _ in range(2):
            with SANDY_CSV.open("rb") as handle:
                records, errors = parse_details_csv(handle)
            assert not errors
            graph = build_graph(records)
            query = CascadeQuery("flood", "hurricane", "Hurricane Sandy")
            answer = answer_cascade(
                graph, default_registry(), disasters, default_thesaurus(), query
            )
            outputs.append((export_json(answer), export_dot(answer)))
        assert outputs[0] == outputs[1]


class TestExportDot:
    def test_structure(self, sandy_answer):
        text = export_dot(sandy_answer)
        lines = text.splitlines()
        assert lines[0] == "digraph cascade {"
        assert lines[-1] == "}"
        assert lines[1] == "  rankdir=LR;"
        assert lines[2] == "  node [style=filled];"
        assert all(line.endswith(";") for line in lines[1:-1])
        assert text.count("{") == text.count("}")

    def test_nodes_and_edge(self, sandy_answer):
        lines = export_dot(sandy_answer).splitlines()
        node_lines = [l for l in lines if "fillcolor" in l]
        assert node_lines == [
            '  "412001" [label="Heavy Rain\\n#412001\\n2012-10-29", fillcolor="red"];',
            '  "412002" [label="Flood\\n#412002\\n2012-10-29", fillcolor="beige"];',
        ]
        assert '  "412001" -> "412002" [label="caused"];' in lines

    def test_quote_in_type_is_escaped(self):
        theme1 = Theme("flood", ["Flood"])
        theme2 = Theme("hurricane", ["Heavy Rain"])
        mention = CausalMention("a caused b", "caused", "a", "b")
        link = CausalLink(
            level=Level.INSTANCE,
            cause_event_id=1,
            effect_event_id=2,
            cause_type='Rain "Event"',
            effect_type="Flood",
            evidence=(mention,),
            rule_trace=RuleTrace(("hurricane", "flood"), ("caused",)),
        )
        when = datetime(2012, 10, 29, tzinfo=UTC)
        summaries = {
            event_id: EventSummary(
                event_id=event_id,
                event_type=event_type,
                state="NEW JERSEY",
                begin_time=when,
                end_time=when,
                latitude=None,
                longitude=None,
                injuries_direct=0,
                injuries_indirect=0,
                deaths_direct=0,
                deaths_indirect=0,
                damage_property_usd=0,
                damage_crops_usd=0,
                excerpt="a caused b",
            )
            for event_id, event_type in [(1, 'Rain "Event"'), (2, "Flood")]
        }
        answer = CascadeAnswer(
            theme1=theme1,
            theme2=theme2,
            disaster_name=None,
            buffer_days=None,
            matched_event_ids=(),
            links=(link,),
            patterns=(),
            summaries=summaries,
        )
        text = export_dot(answer)
        assert 'label="Rain \\"Event\\"\\n#1\\n2012-10-29"' in text
