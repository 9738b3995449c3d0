"""Forest construction, validation errors, and ancestry-count oracle checks."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from mergerkit.genealogy import (
    GenealogyValidationError,
    MergerEvent,
    accumulated_ancestry_series,
    ancestry_count,
    ancestry_records,
    ancestry_table,
    build_forest,
)

from conftest import naive_ancestry, random_event_log


def ev(iso_date: str, acquirer: str, target: str) -> MergerEvent:
    return MergerEvent(dt.date.fromisoformat(iso_date), acquirer, target)


D = dt.date


class TestMergerEvent:
    def test_rejects_self_merger(self):
        with pytest.raises(ValueError):
            ev("2000-01-01", "A", "A")


class TestBuildForest:
    def test_empty(self):
        forest = build_forest([])
        assert not forest.nodes
        assert forest.live_entities() == []

    def test_single_event(self):
        forest = build_forest([ev("2001-05-05", "A", "B")])
        assert forest.nodes == {"A", "B"}
        assert forest.live_entities() == ["A"]
        assert forest.absorption["B"] == ("A", D(2001, 5, 5))

    def test_duplicate_absorption_rejected(self):
        events = [ev("2001-01-01", "A", "B"), ev("2002-01-01", "C", "B")]
        with pytest.raises(GenealogyValidationError, match="'B' absorbed twice"):
            build_forest(events)

    def test_acquiring_after_absorption_rejected(self):
        events = [ev("2001-01-01", "A", "B"), ev("2002-01-01", "B", "C")]
        with pytest.raises(GenealogyValidationError, match="2002-01-01") as excinfo:
            build_forest(events)
        assert "2001-01-01" in str(excinfo.value)

    def test_acquiring_on_absorption_date_allowed(self):
        events = [ev("2001-01-01", "A", "B"), ev("2001-01-01", "B", "C")]
        forest = build_forest(events)
        assert forest.live_entities() == ["A"]

    def test_same_date_cycle_rejected(self):
        events = [
            ev("2001-01-01", "A", "B"),
            ev("2001-01-01", "B", "C"),
            ev("2001-01-01", "C", "A"),
        ]
        with pytest.raises(GenealogyValidationError, match="cycle"):
            build_forest(events)

    def test_order_independence(self):
        rng = np.random.default_rng(5)
        _, events = random_event_log(rng)
        reference = build_forest(events)
        for _ in range(5):
            shuffled = list(events)
            rng.shuffle(shuffled)
            forest = build_forest(shuffled)
            assert forest.nodes == reference.nodes
            assert forest.absorption == reference.absorption
            assert forest.children == reference.children


class TestAncestryCount:
    def test_no_acquisitions(self):
        forest = build_forest([ev("2001-01-01", "A", "B")])
        assert ancestry_count(forest, "B", D(2005, 1, 1)) == 0

    def test_recursive_subtree(self):
        # B absorbed C and D, then A absorbed B: ancestry(A) = |{B, C, D}| = 3.
        events = [
            ev("2000-01-01", "B", "C"),
            ev("2000-06-01", "B", "D"),
            ev("2001-01-01", "A", "B"),
        ]
        forest = build_forest(events)
        assert ancestry_count(forest, "A", D(2002, 1, 1)) == 3
        assert naive_ancestry(events, "A", D(2002, 1, 1)) == 3

    def test_date_filter(self):
        events = [ev("2001-01-01", "A", "B"), ev("2003-01-01", "A", "C")]
        forest = build_forest(events)
        assert ancestry_count(forest, "A", D(2000, 12, 31)) == 0
        assert ancestry_count(forest, "A", D(2001, 1, 1)) == 1
        assert ancestry_count(forest, "A", D(2003, 1, 1)) == 2

    def test_unknown_entity(self):
        forest = build_forest([ev("2001-01-01", "A", "B")])
        with pytest.raises(KeyError):
            ancestry_count(forest, "Z", D(2002, 1, 1))

    def test_matches_naive_oracle_on_random_forests(self):
        rng = np.random.default_rng(77)
        for _ in range(40):
            _, events = random_event_log(rng)
            forest = build_forest(events)
            if not events:
                continue
            dates = sorted({e.date for e in events})
            probes = [
                dates[0] - dt.timedelta(days=1),
                dates[len(dates) // 2],
                dates[-1] + dt.timedelta(days=1),
            ]
            for as_of in probes:
                for entity in forest.nodes:
                    assert ancestry_count(forest, entity, as_of) == naive_ancestry(
                        events, entity, as_of
                    )

    def test_monotone_in_date_while_live(self):
        rng = np.random.default_rng(3)
        _, events = random_event_log(rng)
        forest = build_forest(events)
        if not events:
            pytest.skip("empty random log")
        dates = sorted({e.date for e in events})
        for entity in forest.live_entities():
            counts = [ancestry_count(forest, entity, d) for d in dates]
            assert counts == sorted(counts)


class TestAncestryTable:
    def test_isolated_entities(self):
        events = [ev("2001-01-01", "A", "B")]
        forest = build_forest(events)
        table = ancestry_table(forest, D(2000, 1, 1))
        assert table == {"A": 0, "B": 0}

    def test_chain_collapses_to_single_live_root(self):
        events = [ev("2000-01-01", "B", "C"), ev("2001-01-01", "A", "B")]
        forest = build_forest(events)
        table = ancestry_table(forest, D(2002, 1, 1))
        assert table == {"A": 2}

    def test_conservation_against_absorbed_count(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            _, events = random_event_log(rng)
            forest = build_forest(events)
            dates = sorted({e.date for e in events}) or [D(2000, 1, 1)]
            for as_of in (dates[0], dates[len(dates) // 2], dates[-1]):
                table = ancestry_table(forest, as_of)
                absorbed = len(forest.absorbed_entities(as_of))
                assert sum(table.values()) == absorbed
                assert len(table) + absorbed == len(forest.nodes)

    def test_matches_per_entity_counts(self):
        rng = np.random.default_rng(13)
        _, events = random_event_log(rng)
        forest = build_forest(events)
        dates = sorted({e.date for e in events}) or [D(2000, 1, 1)]
        as_of = dates[len(dates) // 2]
        table = ancestry_table(forest, as_of)
        for entity, count in table.items():
            assert count == ancestry_count(forest, entity, as_of)

    def test_records_form(self):
        forest = build_forest([ev("2000-01-01", "A", "B")])
        records = ancestry_records(forest, D(2001, 1, 1))
        assert [(r.entity_id, r.ancestor_count) for r in records] == [("A", 1)]
        assert records[0].as_of == D(2001, 1, 1)


class TestAccumulatedSeries:
    def test_single_date_equals_table(self):
        events = [ev("2001-01-01", "A", "B")]
        forest = build_forest(events)
        series = accumulated_ancestry_series(forest, [D(2001, 6, 1)])
        assert series == [(D(2001, 6, 1), ancestry_table(forest, D(2001, 6, 1)))]

    def test_requires_strictly_increasing_dates(self):
        forest = build_forest([])
        with pytest.raises(ValueError):
            accumulated_ancestry_series(forest, [D(2001, 1, 1), D(2001, 1, 1)])

    def test_snapshots_straddling_one_event(self):
        events = [
            ev("2000-01-01", "B", "C"),
            ev("2002-01-01", "A", "B"),
        ]
        forest = build_forest(events)
        before, after = accumulated_ancestry_series(
            forest, [D(2001, 6, 1), D(2002, 6, 1)]
        )
        assert before[1] == {"A": 0, "B": 1}
        assert after[1] == {"A": 2}
        # The one event moved B's subtree (B plus C) into A.
        assert after[1]["A"] - before[1].get("A", 0) == 2

    def test_empty_forest(self):
        forest = build_forest([])
        series = accumulated_ancestry_series(forest, [D(2000, 1, 1), D(2001, 1, 1)])
        assert series == [(D(2000, 1, 1), {}), (D(2001, 1, 1), {})]

    def test_live_entity_counts_never_decrease(self):
        rng = np.random.default_rng(29)
        _, events = random_event_log(rng)
        forest = build_forest(events)
        dates = sorted({e.date for e in events})
        if len(dates) < 2:
            pytest.skip("not enough dates")
        series = accumulated_ancestry_series(forest, dates)
        for (_, earlier), (_, later) in zip(series, series[1:]):
            for entity, count in later.items():
                if entity in earlier:
                    assert count >= earlier[entity]
