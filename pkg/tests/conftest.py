"""Shared fixtures: random-but-valid event logs and independent oracles."""

from __future__ import annotations

import datetime as dt
import sys

import numpy as np

from mergerkit.genealogy import MergerEvent


def random_event_log(rng: np.random.Generator, max_events: int = 200, max_entities: int = 120):
    """A random, valid-by-construction merger event log.

    Entities act only while live and dates never decrease, so the generated
    log always satisfies the forest invariants. Same-day runs of events are
    common on purpose (they exercise the stable tiebreak).
    """
    n_entities = int(rng.integers(2, max_entities))
    entities = [f"E{i:03d}" for i in range(n_entities)]
    live = list(entities)
    n_events = int(rng.integers(0, min(max_events, n_entities - 1) + 1))
    date = dt.date(1950, 1, 1) + dt.timedelta(days=int(rng.integers(0, 2000)))
    events = []
    for _ in range(n_events):
        if len(live) < 2:
            break
        i = int(rng.integers(0, len(live)))
        j = int(rng.integers(0, len(live) - 1))
        if j >= i:
            j += 1
        acquirer, target = live[i], live[j]
        events.append(MergerEvent(date=date, acquirer_id=acquirer, target_id=target))
        live.remove(target)
        if rng.random() < 0.7:
            date = date + dt.timedelta(days=int(rng.integers(1, 400)))
    return entities, events


def naive_ancestry(events: list[MergerEvent], entity: str, as_of: dt.date) -> int:
    """Independent oracle: recursive enumeration of the date-filtered subtree."""
    children: dict[str, list[str]] = {}
    for ev in events:
        if ev.date <= as_of:
            children.setdefault(ev.acquirer_id, []).append(ev.target_id)
    seen: set[str] = set()

    def walk(node: str) -> None:
        for child in children.get(node, ()):
            if child not in seen:
                seen.add(child)
                walk(child)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(10_000)
    try:
        walk(entity)
    finally:
        sys.setrecursionlimit(old_limit)
    return len(seen)


def lineage_recount(initial_count: int, events: list[tuple[int, int, int]]) -> dict[int, int]:
    """Independent oracle: replay a merger event log as explicit lineage sets.

    Returns the surviving agents' lineage sizes; each absorbed agent appears
    in exactly one survivor's set, so the sizes are the expected ancestries.
    """
    lineage: dict[int, set[int]] = {i: set() for i in range(initial_count)}
    for _, source, partner in events:
        absorbed = lineage.pop(partner)
        lineage[source] |= absorbed
        lineage[source].add(partner)
    return {agent: len(members) for agent, members in lineage.items()}
