"""Regenerate the synthetic demo dataset under sample_data/.

Deterministic (fixed seed). 140 entities, a couple of decades of merger
events biased toward serial acquirers, yearly balance sheets for live
entities, and a smooth GDP index. Small enough to read by eye; big enough
that every subcommand produces a non-trivial report.
"""

from __future__ import annotations

import datetime as dt
import os

import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "sample_data")
SEED = 20240601
N_ENTITIES = 240
YEARS = range(1990, 2014)


def main() -> None:
    rng = np.random.default_rng(SEED)
    entities = [f"B{i:03d}" for i in range(1, N_ENTITIES + 1)]
    live = set(entities)
    absorbed_year: dict[str, int] = {}
    mergers: dict[str, int] = {e: 0 for e in entities}
    events = []

    for year in range(1991, 2013):
        n_events = int(rng.integers(2, 7))
        # Dates advance with generation order so an absorbed entity never
        # acquires on a later date.
        days = sorted(int(d) for d in rng.integers(0, 364, size=n_events))
        for day_of_year in days:
            if len(live) < 120:
                break
            pool = sorted(live)
            weights = np.array([1.0 + 3.0 * mergers[e] for e in pool])
            acquirer = pool[int(rng.choice(len(pool), p=weights / weights.sum()))]
            target = acquirer
            while target == acquirer:
                target = pool[int(rng.integers(0, len(pool)))]
            date = dt.date(year, 1, 1) + dt.timedelta(days=day_of_year)
            events.append((date, acquirer, target))
            live.discard(target)
            absorbed_year[target] = year
            mergers[acquirer] += mergers.pop(target) + 1

    events.sort()
    with open(os.path.join(OUT, "events.csv"), "w", encoding="utf-8", newline="") as f:
        f.write("date,acquirer_id,target_id\n")
        for date, acq, tgt in events:
            f.write(f"{date.isoformat()},{acq},{tgt}\n")

    # Balances: lognormal start, acquirers inherit target size, mild drift + GDP.
    size = {e: float(np.exp(rng.normal(4.0, 1.2))) for e in entities}
    rows = []
    gdp_level = 100.0
    gdp_rows = []
    for year in YEARS:
        gdp_rows.append((year, gdp_level))
        for date, acq, tgt in events:
            if date.year == year:
                size[acq] += size[tgt]
        for e in entities:
            if absorbed_year.get(e, 9999) <= year:
                continue
            drift = float(np.exp(rng.normal(0.0, 0.08)))
            size[e] *= 1.02 * drift
            rows.append((e, year, size[e]))
        gdp_level *= 1.025

    with open(os.path.join(OUT, "panel.csv"), "w", encoding="utf-8", newline="") as f:
        f.write("entity_id,year,balance\n")
        for e, year, bal in sorted(rows):
            f.write(f"{e},{year},{bal:.6f}\n")

    with open(os.path.join(OUT, "gdp.csv"), "w", encoding="utf-8", newline="") as f:
        f.write("year,gdp\n")
        for year, level in gdp_rows:
            f.write(f"{year},{level:.6f}\n")

    with open(os.path.join(OUT, "aliases.csv"), "w", encoding="utf-8", newline="") as f:
        f.write("alias,canonical\n")
        f.write("B001-OLDNAME,B001\n")

    print(f"wrote {len(events)} events, {len(rows)} panel rows, "
          f"{len(gdp_rows)} gdp years to {os.path.abspath(OUT)}")


if __name__ == "__main__":
    main()
