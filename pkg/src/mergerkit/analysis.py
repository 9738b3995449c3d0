"""Statistical computations over ancestry counts, balance panels and ensembles.

Everything here is a pure function over immutable inputs: histogram and Zipf
views of ancestry counts, log-log slope fits, the ancestry-vs-size ranking
comparison, GDP-indexed organic growth of survivors, percentile market-share
concentration, and coverage of empirical series against ensemble envelopes.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .genealogy import GenealogyForest, ancestry_count, ancestry_table
from .model import EnsembleSummary

__all__ = [
    "BalancePanel",
    "GdpSeries",
    "AncestryHistogram",
    "HistogramBin",
    "ZipfFit",
    "RankGroupReport",
    "GrowthRecord",
    "OrganicGrowthResult",
    "ShareSeries",
    "OverlayReport",
    "ancestry_distribution",
    "zipf_series",
    "zipf_slope",
    "rank_merger_forecast",
    "organic_growth",
    "market_share_percentiles",
    "distribution_envelope",
]


class BalancePanel:
    """Per-entity, per-year balance-sheet sizes (strictly positive)."""

    def __init__(self, observations: Mapping[tuple[str, int], float] | None = None):
        self._data: dict[tuple[str, int], float] = {}
        if observations:
            for (entity, year), balance in observations.items():
                self.add(entity, year, balance)

    def add(self, entity: str, year: int, balance: float) -> None:
        key = (entity, int(year))
        if key in self._data:
            raise ValueError(f"duplicate observation for entity {entity!r}, year {year}")
        if not (balance > 0):
            raise ValueError(f"balance must be positive, got {balance} for {entity!r}/{year}")
        self._data[key] = float(balance)

    def balance(self, entity: str, year: int) -> float | None:
        return self._data.get((entity, year))

    def entities_in(self, year: int) -> list[str]:
        return sorted(e for (e, y) in self._data if y == year)

    def years(self) -> list[int]:
        return sorted({y for (_, y) in self._data})

    def __len__(self) -> int:
        return len(self._data)

    def items(self):
        return self._data.items()


class GdpSeries:
    """A yearly GDP index used to normalize nominal balance growth."""

    def __init__(self, values: Mapping[int, float] | None = None):
        self._values: dict[int, float] = {}
        if values:
            for year, level in values.items():
                self.add(year, level)

    def add(self, year: int, level: float) -> None:
        year = int(year)
        if year in self._values:
            raise ValueError(f"duplicate GDP year {year}")
        if not (level > 0):
            raise ValueError(f"GDP level must be positive, got {level} for {year}")
        self._values[year] = float(level)

    def level(self, year: int) -> float:
        try:
            return self._values[year]
        except KeyError:
            raise KeyError(f"GDP series has no value for year {year}") from None

    def ratio(self, end_year: int, start_year: int) -> float:
        return self.level(end_year) / self.level(start_year)

    def years(self) -> list[int]:
        return sorted(self._values)

    def items(self):
        return self._values.items()


@dataclass(frozen=True)
class HistogramBin:
    low: int
    high: int  # exclusive
    count: int


@dataclass(frozen=True)
class AncestryHistogram:
    binning: str
    zero_count: int
    bins: tuple[HistogramBin, ...]

    def frequency(self, value: int) -> int:
        for b in self.bins:
            if b.low <= value < b.high:
                return b.count
        return 0


def ancestry_distribution(counts, binning: str = "linear") -> AncestryHistogram:
    """Histogram of ancestry counts, with zero-ancestry entities set aside.

    Zero counts cannot sit on a log axis, so they are reported separately in
    ``zero_count`` and the bins cover positive values only. Linear binning
    tallies each value; logarithmic binning uses the fixed edges
    [2^k, 2^(k+1)) for k = 0, 1, 2, ...
    """
    values = list(counts.values()) if isinstance(counts, Mapping) else list(counts)
    if not values:
        raise ValueError("ancestry_distribution requires a non-empty input")
    if binning not in ("linear", "logarithmic"):
        raise ValueError(f"binning must be 'linear' or 'logarithmic', got {binning!r}")
    for v in values:
        if v < 0:
            raise ValueError(f"ancestry counts must be >= 0, got {v}")
    zero_count = sum(1 for v in values if v == 0)
    positive = [int(v) for v in values if v > 0]
    bins: list[HistogramBin] = []
    if binning == "linear":
        tally: dict[int, int] = {}
        for v in positive:
            tally[v] = tally.get(v, 0) + 1
        bins = [HistogramBin(v, v + 1, c) for v, c in sorted(tally.items())]
    else:
        if positive:
            kmax = max(int(v).bit_length() - 1 for v in positive)
            edges = [2**k for k in range(kmax + 2)]
            tally = {k: 0 for k in range(kmax + 1)}
            for v in positive:
                tally[int(v).bit_length() - 1] += 1
            bins = [
                HistogramBin(edges[k], edges[k + 1], tally[k])
                for k in range(kmax + 1)
                if tally[k] > 0
            ]
    return AncestryHistogram(binning=binning, zero_count=zero_count, bins=tuple(bins))


def zipf_series(counts) -> list[tuple[int, int]]:
    """(rank, ancestry) pairs, ancestry descending, rank starting at 1.

    Ties are broken by id order for mappings and by input position for
    sequences; zero values are excluded (they cannot sit on a log axis).
    An all-zero input yields an empty series.
    """
    if isinstance(counts, Mapping):
        items = sorted(counts.items())
    else:
        items = list(enumerate(counts))
    if not items:
        raise ValueError("zipf_series requires a non-empty input")
    ordered = sorted(items, key=lambda kv: (-kv[1], kv[0]))
    return [(rank, int(v)) for rank, (_, v) in enumerate(ordered, start=1) if v > 0]


@dataclass(frozen=True)
class ZipfFit:
    slope: float
    intercept: float
    stderr: float
    n_points: int
    rank_range: tuple[int, int]


def zipf_slope(series: Sequence[tuple[int, float]], rank_range: tuple[int, int] | None = None) -> ZipfFit:
    """Least-squares slope of log10(ancestry) against log10(rank).

    Restricted to ranks within ``rank_range`` (inclusive; default the whole
    series). Requires at least 3 in-range points. ``stderr`` is the standard
    error of the slope estimate (0 for an exact fit).
    """
    if rank_range is None:
        if not series:
            raise ValueError("zipf_slope requires a non-empty series")
        rank_range = (series[0][0], series[-1][0])
    lo, hi = rank_range
    pts = [(r, v) for r, v in series if lo <= r <= hi]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points in rank range {rank_range}, got {len(pts)}")
    x = np.log10([r for r, _ in pts])
    y = np.log10([v for _, v in pts])
    n = len(pts)
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (slope * x + intercept)
    rss = float((resid**2).sum())
    stderr = math.sqrt(rss / (n - 2) / sxx) if n > 2 else 0.0
    return ZipfFit(slope=slope, intercept=intercept, stderr=stderr, n_points=n, rank_range=(lo, hi))


@dataclass(frozen=True)
class RankGroupReport:
    """Time-averaged forward merger counts by ranking group for one method."""

    method: str  # "ancestry" or "balance"
    group_bounds: tuple[tuple[int, int], ...]
    mean_mergers: tuple[float, ...]
    base_years_used: tuple[int, ...]
    skipped_years: tuple[int, ...]


def rank_merger_forecast(
    forest: GenealogyForest,
    panel: BalancePanel,
    years: Sequence[int],
    window_years: int = 3,
    group_size: int = 100,
    per_year_average: bool = False,
) -> tuple[RankGroupReport, RankGroupReport]:
    """Compare ancestry ranking against balance-sheet ranking as merger predictors.

    For each base year y, entities live at the start of y are ranked by
    ancestry accumulated through the end of y-1, and separately by their
    year-y balance observation; each entity's acquisitions within calendar
    years [y, y+window) are then summed per ranking group of ``group_size``
    and averaged across base years. The ranked universe is the union of
    forest-live entities and the year's panel entities (entities with no
    merger history rank with ancestry 0; the balance ranking covers those
    with a year-y observation). Ties rank by entity id. Base years with no
    panel coverage are skipped and reported. With ``per_year_average`` the
    group totals are divided by the window length.
    """
    if window_years < 1:
        raise ValueError("window_years must be >= 1")
    if group_size < 1:
        raise ValueError("group_size must be >= 1")

    used: list[int] = []
    skipped: list[int] = []
    anc_year_groups: list[dict[int, float]] = []
    bal_year_groups: list[dict[int, float]] = []
    max_groups = 0

    for year in years:
        if not panel.entities_in(year):
            skipped.append(year)
            continue
        used.append(year)
        as_of = dt.date(year - 1, 12, 31)
        table = ancestry_table(forest, as_of)
        panel_live = [e for e in panel.entities_in(year) if forest.is_live(e, as_of)]
        universe = set(table) | set(panel_live)
        window_lo = dt.date(year, 1, 1)
        window_hi = dt.date(year + window_years, 1, 1)
        forward = {
            e: sum(1 for d, _ in forest.children.get(e, ()) if window_lo <= d < window_hi)
            for e in universe
        }

        anc_ranked = sorted(universe, key=lambda e: (-table.get(e, 0), e))
        bal_ranked = sorted(
            (e for e in universe if panel.balance(e, year) is not None),
            key=lambda e: (-panel.balance(e, year), e),
        )
        divisor = float(window_years) if per_year_average else 1.0
        anc_year_groups.append(_group_totals(anc_ranked, forward, group_size, divisor))
        bal_year_groups.append(_group_totals(bal_ranked, forward, group_size, divisor))
        max_groups = max(max_groups, *(len(g) for g in (anc_year_groups[-1], bal_year_groups[-1])))

    if not used:
        raise ValueError("no base year had panel coverage")

    bounds = tuple((g * group_size + 1, (g + 1) * group_size) for g in range(max_groups))

    def _report(method: str, year_groups: list[dict[int, float]]) -> RankGroupReport:
        means = tuple(
            sum(g.get(i, 0.0) for g in year_groups) / len(year_groups) for i in range(max_groups)
        )
        return RankGroupReport(
            method=method,
            group_bounds=bounds,
            mean_mergers=means,
            base_years_used=tuple(used),
            skipped_years=tuple(skipped),
        )

    return _report("ancestry", anc_year_groups), _report("balance", bal_year_groups)


def _group_totals(
    ranked: list[str], forward: Mapping[str, int], group_size: int, divisor: float
) -> dict[int, float]:
    totals: dict[int, float] = {}
    for pos, entity in enumerate(ranked):
        group = pos // group_size
        totals[group] = totals.get(group, 0.0) + forward[entity] / divisor
    return totals


@dataclass(frozen=True)
class GrowthRecord:
    entity_id: str
    acquisition_count: int
    growth_index: float
    end_balance: float


@dataclass(frozen=True)
class OrganicGrowthResult:
    records: tuple[GrowthRecord, ...]
    excluded_no_baseline: tuple[str, ...]
    ancestors_without_start_balance: int

    def weighted_mean_index(self) -> float | None:
        """Mean growth index weighted by end-year balance sheet size."""
        if not self.records:
            return None
        total = sum(r.end_balance for r in self.records)
        return sum(r.growth_index * r.end_balance for r in self.records) / total


def organic_growth(
    forest: GenealogyForest,
    panel: BalancePanel,
    gdp: GdpSeries,
    start_year: int,
    end_year: int,
) -> OrganicGrowthResult:
    """GDP-indexed organic growth of survivors over [start_year, end_year].

    For each entity live at the end of ``end_year`` with an end-year balance,
    the baseline aggregates its own start-year balance (when observed) with
    the start-year balances of every lineage member absorbed during
    (start_year, end_year], scaled by gdp(end)/gdp(start). The growth index
    is log10(end balance / baseline): 0 means exactly tracking GDP, +1 means
    10x GDP. Survivors with no identifiable baseline are excluded and
    reported, as are lineage members lacking a start-year observation.
    """
    if start_year >= end_year:
        raise ValueError(f"start_year must precede end_year, got {start_year} >= {end_year}")
    gdp_factor = gdp.ratio(end_year, start_year)
    end_date = dt.date(end_year, 12, 31)

    # Survivors: every entity with an end-year balance still live per the
    # forest (entities with no merger history count, with ancestry 0).
    survivors = [e for e in panel.entities_in(end_year) if forest.is_live(e, end_date)]
    if not survivors:
        raise ValueError(f"no surviving entity has a balance observation for {end_year}")

    records: list[GrowthRecord] = []
    excluded: list[str] = []
    missing_ancestors = 0
    for entity in survivors:
        baseline = panel.balance(entity, start_year) or 0.0
        for member in _lineage_members(forest, entity, end_date):
            absorbed_year = forest.absorption[member][1].year
            if not (start_year < absorbed_year <= end_year):
                continue
            start_balance = panel.balance(member, start_year)
            if start_balance is None:
                missing_ancestors += 1
            else:
                baseline += start_balance
        if baseline <= 0.0:
            excluded.append(entity)
            continue
        end_balance = panel.balance(entity, end_year)
        index = math.log10(end_balance / (baseline * gdp_factor))
        acquisitions = ancestry_count(forest, entity, end_date) if entity in forest.nodes else 0
        records.append(
            GrowthRecord(
                entity_id=entity,
                acquisition_count=acquisitions,
                growth_index=index,
                end_balance=end_balance,
            )
        )
    return OrganicGrowthResult(
        records=tuple(records),
        excluded_no_baseline=tuple(excluded),
        ancestors_without_start_balance=missing_ancestors,
    )


def _lineage_members(forest: GenealogyForest, entity: str, as_of: dt.date) -> list[str]:
    members: list[str] = []
    stack = [entity]
    while stack:
        current = stack.pop()
        for date, child in forest.children.get(current, ()):
            if date <= as_of:
                members.append(child)
                stack.append(child)
    return members


@dataclass(frozen=True)
class ShareSeries:
    """Per-year percentile shares of total balance-sheet assets.

    ``shares[i][k-1]`` is percentile k's asset fraction in ``years[i]``
    (percentile 1 = largest entities). ``cumulative_change[i][0]`` is the
    top percentile's share change since the first year; for k >= 2 column
    k-1 accumulates the changes of percentiles 2..k, so consecutive columns
    differ by exactly one percentile's gain or loss.
    """

    years: tuple[int, ...]
    shares: np.ndarray
    cumulative_change: np.ndarray
    entity_counts: tuple[int, ...]
    degraded_years: tuple[int, ...] = field(default=())


def market_share_percentiles(panel: BalancePanel, years: Sequence[int]) -> ShareSeries:
    """Partition each year's entities into 100 size percentiles and share out assets.

    Entities are sorted by balance descending (ties by id); bucket sizes are
    n // 100, with the n % 100 leftover entities assigned one each to the
    highest-numbered (smallest-entity) percentiles. Years with fewer than 100
    entities are computed anyway but flagged as degraded.
    """
    if not years:
        raise ValueError("market_share_percentiles requires at least one year")
    shares = np.zeros((len(years), 100))
    counts: list[int] = []
    degraded: list[int] = []
    for i, year in enumerate(years):
        entities = panel.entities_in(year)
        if not entities:
            raise ValueError(f"year {year} has no balance observations")
        if len(entities) < 100:
            degraded.append(year)
        counts.append(len(entities))
        balances = np.array([panel.balance(e, year) for e in entities])
        order = sorted(range(len(entities)), key=lambda j: (-balances[j], entities[j]))
        ordered_balances = balances[order]
        total = float(ordered_balances.sum())
        n = len(entities)
        base, rem = divmod(n, 100)
        sizes = [base + (1 if k >= 100 - rem else 0) for k in range(100)]
        start = 0
        for k in range(100):
            stop = start + sizes[k]
            shares[i, k] = float(ordered_balances[start:stop].sum()) / total
            start = stop

    delta = shares - shares[0]
    cumulative = np.zeros_like(shares)
    cumulative[:, 0] = delta[:, 0]
    cumulative[:, 1:] = np.cumsum(delta[:, 1:], axis=1)
    return ShareSeries(
        years=tuple(int(y) for y in years),
        shares=shares,
        cumulative_change=cumulative,
        entity_counts=tuple(counts),
        degraded_years=tuple(degraded),
    )


@dataclass(frozen=True)
class OverlayPoint:
    coordinate: int
    empirical: float
    envelope_min: float
    envelope_max: float
    inside: bool


@dataclass(frozen=True)
class OverlayReport:
    axis: str  # "rank" or "bin"
    points: tuple[OverlayPoint, ...]
    coverage: float


def distribution_envelope(
    summary: EnsembleSummary,
    series: Sequence[tuple[int, float]],
    axis: str = "rank",
) -> OverlayReport:
    """Locate an empirical series against the ensemble min-max band.

    ``axis="rank"`` overlays a Zipf series on the per-rank envelope;
    ``axis="bin"`` overlays (ancestry value, frequency) pairs on the
    per-value frequency envelope (zero band outside the observed range).
    Coverage is the fraction of comparable points inside the band.
    """
    if axis not in ("rank", "bin"):
        raise ValueError(f"axis must be 'rank' or 'bin', got {axis!r}")
    if not series:
        raise ValueError("empty empirical series")
    points: list[OverlayPoint] = []
    if axis == "rank":
        env = {int(r): (float(summary.rank_min[i]), float(summary.rank_max[i]))
               for i, r in enumerate(summary.ranks)}
        for rank, value in series:
            if rank not in env:
                continue
            lo, hi = env[rank]
            points.append(OverlayPoint(int(rank), float(value), lo, hi, lo <= value <= hi))
        if not points:
            raise ValueError(
                "axis mismatch: no empirical rank overlaps the ensemble envelope"
            )
    else:
        vmax = int(summary.bin_values[-1]) if summary.bin_values.size else -1
        for value, freq in series:
            if value < 0:
                raise ValueError(f"axis mismatch: negative ancestry bin {value}")
            if value <= vmax:
                lo = float(summary.bin_freq_min[value])
                hi = float(summary.bin_freq_max[value])
            else:
                lo = hi = 0.0
            points.append(OverlayPoint(int(value), float(freq), lo, hi, lo <= freq <= hi))
    coverage = sum(p.inside for p in points) / len(points)
    return OverlayReport(axis=axis, points=tuple(points), coverage=coverage)
