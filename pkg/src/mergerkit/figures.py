"""Render analysis exports as matplotlib figures saved next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import (
    AncestryHistogram,
    GrowthRecord,
    OverlayReport,
    RankGroupReport,
    ShareSeries,
    ZipfFit,
)
from .model import EnsembleSummary

__all__ = [
    "plot_zipf",
    "plot_distribution",
    "plot_rank_envelope",
    "plot_rank_groups",
    "plot_growth",
    "plot_market_share",
]

plt.rcParams.update({
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
})


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_zipf(series: list[tuple[int, int]], path: str, fit: ZipfFit | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if series:
        ranks = [r for r, _ in series]
        values = [v for _, v in series]
        ax.loglog(ranks, values, ".", ms=4, color="#2166ac", label="ancestry")
        if fit is not None:
            lo, hi = fit.rank_range
            xs = np.logspace(np.log10(max(lo, 1)), np.log10(hi), 50)
            ax.loglog(xs, 10**fit.intercept * xs**fit.slope, "--", color="#d6604d",
                      label=f"fit slope {fit.slope:.2f}")
        ax.legend()
    ax.set_xlabel("rank")
    ax.set_ylabel("ancestry")
    ax.set_title("Rank vs ancestry")
    _save(fig, path)


def plot_distribution(hist: AncestryHistogram, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if hist.bins:
        centers = [np.sqrt(b.low * max(b.high - 1, b.low)) for b in hist.bins]
        counts = [b.count for b in hist.bins]
        ax.loglog(centers, counts, "o", ms=5, color="#2166ac")
    ax.set_xlabel("ancestry")
    ax.set_ylabel("entities")
    ax.set_title(f"Ancestry distribution ({hist.binning}; {hist.zero_count} zero-ancestry)")
    _save(fig, path)


def plot_rank_envelope(
    summary: EnsembleSummary, path: str, overlay: OverlayReport | None = None
) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ranks = summary.ranks
    if ranks.size:
        lo = np.maximum(summary.rank_min.astype(float), 0.5)
        ax.fill_between(ranks, lo, summary.rank_max, color="0.8",
                        label=f"min-max of {summary.n_runs} runs")
        ax.fill_between(ranks, np.maximum(summary.rank_band_low, 0.5), summary.rank_band_high,
                        color="0.6", label=f"{summary.band[0]:g}-{summary.band[1]:g} pct band")
        ax.set_xscale("log")
        ax.set_yscale("log")
    if overlay is not None:
        xs = [p.coordinate for p in overlay.points]
        ys = [max(p.empirical, 0.5) for p in overlay.points]
        ax.plot(xs, ys, ".", ms=4, color="#d6604d",
                label=f"data (coverage {overlay.coverage:.0%})")
    ax.set_xlabel("rank")
    ax.set_ylabel("ancestry")
    ax.set_title("Ensemble envelope")
    ax.legend()
    _save(fig, path)


def plot_rank_groups(reports: tuple[RankGroupReport, RankGroupReport], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = {"ancestry": "#d6604d", "balance": "#2166ac"}
    n = max(len(r.group_bounds) for r in reports)
    width = 0.4
    for offset, report in zip((-width / 2, width / 2), reports):
        xs = np.arange(len(report.mean_mergers)) + offset
        ax.bar(xs, report.mean_mergers, width=width,
               color=colors.get(report.method, "0.5"), label=f"ranked by {report.method}")
    labels = [f"{lo}-{hi}" for lo, hi in reports[0].group_bounds] if reports[0].group_bounds else []
    ax.set_xticks(range(n))
    ax.set_xticklabels(labels[:n], rotation=45, ha="right", fontsize=8)
    ax.set_xlabel("ranking group")
    ax.set_ylabel("mean forward mergers")
    ax.set_title("Forward merger activity by ranking group")
    ax.legend()
    _save(fig, path)


def plot_growth(records: tuple[GrowthRecord, ...], path: str,
                weighted_mean: float | None = None) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    if records:
        xs = [max(r.acquisition_count, 0.5) for r in records]
        ys = [r.growth_index for r in records]
        ax.semilogx(xs, ys, ".", ms=5, color="#2166ac", label="survivors")
    if weighted_mean is not None:
        ax.axhline(weighted_mean, color="#d6604d", ls="--",
                   label=f"size-weighted mean {weighted_mean:.2f}")
    ax.axhline(0.0, color="0.3", lw=0.8)
    ax.set_xlabel("acquisition count")
    ax.set_ylabel("growth index (log10 vs GDP)")
    ax.set_title("Organic growth relative to GDP")
    ax.legend()
    _save(fig, path)


def plot_market_share(series: ShareSeries, path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    years = series.years
    ax.plot(years, series.cumulative_change[:, 0], color="black", lw=2.2, label="percentile 1")
    for k in range(2, 6):
        ax.plot(years, series.cumulative_change[:, k - 1], ls="-.", lw=1.0, color="0.35")
    for k in range(6, 101):
        ax.plot(years, series.cumulative_change[:, k - 1], lw=0.5, color="0.6", alpha=0.5)
    ax.axhline(0.0, color="0.3", lw=0.8)
    ax.set_xlabel("year")
    ax.set_ylabel("cumulative share change since first year")
    ax.set_title("Market-share concentration by size percentile")
    ax.legend(loc="upper left")
    _save(fig, path)
