"""Command-line entry point: reproducible runs that emit result files and figures.

Every subcommand writes delimited result files whose metadata preamble holds
the fully resolved configuration (plus content hashes of any input files), so
``mergerkit replay <result-file>`` can regenerate the exact same bytes. By
default each report also renders a matplotlib figure next to its CSV; pass
``--no-figures`` to skip rendering.

Exit codes: 0 success, 1 usage error, 2 data validation error,
3 a simulation hit its cycle ceiling before reaching the target count.
"""

from __future__ import annotations

import datetime as dt
import os

import click

from . import __version__
from . import io as mio
from .analysis import (
    ancestry_distribution,
    distribution_envelope,
    market_share_percentiles,
    organic_growth,
    rank_merger_forecast,
    zipf_series,
    zipf_slope,
)
from .genealogy import GenealogyValidationError, ancestry_table, build_forest
from .io import DataValidationError, ResultTable
from .model import ModelParams, run_ensemble, run_simulation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MAX_CYCLES = 3

DEFAULT_P = 1.0 / 40000.0
DEFAULT_EXPONENT = 1.5
DEFAULT_RUNS = 1000
DEFAULT_WINDOW = 3
DEFAULT_GROUP_SIZE = 100


def _metadata(command: str, config: dict, inputs: dict, extra: dict | None = None) -> dict:
    meta = {
        "tool": "mergerkit",
        "tool_version": __version__,
        "command": command,
        "config": config,
        "inputs": inputs,
    }
    if extra:
        meta["extra"] = extra
    return meta


def _input_entry(path: str) -> dict:
    return {"path": str(path), "sha256": mio.sha256_of(path)}


def _parse_years(text: str) -> list[int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise click.UsageError(f"--years expects START:END, got {text!r}")
    if lo > hi:
        raise click.UsageError(f"--years start {lo} exceeds end {hi}")
    return list(range(lo, hi + 1))


def _parse_date(text: str, flag: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise click.UsageError(f"{flag} expects an ISO date (YYYY-MM-DD), got {text!r}")


def _load_events(path: str, aliases: str | None, strict: bool):
    alias_map = mio.read_alias_map(aliases) if aliases else None
    events, report = mio.read_events(path, strict=strict, aliases=alias_map)
    for line_no, reason in report.dropped:
        click.echo(f"dropped {path}:{line_no}: {reason}", err=True)
    return build_forest(events), events


@click.group(name="mergerkit")
@click.version_option(version=__version__, prog_name="mergerkit")
def cli() -> None:
    """Merger-genealogy simulation and market analysis."""


def _outdir_option(func):
    return click.option(
        "--outdir",
        envvar="MERGERKIT_OUTDIR",
        default=".",
        show_default=True,
        help="Directory for result files and figures (env: MERGERKIT_OUTDIR).",
    )(func)


def _figures_option(func):
    return click.option(
        "--figures/--no-figures", "figures", default=True, show_default=True,
        help="Render matplotlib figures next to the CSV output.",
    )(func)


def _strict_option(func):
    return click.option(
        "--strict/--lenient", "strict", default=True, show_default=True,
        help="Fail on the first bad input row, or drop and report bad rows.",
    )(func)


def _model_params(config: dict) -> ModelParams:
    try:
        return ModelParams(
            initial_count=config["initial"],
            target_count=config["target"],
            base_probability=config["p"],
            ancestry_exponent=config["exponent"],
            ancestry_weighting=not config["baseline"],
            max_cycles=config["max_cycles"],
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _variant(config: dict) -> str:
    return "constant-probability" if config["baseline"] else "ancestry-weighted"


# ---------------------------------------------------------------- simulate


@cli.command()
@click.option("--initial", type=int, default=None, help="Agents at cycle 0 (or derive via --events).")
@click.option("--target", type=int, default=None, help="Stop once live count <= target.")
@click.option("--events", "events_path", type=click.Path(), default=None,
              help="Derive initial/target from this event file's entity counts.")
@click.option("--aliases", type=click.Path(), default=None, help="Alias sidecar for --events.")
@click.option("--p", type=float, default=DEFAULT_P, show_default=True, help="Base merger probability.")
@click.option("--exponent", type=float, default=DEFAULT_EXPONENT, show_default=True,
              help="Ancestry exponent.")
@click.option("--baseline", is_flag=True, help="Constant-probability null model (no ancestry weighting).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-cycles", type=int, default=10_000_000, show_default=True)
@click.option("--binning", type=click.Choice(["linear", "logarithmic"]), default="linear",
              show_default=True, help="Binning for the distribution export.")
@_strict_option
@_outdir_option
@_figures_option
def simulate(initial, target, events_path, aliases, p, exponent, baseline, seed,
             max_cycles, binning, strict, outdir, figures) -> int:
    """Run one seeded simulation and export its final population."""
    inputs: dict = {}
    if events_path is not None:
        forest, _ = _load_events(events_path, aliases, strict)
        inputs["events"] = _input_entry(events_path)
        if aliases:
            inputs["aliases"] = _input_entry(aliases)
        last_date = max((d for _, (_, d) in forest.absorption.items()), default=None)
        if initial is None:
            initial = len(forest.nodes)
        if target is None:
            target = len(forest.live_entities(last_date)) if last_date else len(forest.nodes)
    if initial is None or target is None:
        raise click.UsageError("provide --initial and --target, or --events to derive them")
    config = {
        "initial": initial, "target": target, "p": p, "exponent": exponent,
        "baseline": bool(baseline), "seed": seed, "max_cycles": max_cycles,
        "binning": binning, "variant": _variant({"baseline": baseline}),
    }
    return _run_simulate(config, inputs, outdir, figures)


def _run_simulate(config: dict, inputs: dict, outdir: str, figures: bool) -> int:
    params = _model_params(config)
    result = run_simulation(params, seed=config["seed"], record_history=False)
    population = result.final_population
    live_ids = population.live_ids()
    counts = {int(i): int(population.ancestry[i]) for i in live_ids}

    series = zipf_series(counts)
    hist = ancestry_distribution(counts.values(), binning=config["binning"])
    run_extra = {
        "cycles_run": result.cycles_run,
        "final_live_count": population.live_count,
        "absorbed_count": population.absorbed_count,
        "hit_max_cycles": result.hit_max_cycles,
    }
    meta = lambda extra=None: _metadata("simulate", config, inputs, {**run_extra, **(extra or {})})

    mio.write_result(
        os.path.join(outdir, "population.csv"),
        ResultTable("population", tuple((i, a) for i, a in sorted(counts.items()))),
        meta(),
    )
    mio.write_result(
        os.path.join(outdir, "zipf.csv"),
        ResultTable("zipf", tuple(series)),
        meta(),
    )
    mio.write_result(
        os.path.join(outdir, "distribution.csv"),
        ResultTable("distribution", tuple((b.low, b.high, b.count) for b in hist.bins)),
        meta({"zero_count": hist.zero_count}),
    )
    if figures:
        from . import figures as figs

        figs.plot_zipf(series, os.path.join(outdir, "zipf.png"))
        figs.plot_distribution(hist, os.path.join(outdir, "distribution.png"))
    click.echo(
        f"simulate: {config['initial']} -> {population.live_count} agents in "
        f"{result.cycles_run} cycles (seed {config['seed']}, {config['variant']})"
    )
    if result.hit_max_cycles:
        click.echo("warning: max_cycles reached before target count", err=True)
        return EXIT_MAX_CYCLES
    return EXIT_OK


# ---------------------------------------------------------------- ensemble


@cli.command()
@click.option("--initial", type=int, required=True)
@click.option("--target", type=int, required=True)
@click.option("--p", type=float, default=DEFAULT_P, show_default=True)
@click.option("--exponent", type=float, default=DEFAULT_EXPONENT, show_default=True)
@click.option("--baseline", is_flag=True)
@click.option("--runs", type=int, default=DEFAULT_RUNS, show_default=True)
@click.option("--seed", "master_seed", type=int, default=0, show_default=True,
              help="Master seed; run i uses SeedSequence(seed).spawn[i].")
@click.option("--band", type=(float, float), default=(5.0, 95.0), show_default=True,
              help="Percentile band of the envelope.")
@click.option("--max-cycles", type=int, default=10_000_000, show_default=True)
@click.option("--workers", type=int, default=None, help="Parallel worker processes.")
@click.option("--compare", "compare_path", type=click.Path(), default=None,
              help="Overlay a zipf/population/ancestry_table result file and report coverage.")
@_outdir_option
@_figures_option
def ensemble(initial, target, p, exponent, baseline, runs, master_seed, band,
             max_cycles, workers, compare_path, outdir, figures) -> int:
    """Run repeated simulations and export their rank/distribution envelopes."""
    if runs < 1:
        raise click.UsageError("--runs must be >= 1")
    config = {
        "initial": initial, "target": target, "p": p, "exponent": exponent,
        "baseline": bool(baseline), "seed": master_seed, "runs": runs,
        "band": [band[0], band[1]], "max_cycles": max_cycles,
        "variant": _variant({"baseline": baseline}),
    }
    inputs: dict = {}
    if compare_path is not None:
        inputs["compare"] = _input_entry(compare_path)
    return _run_ensemble(config, inputs, outdir, figures, workers=workers)


def _compare_series(path: str) -> list[tuple[int, int]]:
    data = mio.read_result(path)
    if data.schema == "zipf":
        return [(int(r), int(v)) for r, v in data.table.rows]
    if data.schema in ("population", "ancestry_table"):
        counts = {key: int(v) for key, v in data.table.rows}
        return zipf_series(counts)
    raise DataValidationError(
        f"{path}: schema {data.schema!r} cannot be overlaid on a rank envelope"
    )


def _run_ensemble(config: dict, inputs: dict, outdir: str, figures: bool,
                  workers: int | None = None) -> int:
    params = _model_params(config)
    band = (config["band"][0], config["band"][1])
    summary = run_ensemble(params, n_runs=config["runs"], master_seed=config["seed"],
                           band=band, workers=workers)
    run_extra = {
        "runs_completed": summary.runs_completed,
        "runs_hit_max_cycles": summary.runs_hit_max_cycles,
    }
    meta = lambda extra=None: _metadata("ensemble", config, inputs, {**run_extra, **(extra or {})})

    envelope_rows = tuple(
        (
            int(summary.ranks[i]),
            int(summary.rank_min[i]),
            float(summary.rank_band_low[i]),
            float(summary.rank_band_high[i]),
            int(summary.rank_max[i]),
            int(summary.rank_support[i]),
        )
        for i in range(summary.ranks.size)
    )
    mio.write_result(os.path.join(outdir, "envelope.csv"),
                     ResultTable("rank_envelope", envelope_rows), meta())
    dist_rows = tuple(
        (int(v), int(summary.bin_freq_min[v]), int(summary.bin_freq_max[v]))
        for v in summary.bin_values
    )
    mio.write_result(os.path.join(outdir, "distribution_envelope.csv"),
                     ResultTable("distribution_envelope", dist_rows), meta())

    overlay = None
    if "compare" in inputs:
        series = _compare_series(inputs["compare"]["path"])
        overlay = distribution_envelope(summary, series, axis="rank")
        rows = tuple(
            (pt.coordinate, pt.empirical, pt.envelope_min, pt.envelope_max, int(pt.inside))
            for pt in overlay.points
        )
        mio.write_result(os.path.join(outdir, "coverage.csv"),
                         ResultTable("coverage", rows),
                         meta({"coverage": overlay.coverage}))
        click.echo(f"coverage: {overlay.coverage:.3f} over {len(overlay.points)} ranks")

    if figures:
        from . import figures as figs

        figs.plot_rank_envelope(summary, os.path.join(outdir, "envelope.png"), overlay=overlay)
    click.echo(
        f"ensemble: {config['runs']} runs of {config['initial']} -> {config['target']} "
        f"({config['variant']}), {summary.runs_completed} completed"
    )
    if summary.runs_hit_max_cycles:
        click.echo(f"warning: {summary.runs_hit_max_cycles} runs hit max_cycles", err=True)
        return EXIT_MAX_CYCLES
    return EXIT_OK


# ---------------------------------------------------------------- ancestry


@cli.command()
@click.option("--events", "events_path", type=click.Path(), required=True)
@click.option("--aliases", type=click.Path(), default=None)
@click.option("--as-of", "as_of", default=None,
              help="Snapshot date (ISO); default: latest event date.")
@click.option("--binning", type=click.Choice(["linear", "logarithmic"]), default="linear",
              show_default=True)
@_strict_option
@_outdir_option
@_figures_option
def ancestry(events_path, aliases, as_of, binning, strict, outdir, figures) -> int:
    """Ancestry table, distribution and rank series from real merger events."""
    forest, events = _load_events(events_path, aliases, strict)
    if as_of is None:
        if not events:
            raise DataValidationError(f"{events_path}: no valid events")
        as_of_date = max(e.date for e in events)
    else:
        as_of_date = _parse_date(as_of, "--as-of")
    config = {"as_of": as_of_date.isoformat(), "binning": binning, "strict": strict}
    inputs = {"events": _input_entry(events_path)}
    if aliases:
        inputs["aliases"] = _input_entry(aliases)
    return _run_ancestry(config, inputs, outdir, figures)


def _run_ancestry(config: dict, inputs: dict, outdir: str, figures: bool) -> int:
    forest, _ = _load_events(
        inputs["events"]["path"],
        inputs.get("aliases", {}).get("path"),
        config["strict"],
    )
    as_of_date = dt.date.fromisoformat(config["as_of"])
    table = ancestry_table(forest, as_of_date)
    if not table:
        raise DataValidationError("no live entities as of the snapshot date")
    series = zipf_series(table)
    hist = ancestry_distribution(table.values(), binning=config["binning"])
    meta = lambda extra=None: _metadata("ancestry", config, inputs, extra)

    mio.write_result(os.path.join(outdir, "ancestry.csv"),
                     ResultTable("ancestry_table", tuple(sorted(table.items()))), meta())
    mio.write_result(os.path.join(outdir, "zipf.csv"),
                     ResultTable("zipf", tuple(series)), meta())
    mio.write_result(os.path.join(outdir, "distribution.csv"),
                     ResultTable("distribution", tuple((b.low, b.high, b.count) for b in hist.bins)),
                     meta({"zero_count": hist.zero_count}))
    if figures:
        from . import figures as figs

        figs.plot_zipf(series, os.path.join(outdir, "zipf.png"))
        figs.plot_distribution(hist, os.path.join(outdir, "distribution.png"))
    click.echo(f"ancestry: {len(table)} live entities as of {config['as_of']}")
    return EXIT_OK


# ---------------------------------------------------------------- zipf


@cli.command(name="zipf")
@click.option("--events", "events_path", type=click.Path(), default=None)
@click.option("--aliases", type=click.Path(), default=None)
@click.option("--as-of", "as_of", default=None)
@click.option("--counts", "counts_path", type=click.Path(), default=None,
              help="A population or ancestry_table result file to rank.")
@click.option("--fit-range", "fit_range", type=(int, int), default=None,
              help="Fit a log-log slope over this inclusive rank range.")
@_strict_option
@_outdir_option
@_figures_option
def zipf_cmd(events_path, aliases, as_of, counts_path, fit_range, strict, outdir, figures) -> int:
    """Rank entities by ancestry and optionally fit the log-log slope."""
    if (events_path is None) == (counts_path is None):
        raise click.UsageError("provide exactly one of --events or --counts")
    inputs: dict = {}
    config: dict = {"strict": strict, "fit_range": list(fit_range) if fit_range else None}
    if events_path is not None:
        forest, events = _load_events(events_path, aliases, strict)
        if as_of is None:
            if not events:
                raise DataValidationError(f"{events_path}: no valid events")
            as_of_date = max(e.date for e in events)
        else:
            as_of_date = _parse_date(as_of, "--as-of")
        config["as_of"] = as_of_date.isoformat()
        inputs["events"] = _input_entry(events_path)
        if aliases:
            inputs["aliases"] = _input_entry(aliases)
    else:
        inputs["counts"] = _input_entry(counts_path)
    return _run_zipf(config, inputs, outdir, figures)


def _run_zipf(config: dict, inputs: dict, outdir: str, figures: bool) -> int:
    if "events" in inputs:
        forest, _ = _load_events(
            inputs["events"]["path"], inputs.get("aliases", {}).get("path"), config["strict"]
        )
        counts = ancestry_table(forest, dt.date.fromisoformat(config["as_of"]))
    else:
        data = mio.read_result(inputs["counts"]["path"])
        if data.schema not in ("population", "ancestry_table"):
            raise DataValidationError(
                f"{inputs['counts']['path']}: expected population or ancestry_table, "
                f"got {data.schema}"
            )
        counts = {key: int(v) for key, v in data.table.rows}
    series = zipf_series(counts)
    fit = None
    extra = {}
    if config.get("fit_range"):
        fit = zipf_slope(series, tuple(config["fit_range"]))
        extra = {"fit": {"slope": fit.slope, "intercept": fit.intercept,
                         "stderr": fit.stderr, "n_points": fit.n_points}}
    mio.write_result(os.path.join(outdir, "zipf.csv"),
                     ResultTable("zipf", tuple(series)),
                     _metadata("zipf", config, inputs, extra or None))
    if figures:
        from . import figures as figs

        figs.plot_zipf(series, os.path.join(outdir, "zipf.png"), fit=fit)
    click.echo(f"zipf: {len(series)} ranked entities"
               + (f", slope {fit.slope:.3f} +/- {fit.stderr:.3f}" if fit else ""))
    return EXIT_OK


# ---------------------------------------------------------------- rank-compare


@cli.command(name="rank-compare")
@click.option("--events", "events_path", type=click.Path(), required=True)
@click.option("--aliases", type=click.Path(), default=None)
@click.option("--panel", "panel_path", type=click.Path(), required=True)
@click.option("--years", required=True, help="Base years as START:END (inclusive).")
@click.option("--window", type=int, default=DEFAULT_WINDOW, show_default=True)
@click.option("--group-size", type=int, default=DEFAULT_GROUP_SIZE, show_default=True)
@click.option("--per-year-average", is_flag=True,
              help="Divide window totals by the window length.")
@_strict_option
@_outdir_option
@_figures_option
def rank_compare(events_path, aliases, panel_path, years, window, group_size,
                 per_year_average, strict, outdir, figures) -> int:
    """Compare ancestry vs balance-sheet ranking as forward merger predictors."""
    year_list = _parse_years(years)
    config = {
        "years_start": year_list[0], "years_end": year_list[-1], "window": window,
        "group_size": group_size, "per_year_average": bool(per_year_average),
        "strict": strict,
    }
    inputs = {"events": _input_entry(events_path), "panel": _input_entry(panel_path)}
    if aliases:
        inputs["aliases"] = _input_entry(aliases)
    return _run_rank_compare(config, inputs, outdir, figures)


def _run_rank_compare(config: dict, inputs: dict, outdir: str, figures: bool) -> int:
    forest, _ = _load_events(
        inputs["events"]["path"], inputs.get("aliases", {}).get("path"), config["strict"]
    )
    panel, panel_report = mio.read_panel(inputs["panel"]["path"], strict=config["strict"])
    years = list(range(config["years_start"], config["years_end"] + 1))
    reports = rank_merger_forecast(
        forest, panel, years,
        window_years=config["window"],
        group_size=config["group_size"],
        per_year_average=config["per_year_average"],
    )
    rows = []
    for report in reports:
        for (lo, hi), mean in zip(report.group_bounds, report.mean_mergers):
            rows.append((report.method, lo, hi, mean))
    extra = {"base_years_used": list(reports[0].base_years_used),
             "skipped_years": list(reports[0].skipped_years)}
    mio.write_result(os.path.join(outdir, "rank_groups.csv"),
                     ResultTable("rank_groups", tuple(rows)),
                     _metadata("rank-compare", config, inputs, extra))
    if figures:
        from . import figures as figs

        figs.plot_rank_groups(reports, os.path.join(outdir, "rank_groups.png"))
    for skipped in reports[0].skipped_years:
        click.echo(f"skipped base year {skipped}: no panel coverage", err=True)
    click.echo(f"rank-compare: {len(reports[0].base_years_used)} base years, "
               f"{len(reports[0].group_bounds)} groups")
    return EXIT_OK


# ---------------------------------------------------------------- growth


@cli.command()
@click.option("--events", "events_path", type=click.Path(), required=True)
@click.option("--aliases", type=click.Path(), default=None)
@click.option("--panel", "panel_path", type=click.Path(), required=True)
@click.option("--gdp", "gdp_path", type=click.Path(), required=True)
@click.option("--start-year", type=int, required=True)
@click.option("--end-year", type=int, required=True)
@_strict_option
@_outdir_option
@_figures_option
def growth(events_path, aliases, panel_path, gdp_path, start_year, end_year,
           strict, outdir, figures) -> int:
    """GDP-indexed organic growth of surviving entities and their lineages."""
    config = {"start_year": start_year, "end_year": end_year, "strict": strict}
    inputs = {
        "events": _input_entry(events_path),
        "panel": _input_entry(panel_path),
        "gdp": _input_entry(gdp_path),
    }
    if aliases:
        inputs["aliases"] = _input_entry(aliases)
    return _run_growth(config, inputs, outdir, figures)


def _run_growth(config: dict, inputs: dict, outdir: str, figures: bool) -> int:
    forest, _ = _load_events(
        inputs["events"]["path"], inputs.get("aliases", {}).get("path"), config["strict"]
    )
    panel, _ = mio.read_panel(inputs["panel"]["path"], strict=config["strict"])
    gdp, _ = mio.read_gdp(inputs["gdp"]["path"], strict=config["strict"])
    try:
        result = organic_growth(forest, panel, gdp, config["start_year"], config["end_year"])
    except (KeyError, ValueError) as exc:
        raise DataValidationError(str(exc).strip("'\""))
    weighted = result.weighted_mean_index()
    rows = tuple(
        (r.entity_id, r.acquisition_count, r.growth_index, r.end_balance)
        for r in sorted(result.records, key=lambda r: r.entity_id)
    )
    extra = {
        "weighted_mean_index": weighted,
        "excluded_no_baseline": list(result.excluded_no_baseline),
        "ancestors_without_start_balance": result.ancestors_without_start_balance,
    }
    mio.write_result(os.path.join(outdir, "growth.csv"),
                     ResultTable("growth", rows), _metadata("growth", config, inputs, extra))
    if figures:
        from . import figures as figs

        figs.plot_growth(result.records, os.path.join(outdir, "growth.png"),
                         weighted_mean=weighted)
    click.echo(f"growth: {len(rows)} survivors, "
               f"{len(result.excluded_no_baseline)} excluded (no baseline)")
    return EXIT_OK


# ---------------------------------------------------------------- market-share


@cli.command(name="market-share")
@click.option("--panel", "panel_path", type=click.Path(), required=True)
@click.option("--years", required=True, help="Years as START:END (inclusive).")
@_strict_option
@_outdir_option
@_figures_option
def market_share(panel_path, years, strict, outdir, figures) -> int:
    """Percentile market-share concentration over a span of years."""
    year_list = _parse_years(years)
    config = {"years_start": year_list[0], "years_end": year_list[-1], "strict": strict}
    inputs = {"panel": _input_entry(panel_path)}
    return _run_market_share(config, inputs, outdir, figures)


def _run_market_share(config: dict, inputs: dict, outdir: str, figures: bool) -> int:
    panel, _ = mio.read_panel(inputs["panel"]["path"], strict=config["strict"])
    years = list(range(config["years_start"], config["years_end"] + 1))
    try:
        series = market_share_percentiles(panel, years)
    except ValueError as exc:
        raise DataValidationError(str(exc))
    rows = []
    for i, year in enumerate(series.years):
        for k in range(100):
            rows.append((year, k + 1, float(series.shares[i, k]),
                         float(series.cumulative_change[i, k])))
    extra = {"entity_counts": list(series.entity_counts),
             "degraded_years": list(series.degraded_years)}
    mio.write_result(os.path.join(outdir, "market_share.csv"),
                     ResultTable("market_share", tuple(rows)),
                     _metadata("market-share", config, inputs, extra))
    if figures:
        from . import figures as figs

        figs.plot_market_share(series, os.path.join(outdir, "market_share.png"))
    for year in series.degraded_years:
        click.echo(f"warning: year {year} has fewer than 100 entities", err=True)
    click.echo(f"market-share: {len(series.years)} years")
    return EXIT_OK


# ---------------------------------------------------------------- replay


_RUNNERS = {
    "simulate": _run_simulate,
    "ensemble": _run_ensemble,
    "ancestry": _run_ancestry,
    "zipf": _run_zipf,
    "rank-compare": _run_rank_compare,
    "growth": _run_growth,
    "market-share": _run_market_share,
}


@cli.command()
@click.argument("result_file", type=click.Path())
@_outdir_option
@_figures_option
def replay(result_file, outdir, figures) -> int:
    """Re-run the command recorded in a result file's metadata preamble."""
    data = mio.read_result(result_file)
    meta = data.metadata
    command = meta.get("command")
    if command not in _RUNNERS:
        raise DataValidationError(f"{result_file}: metadata names no replayable command")
    inputs = meta.get("inputs", {})
    for name, entry in inputs.items():
        path = entry["path"]
        if not os.path.exists(path):
            raise DataValidationError(f"replay input {name!r} missing: {path}")
        digest = mio.sha256_of(path)
        if digest != entry["sha256"]:
            raise DataValidationError(
                f"replay input {name!r} changed since the original run: {path}"
            )
    click.echo(f"replaying {command} into {outdir}")
    return _RUNNERS[command](meta["config"], inputs, outdir, figures)


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except (DataValidationError, GenealogyValidationError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATA
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_DATA
    return int(rv) if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
