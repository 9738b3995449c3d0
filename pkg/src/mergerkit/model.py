"""Ancestry-weighted merger dynamics: cycle engine, single runs, ensembles.

The market is a fixed pool of agents that only ever shrinks. Each cycle,
every live agent is independently selected as a merger source with
probability ``min(1, p * (1 + ancestry)**exponent)``; sources then act in a
uniformly random order, each absorbing a partner drawn uniformly from the
remaining live agents. The absorbed partner's whole lineage moves into the
source: the source's ancestry grows by ``partner.ancestry + 1``, so at every
cycle boundary the live ancestries sum exactly to the number of absorbed
agents. With ``ancestry_weighting`` off the selection probability is the
constant ``p`` for every agent (the constant-probability null model).

Randomness comes from numpy's PCG64 generator. A single run consumes its
stream in a fixed, documented order (per cycle: one uniform per live agent in
ascending id order, one permutation of the selected set, then one integer per
acting source for partner choice), so ``(params, seed)`` fully determines the
result. Ensemble runs derive per-run seeds as
``SeedSequence(master_seed).spawn(n_runs)[i]``, which depends only on
``(master_seed, i)``; ensembles are therefore replayable run by run and
their summary does not depend on execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ModelParams",
    "Agent",
    "Population",
    "CycleStats",
    "SimulationResult",
    "EnsembleSummary",
    "merger_probability",
    "select_sources",
    "execute_cycle",
    "run_simulation",
    "run_ensemble",
    "summarize_runs",
    "run_seed_sequence",
]

DEFAULT_BASE_PROBABILITY = 1.0 / 40000.0
DEFAULT_ANCESTRY_EXPONENT = 1.5
DEFAULT_MAX_CYCLES = 10_000_000


@dataclass(frozen=True)
class ModelParams:
    """All knobs of the merger dynamics and its cycle engine."""

    initial_count: int
    target_count: int
    base_probability: float = DEFAULT_BASE_PROBABILITY
    ancestry_exponent: float = DEFAULT_ANCESTRY_EXPONENT
    ancestry_weighting: bool = True
    max_cycles: int = DEFAULT_MAX_CYCLES

    def __post_init__(self) -> None:
        if not (0.0 < self.base_probability <= 1.0):
            raise ValueError(f"base_probability must be in (0, 1], got {self.base_probability}")
        if self.ancestry_exponent < 0.0:
            raise ValueError(f"ancestry_exponent must be >= 0, got {self.ancestry_exponent}")
        if not (0 < self.target_count < self.initial_count):
            raise ValueError(
                f"need 0 < target_count < initial_count, got "
                f"target={self.target_count}, initial={self.initial_count}"
            )
        if self.max_cycles <= 0:
            raise ValueError(f"max_cycles must be positive, got {self.max_cycles}")

    def with_overrides(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class Agent:
    """A live market entity: an opaque id plus its accumulated ancestry."""

    id: int
    ancestry: int


class Population:
    """Live agents keyed by id, plus the count of agents absorbed so far.

    Backed by flat arrays so cycles stay cheap at tens of thousands of
    agents: ``ancestry[id]`` holds each agent's lineage size, an ``alive``
    mask supports the per-cycle selection sweep in ascending id order, and a
    swap-remove array gives O(1) uniform partner draws. ``absorbed_count``
    is a genuine counter (incremented once per executed merger), not derived
    from the live count, so conservation checks are meaningful.
    """

    __slots__ = ("initial_count", "ancestry", "alive", "absorbed_count", "_live", "_pos", "_n_live")

    def __init__(self, initial_count: int):
        if initial_count < 1:
            raise ValueError("initial_count must be >= 1")
        self.initial_count = initial_count
        self.ancestry = np.zeros(initial_count, dtype=np.int64)
        self.alive = np.ones(initial_count, dtype=bool)
        self.absorbed_count = 0
        self._live = np.arange(initial_count, dtype=np.int64)
        self._pos = np.arange(initial_count, dtype=np.int64)
        self._n_live = initial_count

    @property
    def live_count(self) -> int:
        return self._n_live

    def live_ids(self) -> np.ndarray:
        """Ids of live agents in ascending order."""
        return np.flatnonzero(self.alive)

    def live_ancestries(self) -> np.ndarray:
        """Ancestry values of live agents, in ascending id order."""
        return self.ancestry[self.alive]

    def live_agents(self) -> dict[int, Agent]:
        return {int(i): Agent(int(i), int(self.ancestry[i])) for i in self.live_ids()}

    def is_alive(self, agent_id: int) -> bool:
        return bool(self.alive[agent_id])

    def remove(self, agent_id: int) -> None:
        """Remove a live agent (swap-delete from the compact live array)."""
        pos = self._pos[agent_id]
        if pos < 0 or not self.alive[agent_id]:
            raise KeyError(f"agent {agent_id} is not live")
        last = self._n_live - 1
        moved = self._live[last]
        self._live[pos] = moved
        self._pos[moved] = pos
        self._pos[agent_id] = -1
        self._n_live = last
        self.alive[agent_id] = False

    def uniform_partner(self, source_id: int, rng: np.random.Generator) -> int:
        """Uniform draw over live agents excluding ``source_id``.

        Requires at least 2 live agents. Draws one integer in
        [0, live_count - 2]; a hit on the source's slot maps to the last slot.
        """
        n = self._n_live
        j = int(rng.integers(0, n - 1))
        cand = self._live[j]
        if cand == source_id:
            cand = self._live[n - 1]
        return int(cand)

    def check_conservation(self) -> None:
        """Assert the exact bookkeeping laws; raises AssertionError on breach."""
        live = self._n_live
        assert live + self.absorbed_count == self.initial_count, (
            f"live {live} + absorbed {self.absorbed_count} != initial {self.initial_count}"
        )
        total = int(self.ancestry[self.alive].sum())
        assert total == self.absorbed_count, (
            f"sum of live ancestry {total} != absorbed {self.absorbed_count}"
        )


@dataclass(frozen=True)
class CycleStats:
    cycle_index: int
    mergers_executed: int
    live_count_after: int


@dataclass
class SimulationResult:
    """Outcome of one seeded run, replayable bit-exactly from (params, seed)."""

    params: ModelParams
    seed: int
    final_population: Population
    cycles_run: int
    hit_max_cycles: bool
    history: list[CycleStats] | None = None
    events: list[tuple[int, int, int]] | None = None  # (cycle, source, partner)

    def final_ancestries(self) -> np.ndarray:
        return self.final_population.live_ancestries()


@dataclass
class EnsembleSummary:
    """Per-rank / per-bin envelopes of final ancestry across repeated runs.

    ``ranks`` are Zipf ranks (1-based, zero ancestries excluded); at each
    rank the min, max and a configurable percentile band are taken over the
    runs that reach that rank. ``bin_values`` cover every ancestry count
    observed in any run (including 0) with min/max frequency across runs.
    """

    n_runs: int
    band: tuple[float, float]
    ranks: np.ndarray
    rank_min: np.ndarray
    rank_band_low: np.ndarray
    rank_band_high: np.ndarray
    rank_max: np.ndarray
    rank_support: np.ndarray  # runs contributing at each rank
    bin_values: np.ndarray
    bin_freq_min: np.ndarray
    bin_freq_max: np.ndarray
    runs_completed: int
    runs_hit_max_cycles: int


def merger_probability(ancestry: int, params: ModelParams) -> float:
    """Per-cycle probability that an agent with this ancestry starts a merger.

    ``min(1, p * (1 + ancestry)**exponent)`` under ancestry weighting, else
    the constant ``p``. Total on valid params; the clamp keeps the output a
    probability once the weighted value crosses 1.
    """
    if ancestry < 0:
        raise ValueError(f"ancestry must be >= 0, got {ancestry}")
    if not params.ancestry_weighting:
        return params.base_probability
    return min(1.0, params.base_probability * (1.0 + ancestry) ** params.ancestry_exponent)


def _merger_probabilities(ancestries: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorized merger_probability over an ancestry array."""
    if not params.ancestry_weighting:
        return np.full(ancestries.shape, params.base_probability)
    probs = params.base_probability * (1.0 + ancestries.astype(np.float64)) ** params.ancestry_exponent
    return np.minimum(probs, 1.0)


def select_sources(population: Population, params: ModelParams, rng: np.random.Generator) -> np.ndarray:
    """Draw this cycle's merger sources and the order they will act in.

    Each live agent is included independently with its merger probability
    (one uniform per live agent, ascending id order); the selected ids are
    then returned in a uniformly random order.
    """
    if population.live_count == 0:
        raise ValueError("population is empty")
    live = population.live_ids()
    probs = _merger_probabilities(population.ancestry[live], params)
    u = rng.random(live.size)
    chosen = live[u < probs]
    return rng.permutation(chosen)


def execute_cycle(
    population: Population,
    params: ModelParams,
    rng: np.random.Generator,
    cycle_index: int = 0,
    event_log: list[tuple[int, int, int]] | None = None,
) -> CycleStats:
    """Run one merger cycle in place and report what happened.

    Sources act in the permuted order from select_sources. A source that was
    itself absorbed earlier in the cycle forfeits its action; an agent may be
    taken as a partner even if it is a not-yet-acted source. Each merger
    removes the partner and adds ``partner.ancestry + 1`` to the source (the
    partner plus its entire absorbed lineage join the source's lineage).
    """
    sources = select_sources(population, params, rng)
    mergers = 0
    for source in sources:
        source = int(source)
        if not population.alive[source]:
            continue
        if population.live_count <= 1:
            break
        partner = population.uniform_partner(source, rng)
        population.remove(partner)
        population.ancestry[source] += population.ancestry[partner] + 1
        population.absorbed_count += 1
        mergers += 1
        if event_log is not None:
            event_log.append((cycle_index, source, partner))
    return CycleStats(cycle_index, mergers, population.live_count)


def run_simulation(
    params: ModelParams,
    seed: int,
    record_history: bool = True,
    record_events: bool = False,
) -> SimulationResult:
    """Run cycles from a fresh all-zero-ancestry population until the live
    count reaches target_count, or max_cycles is hit (flagged, not raised).
    """
    rng = np.random.default_rng(seed)
    return _run_with_rng(params, seed, rng, record_history, record_events)


def _run_with_rng(
    params: ModelParams,
    seed,
    rng: np.random.Generator,
    record_history: bool,
    record_events: bool,
) -> SimulationResult:
    population = Population(params.initial_count)
    history: list[CycleStats] | None = [] if record_history else None
    events: list[tuple[int, int, int]] | None = [] if record_events else None
    cycles = 0
    while population.live_count > params.target_count and cycles < params.max_cycles:
        stats = execute_cycle(population, params, rng, cycle_index=cycles, event_log=events)
        cycles += 1
        if history is not None:
            history.append(stats)
    hit_max = population.live_count > params.target_count
    return SimulationResult(
        params=params,
        seed=seed,
        final_population=population,
        cycles_run=cycles,
        hit_max_cycles=hit_max,
        history=history,
        events=events,
    )


def run_seed_sequence(master_seed: int, n_runs: int) -> list[np.random.SeedSequence]:
    """Per-run seed sequences: SeedSequence(master_seed).spawn(n_runs).

    Child i equals SeedSequence(master_seed, spawn_key=(i,)), so a single
    run is replayable from (master_seed, i) alone.
    """
    return np.random.SeedSequence(master_seed).spawn(n_runs)


def _ensemble_worker(args) -> tuple[np.ndarray, bool]:
    params, master_seed, run_index = args
    ss = np.random.SeedSequence(master_seed, spawn_key=(run_index,))
    rng = np.random.default_rng(ss)
    result = _run_with_rng(params, master_seed, rng, record_history=False, record_events=False)
    return result.final_ancestries(), result.hit_max_cycles


def run_ensemble(
    params: ModelParams,
    n_runs: int,
    master_seed: int,
    band: tuple[float, float] = (5.0, 95.0),
    workers: int | None = None,
) -> EnsembleSummary:
    """Run n_runs independent simulations and aggregate their envelopes.

    Per-run seeds derive from (master_seed, run index); runs execute
    sequentially or across ``workers`` processes, and the summary is the
    same either way (aggregation is keyed by run index).
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    jobs = [(params, master_seed, i) for i in range(n_runs)]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_ensemble_worker, jobs, chunksize=max(1, n_runs // (workers * 4))))
    else:
        outcomes = [_ensemble_worker(job) for job in jobs]
    ancestry_sets = [a for a, _ in outcomes]
    hit_flags = [flag for _, flag in outcomes]
    return summarize_runs(ancestry_sets, band=band, hit_max_flags=hit_flags)


def summarize_runs(
    final_ancestries: list[np.ndarray],
    band: tuple[float, float] = (5.0, 95.0),
    hit_max_flags: list[bool] | None = None,
) -> EnsembleSummary:
    """Pure reduction of per-run final ancestries into an EnsembleSummary.

    Invariant under permutation of the runs list.
    """
    n_runs = len(final_ancestries)
    if n_runs < 1:
        raise ValueError("need at least one run")
    lo, hi = band
    if not (0.0 <= lo <= hi <= 100.0):
        raise ValueError(f"band percentiles must satisfy 0 <= low <= high <= 100, got {band}")
    hit_max_flags = hit_max_flags if hit_max_flags is not None else [False] * n_runs

    # Rank envelope over Zipf series (descending positive ancestries).
    sorted_runs = []
    for values in final_ancestries:
        positive = np.sort(values[values > 0])[::-1]
        sorted_runs.append(positive.astype(np.int64))
    max_len = max((s.size for s in sorted_runs), default=0)
    ranks = np.arange(1, max_len + 1, dtype=np.int64)
    rank_min = np.empty(max_len, dtype=np.int64)
    rank_max = np.empty(max_len, dtype=np.int64)
    rank_lo = np.empty(max_len, dtype=np.float64)
    rank_hi = np.empty(max_len, dtype=np.float64)
    support = np.empty(max_len, dtype=np.int64)
    if max_len:
        # Matrix padded with NaN so percentiles ignore runs short of the rank.
        mat = np.full((n_runs, max_len), np.nan)
        for i, s in enumerate(sorted_runs):
            mat[i, : s.size] = s
        support = np.sum(~np.isnan(mat), axis=0).astype(np.int64)
        rank_min = np.nanmin(mat, axis=0).astype(np.int64)
        rank_max = np.nanmax(mat, axis=0).astype(np.int64)
        rank_lo = np.nanpercentile(mat, lo, axis=0)
        rank_hi = np.nanpercentile(mat, hi, axis=0)

    # Distribution envelope: per ancestry value, min/max frequency across runs.
    vmax = max((int(v.max()) if v.size else 0 for v in final_ancestries), default=0)
    bin_values = np.arange(vmax + 1, dtype=np.int64)
    freq = np.zeros((n_runs, vmax + 1), dtype=np.int64)
    for i, values in enumerate(final_ancestries):
        counts = np.bincount(values.astype(np.int64), minlength=vmax + 1)
        freq[i, :] = counts
    bin_freq_min = freq.min(axis=0)
    bin_freq_max = freq.max(axis=0)

    n_hit = sum(bool(f) for f in hit_max_flags)
    return EnsembleSummary(
        n_runs=n_runs,
        band=(float(lo), float(hi)),
        ranks=ranks,
        rank_min=rank_min,
        rank_band_low=rank_lo,
        rank_band_high=rank_hi,
        rank_max=rank_max,
        rank_support=support,
        bin_values=bin_values,
        bin_freq_min=bin_freq_min,
        bin_freq_max=bin_freq_max,
        runs_completed=n_runs - n_hit,
        runs_hit_max_cycles=n_hit,
    )
