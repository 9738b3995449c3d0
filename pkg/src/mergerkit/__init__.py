"""mergerkit: ancestry-weighted merger simulation and merger-genealogy analysis."""

__version__ = "0.1.0"

from .analysis import (
    BalancePanel,
    GdpSeries,
    ancestry_distribution,
    distribution_envelope,
    market_share_percentiles,
    organic_growth,
    rank_merger_forecast,
    zipf_series,
    zipf_slope,
)
from .genealogy import (
    GenealogyForest,
    MergerEvent,
    accumulated_ancestry_series,
    ancestry_count,
    ancestry_table,
    build_forest,
)
from .model import (
    Agent,
    CycleStats,
    EnsembleSummary,
    ModelParams,
    Population,
    SimulationResult,
    execute_cycle,
    merger_probability,
    run_ensemble,
    run_simulation,
    select_sources,
)

__all__ = [
    "__version__",
    "Agent",
    "BalancePanel",
    "CycleStats",
    "EnsembleSummary",
    "GdpSeries",
    "GenealogyForest",
    "MergerEvent",
    "ModelParams",
    "Population",
    "SimulationResult",
    "accumulated_ancestry_series",
    "ancestry_count",
    "ancestry_distribution",
    "ancestry_table",
    "build_forest",
    "distribution_envelope",
    "execute_cycle",
    "market_share_percentiles",
    "merger_probability",
    "organic_growth",
    "rank_merger_forecast",
    "run_ensemble",
    "run_simulation",
    "select_sources",
    "zipf_series",
    "zipf_slope",
]
