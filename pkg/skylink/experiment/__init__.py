from .rng import DropStreams, substream
from .drop import DropResult, DropSimulator, LinkBudget, LinkState, run_drop, run_drops
from .stats import AggregateStats, aggregate_stats, percentile
from .sweep import SweepAnalyzer, SweepGrid, LinearFit, best_apertures, compare, run_sweep
from .heatmap import HeatmapAnalyzer, HeatmapGrid, hotspot_report, sample_heatmap
