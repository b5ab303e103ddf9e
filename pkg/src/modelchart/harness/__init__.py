"""Experiment harness: config, sweeps, reports, renders and the CLI."""
from .config import ALGORITHMS, ExperimentConfig, load_config, make_config, with_overrides
from .render import render_chart_svg, svg_scatter
from .runner import EvalReport, MetricRow, SkippedCell, SummaryRow, TimingRow, run_experiment
