"""Model-based channel charting: CSI simulation, estimators, baselines and metrics."""

__version__ = "0.1.0"
