"""Experiment runner: configs, potential families, reports and the CLI."""

from .config import ConfigError, RunConfig, default_config
from .experiments import EXPERIMENTS
from .report import ExperimentReport

__all__ = ["ConfigError", "EXPERIMENTS", "ExperimentReport", "RunConfig", "default_config"]
