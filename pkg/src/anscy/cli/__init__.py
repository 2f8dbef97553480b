"""Experiment presets, configuration files and the ``anscy`` command."""
from .config_io import dump_config, load_config, parse_overrides, save_config
from .presets import PRESETS, ExperimentSpec
from .runner import ExperimentResult, run_experiment, with_overrides

__all__ = ["PRESETS", "ExperimentResult", "ExperimentSpec", "dump_config", "load_config",
           "parse_overrides", "run_experiment", "save_config", "with_overrides"]
