"""Secrecy performance of artificial-noise-aided multi-cell downlinks.

Closed-form outage and throughput evaluators with an independent Monte Carlo
simulator for cross-checking them.
"""
from .core import (CampbellMode, ConfigError, OutageConstraints, SystemConfig,
                   dbm_to_linear, linear_to_dbm, thinned_bs_intensity)

__version__ = "0.1.0"

__all__ = ["CampbellMode", "ConfigError", "OutageConstraints", "SystemConfig",
           "dbm_to_linear", "linear_to_dbm", "thinned_bs_intensity", "__version__"]
