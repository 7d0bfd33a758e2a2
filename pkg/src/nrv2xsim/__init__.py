"""Discrete-event simulator for sidelink autonomous resource selection.

Models the sensing-based semi-persistent scheduling procedure on a TDD
sidelink resource pool, sweeps numerology and selection-window policies, and
reports packet inter-reception and simultaneous-transmission statistics for a
highway platooning layout.
"""

from .config import ConfigError, RunConfig, config_from_dict, load_config
from .engine import DropResult, run_cell, run_drop, write_cell_outputs

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "RunConfig",
    "config_from_dict",
    "load_config",
    "DropResult",
    "run_cell",
    "run_drop",
    "write_cell_outputs",
    "__version__",
]
