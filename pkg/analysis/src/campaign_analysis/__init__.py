"""Post-processing for exported sidelink campaign directories."""

from .index import CampaignError, CampaignIndex, Cell, CellKey
from .plots import build_figure, plot_cdfs
from .tables import compare_table

__all__ = ["CampaignError", "CampaignIndex", "Cell", "CellKey",
           "build_figure", "plot_cdfs", "compare_table"]

__version__ = "0.1.0"
