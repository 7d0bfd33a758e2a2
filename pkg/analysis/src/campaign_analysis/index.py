"""Discovery of campaign cells from a directory of exported runs.

The simulator writes one directory per cell containing summary.json,
pir_cdf.csv and simtx_cdf.csv. This module walks a root, reads only those
files, and keys each cell by (window, mu, mode). No simulator code is
imported anywhere in this package; the CSV/JSON files are the contract.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

CDF_FILES = {"pir": "pir_cdf.csv", "simtx": "simtx_cdf.csv"}


class CampaignError(Exception):
    pass


@dataclass(frozen=True, order=True)
class CellKey:
    window: str
    mu: int
    mode: str


@dataclass(frozen=True)
class Cell:
    key: CellKey
    directory: Path
    summary: dict

    def cdf_path(self, kpi: str) -> Path:
        try:
            return self.directory / CDF_FILES[kpi]
        except KeyError:
            raise CampaignError(f"unknown kpi {kpi!r}, expected one of {sorted(CDF_FILES)}") \
                from None

    def load_cdf(self, kpi: str) -> list[tuple[float, float]]:
        path = self.cdf_path(kpi)
        rows = []
        with open(path) as f:
            header = f.readline().strip()
            if header != "value,cdf":
                raise CampaignError(f"{path}: unexpected header {header!r}")
            for ln, line in enumerate(f, start=2):
                try:
                    v, p = line.strip().split(",")
                    rows.append((float(v), float(p)))
                except ValueError:
                    raise CampaignError(f"{path}:{ln}: bad row {line!r}") from None
        return rows


def _key_from_summary(summary: dict, where: Path) -> CellKey:
    labels = summary.get("labels") or {}
    cfg = summary.get("config") or {}
    try:
        mu = int(labels.get("mu", cfg["mu"]))
        mode = str(labels.get("mode", cfg["mac"]["mode"]))
    except (KeyError, TypeError, ValueError):
        raise CampaignError(f"{where}: cannot determine (mu, mode)") from None
    window = labels.get("window")
    if window is None:
        # derive a stable name from the window policy
        try:
            pol = cfg["pool"]["t2_policy"]
            window = (f"time{pol['value']}ms" if pol["mode"] == "ms"
                      else f"slots{pol['value']}")
        except (KeyError, TypeError):
            raise CampaignError(f"{where}: cannot determine window policy") from None
    return CellKey(str(window), mu, mode)


class CampaignIndex:
    """All cells below a root directory, keyed (window, mu, mode)."""

    def __init__(self, cells: dict[CellKey, Cell]):
        self.cells = cells

    @classmethod
    def from_directory(cls, root) -> "CampaignIndex":
        root = Path(root)
        if not root.is_dir():
            raise CampaignError(f"not a directory: {root}")
        cells: dict[CellKey, Cell] = {}
        for summary_path in sorted(root.glob("**/summary.json")):
            try:
                summary = json.loads(summary_path.read_text())
            except json.JSONDecodeError as e:
                raise CampaignError(f"{summary_path}: {e}") from None
            key = _key_from_summary(summary, summary_path)
            if key in cells:
                raise CampaignError(
                    f"duplicate cell {key}: {summary_path.parent} and "
                    f"{cells[key].directory}")
            cell = Cell(key, summary_path.parent, summary)
            for kpi in CDF_FILES:
                if not cell.cdf_path(kpi).is_file():
                    raise CampaignError(f"{cell.directory}: missing {CDF_FILES[kpi]}")
            cells[key] = cell
        if not cells:
            raise CampaignError(f"no summary.json found under {root}")
        log.info("indexed %d cells under %s", len(cells), root)
        return cls(cells)

    @property
    def windows(self) -> list[str]:
        return sorted({k.window for k in self.cells})

    def get(self, window: str, mu: int, mode: str) -> Cell | None:
        return self.cells.get(CellKey(window, mu, mode))

    def sorted_cells(self) -> list[Cell]:
        return [self.cells[k] for k in sorted(self.cells)]
