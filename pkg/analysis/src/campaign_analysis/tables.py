"""Markdown comparison table of per-cell KPI medians."""

import logging

from .index import CampaignIndex

log = logging.getLogger(__name__)

# Fixed mu-0 baseline medians per (policy family, mode), shown in a static
# column so simulated numbers can be eyeballed against the expected scale.
# Policy family comes from the cell's own t2 policy: fixed window duration
# ("ms") versus fixed slot count ("slots").
REFERENCE_AT_MU0 = {
    ("ms", "sensing"): {"simtx_pct": 5.0, "ideal_pct": 58.4},
    ("ms", "no_sensing"): {"simtx_pct": 18.0, "ideal_pct": 6.8},
    ("slots", "sensing"): {"simtx_pct": 7.0, "ideal_pct": 50.0},
    ("slots", "no_sensing"): {"simtx_pct": 20.0, "ideal_pct": 23.3},
}

HEADER = ("| window | mu | mode | pir median [ms] | ideal share [%] | "
          "simtx median [%] | ref simtx@mu0 [%] | ref ideal@mu0 [%] |")
RULE = "|---|---|---|---|---|---|---|---|"


def _policy_family(cell) -> str | None:
    try:
        return cell.summary["config"]["pool"]["t2_policy"]["mode"]
    except (KeyError, TypeError):
        return None


def _fmt(value, spec) -> str:
    if value is None:
        return "n/a"
    return format(value, spec)


def _get(summary: dict, *path):
    node = summary
    for key in path:
        if not isinstance(node, dict) or key not in node:
            return None
        node = node[key]
    return node


def compare_table(index: CampaignIndex) -> str:
    """One row per cell, sorted by (window, mu, mode); gaps render as n/a."""
    lines = [HEADER, RULE]
    for cell in index.sorted_cells():
        k = cell.key
        pir_med = _get(cell.summary, "kpis", "pir", "median_ms")
        ideal = _get(cell.summary, "kpis", "pir", "ideal_fraction")
        simtx = _get(cell.summary, "kpis", "simtx", "median_pct")
        ref = {}
        if k.mu == 0:
            family = _policy_family(cell)
            ref = REFERENCE_AT_MU0.get((family, k.mode), {})
        lines.append(
            f"| {k.window} | {k.mu} | {k.mode} "
            f"| {_fmt(pir_med, '.3f')} "
            f"| {_fmt(None if ideal is None else 100.0 * ideal, '.1f')} "
            f"| {_fmt(simtx, '.3f')} "
            f"| {_fmt(ref.get('simtx_pct'), '.1f')} "
            f"| {_fmt(ref.get('ideal_pct'), '.1f')} |")
    return "\n".join(lines)
