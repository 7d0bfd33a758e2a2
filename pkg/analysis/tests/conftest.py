"""Fabricated campaign trees for the analysis tests."""

import json

import pytest

WINDOWS = ("time16ms", "slots33")
MODES = ("sensing", "no_sensing")
POLICY_OF = {"time16ms": {"mode": "ms", "value": 16},
             "slots33": {"mode": "slots", "value": 33}}


def write_cell(root, name, window, mu, mode, pir_rows, simtx_rows,
               pir_median=100.0, ideal=0.5, simtx_median=5.0, labels=True):
    d = root / name
    d.mkdir(parents=True)
    summary = {
        "labels": {"window": window, "mu": mu, "mode": mode} if labels else {},
        "config": {"mu": mu, "mac": {"mode": mode},
                   "pool": {"t2_policy": POLICY_OF[window]}},
        "kpis": {"pir": {"median_ms": pir_median, "ideal_fraction": ideal,
                         "n_samples": len(pir_rows), "starved_pairs": 0},
                 "simtx": {"median_pct": simtx_median, "n_drops": len(simtx_rows),
                           "median_pct_resource": 0.0}},
        "counters": {"generated": 100, "delivered": 90, "lost": 10, "in_flight": 0},
    }
    (d / "summary.json").write_text(json.dumps(summary, indent=2))
    for fname, rows in (("pir_cdf.csv", pir_rows), ("simtx_cdf.csv", simtx_rows)):
        lines = ["value,cdf"] + [f"{v:.6f},{p:.9f}" for v, p in rows]
        (d / fname).write_text("\n".join(lines) + "\n")
    return d


def default_rows(mu, kind):
    # small well-formed CDFs, distinct per mu so curves differ
    if kind == "pir":
        return [(100.0, 0.4 + 0.1 * mu), (200.0, 0.8), (300.0, 1.0)]
    return [(float(mu + 1), 0.5), (float(10 + mu), 1.0)]


@pytest.fixture
def full_campaign(tmp_path):
    """Both policies x 3 numerologies x 2 modes: the complete 12-cell tree."""
    root = tmp_path / "campaign"
    for window in WINDOWS:
        for mu in (0, 1, 2):
            for mode in MODES:
                write_cell(root, f"{window}_mu{mu}_{mode}", window, mu, mode,
                           default_rows(mu, "pir"), default_rows(mu, "simtx"),
                           pir_median=100.0 + mu, ideal=0.4 + 0.1 * mu,
                           simtx_median=10.0 - mu)
    return root


@pytest.fixture
def single_policy_campaign(tmp_path):
    root = tmp_path / "one"
    for mu in (0, 1, 2):
        for mode in MODES:
            write_cell(root, f"time16ms_mu{mu}_{mode}", "time16ms", mu, mode,
                       default_rows(mu, "pir"), default_rows(mu, "simtx"))
    return root
