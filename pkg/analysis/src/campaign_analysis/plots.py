"""CDF figures: one per window policy, six curves (three numerologies x two modes)."""

import logging
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .index import CampaignError, CampaignIndex

log = logging.getLogger(__name__)

MUS = (0, 1, 2)
MODES = ("sensing", "no_sensing")

# fixed style so re-rendering a campaign reproduces the image byte for byte
MU_COLORS = {0: "#1f77b4", 1: "#d62728", 2: "#2ca02c"}
MODE_STYLE = {"sensing": "-", "no_sensing": "--"}
X_LABEL = {"pir": "packet inter-reception [ms]",
           "simtx": "simultaneous transmissions [%]"}


def _check_monotone(curve: list[tuple[float, float]], what: str) -> None:
    for (x0, p0), (x1, p1) in zip(curve, curve[1:]):
        if x1 < x0 or p1 < p0:
            raise CampaignError(f"{what}: CDF not nondecreasing near x={x1}")


def build_figure(index: CampaignIndex, window: str, kpi: str):
    """One policy's overlay. Warns and skips missing cells, never fabricates."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    n_curves = 0
    for mu in MUS:
        for mode in MODES:
            cell = index.get(window, mu, mode)
            if cell is None:
                log.warning("missing cell (%s, mu=%d, %s), skipping", window, mu, mode)
                continue
            curve = cell.load_cdf(kpi)
            _check_monotone(curve, f"{cell.directory}/{kpi}")
            if not curve:
                log.warning("empty CDF for (%s, mu=%d, %s), skipping", window, mu, mode)
                continue
            xs = [v for v, _ in curve]
            ps = [p for _, p in curve]
            label = f"mu-{mu} {'sensing' if mode == 'sensing' else 'no sensing'}"
            ax.step(xs, ps, where="post", label=label,
                    color=MU_COLORS[mu], linestyle=MODE_STYLE[mode])
            n_curves += 1
    ax.set_xlabel(X_LABEL[kpi])
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title(f"{kpi} CDF, window {window}")
    fig.tight_layout()
    return fig, n_curves


def plot_cdfs(index: CampaignIndex, kpi: str, out_image) -> list[Path]:
    """Render every window policy in the index; returns the written paths.

    A single-policy index writes exactly out_image; with several policies the
    policy name is folded into the file name (stem_policy.suffix).
    """
    if kpi not in X_LABEL:
        raise CampaignError(f"unknown kpi {kpi!r}")
    out = Path(out_image)
    windows = index.windows
    written = []
    for window in windows:
        fig, n = build_figure(index, window, kpi)
        path = out if len(windows) == 1 else \
            out.with_name(f"{out.stem}_{window}{out.suffix or '.png'}")
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path)
        plt.close(fig)
        log.info("wrote %s (%d curves)", path, n)
        written.append(path)
    return written
