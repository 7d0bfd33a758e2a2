"""Command line front end.

simulate   one configuration, write samples/CDF/summary to --out
campaign   every cell of a matrix file, one output directory per cell
calibrate  interference-free link margins for a configuration's geometry
"""

import argparse
import logging
import sys
from pathlib import Path

import yaml

from .config import ConfigError, load_config
from .engine import run_cell, write_cell_outputs
from .phy import link_margin_db
from .scenario import build_layout

log = logging.getLogger(__name__)


def _parse_set(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        # YAML scalar parsing gives ints/floats/bools the same way the file would.
        out[key.strip()] = yaml.safe_load(raw)
    return out


def _print_cell(name: str, summary: dict) -> None:
    pir = summary["kpis"]["pir"]
    simtx = summary["kpis"]["simtx"]
    print(f"{name}: pir median {pir['median_ms']:.3f} ms | "
          f"ideal fraction {pir['ideal_fraction']:.4f} | "
          f"simtx median {simtx['median_pct']:.3f} % | "
          f"samples {pir['n_samples']}")


def cmd_simulate(args) -> int:
    overrides = _parse_set(args.set)
    if args.drops is not None:
        overrides["n_drops"] = args.drops
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = load_config(args.config, overrides=overrides)
    drops = run_cell(cfg, parallel=args.parallel)
    summary = write_cell_outputs(Path(args.out), cfg, drops)
    _print_cell(Path(args.out).name, summary)
    return 0


def cmd_campaign(args) -> int:
    matrix_path = Path(args.matrix)
    try:
        matrix = yaml.safe_load(matrix_path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"matrix file not found: {matrix_path}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {matrix_path}: {e}") from None
    if not isinstance(matrix, dict) or "base" not in matrix or "cells" not in matrix:
        raise ConfigError(f"{matrix_path}: matrix needs 'base' and 'cells'")

    base = Path(matrix["base"])
    if not base.is_absolute():
        base = matrix_path.parent / base
    out_root = Path(args.out)
    for cell in matrix["cells"]:
        name = cell.get("name")
        if not name:
            raise ConfigError(f"{matrix_path}: every cell needs a name")
        cfg = load_config(base, overrides=dict(cell.get("overrides") or {}))
        drops = run_cell(cfg, parallel=args.parallel)
        summary = write_cell_outputs(out_root / name, cfg, drops,
                                     labels=dict(cell.get("labels") or {}))
        _print_cell(name, summary)
    return 0


def cmd_calibrate(args) -> int:
    cfg = load_config(args.config)
    layout = build_layout(cfg.scenario)
    distances = sorted({round(layout.distance_m(t, u), 3)
                        for t in layout.transmitters
                        for u in layout.ues if u.ue_id != t.ue_id})
    print(f"mu={cfg.mu}  subchannel={cfg.pool.subchannel_size_rbs} RBs")
    print("distance_m  pssch_margin_db  pscch_margin_db")
    for d in distances:
        m_data = link_margin_db(d, cfg.pool.subchannel_size_rbs, cfg.mu, cfg.phy, "pssch")
        m_ctrl = link_margin_db(d, cfg.pool.subchannel_size_rbs, cfg.mu, cfg.phy, "pscch")
        print(f"{d:10.3f}  {m_data:15.2f}  {m_ctrl:15.2f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrv2xsim",
                                     description="Sidelink autonomous-mode simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configuration")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--drops", type=int, default=None, help="override drop count")
    p.add_argument("--seed", type=int, default=None, help="override master seed")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="dotted config override, repeatable")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("campaign", help="run every cell of a matrix file")
    p.add_argument("--matrix", required=True, help="YAML matrix (base + cells)")
    p.add_argument("--out", required=True, help="root output directory")
    p.add_argument("--parallel", type=int, default=1, help="worker processes per cell")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("calibrate", help="print link margins for a configuration")
    p.add_argument("--config", required=True, help="YAML run configuration")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
