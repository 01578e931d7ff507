"""``labbubble`` command line.

Exit codes: 0 success, 2 validation failure, 3 runtime degeneracy. Failures
print one JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, Model, RawConfig, Violation, apply_overrides, expand, load, validate
from .core import MarketError
from .experiments import columns, render_table, run_experiment

EXIT_OK, EXIT_INVALID, EXIT_DEGENERATE = 0, 2, 3


def _error(kind: str, **payload) -> None:
    sys.stderr.write(json.dumps({"status": kind, **payload}, sort_keys=True) + "\n")


def _load(args) -> RawConfig:
    overrides = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        overrides.append(f"simulation.seed={args.seed}")
    if getattr(args, "sessions", None) is not None:
        overrides.append(f"simulation.sessions={args.sessions}")
    if getattr(args, "force_model", None):
        overrides.append(f"market.model={args.force_model}")
    return apply_overrides(load(args.config), overrides)


def _destination(args, cfg) -> Optional[Path]:
    if args.out:
        return Path(args.out)
    return Path(cfg.output_path) if cfg.output_path else None


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def grid_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}.grid{path.suffix or '.csv'}")


def _run_cells(cells, backend):
    """Run every cell; with a sweep a failing cell is flagged instead of aborting."""
    rows, grid = [], []
    sweeping = bool(cells[0][0])
    for run_id, (params, cfg) in enumerate(cells):
        try:
            cell_rows, summary = run_experiment(cfg, run_id, backend)
            err = ""
        except MarketError as exc:
            if not sweeping:
                raise
            cell_rows, summary, err = [], {}, f"{type(exc).__name__}: {exc}"
        for r in cell_rows:
            r.update(params)
        rows.extend(cell_rows)
        grid.append({**params, "rd_1": summary.get("rd_1", math.nan), "rd_2": summary.get("rd_2", math.nan),
                     "error": err})
    return rows, grid


def _table_columns(cfg, axes) -> list[str]:
    return columns(cfg.model, len(cfg.market.assets) > 1) + list(axes)


def _grid_columns(cfg, axes) -> list[str]:
    two = len(cfg.market.assets) > 1
    return list(axes) + ["rd_1"] + (["rd_2"] if two else []) + ["error"]


def cmd_validate(args) -> int:
    raw = _load(args)
    problems = validate(raw)
    report = {"config": str(args.config), "violations": [v.as_dict() for v in problems]}
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_INVALID if problems else EXIT_OK


def cmd_run(args) -> int:
    cells = expand(_load(args))
    cfg = cells[0][1]
    axes = list(cells[0][0])
    delim = "\t" if cfg.output_format == "tsv" else ","
    rows, grid = _run_cells(cells, args.backend)
    dest = _destination(args, cfg)
    _emit(render_table(rows, _table_columns(cfg, axes), delim), dest)
    if axes and dest is not None:
        _emit(render_table(grid, _grid_columns(cfg, axes), delim), grid_path(dest))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cells = expand(_load(args))
    cfg = cells[0][1]
    axes = list(cells[0][0])
    if not axes:
        raise ConfigError([_no_axes()])
    delim = "\t" if cfg.output_format == "tsv" else ","
    _, grid = _run_cells(cells, args.backend)
    _emit(render_table(grid, _grid_columns(cfg, axes), delim), _destination(args, cfg))
    return EXIT_OK


def _no_axes() -> Violation:
    return Violation("sweep", "sweep needs at least one axis (a [sweep] section or --set sweep.<param>=v1,v2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="labbubble", description="Run, sweep and validate market experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, run=True):
        p.add_argument("config", help="experiment config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a dotted parameter")
        if run:
            p.add_argument("--out", help="output file (default: output.path, else stdout)")
            p.add_argument("--seed", type=int)
            p.add_argument("--sessions", type=int)
            p.add_argument("--backend", choices=("numba", "numpy"), help="Monte Carlo kernel")

    common(sub.add_parser("validate", help="check a config without running it"), run=False)
    common(sub.add_parser("run", help="run a config and write its result table"))
    common(sub.add_parser("sweep", help="run a sweep and write only its grid file"))
    sim = sub.add_parser("simulate", help="run the Monte Carlo oracle on a config's market")
    common(sim)
    sim.set_defaults(force_model=Model.MONTE_CARLO.value)
    return parser


COMMANDS = {"validate": cmd_validate, "run": cmd_run, "sweep": cmd_sweep, "simulate": cmd_run}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        _error("invalid", violations=[v.as_dict() for v in exc.violations])
        return EXIT_INVALID
    except MarketError as exc:
        _error("degenerate", error=type(exc).__name__, message=str(exc))
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
