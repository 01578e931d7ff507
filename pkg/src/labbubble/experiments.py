"""Dispatch a validated experiment config to an engine and lay out result tables."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .config import ExperimentConfig, Model
from .factor import factor_price_paths
from .hetero import hetero_price_path, two_asset_hetero_paths
from .core import rd_measure
from .hetero import StrategyParams
from .homogeneous import average_price_path
from .mc import SimulationConfig, run_sessions
from .mc.oracle import noise_buyer_probabilities

BASE_COLUMNS = ["run_id", "t", "fv_1", "price_1", "bid_1", "ask_1", "rd_1"]
ASSET2_COLUMNS = ["fv_2", "price_2", "bid_2", "ask_2", "rd_2"]
EVENT_COLUMNS = ["event", "imbalance", "cum_imbalance"]
MC_COLUMNS = ["run_id", "t", "fv_1", "price_1", "price_se_1", "bid_1", "bid_se_1", "ask_1", "ask_se_1",
              "quote_1", "quote_se_1", "analytic_quote_1", "buyer_fraction_1", "buyer_fraction_se_1",
              "pi_1", "session_mid_1", "session_mid_se_1", "imbalance_price_1", "imbalance_price_se_1",
              "excluded_1"]


def columns(model: Model, two_assets: bool = False) -> list[str]:
    if model is Model.MONTE_CARLO:
        cols = list(MC_COLUMNS)
        if two_assets:
            cols += [c.replace("_1", "_2") for c in MC_COLUMNS[2:] if c not in ("analytic_quote_1",)]
        return cols
    cols = list(BASE_COLUMNS)
    if model in (Model.FACTOR_TWO_ASSET, Model.HETERO_TWO_ASSET):
        cols += ASSET2_COLUMNS
    cols += EVENT_COLUMNS
    if model is Model.HETERO_TWO_ASSET:
        cols += ["event_2", "imbalance_2"]
    if model is Model.HOMOGENEOUS:
        cols += ["quote_1", "pi_1", "equilibrium_1"]
    return cols


def _path_rows(run_id, p1, p2=None, events=None, imb=None, events_2=None, imb_2=None):
    cum = np.cumsum(imb if imb is not None else p1.imbalance)
    rows = []
    for k in range(p1.T):
        row = {"run_id": run_id, "t": k + 1, "fv_1": p1.fv[k], "price_1": p1.price[k], "bid_1": p1.bid[k],
               "ask_1": p1.ask[k], "rd_1": p1.rd_t[k]}
        if p2 is not None:
            row.update(fv_2=p2.fv[k], price_2=p2.price[k], bid_2=p2.bid[k], ask_2=p2.ask[k], rd_2=p2.rd_t[k])
        row["event"] = events[k].value if events else ""
        row["imbalance"] = p1.imbalance[k]
        row["cum_imbalance"] = cum[k]
        if events_2 is not None:
            row["event_2"] = events_2[k].value
            row["imbalance_2"] = imb_2[k]
        rows.append(row)
    return rows


def run_experiment(cfg: ExperimentConfig, run_id: int = 0, backend=None) -> tuple[list[dict], dict]:
    """Rows of the result table and the summary RD values of one cell."""
    T = cfg.market.periods
    assets = cfg.market.assets
    if cfg.model is Model.HOMOGENEOUS:
        res = average_price_path(assets[0], T)
        rows = _path_rows(run_id, res.path)
        for k, row in enumerate(rows):
            row.update(quote_1=res.quote[k], pi_1=res.buyer_prob[k], equilibrium_1=int(res.in_equilibrium[k]))
        return rows, {"rd_1": res.path.rd}
    if cfg.model is Model.FACTOR_TWO_ASSET:
        res = factor_price_paths(assets[0], assets[1], cfg.population, T)
        return _path_rows(run_id, res.path_1, res.path_2), {"rd_1": res.path_1.rd, "rd_2": res.path_2.rd}
    if cfg.model is Model.HETERO_SINGLE:
        res = hetero_price_path(assets[0], cfg.population, cfg.strategy, T)
        return _path_rows(run_id, res.path, events=res.events), {"rd_1": res.path.rd}
    if cfg.model is Model.HETERO_TWO_ASSET:
        res, run_1, events_2 = two_asset_hetero_paths(assets[0], assets[1], cfg.population, cfg.strategy,
                                                      cfg.strategy_2, cfg.asset2_mode, T)
        rows = _path_rows(run_id, res.path_1, res.path_2, run_1.events, None, events_2, res.path_2.imbalance)
        return rows, {"rd_1": res.path_1.rd, "rd_2": res.path_2.rd}
    return _monte_carlo(cfg, run_id, backend)


def _monte_carlo(cfg: ExperimentConfig, run_id: int, backend) -> tuple[list[dict], dict]:
    sim = SimulationConfig(cfg.market, cfg.population, cfg.sessions, cfg.seed,
                           cfg.strategy or StrategyParams(), cfg.anchor, cfg.funding)
    agg = run_sessions(sim, backend)
    T = cfg.market.periods
    analytic = average_price_path(cfg.market.assets[0], T).quote
    fv = [a.fundamental_values(T) for a in cfg.market.assets]
    rows = []
    summary = {f"rd_{i + 1}": rd_measure(agg.price[:, i], fv[i])[1] for i in range(len(fv))}
    pis = [noise_buyer_probabilities(a, T, i) for i, a in enumerate(cfg.market.assets)]
    for k in range(T):
        row = {"run_id": run_id, "t": k + 1}
        for i in range(len(cfg.market.assets)):
            n = i + 1
            row.update({
                f"fv_{n}": fv[i][k], f"price_{n}": agg.price[k, i], f"price_se_{n}": agg.price_se[k, i],
                f"bid_{n}": agg.bid[k, i], f"bid_se_{n}": agg.bid_se[k, i],
                f"ask_{n}": agg.ask[k, i], f"ask_se_{n}": agg.ask_se[k, i],
                f"quote_{n}": agg.quote[k, i], f"quote_se_{n}": agg.quote_se[k, i],
                f"buyer_fraction_{n}": agg.buyer_fraction[k, i],
                f"buyer_fraction_se_{n}": agg.buyer_fraction_se[k, i], f"pi_{n}": pis[i][k],
                f"session_mid_{n}": agg.session_mid[k, i], f"session_mid_se_{n}": agg.session_mid_se[k, i],
                f"imbalance_price_{n}": agg.imbalance_price[k, i],
                f"imbalance_price_se_{n}": agg.imbalance_price_se[k, i],
                f"excluded_{n}": int(agg.excluded[k, i]),
            })
        row["analytic_quote_1"] = analytic[k]
        rows.append(row)
    return rows, summary


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        return format(float(v), ".12g")
    return str(v)


def render_table(rows: Iterable[dict], cols: list[str], delimiter: str = ",") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([format_value(row.get(c, "")) for c in cols])
    return buf.getvalue()


def write_table(path: str | Path, rows: Iterable[dict], cols: list[str], delimiter: str = ",") -> None:
    Path(path).write_text(render_table(rows, cols, delimiter))
