"""Experiment configuration files.

A config is an INI-style file with the sections ``market``, ``asset.1``,
``asset.2``, ``population``, ``strategy``, ``strategy.2``, ``simulation``,
``sweep`` and ``output``. Sweep keys are dotted parameter names
(``asset.1.kappa``) mapped to comma-separated values. ``--set`` overrides
use the same dotted names.
"""

from __future__ import annotations

import configparser
import enum
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .core import (
    HOLDING_COST_DIVIDENDS,
    HOLDING_COST_TERMINAL_VALUE,
    SPECULATIVE_DIVIDENDS,
    SPECULATIVE_TERMINAL_VALUE,
    AssetSpec,
    MarketError,
    MarketSpec,
)
from .factor import FactorPopulation
from .hetero import Asset2Mode, HeteroPopulation, StrategyParams


class Model(str, enum.Enum):
    HOMOGENEOUS = "Homogeneous"
    FACTOR_TWO_ASSET = "FactorTwoAsset"
    HETERO_SINGLE = "HeteroSingle"
    HETERO_TWO_ASSET = "HeteroTwoAsset"
    MONTE_CARLO = "MonteCarlo"


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_ASSET_KEYS = {"dividends": _floats, "terminal_value": float, "kappa": float, "alpha": float,
               "phi": float, "buyer_prob": float}
_STRATEGY_KEYS = {"alpha_f": float, "gamma1": float, "gamma2": float}
_TRADER_TYPES = ("noise", "directional", "market_neutral", "fundamentalist", "speculator")
_POP_KEYS = {"total": int, "balanced": _bool, **{t: int for t in _TRADER_TYPES},
             **{f"{t}_share": float for t in _TRADER_TYPES}}

SCHEMA: dict[str, dict[str, Any]] = {
    "market": {"model": Model, "periods": int, "asset2_mode": Asset2Mode},
    "asset.1": _ASSET_KEYS,
    "asset.2": _ASSET_KEYS,
    "population": _POP_KEYS,
    "strategy": _STRATEGY_KEYS,
    "strategy.2": _STRATEGY_KEYS,
    "simulation": {"sessions": int, "seed": int, "anchor": str, "funding": float},
    "output": {"path": str, "format": str},
}

TWO_ASSET_MODELS = {Model.FACTOR_TWO_ASSET, Model.HETERO_TWO_ASSET}


@dataclass
class Violation:
    key: str
    message: str
    line: Optional[int] = None

    def as_dict(self) -> dict:
        d = {"key": self.key, "message": self.message}
        if self.line is not None:
            d["line"] = self.line
        return d

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line else ""
        return f"{self.key}{where}: {self.message}"


class ConfigError(Exception):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass
class ExperimentConfig:
    model: Model
    market: MarketSpec
    population: Optional[FactorPopulation | HeteroPopulation] = None
    strategy: Optional[StrategyParams] = None
    strategy_2: Optional[StrategyParams] = None
    asset2_mode: Asset2Mode = Asset2Mode.FACTOR_DIRECTIONAL
    sessions: int = 1000
    seed: int = 0
    anchor: str = "quote_mean"
    funding: Optional[float] = None
    output_path: Optional[str] = None
    output_format: str = "csv"
    sweep: dict[str, list[str]] = field(default_factory=dict)
    sections: dict[str, dict[str, str]] = field(default_factory=dict, repr=False)


@dataclass
class RawConfig:
    sections: dict[str, dict[str, str]]
    lines: dict[tuple[str, str], int]
    source: str = "<string>"


def parse_text(text: str, source: str = "<string>") -> RawConfig:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError([_parse_violation(exc)]) from None
    sections = {s: dict(parser[s]) for s in parser.sections()}
    return RawConfig(sections, _line_index(text), source)


def _parse_violation(exc: configparser.Error) -> Violation:
    line = getattr(exc, "lineno", None)
    if isinstance(exc, configparser.ParsingError) and exc.errors:
        line = exc.errors[0][0]
    message = str(exc).splitlines()[0]
    return Violation("<parse>", message, line)


def _line_index(text: str) -> dict[tuple[str, str], int]:
    index = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"\s*([^#;=\s][^=]*?)\s*=", line)
        if m and section is not None:
            index[(section, m.group(1))] = n
    return index


def load(path: str | Path) -> RawConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([Violation("<file>", f"cannot read {path}: {exc.strerror}")]) from None
    return parse_text(text, str(path))


def split_key(dotted: str) -> tuple[str, str]:
    if dotted.startswith("sweep."):
        return "sweep", dotted[len("sweep."):]
    section, _, key = dotted.rpartition(".")
    return section, key


def apply_overrides(raw: RawConfig, overrides: list[str]) -> RawConfig:
    sections = {s: dict(kv) for s, kv in raw.sections.items()}
    bad = []
    for item in overrides or ():
        dotted, eq, value = item.partition("=")
        section, key = split_key(dotted.strip())
        if not eq or not section or not key:
            bad.append(Violation(item, "override must look like section.key=value"))
            continue
        sections.setdefault(section, {})[key] = value.strip()
    if bad:
        raise ConfigError(bad)
    return RawConfig(sections, raw.lines, raw.source)


def _convert(raw: RawConfig, section: str, key: str, text: str, out: list[Violation]):
    conv = SCHEMA[section][key]
    try:
        return conv(text)
    except (ValueError, TypeError) as exc:
        out.append(Violation(f"{section}.{key}", f"bad value {text!r}: {exc}", raw.lines.get((section, key))))
        return None


def _check_unknown(raw: RawConfig, out: list[Violation]) -> None:
    for section, kv in raw.sections.items():
        if section == "sweep":
            for dotted in kv:
                sec, key = split_key(dotted)
                if sec not in SCHEMA or key not in SCHEMA[sec] or (sec in ("output", "market") and key != "periods"):
                    out.append(Violation(f"sweep.{dotted}", "sweep axis does not name a sweepable parameter",
                                         raw.lines.get((section, dotted))))
            continue
        if section not in SCHEMA:
            out.append(Violation(section, "unknown section"))
            continue
        for key in kv:
            if key not in SCHEMA[section]:
                out.append(Violation(f"{section}.{key}", "unknown key", raw.lines.get((section, key))))


# field-level rules, checked one by one so every violation is reported
_ASSET_RULES = {
    "kappa": (lambda v: v > 0, "kappa must be > 0"),
    "alpha": (lambda v: 0 < v < 1, "alpha must lie in the open interval (0, 1)"),
    "phi": (lambda v: v >= 0, "phi must be >= 0"),
    "buyer_prob": (lambda v: 0 <= v <= 1, "buyer_prob must lie in [0, 1]"),
    "dividends": (lambda v: len(v) > 0, "dividends must not be empty"),
}
_STRATEGY_RULES = {
    "alpha_f": (lambda v: 0 < v <= 1, "alpha_f must lie in (0, 1]"),
    "gamma1": (lambda v: 0 <= v <= 1, "gamma1 must lie in [0, 1]"),
    "gamma2": (lambda v: v >= 0, "gamma2 must be >= 0"),
}


def _check_rules(raw: RawConfig, section: str, vals: dict, rules: dict, out: list[Violation]) -> bool:
    ok = True
    for key, value in vals.items():
        if value is None or key not in rules:
            continue
        pred, message = rules[key]
        if not pred(value):
            out.append(Violation(f"{section}.{key}", f"{message}, got {value}", raw.lines.get((section, key))))
            ok = False
    return ok


def _asset(raw: RawConfig, index: int, out: list[Violation],
           periods: Optional[int] = None) -> Optional[AssetSpec]:
    section = f"asset.{index}"
    kv = raw.sections.get(section, {})
    vals = {k: _convert(raw, section, k, v, out) for k, v in kv.items() if k in _ASSET_KEYS}
    ok = _check_rules(raw, section, vals, _ASSET_RULES, out)
    phi, pinned = vals.get("phi"), vals.get("buyer_prob")
    if periods is not None and phi is not None and pinned is None and phi >= 0 and not phi < 0.5 / periods:
        out.append(Violation(f"{section}.phi", f"phi = {phi} violates phi in [0, 0.5/T) with T = {periods}",
                             raw.lines.get((section, "phi"))))
        ok = False
    if not ok or any(v is None for v in vals.values()):
        return None
    defaults = (SPECULATIVE_DIVIDENDS, SPECULATIVE_TERMINAL_VALUE) if index == 1 else (HOLDING_COST_DIVIDENDS, HOLDING_COST_TERMINAL_VALUE)
    try:
        return AssetSpec(
            vals.get("dividends", defaults[0]), vals.get("terminal_value", defaults[1]),
            vals.get("kappa", 4.0 if index == 1 else 2.0), vals.get("alpha", 0.85), vals.get("phi", 0.0),
            vals.get("buyer_prob"),
        )
    except MarketError as exc:
        out.append(Violation(section, str(exc)))
        return None


def _strategy(raw: RawConfig, section: str, out: list[Violation]) -> Optional[StrategyParams]:
    if section not in raw.sections:
        return None
    vals = {k: _convert(raw, section, k, v, out) for k, v in raw.sections[section].items() if k in _STRATEGY_KEYS}
    if not _check_rules(raw, section, vals, _STRATEGY_RULES, out) or any(v is None for v in vals.values()):
        return None
    try:
        return StrategyParams(**vals)
    except MarketError as exc:
        out.append(Violation(section, str(exc)))
        return None


def _population(raw: RawConfig, model: Model, out: list[Violation]):
    kv = raw.sections.get("population", {})
    vals = {k: _convert(raw, "population", k, v, out) for k, v in kv.items() if k in _POP_KEYS}
    if any(v is None for v in vals.values()):
        return None
    factor_keys = {"directional", "market_neutral", "directional_share", "market_neutral_share"}
    hetero_keys = {"fundamentalist", "speculator", "fundamentalist_share", "speculator_share", "balanced"}
    if model is Model.FACTOR_TWO_ASSET:
        kind = "factor"
    elif model in (Model.HETERO_SINGLE, Model.HETERO_TWO_ASSET):
        kind = "hetero"
    else:
        kind = "factor" if factor_keys & vals.keys() else "hetero"
    wrong = (hetero_keys if kind == "factor" else factor_keys) & vals.keys()
    for k in sorted(wrong):
        out.append(Violation(f"population.{k}", f"not a trader type of model {model.value}",
                             raw.lines.get(("population", k))))
    types = ("noise", "directional", "market_neutral") if kind == "factor" else ("noise", "fundamentalist", "speculator")
    total = vals.get("total")
    counts: dict[str, Optional[int]] = {}
    for t in types:
        if t in vals:
            counts[t] = vals[t]
        elif f"{t}_share" in vals:
            if total is None:
                out.append(Violation(f"population.{t}_share", "shares need population.total"))
                return None
            c = total * vals[f"{t}_share"] / 100.0
            if c != int(c):
                out.append(Violation(f"population.{t}_share",
                                     f"{vals[f'{t}_share']}% of {total} is not a whole number of traders"))
                return None
            counts[t] = int(c)
        else:
            counts[t] = None
    if kind == "hetero" and vals.get("balanced"):
        if total is None or counts["noise"] is None:
            out.append(Violation("population.balanced", "balanced needs population.total and the noise count"))
            return None
        rest = total - counts["noise"]
        if rest < 0 or rest % 2:
            out.append(Violation("population.balanced",
                                 f"total - noise = {rest} cannot be split into equal fundamentalists and speculators"))
            return None
        counts["fundamentalist"] = counts["speculator"] = rest // 2
    missing = [t for t in types if counts[t] is None]
    if total is not None and len(missing) == 1:
        counts[missing[0]] = total - sum(c for c in counts.values() if c is not None)
    for t in types:
        counts[t] = counts[t] or 0
        if counts[t] < 0:
            out.append(Violation(f"population.{t}", f"count is negative ({counts[t]})"))
            return None
    if total is not None and sum(counts.values()) != total:
        out.append(Violation("population", f"trader counts {counts} sum to {sum(counts.values())}, "
                                           f"not population.total = {total}"))
        return None
    try:
        if kind == "factor":
            return FactorPopulation(counts["noise"], counts["directional"], counts["market_neutral"])
        return HeteroPopulation(counts["noise"], counts["fundamentalist"], counts["speculator"])
    except MarketError as exc:
        out.append(Violation("population", str(exc)))
        return None


def build(raw: RawConfig) -> ExperimentConfig:
    """Validate one (already overridden, non-swept) config and build it."""
    out: list[Violation] = []
    _check_unknown(raw, out)
    market_kv = raw.sections.get("market", {})
    model = _convert(raw, "market", "model", market_kv["model"], out) if "model" in market_kv else None
    if "model" not in market_kv:
        out.append(Violation("market.model", f"required; one of {[m.value for m in Model]}"))
    periods = _convert(raw, "market", "periods", market_kv.get("periods", "15"), out)
    mode = _convert(raw, "market", "asset2_mode", market_kv.get("asset2_mode", "FactorDirectional"), out)
    if periods is not None and periods < 1:
        out.append(Violation("market.periods", f"periods must be >= 1, got {periods}"))
        periods = None
    two_assets = model in TWO_ASSET_MODELS or (model is Model.MONTE_CARLO and "asset.2" in raw.sections)
    assets = [_asset(raw, 1, out, periods)] + ([_asset(raw, 2, out, periods)] if two_assets else [])
    population = None
    if model is not None and model is not Model.HOMOGENEOUS:
        if "population" not in raw.sections:
            out.append(Violation("population", f"required by model {model.value}"))
        else:
            population = _population(raw, model, out)
    strategy = _strategy(raw, "strategy", out)
    strategy_2 = _strategy(raw, "strategy.2", out)
    if model in (Model.HETERO_SINGLE, Model.HETERO_TWO_ASSET) and strategy is None and "strategy" not in raw.sections:
        strategy = StrategyParams()
    if model is Model.HETERO_TWO_ASSET and mode is Asset2Mode.SAME_STRATEGY and strategy_2 is None \
            and "strategy.2" not in raw.sections:
        out.append(Violation("strategy.2", "SameStrategy needs asset-2 strategy parameters"))
    sim = raw.sections.get("simulation", {})
    sessions = _convert(raw, "simulation", "sessions", sim.get("sessions", "1000"), out)
    seed = _convert(raw, "simulation", "seed", sim.get("seed", "0"), out)
    anchor = sim.get("anchor", "quote_mean")
    funding = _convert(raw, "simulation", "funding", sim["funding"], out) if "funding" in sim else None
    if sessions is not None and sessions < 1:
        out.append(Violation("simulation.sessions", f"sessions must be >= 1, got {sessions}"))
    if seed is not None and not 0 <= seed < 2**64:
        out.append(Violation("simulation.seed", "seed must be a 64-bit unsigned integer"))
    if anchor not in ("quote_mean", "mid", "imbalance"):
        out.append(Violation("simulation.anchor", f"anchor must be quote_mean, mid or imbalance, got {anchor!r}",
                             raw.lines.get(("simulation", "anchor"))))
    if model is Model.MONTE_CARLO and isinstance(population, HeteroPopulation) and two_assets \
            and population.j_fund + population.j_spec:
        out.append(Violation("population", "fundamentalists and speculators are simulated on one asset only"))
    output = raw.sections.get("output", {})
    fmt = output.get("format", "csv")
    if fmt not in ("csv", "tsv"):
        out.append(Violation("output.format", f"format must be csv or tsv, got {fmt!r}"))
    sweep = {k: [v.strip() for v in text.split(",") if v.strip()] for k, text in raw.sections.get("sweep", {}).items()}
    for k, values in sweep.items():
        if not values:
            out.append(Violation(f"sweep.{k}", "sweep axis has no values"))
    if out:
        raise ConfigError(out)
    return ExperimentConfig(
        model=model, market=MarketSpec(periods, tuple(assets)), population=population, strategy=strategy,
        strategy_2=strategy_2, asset2_mode=mode, sessions=sessions, seed=seed, anchor=anchor, funding=funding,
        output_path=output.get("path"), output_format=fmt, sweep=sweep, sections=raw.sections,
    )


def _sweep_axes(raw: RawConfig) -> dict[str, list[str]]:
    out: list[Violation] = []
    _check_unknown(RawConfig({"sweep": raw.sections.get("sweep", {})}, raw.lines, raw.source), out)
    sweep = {k: [v.strip() for v in text.split(",") if v.strip()] for k, text in raw.sections.get("sweep", {}).items()}
    for k, values in sweep.items():
        if not values:
            out.append(Violation(f"sweep.{k}", "sweep axis has no values", raw.lines.get(("sweep", k))))
    if out:
        raise ConfigError(out)
    return sweep


def expand(raw: RawConfig) -> list[tuple[dict[str, str], ExperimentConfig]]:
    """Every sweep cell in row-major order, each validated. A config without sweep is one cell."""
    if not raw.sections.get("sweep"):
        return [({}, build(raw))]
    axes = _sweep_axes(raw)
    cells = []
    problems: list[Violation] = []
    seen: set[tuple[str, str]] = set()
    for combo in itertools.product(*axes.values()):
        sections = {s: dict(kv) for s, kv in raw.sections.items() if s != "sweep"}
        params = dict(zip(axes, combo))
        for dotted, value in params.items():
            section, key = split_key(dotted)
            sections.setdefault(section, {})[key] = value
        try:
            cfg = build(RawConfig(sections, raw.lines, raw.source))
            cfg.sweep = axes
            cfg.sections = raw.sections
            cells.append((params, cfg))
        except ConfigError as exc:
            where = ", ".join(f"{k}={v}" for k, v in params.items())
            for v in exc.violations:
                if (v.key, v.message) not in seen:
                    seen.add((v.key, v.message))
                    problems.append(Violation(v.key, f"{v.message} [sweep cell {where}]", v.line))
    if problems:
        raise ConfigError(problems)
    return cells


def validate(raw: RawConfig) -> list[Violation]:
    try:
        expand(raw)
    except ConfigError as exc:
        return exc.violations
    return []
