import pytest

from labbubble import Asset2Mode, FactorPopulation, HeteroPopulation
from labbubble.config import ConfigError, Model, apply_overrides, build, expand, parse_text, split_key, validate

HOM = """
[market]
model = Homogeneous
periods = 15

[asset.1]
kappa = 4
alpha = 0.85
phi = 0.01
"""


def keys(text, overrides=()):
    return [v.key for v in validate(apply_overrides(parse_text(text), list(overrides)))]


def test_build_reference():
    cfg = build(parse_text(HOM))
    assert cfg.model is Model.HOMOGENEOUS
    a = cfg.market.assets[0]
    assert (a.kappa, a.alpha, a.phi, cfg.market.periods) == (4, 0.85, 0.01, 15)
    assert a.mean_dividend == pytest.approx(0.12)


def test_phi_constraint_named():
    problems = validate(apply_overrides(parse_text(HOM), ["asset.1.phi=0.05"]))
    assert len(problems) == 1
    assert problems[0].key == "asset.1.phi" and "0.5/T" in problems[0].message
    assert problems[0].line == 9


def test_alpha_open_interval():
    problems = validate(apply_overrides(parse_text(HOM), ["asset.1.alpha=1.0"]))
    assert [p.key for p in problems] == ["asset.1.alpha"]
    assert "open interval" in problems[0].message


def test_every_violation_reported():
    got = keys(HOM, ["asset.1.alpha=1.0", "asset.1.phi=0.05", "asset.1.colour=red"])
    assert sorted(got) == ["asset.1.alpha", "asset.1.colour", "asset.1.phi"]


def test_population_must_sum_to_total():
    text = HOM.replace("Homogeneous", "FactorTwoAsset") + """
[population]
total = 100
noise = 50
directional = 30
market_neutral = 30
"""
    problems = validate(parse_text(text))
    assert [p.key for p in problems] == ["population"]
    assert "sum to 110" in problems[0].message


def test_population_remainder_and_shares():
    base = HOM.replace("Homogeneous", "FactorTwoAsset")
    cfg = build(parse_text(base + "[population]\ntotal = 100\nnoise_share = 50\nmarket_neutral = 5\n"))
    assert cfg.population == FactorPopulation(50, 45, 5)
    bad = validate(parse_text(base + "[population]\ntotal = 7\nnoise_share = 50\ndirectional = 1\n"))
    assert bad and "whole number" in bad[0].message


def test_balanced_hetero_population():
    text = HOM.replace("Homogeneous", "HeteroTwoAsset") + "[population]\ntotal = 100\nnoise = 50\nbalanced = true\n"
    cfg = build(parse_text(text))
    assert cfg.population == HeteroPopulation(50, 25, 25)
    assert cfg.asset2_mode is Asset2Mode.FACTOR_DIRECTIONAL
    assert cfg.market.assets[1].mean_dividend == 0.0


def test_wrong_trader_type_for_model():
    text = HOM.replace("Homogeneous", "HeteroSingle") + "[population]\nnoise = 50\ndirectional = 3\n"
    assert "population.directional" in keys(text)


def test_unknown_section_and_missing_model():
    assert "market.model" in keys("[market]\nperiods = 15\n")
    assert "weather" in keys(HOM + "[weather]\nsun = 1\n")


def test_parse_error_has_line():
    problems = validate_text("[market]\nmodel = Homogeneous\nthis line is broken\n")
    assert problems[0].key == "<parse>" and problems[0].line == 3


def validate_text(text):
    try:
        return validate(parse_text(text))
    except ConfigError as exc:
        return exc.violations


def test_sweep_expands_row_major():
    text = HOM + "[sweep]\nasset.1.kappa = 3, 4\nasset.1.phi = 0, 0.01\n"
    cells = expand(parse_text(text))
    assert [tuple(p.values()) for p, _ in cells] == [("3", "0"), ("3", "0.01"), ("4", "0"), ("4", "0.01")]
    assert cells[3][1].market.assets[0].kappa == 4.0


def test_empty_sweep_is_single_cell():
    cells = expand(parse_text(HOM + "[sweep]\n"))
    assert len(cells) == 1 and cells[0][0] == {}


def test_sweep_axis_must_be_a_parameter():
    assert "sweep.asset.1.colour" in keys(HOM + "[sweep]\nasset.1.colour = 1, 2\n")


def test_sweep_cell_violation_names_the_cell():
    problems = validate(parse_text(HOM + "[sweep]\nasset.1.phi = 0, 0.05\n"))
    assert len(problems) == 1 and "asset.1.phi=0.05" in problems[0].message


def test_override_syntax():
    assert split_key("asset.1.kappa") == ("asset.1", "kappa")
    assert split_key("sweep.asset.1.kappa") == ("sweep", "asset.1.kappa")
    with pytest.raises(ConfigError):
        apply_overrides(parse_text(HOM), ["kappa"])


def test_simulation_settings():
    text = HOM.replace("Homogeneous", "MonteCarlo") + "[population]\nnoise = 100\n[simulation]\nanchor = bogus\n"
    assert "simulation.anchor" in keys(text)
    cfg = build(apply_overrides(parse_text(text), ["simulation.anchor=mid", "simulation.seed=9"]))
    assert cfg.anchor == "mid" and cfg.seed == 9


def test_same_strategy_needs_second_strategy():
    text = HOM.replace("Homogeneous", "HeteroTwoAsset").replace("periods = 15", "periods = 15\nasset2_mode = SameStrategy")
    text += "[population]\ntotal = 100\nnoise = 50\nbalanced = true\n"
    assert "strategy.2" in keys(text)
