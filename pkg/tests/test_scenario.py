import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkline import closedform
from darkline.errors import ScenarioParseError
from darkline.model import (
    Coupling,
    DriveTone,
    MechanicalOscillator,
    OpticalMode,
    Scheme,
    SchemeConfig,
)
from darkline.scenario import config_to_dict, parse_scenario, render_scenario

MINIMAL = """
[scheme]
kind = baseline

[mode.1]
kappa = 1.0
kappa_ext = 0.5

[mode.2]
kappa = 2.0
kappa_ext = 2.0

[mech]
gamma_m = 0.1

[coupling]
g1 = 0.3
g2 = 0.4

[signal]
amplitude = 1+0.5j
"""


def test_minimal_baseline():
    cfg = parse_scenario(MINIMAL)
    assert cfg.kind is Scheme.BASELINE
    assert cfg.mode1.eta == 0.5
    assert cfg.signal.amplitude == 1 + 0.5j
    assert cfg.signal.delta == 0.0


def test_cooperativity_keys():
    cfg = parse_scenario(MINIMAL.replace("g1 = 0.3", "c1 = 2.5"))
    assert closedform.derive(cfg).c1 == pytest.approx(2.5, rel=1e-15)


def test_kappa_ext_above_kappa():
    with pytest.raises(ScenarioParseError, match="kappa_ext ≤ kappa") as info:
        parse_scenario(MINIMAL.replace("kappa_ext = 0.5", "kappa_ext = 2.0"))
    assert info.value.line == 7


def test_weak_drive_without_third_mode():
    text = MINIMAL.replace("kind = baseline", "kind = weak_drive") + "\n[aux_drive]\namplitude = 1\n"
    with pytest.raises(ScenarioParseError, match=r"\[mode\.3\]"):
        parse_scenario(text.replace("g2 = 0.4", "g2 = 0.4\ng3 = 0.1"))


@pytest.mark.parametrize(
    "old, new, match, line",
    [
        ("kappa = 2.0", "kapa = 2.0", "unknown key 'kapa'", 10),
        ("[mech]", "[mechanics]", "unknown section", 13),
        ("gamma_m = 0.1", "gamma_m = inf", "finite", 14),
        ("gamma_m = 0.1", "gamma_m = fast", "decimal", 14),
        ("g2 = 0.4", "g2 = 0.4\ng2 = 0.5", "duplicate key", 19),
        ("kind = baseline", "kind = ladder", "scheme kind", 3),
        ("g2 = 0.4", "g2 = 0.4\ng3 = 0.1", "weak_drive", 19),
    ],
)
def test_errors_carry_line_numbers(old, new, match, line):
    with pytest.raises(ScenarioParseError, match=match) as info:
        parse_scenario(MINIMAL.replace(old, new))
    assert info.value.line == line
    assert f"line {line}:" in str(info.value)


def test_missing_section():
    text = MINIMAL.replace("[mech]\ngamma_m = 0.1\n", "")
    with pytest.raises(ScenarioParseError, match=r"missing required section \[mech\]"):
        parse_scenario(text)


def test_auto_values_apply_nulling():
    text = MINIMAL.replace("kind = baseline", "kind = parametric") + "\n[parametric]\nlambda = auto\n"
    cfg = parse_scenario(text)
    assert cfg.lam == pytest.approx(closedform.solve_parametric_condition(cfg), rel=1e-15)


def test_dict_echo():
    d = config_to_dict(parse_scenario(MINIMAL))
    assert d["signal"]["amplitude"] == [1.0, 0.5]
    assert d["mode2"]["kappa_ext"] == 2.0


rate = st.floats(1e-3, 1e3)
amp = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def configs(draw):
    kind = draw(st.sampled_from(list(Scheme)))
    n = 3 if kind is Scheme.WEAK_DRIVE else 2
    modes = []
    for i in range(n):
        k = draw(rate)
        modes.append(OpticalMode(k, k * draw(st.floats(0.01, 1.0)),
                                 draw(st.sampled_from(["", f"m{i}", "signal"]))))
    gs = [Coupling(draw(st.floats(0, 1e3))) for _ in range(n)]
    delta = draw(st.floats(-1e3, 1e3))
    kw = {}
    if kind is Scheme.WEAK_DRIVE:
        kw = dict(mode3=modes[2], g3=gs[2], aux_drive=DriveTone(draw(amp), delta))
    if kind is Scheme.PARAMETRIC:
        kw = dict(lam=draw(amp))
    return SchemeConfig(kind, modes[0], modes[1], MechanicalOscillator(draw(rate)), gs[0], gs[1],
                        DriveTone(draw(amp), delta), **kw)


@settings(max_examples=200, deadline=None)
@given(configs())
def test_render_parse_round_trip(cfg):
    assert parse_scenario(render_scenario(cfg)) == cfg


@pytest.mark.parametrize("name", ["baseline", "weak_drive", "parametric"])
def test_shipped_scenarios_parse(scenario_dir, name):
    cfg = parse_scenario((scenario_dir / f"{name}.ini").read_text())
    assert cfg.kind.value == name
    assert math.isfinite(closedform.efficiency_closed_form(cfg))
