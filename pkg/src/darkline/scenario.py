"""Scenario files: a strict sectioned key = value format.

Example (all rates in units of gamma_m)::

    [scheme]
    kind = weak_drive          # baseline | weak_drive | parametric

    [mode.1]
    kappa = 1.0
    kappa_ext = 1.0

    [mode.2]
    kappa = 1.0
    kappa_ext = 1.0

    [mode.3]                   # weak_drive only
    kappa = 1.0
    kappa_ext = 1.0

    [mech]
    gamma_m = 1.0

    [coupling]
    g1 = 0.5                   # or c1 = 1.0 (cooperativity)
    g2 = 0.5
    g3 = 0.5                   # weak_drive only

    [signal]
    amplitude = 1.0            # complex allowed: 1+0.5j
    delta = 0.0

    [aux_drive]                # weak_drive only
    amplitude = auto           # auto = solve the bright-mode nulling condition

    [parametric]               # parametric only
    lambda = auto              # auto = (gamma_m/2) sqrt(1 + C1 + C2)

Unknown sections or keys, duplicate entries and non-finite numbers are
errors; messages carry the line number.
"""

from __future__ import annotations

import math
import re
from dataclasses import replace
from typing import Dict, Optional, Tuple

from . import closedform
from .errors import ConfigError, ScenarioParseError
from .model import (
    Coupling,
    DriveTone,
    MechanicalOscillator,
    OpticalMode,
    Scheme,
    SchemeConfig,
    coupling_for_cooperativity,
)

_SECTION_KEYS = {
    "scheme": {"kind"},
    "mode.1": {"kappa", "kappa_ext", "label"},
    "mode.2": {"kappa", "kappa_ext", "label"},
    "mode.3": {"kappa", "kappa_ext", "label"},
    "mech": {"gamma_m"},
    "coupling": {"g1", "g2", "g3", "c1", "c2", "c3"},
    "signal": {"amplitude", "delta"},
    "aux_drive": {"amplitude", "delta"},
    "parametric": {"lambda"},
}
_REQUIRED = ("scheme", "mode.1", "mode.2", "mech", "coupling", "signal")
_ONLY_FOR = {
    "mode.3": Scheme.WEAK_DRIVE,
    "aux_drive": Scheme.WEAK_DRIVE,
    "parametric": Scheme.PARAMETRIC,
}

_SECTION_RE = re.compile(r"^\[\s*([^\]]+?)\s*\]$")


class _Entry:
    __slots__ = ("value", "line")

    def __init__(self, value, line):
        self.value = value
        self.line = line


def _strip_comment(line: str) -> str:
    for mark in ("#", ";"):
        idx = line.find(mark)
        if idx >= 0:
            line = line[:idx]
    return line.strip()


def _tokenize(text: str):
    sections: Dict[str, Tuple[int, Dict[str, _Entry]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            name = m.group(1)
            if name not in _SECTION_KEYS:
                raise ScenarioParseError(f"unknown section [{name}]", lineno, name)
            if name in sections:
                raise ScenarioParseError(f"duplicate section [{name}]", lineno, name)
            sections[name] = (lineno, {})
            current = name
            continue
        if "=" not in line:
            raise ScenarioParseError("expected 'key = value' or '[section]'", lineno, line)
        if current is None:
            raise ScenarioParseError("key outside of any section", lineno, line)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SECTION_KEYS[current]:
            raise ScenarioParseError(f"unknown key {key!r} in [{current}]", lineno, key)
        entries = sections[current][1]
        if key in entries:
            raise ScenarioParseError(f"duplicate key {key!r} in [{current}]", lineno, key)
        if value == "":
            raise ScenarioParseError(f"missing value for {key!r}", lineno, key)
        entries[key] = _Entry(value, lineno)
    return sections


def _real(entry: _Entry, key: str) -> float:
    try:
        x = float(entry.value)
    except ValueError:
        raise ScenarioParseError(f"{key} must be a decimal number", entry.line, entry.value) from None
    if not math.isfinite(x):
        raise ScenarioParseError(f"{key} must be finite", entry.line, entry.value)
    return x


def _number(entry: _Entry, key: str) -> complex:
    text = entry.value.replace(" ", "")
    if "j" not in text:
        return _real(entry, key)
    try:
        z = complex(text)
    except ValueError:
        raise ScenarioParseError(f"{key} must be a real or complex number", entry.line, entry.value) from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ScenarioParseError(f"{key} must be finite", entry.line, entry.value)
    return z


def _need(entries, key, section, line):
    if key not in entries:
        raise ScenarioParseError(f"[{section}] is missing required key {key!r}", line, section)
    return entries[key]


def parse_scenario(text: str) -> SchemeConfig:
    """Parse scenario text into a validated :class:`SchemeConfig`."""
    sections = _tokenize(text)
    for name in _REQUIRED:
        if name not in sections:
            raise ScenarioParseError(f"missing required section [{name}]", None, name)

    line, entries = sections["scheme"]
    kind_entry = _need(entries, "kind", "scheme", line)
    try:
        kind = Scheme(kind_entry.value)
    except ValueError:
        choices = ", ".join(s.value for s in Scheme)
        raise ScenarioParseError(
            f"scheme kind must be one of {choices}", kind_entry.line, kind_entry.value
        ) from None

    for name, owner in _ONLY_FOR.items():
        if name in sections and kind is not owner:
            raise ScenarioParseError(
                f"section [{name}] only applies to the {owner.value} scheme",
                sections[name][0],
                name,
            )
        if kind is owner and name not in sections:
            raise ScenarioParseError(
                f"{kind.value} scheme requires section [{name}]", None, name
            )

    def mode(idx):
        name = f"mode.{idx}"
        line, e = sections[name]
        kappa = _real(_need(e, "kappa", name, line), "kappa")
        kext = _real(_need(e, "kappa_ext", name, line), "kappa_ext")
        label = e["label"].value if "label" in e else ""
        try:
            return OpticalMode(kappa, kext, label)
        except ConfigError as exc:
            raise ScenarioParseError(str(exc), e["kappa_ext"].line, e["kappa_ext"].value) from None

    modes = {i: mode(i) for i in ((1, 2, 3) if kind is Scheme.WEAK_DRIVE else (1, 2))}

    line, e = sections["mech"]
    gm_entry = _need(e, "gamma_m", "mech", line)
    try:
        mech = MechanicalOscillator(_real(gm_entry, "gamma_m"))
    except ConfigError as exc:
        raise ScenarioParseError(str(exc), gm_entry.line, gm_entry.value) from None

    line, e = sections["coupling"]
    couplings = {}
    for i in modes:
        g_key, c_key = f"g{i}", f"c{i}"
        if g_key in e and c_key in e:
            raise ScenarioParseError(f"give {g_key} or {c_key}, not both", e[c_key].line, c_key)
        if g_key in e:
            entry, val = e[g_key], _real(e[g_key], g_key)
        elif c_key in e:
            entry = e[c_key]
            c = _real(entry, c_key)
            if c < 0:
                raise ScenarioParseError(f"violates {c_key} ≥ 0", entry.line, entry.value)
            val = coupling_for_cooperativity(c, mech.gamma_m, modes[i].kappa)
        else:
            raise ScenarioParseError(f"[coupling] is missing {g_key} (or {c_key})", line, "coupling")
        try:
            couplings[i] = Coupling(val)
        except ConfigError as exc:
            raise ScenarioParseError(str(exc), entry.line, entry.value) from None
    for key in ("g3", "c3"):
        if key in e and kind is not Scheme.WEAK_DRIVE:
            raise ScenarioParseError(f"{key} only applies to the weak_drive scheme", e[key].line, key)

    line, e = sections["signal"]
    amp = _number(_need(e, "amplitude", "signal", line), "amplitude")
    delta = _real(e["delta"], "delta") if "delta" in e else 0.0
    signal = DriveTone(amp, delta)

    extra = {}
    auto_aux = auto_lambda = False
    if kind is Scheme.WEAK_DRIVE:
        line, e = sections["aux_drive"]
        a_entry = _need(e, "amplitude", "aux_drive", line)
        auto_aux = a_entry.value == "auto"
        aux_amp = 0.0 if auto_aux else _number(a_entry, "amplitude")
        if "delta" in e:
            d = _real(e["delta"], "delta")
            if d != delta:
                raise ScenarioParseError(
                    "aux_drive.delta must equal signal.delta", e["delta"].line, e["delta"].value
                )
        extra = dict(mode3=modes[3], g3=couplings[3], aux_drive=DriveTone(aux_amp, delta))
    if kind is Scheme.PARAMETRIC:
        line, e = sections["parametric"]
        l_entry = _need(e, "lambda", "parametric", line)
        auto_lambda = l_entry.value == "auto"
        extra = dict(lam=0.0 if auto_lambda else _number(l_entry, "lambda"))

    try:
        config = SchemeConfig(
            kind=kind,
            mode1=modes[1],
            mode2=modes[2],
            mech=mech,
            g1=couplings[1],
            g2=couplings[2],
            signal=signal,
            **extra,
        )
        if auto_aux or auto_lambda:
            config = closedform.apply_nulling(config)
    except ConfigError as exc:
        raise ScenarioParseError(str(exc)) from None
    return config


def _fmt(x) -> str:
    if isinstance(x, complex):
        return repr(x) if x.imag != 0 else repr(x.real)
    return repr(float(x))


def render_scenario(config: SchemeConfig) -> str:
    """Canonical scenario text; ``parse_scenario(render_scenario(c)) == c``."""
    lines = ["[scheme]", f"kind = {config.kind.value}", ""]
    for i, m in enumerate(config.modes(), start=1):
        lines += [f"[mode.{i}]", f"label = {m.label}" if m.label else None,
                  f"kappa = {_fmt(m.kappa)}", f"kappa_ext = {_fmt(m.kappa_ext)}", ""]
    lines += ["[mech]", f"gamma_m = {_fmt(config.mech.gamma_m)}", ""]
    lines += ["[coupling]"] + [f"g{i} = {_fmt(g)}" for i, g in enumerate(config.couplings(), start=1)]
    lines += ["", "[signal]", f"amplitude = {_fmt(config.signal.amplitude)}",
              f"delta = {_fmt(config.signal.delta)}", ""]
    if config.kind is Scheme.WEAK_DRIVE:
        lines += ["[aux_drive]", f"amplitude = {_fmt(config.aux_drive.amplitude)}",
                  f"delta = {_fmt(config.aux_drive.delta)}", ""]
    if config.kind is Scheme.PARAMETRIC:
        lines += ["[parametric]", f"lambda = {_fmt(config.lam)}", ""]
    return "\n".join(l for l in lines if l is not None)


def load_scenario(path) -> SchemeConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def config_to_dict(config: SchemeConfig) -> Dict[str, object]:
    out: Dict[str, object] = {"kind": config.kind.value}
    for i, m in enumerate(config.modes(), start=1):
        out[f"mode{i}"] = {"label": m.label, "kappa": m.kappa, "kappa_ext": m.kappa_ext}
    out["gamma_m"] = config.mech.gamma_m
    for i, g in enumerate(config.couplings(), start=1):
        out[f"g{i}"] = g
    out["signal"] = {"amplitude": _jsonable(complex(config.signal.amplitude)), "delta": config.signal.delta}
    if config.aux_drive is not None:
        out["aux_drive"] = {
            "amplitude": _jsonable(complex(config.aux_drive.amplitude)),
            "delta": config.aux_drive.delta,
        }
    if config.kind is Scheme.PARAMETRIC:
        out["lambda"] = _jsonable(complex(config.lam))
    return out
