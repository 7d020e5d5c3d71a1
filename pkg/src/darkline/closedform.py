"""Closed-form steady-state amplitudes in the bright/dark basis.

Every function accepts a scalar or an array of detunings. The effective
mechanical response used for the weak-drive scheme is

    D1 = (gamma_m/2 - i delta) + g3^2 / (kappa3/2 - i delta)

i.e. with the same gamma_m/2 as the bare response; it reduces to
(gamma_m/2)(1 + C3) on resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateParameterError, NoSolutionError, UndefinedResultError
from .model import SchemeConfig, Scheme, derive


@dataclass(frozen=True)
class SusceptibilityTriple:
    a: complex
    b: complex
    d: complex


@dataclass(frozen=True)
class BrightDarkAmplitudes:
    alpha_b: complex
    alpha_d: complex
    scheme_tag: int


def _delta(config, delta):
    return config.signal.delta if delta is None else delta


def _lorentz(kappa, delta):
    return kappa / 2.0 - 1j * np.asarray(delta)


def _scalar(x):
    return complex(x) if np.ndim(x) == 0 else x


def susceptibilities(config: SchemeConfig, delta=None) -> SusceptibilityTriple:
    """A(delta), B(delta) and the scheme's mechanical response D_k(delta)."""
    delta = _delta(config, delta)
    g1, g2 = config.g1.g, config.g2.g
    l1 = _lorentz(config.mode1.kappa, delta)
    l2 = _lorentz(config.mode2.kappa, delta)
    a = g1 * g1 / l1 + g2 * g2 / l2
    b = g1 * g2 / l1 - g1 * g2 / l2
    d0 = _lorentz(config.mech.gamma_m, delta)
    if config.kind is Scheme.BASELINE:
        d = d0
    elif config.kind is Scheme.WEAK_DRIVE:
        g3 = config.g3.g
        d = d0 + g3 * g3 / _lorentz(config.mode3.kappa, delta)
    else:
        d = d0 - abs(config.lam) ** 2 / (d0 + a)
    return SusceptibilityTriple(_scalar(a), _scalar(b), _scalar(d))


def bright_dark_closed_form(config: SchemeConfig, delta=None) -> BrightDarkAmplitudes:
    """Bright and dark amplitudes at detuning ``delta`` from the closed forms."""
    delta = _delta(config, delta)
    chi = susceptibilities(config, delta)
    a, b, d = np.asarray(chi.a), np.asarray(chi.b), np.asarray(chi.d)
    denom = a + d
    if np.any(denom == 0):
        raise DegenerateParameterError(
            f"A + D vanishes for {config.kind.value} config (instability boundary)"
        )
    g1, g2 = config.g1.g, config.g2.g
    g = math.hypot(g1, g2)
    if g == 0:
        raise UndefinedResultError("bright/dark basis undefined for g1 = g2 = 0")
    m1 = config.mode1
    drive1 = math.sqrt(m1.kappa_ext) * config.signal.amplitude / _lorentz(m1.kappa, delta)
    alpha_b = (g1 / g) * d / denom * drive1
    alpha_d = (g2 / g - (g1 / g) * b / denom) * drive1
    if config.kind is Scheme.WEAK_DRIVE:
        m3 = config.mode3
        drive3 = math.sqrt(m3.kappa_ext) * config.aux_drive.amplitude / _lorentz(m3.kappa, delta)
        g3 = config.g3.g
        alpha_b = alpha_b - (g3 / g) * a / denom * drive3
        alpha_d = alpha_d - (g3 / g) * b / denom * drive3
    return BrightDarkAmplitudes(_scalar(alpha_b), _scalar(alpha_d), config.kind.tag)


def special_case_delta0(config: SchemeConfig) -> BrightDarkAmplitudes:
    """Resonant (delta = 0) amplitudes written in terms of cooperativities.

    Independent of :func:`bright_dark_closed_form`; the two must agree.
    """
    p = derive(config)
    g1, g2, g = config.g1.g, config.g2.g, p.g_total
    if g == 0:
        raise UndefinedResultError("bright/dark basis undefined for g1 = g2 = 0")
    m1, m2 = config.mode1, config.mode2
    s1 = 2.0 * math.sqrt(m1.eta) / math.sqrt(m1.kappa) * config.signal.amplitude
    r = m1.kappa / m2.kappa
    c1, c2 = p.c1, p.c2

    if config.kind is Scheme.BASELINE:
        den = 1.0 + c1 + c2
        alpha_b = g1 / g / den * s1
        alpha_d = g2 / g * (1.0 + r * c1 + c2) / den * s1
    elif config.kind is Scheme.WEAK_DRIVE:
        m3 = config.mode3
        s3 = 2.0 * math.sqrt(m3.eta) / math.sqrt(m3.kappa) * config.aux_drive.amplitude
        g3, c3 = config.g3.g, p.c3
        den = 1.0 + c1 + c2 + c3
        alpha_b = g1 / g * (1.0 + c3) / den * s1 - g3 / g * (c1 + c2) / den * s3
        first = g2 / g * (1.0 + r * c1 + c2 + c3) / den * s1
        if g1 == 0:
            # C1 / G1 -> 0 as G1 -> 0
            second = 0.0
        else:
            second = g2 * g3 / (g * g1) * (c1 - r * c1) / den * s3
        alpha_d = first - second
    else:
        one_t = 1.0 - p.t
        den = one_t + c1 + c2
        if den == 0:
            raise DegenerateParameterError("1 - t + C1 + C2 vanishes (instability boundary)")
        alpha_b = g1 / g * one_t / den * s1
        alpha_d = g2 / g * (one_t + r * c1 + c2) / den * s1
    return BrightDarkAmplitudes(complex(alpha_b), complex(alpha_d), config.kind.tag)


def efficiency_closed_form(config: SchemeConfig) -> float:
    """Resonant conversion efficiency.

    Baseline: eta1 eta2 4 C1 C2 / (1 + C1 + C2)^2. The weak-drive and
    parametric values assume the bright-mode nulling condition holds and
    give eta1 eta2 4 C1 C2 / (C1 + C2)^2.
    """
    p = derive(config)
    eta = config.mode1.eta * config.mode2.eta
    num = 4.0 * p.c1 * p.c2
    if config.kind is Scheme.BASELINE:
        return eta * num / (1.0 + p.c1 + p.c2) ** 2
    if p.c1 + p.c2 == 0:
        raise UndefinedResultError(
            f"efficiency of the {config.kind.value} scheme is 0/0 at C1 = C2 = 0"
        )
    return eta * num / (p.c1 + p.c2) ** 2


def solve_weak_drive_condition(config: SchemeConfig) -> complex:
    """Auxiliary input amplitude that nulls the bright mode on resonance.

    The returned amplitude is the signal amplitude times a real positive
    ratio, so the two drives share a phase.
    """
    if config.kind is not Scheme.WEAK_DRIVE:
        raise NoSolutionError("the weak-drive condition needs a weak_drive config")
    p = derive(config)
    g3 = config.g3.g
    if g3 == 0:
        raise NoSolutionError("no auxiliary amplitude nulls the bright mode when g3 = 0")
    if p.c1 + p.c2 == 0:
        raise NoSolutionError("no auxiliary amplitude nulls the bright mode when C1 + C2 = 0")
    m1, m3 = config.mode1, config.mode3
    ratio = (
        (config.g1.g / g3)
        * (1.0 + p.c3) / (p.c1 + p.c2)
        * math.sqrt(m1.eta / m1.kappa)
        / math.sqrt(m3.eta / m3.kappa)
    )
    return complex(ratio * config.signal.amplitude)


def solve_parametric_condition(config: SchemeConfig) -> float:
    """|lambda| at which t = 1: (gamma_m/2) sqrt(1 + C1 + C2)."""
    p = derive(config)
    return 0.5 * config.mech.gamma_m * math.sqrt(1.0 + p.c1 + p.c2)


def parametric_threshold(config: SchemeConfig) -> float:
    """Adiabatic-elimination instability threshold gamma_m (1 + C1 + C2) / 2."""
    p = derive(config)
    return 0.5 * config.mech.gamma_m * (1.0 + p.c1 + p.c2)


def apply_nulling(config: SchemeConfig) -> SchemeConfig:
    """Return ``config`` with its scheme's bright-mode nulling condition applied.

    The weak-drive auxiliary amplitude is solved; for the parametric scheme
    |lambda| is set to its nulling value, keeping the phase of a nonzero
    ``lam``. Baseline configs come back unchanged.
    """
    if config.kind is Scheme.WEAK_DRIVE:
        amp = solve_weak_drive_condition(config)
        return replace(config, aux_drive=replace(config.aux_drive, amplitude=amp))
    if config.kind is Scheme.PARAMETRIC:
        mag = solve_parametric_condition(config)
        lam = mag if config.lam == 0 else mag * (config.lam / abs(config.lam))
        return replace(config, lam=lam)
    return config
