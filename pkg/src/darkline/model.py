"""Domain types for the three conversion schemes.

All rates share one user-chosen unit (normalising ``gamma_m = 1`` is the
usual choice); nothing here converts units. Coupling rates are real and
nonnegative, their phases being absorbed into the mode definitions. The
parametric strength ``lam`` may be complex.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import ConfigError


class Scheme(str, Enum):
    BASELINE = "baseline"
    WEAK_DRIVE = "weak_drive"
    PARAMETRIC = "parametric"

    @property
    def tag(self) -> int:
        return {"baseline": 0, "weak_drive": 1, "parametric": 2}[self.value]


def _finite(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float, complex)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not cmath.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class OpticalMode:
    kappa: float
    kappa_ext: float
    label: str = ""

    def __post_init__(self):
        _finite("kappa", self.kappa)
        _finite("kappa_ext", self.kappa_ext)
        if not self.kappa > 0:
            raise ConfigError(f"mode {self.label!r}: violates kappa > 0 (kappa={self.kappa!r})")
        if not self.kappa_ext > 0:
            raise ConfigError(
                f"mode {self.label!r}: violates kappa_ext > 0 (kappa_ext={self.kappa_ext!r})"
            )
        if self.kappa_ext > self.kappa:
            raise ConfigError(
                f"mode {self.label!r}: violates kappa_ext ≤ kappa "
                f"(kappa_ext={self.kappa_ext!r}, kappa={self.kappa!r})"
            )

    @property
    def eta(self) -> float:
        """Output coupling ratio kappa_ext / kappa."""
        return self.kappa_ext / self.kappa

    @property
    def internal_loss(self) -> float:
        return self.kappa - self.kappa_ext


@dataclass(frozen=True)
class MechanicalOscillator:
    gamma_m: float

    def __post_init__(self):
        _finite("gamma_m", self.gamma_m)
        if not self.gamma_m > 0:
            raise ConfigError(f"violates gamma_m > 0 (gamma_m={self.gamma_m!r})")


@dataclass(frozen=True)
class Coupling:
    g: float

    def __post_init__(self):
        _finite("g", self.g)
        if isinstance(self.g, complex) or self.g < 0:
            raise ConfigError(f"violates g ≥ 0 with g real (g={self.g!r})")


@dataclass(frozen=True)
class DriveTone:
    amplitude: complex
    delta: float = 0.0

    def __post_init__(self):
        _finite("amplitude", self.amplitude)
        _finite("delta", self.delta)
        if isinstance(self.delta, complex):
            raise ConfigError(f"delta must be real, got {self.delta!r}")


@dataclass(frozen=True)
class SchemeConfig:
    """Full description of one conversion setup.

    ``mode3``, ``g3`` and ``aux_drive`` belong to the weak-drive scheme only;
    a nonzero ``lam`` belongs to the parametric scheme only.
    """

    kind: Scheme
    mode1: OpticalMode
    mode2: OpticalMode
    mech: MechanicalOscillator
    g1: Coupling
    g2: Coupling
    signal: DriveTone
    mode3: Optional[OpticalMode] = None
    g3: Optional[Coupling] = None
    aux_drive: Optional[DriveTone] = None
    lam: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Scheme(self.kind))
        _finite("lambda", self.lam)
        weak = self.kind is Scheme.WEAK_DRIVE
        extras = {"mode3": self.mode3, "g3": self.g3, "aux_drive": self.aux_drive}
        for name, value in extras.items():
            if weak and value is None:
                raise ConfigError(f"weak_drive scheme requires {name}")
            if not weak and value is not None:
                raise ConfigError(f"{name} is only allowed for the weak_drive scheme")
        if weak and self.aux_drive.delta != self.signal.delta:
            raise ConfigError(
                "weak_drive requires aux_drive.delta = signal.delta "
                f"(got {self.aux_drive.delta!r} vs {self.signal.delta!r})"
            )
        if self.kind is not Scheme.PARAMETRIC and self.lam != 0:
            raise ConfigError("lambda is only allowed for the parametric scheme")

    @property
    def delta(self) -> float:
        return self.signal.delta

    def modes(self):
        """Optical modes in variable order."""
        if self.kind is Scheme.WEAK_DRIVE:
            return (self.mode1, self.mode2, self.mode3)
        return (self.mode1, self.mode2)

    def couplings(self):
        if self.kind is Scheme.WEAK_DRIVE:
            return (self.g1.g, self.g2.g, self.g3.g)
        return (self.g1.g, self.g2.g)

    def with_delta(self, delta: float) -> "SchemeConfig":
        """Copy with both drive tones moved to detuning ``delta``."""
        cfg = replace(self, signal=replace(self.signal, delta=delta))
        if self.aux_drive is not None:
            cfg = replace(cfg, aux_drive=replace(self.aux_drive, delta=delta))
        return cfg


@dataclass(frozen=True)
class DerivedParams:
    c1: float
    c2: float
    c3: float
    g_total: float
    t: float = field(default=0.0)


def cooperativity(g: float, gamma_m: float, kappa: float) -> float:
    return 4.0 * g * g / (gamma_m * kappa)


def coupling_for_cooperativity(c: float, gamma_m: float, kappa: float) -> float:
    if c < 0 or not math.isfinite(c):
        raise ConfigError(f"cooperativity must be finite and ≥ 0, got {c!r}")
    return math.sqrt(c * gamma_m * kappa / 4.0)


def derive(config: SchemeConfig) -> DerivedParams:
    """Cooperativities, total coupling and threshold parameter of ``config``."""
    gm = config.mech.gamma_m
    c1 = cooperativity(config.g1.g, gm, config.mode1.kappa)
    c2 = cooperativity(config.g2.g, gm, config.mode2.kappa)
    c3 = 0.0
    if config.kind is Scheme.WEAK_DRIVE:
        c3 = cooperativity(config.g3.g, gm, config.mode3.kappa)
    g_total = math.hypot(config.g1.g, config.g2.g)
    t = 0.0
    if config.kind is Scheme.PARAMETRIC:
        t = 4.0 * abs(config.lam) ** 2 / (gm * gm * (1.0 + c1 + c2))
    return DerivedParams(c1=c1, c2=c2, c3=c3, g_total=g_total, t=t)


def with_cooperativity(config: SchemeConfig, index: int, c: float) -> SchemeConfig:
    """Rescale coupling ``g{index}`` so that its cooperativity equals ``c``."""
    gm = config.mech.gamma_m
    if index == 1:
        return replace(config, g1=Coupling(coupling_for_cooperativity(c, gm, config.mode1.kappa)))
    if index == 2:
        return replace(config, g2=Coupling(coupling_for_cooperativity(c, gm, config.mode2.kappa)))
    if index == 3:
        if config.kind is not Scheme.WEAK_DRIVE:
            raise ConfigError("c3 only exists for the weak_drive scheme")
        return replace(config, g3=Coupling(coupling_for_cooperativity(c, gm, config.mode3.kappa)))
    raise ConfigError(f"no cooperativity with index {index}")


def scaled(config: SchemeConfig, s: float) -> SchemeConfig:
    """Multiply every rate (losses, damping, couplings, detunings, lambda) by ``s``.

    Drive amplitudes are flux amplitudes and pick up a factor sqrt(s) so that
    intracavity amplitudes stay invariant.
    """
    rs = math.sqrt(s)

    def mode(m):
        return None if m is None else replace(m, kappa=m.kappa * s, kappa_ext=m.kappa_ext * s)

    def tone(d):
        return None if d is None else DriveTone(d.amplitude * rs, d.delta * s)

    def coup(c):
        return None if c is None else Coupling(c.g * s)

    return replace(
        config,
        mode1=mode(config.mode1),
        mode2=mode(config.mode2),
        mode3=mode(config.mode3),
        mech=MechanicalOscillator(config.mech.gamma_m * s),
        g1=coup(config.g1),
        g2=coup(config.g2),
        g3=coup(config.g3),
        signal=tone(config.signal),
        aux_drive=tone(config.aux_drive),
        lam=config.lam * s,
    )


def simple_config(
    kind="baseline",
    *,
    kappa=(1.0, 1.0),
    eta=(1.0, 1.0),
    gamma_m=1.0,
    g=None,
    c=None,
    alpha_in=1.0,
    delta=0.0,
    kappa3=1.0,
    eta3=1.0,
    g3=None,
    c3=None,
    alpha3_in=0.0,
    lam=0.0,
) -> SchemeConfig:
    """Compact constructor. Couplings come from ``g`` or from cooperativities ``c``."""
    kind = Scheme(kind)
    if (g is None) == (c is None):
        raise ConfigError("give exactly one of g or c")
    if c is not None:
        g = tuple(coupling_for_cooperativity(ci, gamma_m, ki) for ci, ki in zip(c, kappa))
    extra = {}
    if kind is Scheme.WEAK_DRIVE:
        if (g3 is None) == (c3 is None):
            raise ConfigError("weak_drive needs exactly one of g3 or c3")
        if c3 is not None:
            g3 = coupling_for_cooperativity(c3, gamma_m, kappa3)
        extra = dict(
            mode3=OpticalMode(kappa3, kappa3 * eta3, "3"),
            g3=Coupling(g3),
            aux_drive=DriveTone(alpha3_in, delta),
        )
    return SchemeConfig(
        kind=kind,
        mode1=OpticalMode(kappa[0], kappa[0] * eta[0], "1"),
        mode2=OpticalMode(kappa[1], kappa[1] * eta[1], "2"),
        mech=MechanicalOscillator(gamma_m),
        g1=Coupling(g[0]),
        g2=Coupling(g[1]),
        signal=DriveTone(alpha_in, delta),
        lam=lam,
        **extra,
    )
