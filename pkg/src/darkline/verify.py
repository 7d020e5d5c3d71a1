"""Oracle suite: cross-checks between independent computational paths.

Each check returns a :class:`CheckResult`; :func:`run_suite` runs them all
over a list of configurations and is what ``darkline verify`` prints.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from . import closedform, linsys
from .errors import DarklineError, DegenerateParameterError
from .model import (
    Coupling,
    DriveTone,
    MechanicalOscillator,
    OpticalMode,
    Scheme,
    SchemeConfig,
    derive,
)

SCHEMES = (Scheme.BASELINE, Scheme.WEAK_DRIVE, Scheme.PARAMETRIC)


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    count: int = 0
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return (
            f"[{flag}] {self.name}: worst={self.worst:.3e} tol={self.tolerance:.1e} "
            f"n={self.count}{extra}"
        )

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "count": self.count,
            "detail": self.detail,
        }


def _loguniform(rng, lo, hi):
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def _phasor(rng, lo=0.1, hi=10.0):
    return complex(_loguniform(rng, lo, hi) * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def random_config(
    kind,
    rng: np.random.Generator,
    *,
    rate_range=(1e-3, 1e3),
    c_max=1e3,
    lambda_fraction=0.9,
    adiabatic=False,
    max_tries=100,
) -> SchemeConfig:
    """Random valid, stable config with gamma_m = 1.

    Loss and coupling rates are log-uniform over ``rate_range``; couplings are
    capped so every cooperativity stays at or below ``c_max``. The parametric
    |lambda| is uniform below ``lambda_fraction`` of gamma_m (1 + C1 + C2)/2.
    Configs whose resonant system fails the condition gate are redrawn.

    With ``adiabatic=True`` cooperativities are drawn log-uniform in
    [1e-2, 10] and every kappa sits 1e2 to 1e4 times above the effective
    mechanical linewidth gamma_m (1 + sum C); ``rate_range`` and ``c_max``
    are then ignored.
    """
    kind = Scheme(kind)
    lo, hi = rate_range
    for _ in range(max_tries):
        n_modes = 3 if kind is Scheme.WEAK_DRIVE else 2
        modes, gs = [], []
        if adiabatic:
            cs = [_loguniform(rng, 1e-2, 10.0) for _ in range(n_modes)]
            g_eff = 1.0 + sum(cs)
            kappas = [_loguniform(rng, 1e2 * g_eff, 1e4 * g_eff) for _ in range(n_modes)]
        for i in range(n_modes):
            kappa = kappas[i] if adiabatic else _loguniform(rng, lo, hi)
            modes.append(OpticalMode(kappa, kappa * rng.uniform(0.05, 1.0), str(i + 1)))
            if adiabatic:
                gs.append(math.sqrt(cs[i] * kappa / 4.0))
            else:
                g_hi = min(hi, math.sqrt(c_max * kappa / 4.0))
                gs.append(_loguniform(rng, lo, g_hi))
        kw = {}
        if kind is Scheme.WEAK_DRIVE:
            kw = dict(mode3=modes[2], g3=Coupling(gs[2]), aux_drive=DriveTone(_phasor(rng), 0.0))
        cfg = SchemeConfig(
            kind=kind,
            mode1=modes[0],
            mode2=modes[1],
            mech=MechanicalOscillator(1.0),
            g1=Coupling(gs[0]),
            g2=Coupling(gs[1]),
            signal=DriveTone(_phasor(rng), 0.0),
            **kw,
        )
        if kind is Scheme.PARAMETRIC:
            mag = rng.uniform(0.0, lambda_fraction) * closedform.parametric_threshold(cfg)
            cfg = replace(cfg, lam=complex(mag * np.exp(1j * rng.uniform(0, 2 * np.pi))))
            if not linsys.stability(cfg)[0]:
                continue
        try:
            linsys.steady_state(cfg, 0.0)
        except DegenerateParameterError:
            continue
        return cfg
    raise RuntimeError(f"could not draw a well-conditioned {kind.value} config")


def random_configs(kind, n, seed, **kw) -> List[SchemeConfig]:
    rng = np.random.default_rng(seed)
    return [random_config(kind, rng, **kw) for _ in range(n)]


def is_adiabatic(config: SchemeConfig, margin: float = 100.0) -> bool:
    """Every optical linewidth exceeds ``margin`` times gamma_m (1 + sum C)."""
    p = derive(config)
    g_eff = config.mech.gamma_m * (1.0 + p.c1 + p.c2 + p.c3)
    return min(m.kappa for m in config.modes()) >= margin * g_eff


def kappa_max(config: SchemeConfig) -> float:
    return max(m.kappa for m in config.modes())


def rel_err(x, ref, axis=-1):
    """Norm of the difference over norm of the reference, along ``axis``."""
    x, ref = np.asarray(x), np.asarray(ref)
    num = np.linalg.norm(x - ref, axis=axis)
    den = np.linalg.norm(ref, axis=axis)
    return num / np.where(den > 0, den, 1.0)


# --- individual properties ---------------------------------------------------


def closed_form_error(config: SchemeConfig, deltas) -> float:
    """Worst relative gap between closed-form and solved bright/dark amplitudes."""
    cf = closedform.bright_dark_closed_form(config, deltas)
    bd = linsys.bright_dark_decompose(linsys.steady_states(config, deltas), config)
    got = np.stack([np.atleast_1d(cf.alpha_b), np.atleast_1d(cf.alpha_d)], axis=-1)
    ref = np.stack([np.atleast_1d(bd.alpha_b), np.atleast_1d(bd.alpha_d)], axis=-1)
    return float(np.max(rel_err(got, ref)))


def dual_path_error(config: SchemeConfig) -> float:
    a = closedform.special_case_delta0(config)
    b = closedform.bright_dark_closed_form(config, 0.0)
    return float(rel_err([a.alpha_b, a.alpha_d], [b.alpha_b, b.alpha_d]))


def nulling_ratio(config: SchemeConfig) -> float:
    """|alpha_B| / |alpha_D| of the solved resonant state with nulling applied."""
    cfg = closedform.apply_nulling(config)
    bd = linsys.bright_dark_decompose(linsys.steady_state(cfg, 0.0), cfg)
    return abs(bd.alpha_b) / abs(bd.alpha_d)


def nulling_score(config: SchemeConfig) -> float:
    """Nulling residual normalised so that values ≤ 1 pass.

    The bright amplitude passes when |alpha_B| ≤ 1e-12 |alpha_D|, or when it
    sits below the attainable accuracy of the solve, 16 eps cond(M) |x|.
    Strongly asymmetric configs (G1/G2 ~ 1e6) hit the second bound.
    """
    cfg = closedform.apply_nulling(config)
    system = linsys.build_system(cfg, 0.0)
    state = linsys.solve(system)
    bd = linsys.bright_dark_decompose(state, cfg)
    floor = 16 * np.finfo(float).eps * np.linalg.cond(system.matrix) * np.linalg.norm(state.amplitudes)
    return min(abs(bd.alpha_b) / (1e-12 * abs(bd.alpha_d)), abs(bd.alpha_b) / floor)


def flux_error(config: SchemeConfig, delta: float) -> float:
    rep = linsys.transfer(config, delta)
    supplied = rep.flux_in + rep.flux_parametric
    return abs(rep.imbalance) / supplied


def efficiency_error(config: SchemeConfig) -> float:
    """Gap between solved chi at resonance and the closed-form efficiency."""
    cfg = closedform.apply_nulling(config)
    chi = linsys.transfer(cfg, 0.0).chi
    ref = closedform.efficiency_closed_form(cfg)
    return abs(chi - ref) / ref if ref > 0 else abs(chi)


def envelope_error(config: SchemeConfig, delta: float) -> float:
    from .timedomain import envelope_vs_frequency_domain

    return envelope_vs_frequency_domain(config, delta)


def _deltas(config, n, rng):
    km = kappa_max(config)
    return rng.uniform(-5 * km, 5 * km, size=n)


def _check(name, tol, values, t0, detail=""):
    values = np.asarray(values, dtype=float)
    worst = float(np.max(values)) if values.size else 0.0
    ok = bool(values.size == 0 or (np.all(np.isfinite(values)) and worst <= tol))
    return CheckResult(name, ok, worst, tol, int(values.size), detail, time.perf_counter() - t0)


def run_suite(
    configs: Sequence[SchemeConfig],
    *,
    seed: int = 0,
    n_deltas: int = 50,
    time_domain_configs: Optional[Sequence[SchemeConfig]] = None,
) -> List[CheckResult]:
    """Run every oracle property over ``configs`` and return one result per property.

    Time-domain integration is expensive for stiff configs, so it runs on
    ``time_domain_configs`` (skipped when ``None``).
    """
    rng = np.random.default_rng(seed)
    results = []

    t0 = time.perf_counter()
    errs = [closed_form_error(c, _deltas(c, n_deltas, rng)) for c in configs]
    results.append(_check("closed form vs linear solve", 1e-9, errs, t0))

    t0 = time.perf_counter()
    errs = [dual_path_error(c) for c in configs if derive(c).g_total > 0]
    results.append(_check("resonant reduced form vs closed form", 1e-12, errs, t0))

    t0 = time.perf_counter()
    errs = []
    for c in configs:
        if c.kind is Scheme.PARAMETRIC:
            continue
        for d in _deltas(c, 11, rng):
            errs.append(flux_error(c, d))
    results.append(_check("flux conservation", 1e-9, errs, t0))

    t0 = time.perf_counter()
    errs = [
        flux_error(c, d)
        for c in configs
        if c.kind is Scheme.PARAMETRIC
        for d in _deltas(c, 3, rng)
    ]
    results.append(_check("flux conservation incl. pump work", 1e-9, errs, t0))

    t0 = time.perf_counter()
    pure = [c for c in configs if c.kind is not Scheme.BASELINE]
    errs = [nulling_score(c) for c in pure]
    results.append(
        _check("bright-mode nulling", 1.0, errs, t0, "score = |aB| / max(1e-12 |aD|, solve accuracy)")
    )

    t0 = time.perf_counter()
    errs = [efficiency_error(c) for c in configs if derive(c).c1 + derive(c).c2 > 0]
    results.append(_check("solved vs closed-form efficiency", 1e-9, errs, t0))

    t0 = time.perf_counter()
    errs = [
        0.0 if linsys.stability(closedform.apply_nulling(c))[0] else 1.0
        for c in configs
        if c.kind is Scheme.PARAMETRIC and is_adiabatic(c)
    ]
    results.append(_check("nulling point is stable (adiabatic regime)", 0.0, errs, t0))

    if time_domain_configs is not None:
        t0 = time.perf_counter()
        errs = []
        for c in time_domain_configs:
            d = float(rng.choice(probe_deltas(c)))
            try:
                errs.append(envelope_error(c, d))
            except DarklineError:
                errs.append(float("inf"))
        results.append(_check("time domain vs frequency domain", 1e-6, errs, t0))
    return results


def probe_deltas(config: SchemeConfig):
    """Detunings 0, ±gamma_m and ±kappa1/2 used for time-domain probes."""
    gm, k1 = config.mech.gamma_m, config.mode1.kappa
    return [0.0, gm, -gm, k1 / 2, -k1 / 2]


def stiffness(config: SchemeConfig) -> float:
    """Ratio of fastest to slowest drift rate (cost driver of the RK4 oracle)."""
    ev = np.linalg.eigvals(linsys.drift_matrix(config))
    return float(np.max(np.abs(ev)) / np.min(-ev.real))
