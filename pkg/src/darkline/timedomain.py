"""Fixed-step RK4 integration of the equations of motion.

This is an oracle for :mod:`darkline.linsys`: integrate from rest with the
drive ``a_in exp(-i delta t)``, demodulate, and compare the final envelope
with the frequency-domain steady state.

The parametric scheme is integrated in its real-time form, with the
``lambda beta*`` term applied directly. Its response contains both
``exp(-i delta t)`` and ``exp(+i delta t)`` components, and the two are
separated by a least-squares fit over the last drive period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numba
import numpy as np

from . import linsys
from .errors import ConfigError, DivergenceError
from .model import Scheme, SchemeConfig

BLOWUP_NORM = 1e12
STEP_FACTOR = 0.01
CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class IntegrationSpec:
    step: float
    horizon: float
    record_stride: int = 10

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ConfigError(f"integration step must be positive and finite, got {self.step!r}")
        if not (self.horizon >= 10 * self.step and math.isfinite(self.horizon)):
            raise ConfigError(
                f"horizon must be ≥ 10·step (horizon={self.horizon!r}, step={self.step!r})"
            )
        if self.record_stride < 1:
            raise ConfigError(f"record_stride must be ≥ 1, got {self.record_stride!r}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    converged: bool
    final_envelope: np.ndarray
    upper_envelope: Optional[np.ndarray]
    variable_labels: Tuple[str, ...]
    delta: float


@numba.njit(cache=True)
def _rk4(lin, conj_lin, force, delta, x0, h, nsteps, stride, blowup):
    n = x0.shape[0]
    nrec = nsteps // stride + 1
    times = np.empty(nrec)
    states = np.empty((nrec, n), dtype=np.complex128)
    x = x0.copy()
    times[0] = 0.0
    states[0] = x
    rec = 1
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)

    for step in range(nsteps):
        t = step * h
        _rhs(lin, conj_lin, force, delta, t, x, k1)
        for i in range(n):
            tmp[i] = x[i] + 0.5 * h * k1[i]
        _rhs(lin, conj_lin, force, delta, t + 0.5 * h, tmp, k2)
        for i in range(n):
            tmp[i] = x[i] + 0.5 * h * k2[i]
        _rhs(lin, conj_lin, force, delta, t + 0.5 * h, tmp, k3)
        for i in range(n):
            tmp[i] = x[i] + h * k3[i]
        _rhs(lin, conj_lin, force, delta, t + h, tmp, k4)
        norm2 = 0.0
        for i in range(n):
            x[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            norm2 += x[i].real * x[i].real + x[i].imag * x[i].imag
        if not norm2 <= blowup * blowup:
            return times[:rec], states[:rec], (step + 1) * h
        if (step + 1) % stride == 0:
            times[rec] = (step + 1) * h
            states[rec] = x
            rec += 1
    return times[:rec], states[:rec], -1.0


@numba.njit(cache=True)
def _rhs(lin, conj_lin, force, delta, t, x, out):
    n = x.shape[0]
    ph = np.exp(-1j * delta * t)
    for i in range(n):
        acc = force[i] * ph
        for j in range(n):
            acc += lin[i, j] * x[j] + conj_lin[i, j] * np.conj(x[j])
        out[i] = acc


def equations(config: SchemeConfig):
    """(lin, conj_lin, force, labels) with dx/dt = lin x + conj_lin x* + force e^{-i delta t}."""
    if config.kind is Scheme.PARAMETRIC:
        base = linsys.drift_matrix(config)[:3, :3].copy()
        lam = np.zeros((3, 3), dtype=complex)
        lam[2, 2] = config.lam
        _, drive = linsys._system_arrays(config, 0.0)
        return base, lam, drive[:3].copy(), ("alpha1", "alpha2", "beta")
    lin = linsys.drift_matrix(config)
    _, drive = linsys._system_arrays(config, 0.0)
    return lin, np.zeros_like(lin), drive, linsys.LABELS[config.kind]


def max_rate(config: SchemeConfig, delta: float) -> float:
    """Fastest rate in the problem: drift spectral radius or |delta|."""
    ev = np.linalg.eigvals(linsys.drift_matrix(config))
    return float(max(np.max(np.abs(ev)), abs(delta)))


def _demod_window(config, delta):
    if config.kind is Scheme.PARAMETRIC and delta != 0:
        return 2 * math.pi / abs(delta)
    return 0.0


def default_spec(config: SchemeConfig, delta: float = 0.0, settle: float = 20.0) -> IntegrationSpec:
    """Step 0.01/max_rate and horizon ``settle``/slowest_rate (+ one period when demodulating)."""
    stable, slowest = linsys.stability(config)
    if not stable:
        raise ConfigError("default horizon needs a stable config; pass an explicit spec")
    step = STEP_FACTOR / max_rate(config, delta)
    horizon = settle / slowest + _demod_window(config, delta)
    return IntegrationSpec(step=step, horizon=horizon, record_stride=10)


def _fit_envelope(times, states, delta, two_sided):
    if not two_sided:
        return states[-1] * np.exp(1j * delta * times[-1]), None
    basis = np.stack([np.exp(-1j * delta * times), np.exp(1j * delta * times)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, states, rcond=None)
    return coef[0], coef[1]


def integrate(
    config: SchemeConfig,
    spec: Optional[IntegrationSpec] = None,
    delta: Optional[float] = None,
    initial: Optional[Sequence[complex]] = None,
    check_step: bool = True,
) -> Trajectory:
    """Integrate from ``initial`` (default: rest) over ``spec.horizon``.

    Raises :class:`DivergenceError` once the state norm exceeds 1e12.
    ``final_envelope`` holds the exp(-i delta t) amplitudes at the end;
    for the parametric scheme at delta != 0 the exp(+i delta t) amplitudes
    are returned in ``upper_envelope``.
    """
    delta = config.signal.delta if delta is None else float(delta)
    if spec is None:
        spec = default_spec(config, delta)
    if check_step and spec.step > STEP_FACTOR / max_rate(config, delta) * (1 + 1e-12):
        raise ConfigError(
            f"step {spec.step!r} exceeds 0.01/max_rate = {STEP_FACTOR / max_rate(config, delta)!r}"
        )
    lin, conj_lin, force, labels = equations(config)
    n = lin.shape[0]
    x0 = np.zeros(n, dtype=complex) if initial is None else np.asarray(initial, dtype=complex)
    if x0.shape != (n,):
        raise ConfigError(f"initial state must have {n} components, got shape {x0.shape}")
    nsteps = int(math.ceil(spec.horizon / spec.step - 1e-9))
    h = spec.horizon / nsteps
    times, states, t_blow = _rk4(
        lin, conj_lin, force, delta, x0, h, nsteps, spec.record_stride, BLOWUP_NORM
    )
    if t_blow >= 0:
        raise DivergenceError(f"state norm exceeded {BLOWUP_NORM:g} at t={t_blow:.6g}", t_blow)

    two_sided = config.kind is Scheme.PARAMETRIC and delta != 0
    window = _demod_window(config, delta)
    t_end = times[-1]

    def envelope_at(t_stop):
        sel = (times <= t_stop + 0.5 * h) & (times >= t_stop - window - 0.5 * h)
        if not np.any(sel):
            sel = times <= t_stop + 0.5 * h
        return _fit_envelope(times[sel], states[sel], delta, two_sided)

    lower, upper = envelope_at(t_end)
    earlier, _ = envelope_at(t_end - 0.05 * spec.horizon)
    scale = np.linalg.norm(lower)
    change = np.linalg.norm(lower - earlier)
    converged = bool(scale > 0 and change <= CONVERGENCE_TOL * scale) or bool(
        scale == 0 and change == 0
    )
    return Trajectory(times, states, converged, lower, upper, labels, delta)


def frequency_domain_envelope(config: SchemeConfig, delta: float):
    """Steady-state amplitudes predicted for the integrated variables.

    Returns (lower, upper): the exp(-i delta t) and exp(+i delta t)
    amplitudes. For the parametric scheme at delta = 0 both sidebands sit at
    zero frequency, so their sum is returned as ``lower``.
    """
    state = linsys.steady_state(config, delta)
    x = state.amplitudes
    if config.kind is not Scheme.PARAMETRIC:
        return x, None
    lower, upper = x[:3], np.conj(x[3:])
    if delta == 0:
        return lower + upper, None
    return lower, upper


def envelope_vs_frequency_domain(
    config: SchemeConfig, delta: float, spec: Optional[IntegrationSpec] = None
) -> float:
    """Relative gap between the demodulated final envelope and the linear solve."""
    traj = integrate(config, spec, delta=delta)
    lower, upper = frequency_domain_envelope(config, delta)
    got, ref = traj.final_envelope, lower
    if upper is not None:
        got = np.concatenate([got, traj.upper_envelope])
        ref = np.concatenate([ref, upper])
    return float(np.linalg.norm(got - ref) / np.linalg.norm(ref))


def measure_order(
    config: SchemeConfig, delta: float, step_factors: Sequence[float], settle: float = 40.0
):
    """Empirical convergence order of the steady-state envelope.

    Integrates with steps ``f / max_rate`` for each ``f`` and fits the slope of
    log(error) against log(step). Returns (steps, errors, order).
    """
    base = default_spec(config, delta, settle=settle)
    mr = max_rate(config, delta)
    steps, errors = [], []
    for f in step_factors:
        spec = IntegrationSpec(step=f / mr, horizon=base.horizon, record_stride=10)
        errors.append(envelope_vs_frequency_domain(config, delta, spec))
        steps.append(spec.step)
    order = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    return np.array(steps), np.array(errors), order
