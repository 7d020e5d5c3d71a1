"""Frequency-domain steady states from the full linear systems.

Each scheme's equations of motion are solved directly for the amplitudes
that co-rotate with the drive, ``x(t) = x_- exp(-i delta t)``:

* baseline: (alpha1, alpha2, beta), 3x3
* weak drive: (alpha1, alpha2, alpha3, beta), 4x4, drives on both alpha1 and alpha3
* parametric: the lambda beta* term mixes the e^{-i delta t} and e^{+i delta t}
  components, so the unknowns are (alpha1-, alpha2-, beta-, alpha1+*,
  alpha2+*, beta+*) and the upper block is undriven.

None of this uses the closed forms in :mod:`darkline.closedform`; it is the
brute-force reference they are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateParameterError, UndefinedResultError
from .model import SchemeConfig, Scheme
from .closedform import BrightDarkAmplitudes

COND_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-10

LABELS = {
    Scheme.BASELINE: ("alpha1", "alpha2", "beta"),
    Scheme.WEAK_DRIVE: ("alpha1", "alpha2", "alpha3", "beta"),
    Scheme.PARAMETRIC: (
        "alpha1", "alpha2", "beta", "alpha1_up_conj", "alpha2_up_conj", "beta_up_conj",
    ),
}


@dataclass(frozen=True)
class LinearSystem:
    matrix: np.ndarray
    drive: np.ndarray
    variable_labels: Tuple[str, ...]
    delta: float

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SteadyState:
    amplitudes: np.ndarray
    variable_labels: Tuple[str, ...]
    delta: float

    def __getitem__(self, label):
        return self.amplitudes[..., self.variable_labels.index(label)]


@dataclass(frozen=True)
class TransferReport:
    alpha_out1: complex
    alpha_out2: complex
    alpha_out3: Optional[complex]
    chi: float
    flux_in: float
    flux_out: float
    flux_internal_loss: float
    flux_mechanical: float
    stable: bool
    slowest_rate: float
    flux_parametric: float = 0.0

    @property
    def imbalance(self) -> float:
        """Supplied flux (signal, auxiliary, pump work) minus outgoing and dissipated flux."""
        supplied = self.flux_in + self.flux_parametric
        return supplied - (self.flux_out + self.flux_internal_loss + self.flux_mechanical)

    def as_dict(self):
        def c(z):
            return None if z is None else [z.real, z.imag]

        return {
            "alpha_out1": c(self.alpha_out1),
            "alpha_out2": c(self.alpha_out2),
            "alpha_out3": c(self.alpha_out3),
            "chi": self.chi,
            "flux_in": self.flux_in,
            "flux_out": self.flux_out,
            "flux_internal_loss": self.flux_internal_loss,
            "flux_mechanical": self.flux_mechanical,
            "stable": self.stable,
            "slowest_rate": self.slowest_rate,
            "flux_parametric": self.flux_parametric,
        }


def _system_arrays(config: SchemeConfig, deltas: np.ndarray):
    """Stacked matrices (n_delta, n, n) and drive vector (n,) for ``config``."""
    deltas = np.asarray(deltas, dtype=float)
    kind = config.kind
    gm = config.mech.gamma_m
    g1, g2 = config.g1.g, config.g2.g
    m1, m2 = config.mode1, config.mode2
    s1 = math.sqrt(m1.kappa_ext) * config.signal.amplitude
    i_d = 1j * deltas

    if kind is Scheme.WEAK_DRIVE:
        m3, g3 = config.mode3, config.g3.g
        mat = np.zeros(deltas.shape + (4, 4), dtype=complex)
        mat[..., 0, 0] = m1.kappa / 2 - i_d
        mat[..., 1, 1] = m2.kappa / 2 - i_d
        mat[..., 2, 2] = m3.kappa / 2 - i_d
        mat[..., 3, 3] = gm / 2 - i_d
        for row, g in ((0, g1), (1, g2), (2, g3)):
            mat[..., row, 3] = 1j * g
            mat[..., 3, row] = 1j * g
        drive = np.array(
            [s1, 0, math.sqrt(m3.kappa_ext) * config.aux_drive.amplitude, 0], dtype=complex
        )
        return mat, drive

    n = 3 if kind is Scheme.BASELINE else 6
    mat = np.zeros(deltas.shape + (n, n), dtype=complex)
    mat[..., 0, 0] = m1.kappa / 2 - i_d
    mat[..., 1, 1] = m2.kappa / 2 - i_d
    mat[..., 2, 2] = gm / 2 - i_d
    mat[..., 0, 2] = mat[..., 2, 0] = 1j * g1
    mat[..., 1, 2] = mat[..., 2, 1] = 1j * g2
    drive = np.zeros(n, dtype=complex)
    drive[0] = s1
    if kind is Scheme.PARAMETRIC:
        # conjugated upper-sideband rows: same Lorentzians, couplings flip sign
        mat[..., 3, 3] = m1.kappa / 2 - i_d
        mat[..., 4, 4] = m2.kappa / 2 - i_d
        mat[..., 5, 5] = gm / 2 - i_d
        mat[..., 3, 5] = mat[..., 5, 3] = -1j * g1
        mat[..., 4, 5] = mat[..., 5, 4] = -1j * g2
        mat[..., 2, 5] = -config.lam
        mat[..., 5, 2] = -np.conj(config.lam)
    return mat, drive


def build_system(config: SchemeConfig, delta: Optional[float] = None) -> LinearSystem:
    """Linear system ``matrix @ x = drive`` for the steady state at ``delta``.

    ``delta`` defaults to the detuning of the config's signal tone.
    """
    delta = config.signal.delta if delta is None else float(delta)
    mat, drive = _system_arrays(config, delta)
    return LinearSystem(mat, drive, LABELS[config.kind], delta)


def _backward_error(mat, x, b):
    # componentwise (Oettli-Prager) backward error, invariant under row scaling
    r = np.abs(np.einsum("...ij,...j->...i", mat, x) - b)
    scale = np.einsum("...ij,...j->...i", np.abs(mat), np.abs(x)) + np.abs(b)
    with np.errstate(invalid="ignore", divide="ignore"):
        err = np.where(scale > 0, r / np.where(scale > 0, scale, 1.0), 0.0)
    return err.max(axis=-1) if err.ndim else err


def _checked_solve(mat, drive, describe):
    cond = np.linalg.cond(mat)
    bad = ~np.isfinite(cond) | (cond > COND_LIMIT)
    if np.any(bad):
        worst = np.max(np.where(np.isfinite(cond), cond, np.inf))
        raise DegenerateParameterError(
            f"singular or ill-conditioned system for {describe()} (condition number {worst:.3g})"
        )
    rhs = np.broadcast_to(drive, mat.shape[:-1])[..., None]
    x = np.linalg.solve(mat, rhs)[..., 0]
    err = _backward_error(mat, x, drive)
    if np.any(err > RESIDUAL_LIMIT):
        raise DegenerateParameterError(
            f"steady-state residual {np.max(err):.3g} above {RESIDUAL_LIMIT} for {describe()}"
        )
    return x


def solve(system: LinearSystem, what: str = "linear system") -> SteadyState:
    """Dense LU solve with a condition-number gate."""
    x = _checked_solve(system.matrix, system.drive, lambda: what)
    return SteadyState(x, system.variable_labels, system.delta)


def steady_state(config: SchemeConfig, delta: Optional[float] = None) -> SteadyState:
    system = build_system(config, delta)
    x = _checked_solve(system.matrix, system.drive, lambda: _describe(config, system.delta))
    return SteadyState(x, system.variable_labels, system.delta)


def steady_states(config: SchemeConfig, deltas) -> SteadyState:
    """Batched :func:`steady_state` over an array of detunings.

    ``amplitudes`` has shape ``(len(deltas), n)``.
    """
    deltas = np.asarray(deltas, dtype=float)
    mat, drive = _system_arrays(config, deltas)
    x = _checked_solve(mat, drive, lambda: _describe(config, None))
    return SteadyState(x, LABELS[config.kind], deltas)


def _describe(config, delta):
    at = "" if delta is None else f" at delta={delta!r}"
    return f"{config.kind.value} config{at} ({config!r})"


def bright_dark_decompose(state: SteadyState, config: SchemeConfig) -> BrightDarkAmplitudes:
    """Project the solved alpha1, alpha2 onto the bright and dark modes."""
    g1, g2 = config.g1.g, config.g2.g
    g = math.hypot(g1, g2)
    if g == 0:
        raise UndefinedResultError("bright/dark decomposition undefined for g1 = g2 = 0")
    a1, a2 = state["alpha1"], state["alpha2"]
    alpha_b = (g1 * a1 + g2 * a2) / g
    alpha_d = (g2 * a1 - g1 * a2) / g
    if np.ndim(alpha_b) == 0:
        alpha_b, alpha_d = complex(alpha_b), complex(alpha_d)
    return BrightDarkAmplitudes(alpha_b, alpha_d, config.kind.tag)


def basis_change(config: SchemeConfig) -> np.ndarray:
    """Orthogonal, self-inverse map (alpha1, alpha2, beta) -> (alpha_B, alpha_D, beta)."""
    g1, g2 = config.g1.g, config.g2.g
    g = math.hypot(g1, g2)
    if g == 0:
        raise UndefinedResultError("bright/dark basis undefined for g1 = g2 = 0")
    return np.array([[g1 / g, g2 / g, 0.0], [g2 / g, -g1 / g, 0.0], [0.0, 0.0, 1.0]])


def transform_to_bright_dark_basis(config: SchemeConfig, delta: Optional[float] = None) -> LinearSystem:
    """Baseline system rewritten for the unknowns (alpha_B, alpha_D, beta).

    Entries are written out from the basis change rather than obtained by a
    floating-point product, so the dark-mode/mechanics coupling is exactly 0.
    """
    if config.kind is not Scheme.BASELINE:
        raise ValueError("bright/dark basis transform is defined for the baseline scheme")
    delta = config.signal.delta if delta is None else float(delta)
    g1, g2 = config.g1.g, config.g2.g
    g = math.hypot(g1, g2)
    if g == 0:
        raise UndefinedResultError("bright/dark basis undefined for g1 = g2 = 0")
    k1, k2, gm = config.mode1.kappa, config.mode2.kappa, config.mech.gamma_m
    c, s = g1 / g, g2 / g
    mix = (k1 - k2) * g1 * g2 / (2 * g * g)
    mat = np.array(
        [
            [(k1 * c * c + k2 * s * s) / 2 - 1j * delta, mix, 1j * g],
            [mix, (k1 * s * s + k2 * c * c) / 2 - 1j * delta, 0.0],
            [1j * g, 0.0, gm / 2 - 1j * delta],
        ],
        dtype=complex,
    )
    s1 = math.sqrt(config.mode1.kappa_ext) * config.signal.amplitude
    drive = np.array([c * s1, s * s1, 0.0], dtype=complex)
    return LinearSystem(mat, drive, ("alpha_b", "alpha_d", "beta"), delta)


def drift_matrix(config: SchemeConfig) -> np.ndarray:
    """Homogeneous time-domain generator ``d/dt x = L x``.

    For the parametric scheme ``x = (alpha1, alpha2, beta, alpha1*, alpha2*, beta*)``
    in the frame where lambda is static.
    """
    mat, _ = _system_arrays(config, 0.0)
    # steady-state rows are (i delta - L) x = drive, so L = -M(delta = 0)
    return -mat


def stability(config: SchemeConfig) -> Tuple[bool, float]:
    """(stable, slowest_rate): stable iff every drift eigenvalue has Re < 0.

    ``slowest_rate`` is min(-Re(eigenvalue)); negative means growth.
    """
    ev = np.linalg.eigvals(drift_matrix(config))
    slowest = float(np.min(-ev.real))
    return bool(slowest > 0), slowest


def input_output(
    state: SteadyState, config: SchemeConfig, verdict: Optional[Tuple[bool, float]] = None
) -> TransferReport:
    """Output fields, efficiency and photon-flux ledger of a solved state.

    Driven ports reflect ``a_in - sqrt(kappa_ext) a``; undriven ports emit
    ``sqrt(kappa_ext) a``. For the parametric scheme the idler (upper
    sideband) fluxes and the pump work are included in the ledger.
    ``verdict`` short-circuits the stability computation when already known.
    """
    m1, m2 = config.mode1, config.mode2
    a_in1 = config.signal.amplitude
    a1, a2, beta = state["alpha1"], state["alpha2"], state["beta"]
    out1 = complex(a_in1 - math.sqrt(m1.kappa_ext) * a1)
    out2 = complex(math.sqrt(m2.kappa_ext) * a2)
    out3 = None
    pump = 0.0
    flux_in = abs2(a_in1)
    flux_out = abs2(out1) + abs2(out2)
    loss = m1.internal_loss * abs2(a1) + m2.internal_loss * abs2(a2)
    mech = config.mech.gamma_m * abs2(beta)
    if config.kind is Scheme.WEAK_DRIVE:
        m3 = config.mode3
        a_in3 = config.aux_drive.amplitude
        a3 = state["alpha3"]
        out3 = complex(a_in3 - math.sqrt(m3.kappa_ext) * a3)
        flux_in += abs2(a_in3)
        flux_out += abs2(out3)
        loss += m3.internal_loss * abs2(a3)
    elif config.kind is Scheme.PARAMETRIC:
        u1, u2, ub = state["alpha1_up_conj"], state["alpha2_up_conj"], state["beta_up_conj"]
        flux_out += m1.kappa_ext * abs2(u1) + m2.kappa_ext * abs2(u2)
        loss += m1.internal_loss * abs2(u1) + m2.internal_loss * abs2(u2)
        mech += config.mech.gamma_m * abs2(ub)
        # time-averaged work of the lambda beta* term on both sidebands
        pump = 4.0 * (config.lam * np.conj(beta) * ub).real
    signal_flux = abs2(a_in1)
    chi = abs2(out2) / signal_flux if signal_flux > 0 else 0.0
    stable, slowest = stability(config) if verdict is None else verdict
    return TransferReport(
        alpha_out1=out1,
        alpha_out2=out2,
        alpha_out3=out3,
        chi=chi,
        flux_in=flux_in,
        flux_out=flux_out,
        flux_internal_loss=float(loss),
        flux_mechanical=float(mech),
        stable=stable,
        slowest_rate=slowest,
        flux_parametric=float(pump),
    )


def abs2(z) -> float:
    z = complex(z)
    return z.real * z.real + z.imag * z.imag


def transfer(config: SchemeConfig, delta: Optional[float] = None) -> TransferReport:
    """Solve and report in one call."""
    return input_output(steady_state(config, delta), config)
