import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkline import closedform, linsys, verify
from darkline.errors import DegenerateParameterError, UndefinedResultError
from darkline.model import simple_config


def test_baseline_system_layout():
    cfg = simple_config(kappa=(2.0, 3.0), eta=(0.5, 1.0), g=(0.3, 0.4), alpha_in=0.7, delta=0.2)
    sys = linsys.build_system(cfg)
    assert sys.dimension == 3
    expected = np.array(
        [
            [1.0 - 0.2j, 0, 0.3j],
            [0, 1.5 - 0.2j, 0.4j],
            [0.3j, 0.4j, 0.5 - 0.2j],
        ]
    )
    np.testing.assert_array_equal(sys.matrix, expected)
    np.testing.assert_allclose(sys.drive, [math.sqrt(1.0) * 0.7, 0, 0], rtol=1e-15)


def test_weak_drive_system_has_two_drives():
    cfg = simple_config("weak_drive", c=(1, 1), c3=1.0, alpha3_in=0.5)
    sys = linsys.build_system(cfg, 0.0)
    assert sys.dimension == 4
    assert np.flatnonzero(sys.drive).tolist() == [0, 2]
    assert sys.variable_labels[3] == "beta"


def test_parametric_without_modulation_block_diagonal():
    cfg = simple_config("parametric", kappa=(1.0, 2.0), g=(0.2, 0.6), lam=0.0)
    base = simple_config(kappa=(1.0, 2.0), g=(0.2, 0.6))
    m = linsys.build_system(cfg, 0.4).matrix
    assert m.shape == (6, 6)
    assert not np.any(m[:3, 3:]) and not np.any(m[3:, :3])
    np.testing.assert_array_equal(m[:3, :3], linsys.build_system(base, 0.4).matrix)
    assert not np.any(linsys.build_system(cfg, 0.4).drive[3:])


def test_solve_identity():
    v = np.array([1 + 2j, -3j, 0.5])
    sys = linsys.LinearSystem(np.eye(3, dtype=complex), v, ("a", "b", "c"), 0.0)
    np.testing.assert_array_equal(linsys.solve(sys).amplitudes, v)


def test_decoupled_cavity():
    cfg = simple_config(kappa=(2.0, 1.0), eta=(0.3, 1.0), g=(0.0, 0.0), delta=0.7, alpha_in=1.5)
    st = linsys.steady_state(cfg)
    assert st["alpha1"] == pytest.approx(math.sqrt(0.6) * 1.5 / (1.0 - 0.7j), rel=1e-15)
    assert st["alpha2"] == 0 and st["beta"] == 0


def test_random_residual():
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=3) + 1j * rng.normal(size=3)
        x = linsys.solve(linsys.LinearSystem(m, b, ("a", "b", "c"), 0.0)).amplitudes
        assert np.linalg.norm(m @ x - b) <= 1e-12 * np.linalg.norm(b)


def test_singular_system_raises():
    m = np.array([[1, 2, 0], [2, 4, 0], [0, 0, 1]], dtype=complex)
    with pytest.raises(DegenerateParameterError, match="condition"):
        linsys.solve(linsys.LinearSystem(m, np.ones(3, complex), ("a", "b", "c"), 0.0), "test matrix")


def test_threshold_config_is_degenerate():
    cfg = simple_config("parametric", c=(1, 1), lam=1.5)
    with pytest.raises(DegenerateParameterError, match="parametric"):
        linsys.steady_state(cfg, 0.0)


def _state(a1, a2):
    return linsys.SteadyState(np.array([a1, a2, 0]), ("alpha1", "alpha2", "beta"), 0.0)


def test_decompose_symmetric_input_is_bright():
    cfg = simple_config(g=(0.4, 0.4))
    bd = linsys.bright_dark_decompose(_state(1 + 1j, 1 + 1j), cfg)
    assert bd.alpha_b == pytest.approx(math.sqrt(2) * (1 + 1j), rel=1e-15)
    assert bd.alpha_d == 0


def test_decompose_projection():
    cfg = simple_config(g=(0.3, 0.4))
    bd = linsys.bright_dark_decompose(_state(2.0, 0.0), cfg)
    assert bd.alpha_b == pytest.approx(0.6 * 2, rel=1e-15)
    assert bd.alpha_d == pytest.approx(0.8 * 2, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    g1=st.floats(1e-3, 1e3), g2=st.floats(1e-3, 1e3),
    a=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
    b=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
)
def test_decompose_inverse(g1, g2, a, b):
    cfg = simple_config(g=(g1, g2))
    bd = linsys.bright_dark_decompose(_state(a, b), cfg)
    g = math.hypot(g1, g2)
    scale = max(abs(a), abs(b), 1e-300)
    assert abs((g2 * bd.alpha_b - g1 * bd.alpha_d) / g - b) <= 1e-14 * scale
    assert abs((g1 * bd.alpha_b + g2 * bd.alpha_d) / g - a) <= 1e-14 * scale


def test_decompose_without_coupling():
    with pytest.raises(UndefinedResultError):
        linsys.bright_dark_decompose(_state(1, 1), simple_config(g=(0, 0)))


def test_dark_basis_equal_losses():
    cfg = simple_config(kappa=(1.5, 1.5), g=(0.3, 0.9))
    m = linsys.transform_to_bright_dark_basis(cfg, 0.2).matrix
    assert m[1, 0] == 0 and m[0, 1] == 0 and m[1, 2] == 0 and m[2, 1] == 0


def test_dark_basis_unequal_losses():
    cfg = simple_config(kappa=(10.0, 1.0), g=(0.3, 0.9))
    m = linsys.transform_to_bright_dark_basis(cfg, 0.0).matrix
    g = math.hypot(0.3, 0.9)
    assert m[0, 1] == pytest.approx(9.0 * 0.27 / (2 * g * g), rel=1e-15)
    assert m[0, 2] == pytest.approx(1j * g, rel=1e-15)
    assert m[1, 2] == 0


@pytest.mark.parametrize("seed", range(5))
def test_dark_basis_is_similarity(seed):
    for cfg in verify.random_configs("baseline", 20, seed=seed, rate_range=(1e-2, 1e2)):
        d = float(np.random.default_rng(seed).uniform(-3, 3))
        ev0 = np.linalg.eigvals(linsys.build_system(cfg, d).matrix)
        ev1 = np.linalg.eigvals(linsys.transform_to_bright_dark_basis(cfg, d).matrix)
        gap = np.abs(ev0[:, None] - ev1[None, :])
        # each eigenvalue has a partner in the other spectrum, both ways
        worst = max(gap.min(axis=0).max(), gap.min(axis=1).max())
        assert worst <= 1e-10 * np.max(np.abs(ev0))


def test_dark_basis_solution_matches_projection():
    cfg = simple_config(kappa=(3.0, 0.5), eta=(0.6, 1.0), g=(0.7, 0.2), alpha_in=1 - 1j)
    y = linsys.solve(linsys.transform_to_bright_dark_basis(cfg, 0.4)).amplitudes
    bd = linsys.bright_dark_decompose(linsys.steady_state(cfg, 0.4), cfg)
    np.testing.assert_allclose(y[:2], [bd.alpha_b, bd.alpha_d], rtol=1e-13)


def test_baseline_efficiency_full_path():
    assert linsys.transfer(simple_config(c=(1, 1)), 0.0).chi == pytest.approx(4 / 9, rel=1e-13)


def test_no_conversion_without_first_coupling():
    assert linsys.transfer(simple_config(g=(0.0, 0.5)), 0.0).chi == 0


def test_weak_drive_unit_efficiency():
    cfg = closedform.apply_nulling(simple_config("weak_drive", c=(3, 3), c3=0.5))
    rep = linsys.transfer(cfg, 0.0)
    assert rep.chi == pytest.approx(1.0, rel=1e-13)
    assert rep.alpha_out3 is not None


def test_report_ledger_fields():
    cfg = simple_config(kappa=(1.0, 2.0), eta=(0.5, 0.25), c=(1, 2), alpha_in=2.0)
    st = linsys.steady_state(cfg, 0.3)
    rep = linsys.input_output(st, cfg)
    assert rep.flux_in == pytest.approx(4.0)
    assert rep.flux_internal_loss == pytest.approx(
        0.5 * abs(st["alpha1"]) ** 2 + 1.5 * abs(st["alpha2"]) ** 2, rel=1e-14
    )
    assert rep.flux_mechanical == pytest.approx(abs(st["beta"]) ** 2, rel=1e-14)
    assert abs(rep.imbalance) <= 1e-14 * rep.flux_in
    assert rep.chi == pytest.approx(abs(rep.alpha_out2) ** 2 / 4.0, rel=1e-15)


def test_parametric_ledger_needs_pump_work():
    cfg = simple_config("parametric", kappa=(2.0, 1.0), eta=(0.7, 0.9), c=(1, 2), lam=0.6 - 0.3j)
    rep = linsys.transfer(cfg, 0.25)
    assert rep.flux_parametric != 0
    assert abs(rep.imbalance) <= 1e-13 * (rep.flux_in + abs(rep.flux_parametric))


def test_stability_examples():
    assert linsys.stability(simple_config(c=(5, 0.1)))[0]
    big = dict(kappa=(1e3, 1e3), c=(1.0, 2.0))
    star = closedform.apply_nulling(simple_config("parametric", **big))
    assert linsys.stability(star)[0]
    th = closedform.parametric_threshold(star)
    assert not linsys.stability(simple_config("parametric", lam=1.01 * th, **big))[0]


def test_off_resonant_decay():
    for cfg in verify.random_configs("baseline", 30, seed=2, rate_range=(1e-2, 1e2)):
        scale = max(verify.kappa_max(cfg), closedform.derive(cfg).g_total)
        chi0 = linsys.transfer(cfg, 0.0).chi
        for d in (1e3 * scale, -1e3 * scale):
            assert linsys.transfer(cfg, d).chi < 1e-4 * chi0


def test_parametric_exact_off_resonance():
    for cfg in verify.random_configs("parametric", 50, seed=9):
        deltas = verify._deltas(cfg, 20, np.random.default_rng(1))
        assert verify.closed_form_error(cfg, deltas) <= 1e-9


def test_batched_solve_matches_single():
    cfg = simple_config("weak_drive", kappa=(1.0, 0.4), c=(2, 1), c3=1.0, alpha3_in=0.3j)
    deltas = np.array([-1.0, 0.0, 0.5])
    batch = linsys.steady_states(cfg, deltas).amplitudes
    for i, d in enumerate(deltas):
        np.testing.assert_allclose(batch[i], linsys.steady_state(cfg, d).amplitudes, rtol=1e-14)
