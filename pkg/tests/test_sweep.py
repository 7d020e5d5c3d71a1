import json

import numpy as np
import pytest

from darkline import sweep
from darkline.errors import PathResolutionError
from darkline.model import derive, simple_config
from darkline.sweep import Axis, SweepSpec

C_VALUES = (0.1, 1.0, 10.0, 100.0)


def coop_spec(kind="baseline", nulling=False, deltas=(0.0,), **kw):
    extra = dict(c3=1.0) if kind == "weak_drive" else {}
    base = simple_config(kind, c=(1.0, 1.0), **extra, **kw)
    return SweepSpec(base, Axis(("c1", "c2"), C_VALUES), delta_grid=deltas, apply_nulling=nulling)


def test_baseline_chi_column():
    rows = sweep.run_sweep(coop_spec())
    got = [r.chi for r in rows]
    np.testing.assert_allclose(got, [0.027777777777777776, 4 / 9, 400 / 441, 40000 / 40401], rtol=1e-12)
    assert got[-1] == pytest.approx(0.99007, abs=5e-6)


def test_weak_drive_chi_column_with_nulling():
    rows = sweep.run_sweep(coop_spec("weak_drive", nulling=True))
    np.testing.assert_allclose([r.chi for r in rows], 1.0, rtol=1e-12)
    assert all(r.nulling is not None for r in rows)


@pytest.mark.parametrize("kind", ["weak_drive", "parametric"])
def test_nulling_column(kind):
    rows = sweep.run_sweep(coop_spec(kind, nulling=True, deltas=(0.0, 0.5)))
    for r in rows:
        if r.stable and r.delta == 0:
            assert r.abs2_bright <= 1e-20 * r.abs2_dark


def test_empty_delta_grid():
    spec = coop_spec(deltas=())
    assert sweep.run_sweep(spec) == []
    assert sweep.render_csv([], spec).count("\n") == 1


def test_single_row_csv():
    spec = SweepSpec(simple_config(c=(1, 1)))
    text = sweep.render_csv(sweep.run_sweep(spec), spec)
    assert len(text.splitlines()) == 2


def test_grid_completeness():
    base = simple_config("parametric", c=(1.0, 1.0), lam=0.2)
    spec = SweepSpec(base, Axis("c1", (0.5, 1.0, 2.0)), Axis("mode2.kappa", (1.0, 3.0)),
                     delta_grid=np.linspace(-1, 1, 7))
    rows = sweep.run_sweep(spec)
    assert len(rows) == 3 * 2 * 7
    # row-major: axis2 varies faster than axis1, delta fastest
    assert [r.axis_values["mode2.kappa"] for r in rows[:14:7]] == [1.0, 3.0]
    assert rows[14].axis_values["c1"] == 1.0


def test_derived_paths_applied_after_plain():
    base = simple_config(c=(1.0, 1.0))
    cfg = sweep.apply_point(base, [("c1", 4.0), ("mode1.kappa", 10.0)])
    assert cfg.mode1.kappa == 10.0
    assert derive(cfg).c1 == pytest.approx(4.0, rel=1e-15)


def test_determinism_and_thread_order(tmp_path):
    spec = SweepSpec(simple_config("weak_drive", c=(1, 2), c3=1.0),
                     Axis("c1", (0.3, 1.0, 3.0, 9.0)), delta_grid=np.linspace(-2, 2, 9),
                     apply_nulling=True)
    a = sweep.render_csv(sweep.run_sweep(spec, threads=1), spec)
    b = sweep.render_csv(sweep.run_sweep(spec, threads=1), spec)
    c = sweep.render_csv(sweep.run_sweep(spec, threads=4), spec)
    assert a == b == c


def test_csv_round_trip(tmp_path):
    spec = coop_spec("parametric", nulling=True, deltas=np.linspace(-2, 2, 5), alpha_in=0.3 - 1.1j,
                     kappa=(1e4, 1e4))
    rows = sweep.run_sweep(spec)
    assert all(r.stable for r in rows)
    path = tmp_path / "out.csv"
    sweep.write_csv(rows, path, spec)
    back = sweep.read_csv(path)
    assert len(back) == len(rows)
    for rec, row in zip(back, rows):
        out2 = rec["re_alpha_out2"] ** 2 + rec["im_alpha_out2"] ** 2
        flux = rec["re_alpha_in1"] ** 2 + rec["im_alpha_in1"] ** 2
        assert out2 / flux == pytest.approx(rec["chi"], rel=1e-15)
        assert rec["chi"] == row.chi
        assert rec["stable"] is True


def test_unstable_points_are_recorded():
    base = simple_config("parametric", kappa=(100.0, 100.0), c=(1.0, 1.0))
    spec = SweepSpec(base, Axis("lambda", (0.5, 2.0)), delta_grid=(0.0, 1.0))
    rows = sweep.run_sweep(spec)
    assert [r.stable for r in rows] == [True, True, False, False]
    assert rows[2].amplitudes is None and rows[2].chi is None
    text = sweep.render_csv(rows, spec).splitlines()
    assert text[3].split(",").count("") > 10


def test_json_summary_argmax(tmp_path):
    base = simple_config(kappa=(1.0, 1.0), c=(2.0, 2.0))
    spec = SweepSpec(base, delta_grid=np.linspace(-3, 3, 61))
    rows = sweep.run_sweep(spec)
    path = tmp_path / "s.json"
    sweep.write_json_summary(rows, path, spec)
    doc = json.loads(path.read_text())
    assert doc["chi"]["argmax"]["delta"] == pytest.approx(0.0, abs=1e-12)
    assert doc["derived"]["c1"] == pytest.approx(2.0)
    assert doc["grid"]["rows"] == 61


def test_json_summary_records_nulling_values():
    rows = sweep.run_sweep(coop_spec("weak_drive", nulling=True))
    doc = sweep.summary(rows, coop_spec("weak_drive", nulling=True))
    assert len(doc["nulling_values"]) == 4


@pytest.mark.parametrize(
    "path, kind",
    [("mode1.kapa", "baseline"), ("g3.g", "baseline"), ("lambda", "weak_drive"), ("signal.delta", "baseline")],
)
def test_bad_paths_fail_fast(path, kind):
    extra = dict(c3=1.0) if kind == "weak_drive" else {}
    base = simple_config(kind, c=(1, 1), **extra)
    with pytest.raises(PathResolutionError, match=path.replace(".", r"\.")):
        SweepSpec(base, Axis(path, (1.0,)))


def test_non_finite_axis_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        Axis("c1", (1.0, float("nan")))


def test_load_sweep_spec_ranges():
    text = json.dumps({
        "axis1": {"paths": ["c1", "c2"], "values": {"start": 0.1, "stop": 100, "num": 4, "log": True}},
        "delta": {"start": -1, "stop": 1, "num": 3},
        "apply_nulling": True,
    })
    spec = sweep.load_sweep_spec(text, simple_config("weak_drive", c=(1, 1), c3=1.0))
    np.testing.assert_allclose(spec.axis1.values, C_VALUES, rtol=1e-12)
    assert spec.delta_grid == (-1.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="unknown sweep keys"):
        sweep.load_sweep_spec('{"axes": []}', spec.base_config)
