"""Parameter sweeps, spectra and their CSV / JSON serialisation.

A sweep varies up to two axes over a base config and solves every grid
point at every detuning in ``delta_grid``. Axes name config fields by dotted
path (``"mode1.kappa"``, ``"g2.g"``, ``"lambda"``); an axis may tie several
paths to the same value, e.g. ``("c1", "c2")`` for C1 = C2.

Besides the stored fields, three kinds of derived path are accepted:
``c1``/``c2``/``c3`` (cooperativity, set by rescaling the coupling) and
``modeN.eta`` (set by rescaling ``kappa_ext``). Derived paths are applied
after plain ones so that, e.g., sweeping ``mode1.kappa`` at fixed ``c1``
does what it says.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from . import closedform, linsys
from .errors import ConfigError, NoSolutionError, PathResolutionError, UndefinedResultError
from .model import Scheme, SchemeConfig, derive, with_cooperativity

OUTPUTS = frozenset({"amplitudes", "bright_dark", "chi", "flux", "stability"})

_MODE_FIELDS = {"kappa", "kappa_ext"}
_PLAIN = {
    **{f"mode{i}.{f}": (f"mode{i}", f) for i in (1, 2, 3) for f in _MODE_FIELDS},
    "mech.gamma_m": ("mech", "gamma_m"),
    "g1.g": ("g1", "g"),
    "g2.g": ("g2", "g"),
    "g3.g": ("g3", "g"),
    "signal.amplitude": ("signal", "amplitude"),
    "aux_drive.amplitude": ("aux_drive", "amplitude"),
    "lambda": ("lam", None),
}
_DERIVED = {"c1", "c2", "c3", "mode1.eta", "mode2.eta", "mode3.eta"}
_NEEDS_WEAK = {"mode3.kappa", "mode3.kappa_ext", "mode3.eta", "g3.g", "c3", "aux_drive.amplitude"}


@dataclass(frozen=True)
class Axis:
    paths: Tuple[str, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        paths = (self.paths,) if isinstance(self.paths, str) else tuple(self.paths)
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "values", tuple(self.values))
        for v in self.values:
            if not np.isfinite(v):
                raise ValueError(f"axis {'+'.join(paths)} has a non-finite value {v!r}")


@dataclass(frozen=True)
class SweepSpec:
    base_config: SchemeConfig
    axis1: Optional[Axis] = None
    axis2: Optional[Axis] = None
    delta_grid: Tuple[float, ...] = (0.0,)
    apply_nulling: bool = False
    outputs: FrozenSet[str] = OUTPUTS

    def __post_init__(self):
        object.__setattr__(self, "delta_grid", tuple(float(d) for d in self.delta_grid))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        unknown = self.outputs - OUTPUTS
        if unknown:
            raise ValueError(f"unknown outputs {sorted(unknown)}; choose from {sorted(OUTPUTS)}")
        for axis in self.axes:
            for path in axis.paths:
                check_path(self.base_config, path)

    @property
    def axes(self) -> Tuple[Axis, ...]:
        return tuple(a for a in (self.axis1, self.axis2) if a is not None)

    @property
    def axis_paths(self) -> Tuple[str, ...]:
        return tuple(p for a in self.axes for p in a.paths)


@dataclass
class SweepRow:
    axis_values: Dict[str, float]
    delta: float
    stable: bool
    amplitudes: Optional[Dict[str, complex]] = None
    outputs: Optional[Dict[str, complex]] = None
    abs2_bright: Optional[float] = None
    abs2_dark: Optional[float] = None
    chi: Optional[float] = None
    flux: Optional[Dict[str, float]] = None
    nulling: Optional[complex] = None
    slowest_rate: Optional[float] = None


def check_path(config: SchemeConfig, path: str) -> None:
    """Fail fast on a path that does not name a field of ``config``."""
    if path in ("signal.delta", "aux_drive.delta"):
        raise PathResolutionError(f"parameter path {path!r}: sweep detuning with delta_grid")
    if path not in _PLAIN and path not in _DERIVED:
        raise PathResolutionError(f"unknown parameter path {path!r}")
    if path in _NEEDS_WEAK and config.kind is not Scheme.WEAK_DRIVE:
        raise PathResolutionError(
            f"parameter path {path!r} does not exist for a {config.kind.value} config"
        )
    if path == "lambda" and config.kind is not Scheme.PARAMETRIC:
        raise PathResolutionError("parameter path 'lambda' needs a parametric config")


def set_path(config: SchemeConfig, path: str, value) -> SchemeConfig:
    check_path(config, path)
    if path in ("c1", "c2", "c3"):
        return with_cooperativity(config, int(path[1]), float(value))
    if path.endswith(".eta"):
        name = path.split(".")[0]
        mode = getattr(config, name)
        return replace(config, **{name: replace(mode, kappa_ext=mode.kappa * float(value))})
    attr, sub = _PLAIN[path]
    if sub is None:
        return replace(config, **{attr: value})
    obj = getattr(config, attr)
    if attr in ("signal", "aux_drive"):
        value = complex(value) if isinstance(value, complex) else float(value)
    else:
        value = float(value)
    return replace(config, **{attr: replace(obj, **{sub: value})})


def apply_point(config: SchemeConfig, assignments: Sequence[Tuple[str, float]]) -> SchemeConfig:
    plain = [(p, v) for p, v in assignments if p not in _DERIVED]
    derived = [(p, v) for p, v in assignments if p in _DERIVED]
    for p, v in plain + derived:
        config = set_path(config, p, v)
    return config


def _nulling_value(config):
    if config.kind is Scheme.WEAK_DRIVE:
        return config.aux_drive.amplitude
    if config.kind is Scheme.PARAMETRIC:
        return config.lam
    return None


def _grid_points(spec: SweepSpec):
    axes = spec.axes
    if not axes:
        return [()]
    return list(itertools.product(*[[(a, v) for v in a.values] for a in axes]))


def _evaluate_point(spec: SweepSpec, point) -> List[SweepRow]:
    assignments = [(p, v) for axis, v in point for p in axis.paths]
    axis_values = {p: v for p, v in assignments}
    try:
        cfg = apply_point(spec.base_config, assignments)
        if spec.apply_nulling:
            cfg = closedform.apply_nulling(cfg)
    except (ConfigError, NoSolutionError, UndefinedResultError) as exc:
        raise type(exc)(f"at grid point {axis_values}: {exc}") from exc
    nulling = _nulling_value(cfg) if spec.apply_nulling else None
    deltas = np.asarray(spec.delta_grid, dtype=float)
    stable, slowest = linsys.stability(cfg)
    if not stable:
        return [
            SweepRow(dict(axis_values), float(d), False, nulling=nulling, slowest_rate=slowest)
            for d in deltas
        ]
    if deltas.size == 0:
        return []
    states = linsys.steady_states(cfg, deltas)
    bd = linsys.bright_dark_decompose(states, cfg) if derive(cfg).g_total > 0 else None
    rows = []
    for i, d in enumerate(deltas):
        st = linsys.SteadyState(states.amplitudes[i], states.variable_labels, float(d))
        rep = linsys.input_output(st, cfg, verdict=(stable, slowest))
        outs = {
            "alpha_in1": complex(cfg.signal.amplitude),
            "alpha_out1": rep.alpha_out1,
            "alpha_out2": rep.alpha_out2,
        }
        if rep.alpha_out3 is not None:
            outs["alpha_out3"] = rep.alpha_out3
        rows.append(
            SweepRow(
                axis_values=dict(axis_values),
                delta=float(d),
                stable=True,
                amplitudes=dict(zip(st.variable_labels, (complex(z) for z in st.amplitudes))),
                outputs=outs,
                abs2_bright=None if bd is None else linsys.abs2(bd.alpha_b[i]),
                abs2_dark=None if bd is None else linsys.abs2(bd.alpha_d[i]),
                chi=rep.chi,
                flux={
                    "flux_in": rep.flux_in,
                    "flux_out": rep.flux_out,
                    "flux_internal_loss": rep.flux_internal_loss,
                    "flux_mechanical": rep.flux_mechanical,
                    "flux_parametric": rep.flux_parametric,
                },
                nulling=nulling,
                slowest_rate=slowest,
            )
        )
    return rows


def _threads(threads):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("DARKLINE_THREADS")
    return max(1, int(env)) if env else 1


def run_sweep(spec: SweepSpec, threads: Optional[int] = None) -> List[SweepRow]:
    """Evaluate every grid point; rows come back in row-major grid order.

    Grid points may be evaluated concurrently (``threads`` or the
    ``DARKLINE_THREADS`` environment variable); output order never depends on it.
    """
    points = _grid_points(spec)
    n = _threads(threads)
    if n == 1 or len(points) == 1:
        chunks = [_evaluate_point(spec, p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            chunks = list(pool.map(lambda p: _evaluate_point(spec, p), points))
    return [row for chunk in chunks for row in chunk]


# --- serialisation ------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return format(float(x), ".17g")


def csv_columns(spec: SweepSpec) -> List[str]:
    cfg = spec.base_config
    cols = list(spec.axis_paths) + ["delta"]
    if "amplitudes" in spec.outputs:
        labels = list(linsys.LABELS[cfg.kind]) + ["alpha_in1", "alpha_out1", "alpha_out2"]
        if cfg.kind is Scheme.WEAK_DRIVE:
            labels.append("alpha_out3")
        for lab in labels:
            cols += [f"re_{lab}", f"im_{lab}"]
    if "bright_dark" in spec.outputs:
        cols += ["abs2_bright", "abs2_dark"]
    if "chi" in spec.outputs:
        cols.append("chi")
    if "flux" in spec.outputs:
        cols += ["flux_in", "flux_out", "flux_internal_loss", "flux_mechanical"]
        if cfg.kind is Scheme.PARAMETRIC:
            cols.append("flux_parametric")
    if "stability" in spec.outputs:
        cols += ["stable", "slowest_rate"]
    if spec.apply_nulling and cfg.kind is Scheme.WEAK_DRIVE:
        cols += ["re_null_alpha3_in", "im_null_alpha3_in"]
    elif spec.apply_nulling and cfg.kind is Scheme.PARAMETRIC:
        cols += ["re_null_lambda", "im_null_lambda"]
    return cols


def _row_record(row: SweepRow) -> Dict[str, object]:
    rec: Dict[str, object] = dict(row.axis_values)
    rec["delta"] = row.delta
    for group in (row.amplitudes or {}, row.outputs or {}):
        for lab, z in group.items():
            rec[f"re_{lab}"] = z.real
            rec[f"im_{lab}"] = z.imag
    rec["abs2_bright"] = row.abs2_bright
    rec["abs2_dark"] = row.abs2_dark
    rec["chi"] = row.chi
    rec.update(row.flux or {})
    rec["stable"] = row.stable
    rec["slowest_rate"] = row.slowest_rate
    if row.nulling is not None:
        z = complex(row.nulling)
        rec["re_null_alpha3_in"] = rec["re_null_lambda"] = z.real
        rec["im_null_alpha3_in"] = rec["im_null_lambda"] = z.imag
    return rec


def render_csv(rows: Sequence[SweepRow], spec: SweepSpec) -> str:
    cols = csv_columns(spec)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        rec = _row_record(row)
        writer.writerow([_fmt(rec.get(c)) for c in cols])
    return buf.getvalue()


def write_csv(rows: Sequence[SweepRow], destination, spec: SweepSpec) -> None:
    with open(destination, "w", newline="", encoding="utf-8") as fh:
        fh.write(render_csv(rows, spec))


def read_csv(source) -> List[Dict[str, object]]:
    """Parse a sweep CSV back into dicts of floats (``None`` for empty cells)."""
    out = []
    with open(source, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            parsed = {}
            for k, v in rec.items():
                if v == "":
                    parsed[k] = None
                elif v in ("true", "false"):
                    parsed[k] = v == "true"
                else:
                    parsed[k] = float(v)
            out.append(parsed)
    return out


def summary(rows: Sequence[SweepRow], spec: SweepSpec) -> Dict[str, object]:
    from .scenario import config_to_dict

    p = derive(spec.base_config)
    chis = [(r.chi, i) for i, r in enumerate(rows) if r.chi is not None]
    chi_block = None
    if chis:
        best = max(chis, key=lambda t: t[0])
        top = rows[best[1]]
        chi_block = {
            "min": min(c for c, _ in chis),
            "max": best[0],
            "argmax": {"axis_values": top.axis_values, "delta": top.delta, "row": best[1]},
        }
    nulling = []
    if spec.apply_nulling:
        seen = {}
        for r in rows:
            key = tuple(sorted(r.axis_values.items()))
            if key not in seen and r.nulling is not None:
                seen[key] = None
                nulling.append({"axis_values": r.axis_values, "value": [r.nulling.real, r.nulling.imag]})
    return {
        "scheme": spec.base_config.kind.value,
        "config": config_to_dict(spec.base_config),
        "derived": {"c1": p.c1, "c2": p.c2, "c3": p.c3, "g_total": p.g_total, "t": p.t},
        "grid": {
            "axes": [{"paths": list(a.paths), "values": list(a.values)} for a in spec.axes],
            "n_delta": len(spec.delta_grid),
            "rows": len(rows),
            "unstable_rows": sum(1 for r in rows if not r.stable),
        },
        "apply_nulling": spec.apply_nulling,
        "nulling_values": nulling,
        "chi": chi_block,
    }


def write_json_summary(rows: Sequence[SweepRow], destination, spec: SweepSpec) -> None:
    with open(destination, "w", encoding="utf-8") as fh:
        json.dump(summary(rows, spec), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _values(entry, what):
    if isinstance(entry, dict):
        try:
            start, stop, num = float(entry["start"]), float(entry["stop"]), int(entry["num"])
        except KeyError as exc:
            raise ValueError(f"{what}: range needs start, stop and num") from exc
        if entry.get("log"):
            return tuple(np.geomspace(start, stop, num).tolist())
        return tuple(np.linspace(start, stop, num).tolist())
    return tuple(float(v) for v in entry)


def load_sweep_spec(text: str, base_config: SchemeConfig) -> SweepSpec:
    """Build a :class:`SweepSpec` from the JSON sweep-file format (see README)."""
    data = json.loads(text)
    allowed = {"axis1", "axis2", "delta", "apply_nulling", "outputs"}
    extra = set(data) - allowed
    if extra:
        raise ValueError(f"unknown sweep keys {sorted(extra)}; allowed {sorted(allowed)}")
    axes = []
    for key in ("axis1", "axis2"):
        entry = data.get(key)
        if entry is None:
            axes.append(None)
            continue
        paths = entry["paths"] if "paths" in entry else [entry["path"]]
        axes.append(Axis(tuple(paths), _values(entry["values"], key)))
    return SweepSpec(
        base_config=base_config,
        axis1=axes[0],
        axis2=axes[1],
        delta_grid=_values(data.get("delta", [0.0]), "delta"),
        apply_nulling=bool(data.get("apply_nulling", False)),
        outputs=frozenset(data.get("outputs", sorted(OUTPUTS))),
    )
