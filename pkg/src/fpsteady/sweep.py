"""Parameter sweeps, config ingestion, and tabular/image output.

A sweep is described by a single TOML file (see README for the schema).
Frequencies and rates in configs are given as nu = omega/2pi in MHz, matching
the usual circuit-QED captions; :func:`to_angular` is the only place the 2*pi
enters.  Internally everything is angular (rad/us).

Outputs are deterministic: identical configs produce byte-identical CSV and
JSON files (fixed float formatting via ``repr``, fixed iteration order, no
timestamps in emitted files).
"""

from __future__ import annotations

import json
import math
import os
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python < 3.11
    import tomli as _toml

from . import oracle, paramp, specfn, transmon
from .errors import ConfigError, FpsteadyError
from .phasespace import GridSpec, QGrid

SCHEMA_VERSION = 1
CODE_VERSION = "0.1.0"

MODELS = ("transmon_cavity", "parametric_duffing", "oracle")

# Fields parsed as frequencies (nu, MHz) and converted to angular units.
_FREQUENCY_FIELDS = {
    "transmon_cavity": (
        "delta_c", "delta_ct", "g", "chi", "gamma_c", "gamma_t", "epsilon",
    ),
    "parametric_duffing": ("delta", "eps1", "eps2", "u", "gamma1", "gamma2"),
}
_FREQUENCY_FIELDS["oracle"] = _FREQUENCY_FIELDS["parametric_duffing"]

_COMPLEX_FIELDS = {"epsilon", "eps1", "eps2"}

_MOMENT_RE = re.compile(r"^(a_|b_)?moment_(\d+)_(\d+)$")
_PN_RE = re.compile(r"^pn_(\d+)$")
_PEAKS_RE = re.compile(r"^peaks_(\d+)$")


def to_angular(nu):
    """omega = 2*pi*nu; the single nu-to-angular conversion point."""
    return 2.0 * math.pi * nu


def from_angular(omega):
    return omega / (2.0 * math.pi)


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass
class SweepConfig:
    model: str
    fixed_params: dict
    axes: list
    observables: list
    output_format: str = "csv"
    output_prefix: str = "sweep"
    obs_options: dict = field(default_factory=dict)
    oracle_check: dict = field(default_factory=dict)
    workers: int = 1
    control: specfn.SeriesControl = field(default_factory=specfn.SeriesControl)


@dataclass
class PointFailure:
    """Typed per-point failure record; sweeps never abort on one point."""

    error_type: str
    message: str


@dataclass
class SweepResult:
    manifest: dict
    axes: list
    tables: dict          # column name -> ndarray (grid-shaped, leading axes)
    qgrids: dict          # (observable, flat index) -> QGrid
    failures: dict        # flat index -> PointFailure
    diagnostics: dict


def _coerce_value(name, raw, where):
    """Parse a scalar/complex config value ([re, im] lists allowed)."""
    if isinstance(raw, (list, tuple)):
        if len(raw) != 2 or not all(isinstance(v, (int, float)) for v in raw):
            raise ConfigError(f"{where}.{name}: complex values are [re, im]")
        return complex(raw[0], raw[1])
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{where}.{name}: expected a number, got {raw!r}")
    return float(raw)


def load_config(path):
    """Parse and validate a sweep config file into a SweepConfig."""
    with open(path, "rb") as fh:
        try:
            doc = _toml.load(fh)
        except _toml.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(doc, where=str(path))


def parse_config(doc, where="config"):
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"{where}: schema_version must be {SCHEMA_VERSION} "
            f"(got {doc.get('schema_version')!r})"
        )
    model = doc.get("model")
    if model not in MODELS:
        raise ConfigError(f"{where}: model must be one of {MODELS}, got {model!r}")

    freq_fields = _FREQUENCY_FIELDS[model]
    fixed = {}
    for name, raw in sorted(doc.get("fixed", {}).items()):
        val = _coerce_value(name, raw, where + ".fixed")
        if name in freq_fields:
            val = to_angular(val)
        fixed[name] = val

    axes = []
    for i, ax in enumerate(doc.get("axes", [])):
        try:
            axis = Axis(
                name=str(ax["name"]),
                min=float(ax["min"]),
                max=float(ax["max"]),
                count=int(ax["count"]),
                scale=str(ax.get("scale", "linear")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.axes[{i}]: {exc}") from exc
        if axis.count < 1:
            raise ConfigError(f"{where}.axes[{i}]: count must be >= 1")
        if axis.scale not in ("linear", "log"):
            raise ConfigError(f"{where}.axes[{i}]: scale must be linear|log")
        if axis.scale == "log" and (axis.min <= 0 or axis.max <= 0):
            raise ConfigError(f"{where}.axes[{i}]: log axes need positive range")
        if not (math.isfinite(axis.min) and math.isfinite(axis.max)):
            raise ConfigError(f"{where}.axes[{i}]: range must be finite")
        axes.append(axis)
    if len(axes) > 2:
        raise ConfigError(f"{where}: at most 2 swept axes are supported")

    observables = list(doc.get("observables", []))
    if not observables:
        raise ConfigError(f"{where}: at least one observable is required")
    obs_options = doc.get("observable_options", {})
    for name in observables:
        _resolve_observable(model, name, obs_options)  # raises ConfigError

    out = doc.get("output", {})
    output_format = out.get("format", "csv")
    if output_format not in ("csv", "json", "pgm"):
        raise ConfigError(f"{where}.output.format must be csv|json|pgm")

    opts = doc.get("options", {})
    control = specfn.SeriesControl(
        rel_tol=float(opts.get("rel_tol", 1e-14)),
        max_terms=int(opts.get("max_terms", 10_000)),
    )
    workers = int(opts.get("workers", 1))
    if workers < 1:
        raise ConfigError(f"{where}.options.workers must be >= 1")

    return SweepConfig(
        model=model,
        fixed_params=fixed,
        axes=axes,
        observables=observables,
        output_format=output_format,
        output_prefix=str(out.get("prefix", "sweep")),
        obs_options=obs_options,
        oracle_check=doc.get("oracle_check", {}),
        workers=workers,
        control=control,
    )


def _build_params(model, values):
    if model == "transmon_cavity":
        return transmon.TransmonCavityParams(
            delta_c=values.get("delta_c", 0.0),
            delta_ct=values.get("delta_ct", 0.0),
            g=values.get("g", 0.0),
            chi=values.get("chi", 0.0),
            gamma_c=values.get("gamma_c", 0.0),
            gamma_t=values.get("gamma_t", 0.0),
            epsilon=values.get("epsilon", 0.0),
        )
    return paramp.ParampParams(
        delta=float(np.real(values.get("delta", 0.0))),
        eps1=values.get("eps1", 0.0),
        eps2=values.get("eps2", 0.0),
        u=float(np.real(values.get("u", 0.0))),
        gamma1=float(np.real(values.get("gamma1", 0.0))),
        gamma2=float(np.real(values.get("gamma2", 0.0))),
    )


def _grid_from_options(options, default_half_width=4.0, default_points=81):
    half = float(options.get("half_width", default_half_width))
    pts = int(options.get("points", default_points))
    return GridSpec.square(half, pts)


def _oracle_spec_for_paramp(p, dim):
    return oracle.FockOperatorSpec(
        dims=[dim],
        hamiltonian_terms=[
            (p.delta, "ad0 a0"),
            (1j * p.eps1, "ad0"),
            (-1j * complex(p.eps1).conjugate(), "a0"),
            (0.5j * p.eps2, "ad0 ad0"),
            (-0.5j * complex(p.eps2).conjugate(), "a0 a0"),
            (0.5 * p.u, "ad0 ad0 a0 a0"),
        ],
        collapse_ops=[
            (math.sqrt(2.0 * p.gamma1), "a0"),
            (math.sqrt(p.gamma2), "a0 a0"),
        ],
    )


class _OracleModel:
    """Brute-force evaluation of the parametric model for spot checks."""

    def __init__(self, p, start_dim=16):
        self.p = p
        builder = lambda dims: _oracle_spec_for_paramp(p, dims[0])
        self.solve = oracle.converged_solve(
            builder, {"nbar": "ad0 a0"}, [start_dim]
        )
        self.state = self.solve["state"]

    def moment(self, m, n):
        string = " ".join(["ad0"] * m + ["a0"] * n) or ""
        if not string:
            return 1.0 + 0j
        return oracle.expectation_string(self.state, string)

    def pn(self, n):
        if n >= self.state.dim:
            return 0.0
        return float(self.state.rho[n, n].real)


def _resolve_observable(model, name, options):
    """Return a callable(params, control) -> dict of column -> value.

    Values are floats, complex numbers, or QGrid instances (handled
    specially by the emitters).  Raises ConfigError for unknown names.
    """
    mm = _MOMENT_RE.match(name)
    if mm:
        mode, m, n = mm.group(1), int(mm.group(2)), int(mm.group(3))
        if model == "transmon_cavity":
            if mode == "a_":
                fn = lambda p, c: transmon.cavity_moment(p, m, n, control=c)
            else:
                fn = lambda p, c: transmon.transmon_moment(p, m, n, control=c)
        else:
            if mode in ("a_", "b_"):
                raise ConfigError(f"{name}: mode prefixes apply to transmon_cavity")
            if model == "oracle":
                fn = lambda p, c: _OracleModel(p).moment(m, n)
            else:
                fn = lambda p, c: paramp.moment(p, m, n, control=c)
        return lambda p, c: {name: fn(p, c)}

    pn_match = _PN_RE.match(name)
    if pn_match:
        k = int(pn_match.group(1))
        if model == "transmon_cavity":
            return lambda p, c: {name: transmon.transmon_pn(p, k, control=c)}
        if model == "oracle":
            return lambda p, c: {name: _OracleModel(p).pn(k)}
        return lambda p, c: {name: paramp.pn(p, k, control=c)}

    if name == "reflection":
        if model != "transmon_cavity":
            raise ConfigError("reflection is a transmon_cavity observable")
        return lambda p, c: {name: transmon.reflection(p, control=c)}

    pk = _PEAKS_RE.match(name)
    if pk:
        if model != "transmon_cavity":
            raise ConfigError(f"{name}: peak prediction is transmon_cavity only")
        k = int(pk.group(1))

        def peaks(p, c):
            roots = transmon.predict_peaks(p, k)
            cols = {f"{name}_count": float(len(roots))}
            for i in range(3):
                cols[f"{name}_{i}"] = (
                    from_angular(roots[i]) if i < len(roots) else math.nan
                )
            return cols

        return peaks

    if name == "dx_min":
        if model == "transmon_cavity":
            raise ConfigError("dx_min is a parametric_duffing observable")

        def dx(p, c):
            rec = paramp.min_quadrature_uncertainty(p, control=c)
            return {"dx_min": rec["value"], "theta_star": rec["theta_star"]}

        return dx

    if name == "phase":
        if model != "parametric_duffing":
            raise ConfigError("phase is a parametric_duffing observable")
        return lambda p, c: {
            name: float(paramp.classical_fixed_points(p).phase.value)
        }

    if name == "cat":
        if model != "parametric_duffing":
            raise ConfigError("cat is a parametric_duffing observable")
        grid = _grid_from_options(options.get("cat", {}), 4.0, 121)

        def cat(p, c):
            cm = paramp.cat_metrics(p, grid, control=c)
            return {
                "cat_nbar": cm.mean_photons,
                "cat_peak": cm.peak_value,
                "cat_bridge": cm.bridge_value,
                "cat_bridge_ratio": cm.bridge_ratio,
            }

        return cat

    if name == "qgrid":
        grid = _grid_from_options(options.get("qgrid", {}), 4.0, 81)

        def qfn(p, c):
            if model == "transmon_cavity":
                q = transmon.transmon_qfunction(p, grid, control=c)
            elif model == "oracle":
                om = _OracleModel(p)
                q = oracle.qfunction_from_rho(om.state, grid)
            else:
                q = paramp.qfunction(p, grid, control=c)
            maxima = q.local_maxima()
            return {
                "qgrid": q,
                "qgrid_max": float(q.values.max()),
                "qgrid_maxima_count": float(len(maxima)),
                "qgrid_norm": q.normalization_estimate,
            }

        return qfn

    raise ConfigError(f"unknown observable {name!r} for model {model!r}")


def _point_values(cfg, axis_values):
    values = dict(cfg.fixed_params)
    for axis, v in zip(cfg.axes, axis_values):
        values[axis.name] = (
            to_angular(v) if axis.name in _FREQUENCY_FIELDS[cfg.model] else v
        )
    return values


def _evaluate_point(cfg, axis_values):
    """All observable columns at one grid point; FpsteadyError is captured."""
    cols = {}
    try:
        params = _build_params(cfg.model, _point_values(cfg, axis_values))
        for name in cfg.observables:
            fn = _resolve_observable(cfg.model, name, cfg.obs_options)
            cols.update(fn(params, cfg.control))
    except FpsteadyError as exc:
        return cols, PointFailure(type(exc).__name__, str(exc))
    return cols, None


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate every observable on the full axis grid.

    Failures are isolated per grid point (recorded, never raised), and the
    result is independent of the worker count.
    """
    axis_arrays = [ax.values() for ax in cfg.axes]
    shape = tuple(len(a) for a in axis_arrays) or (1,)
    npoints = int(np.prod(shape))
    index_tuples = list(np.ndindex(*shape))
    point_axis_values = [
        [axis_arrays[d][idx[d]] for d in range(len(cfg.axes))]
        for idx in index_tuples
    ]

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(
                pool.map(lambda av: _evaluate_point(cfg, av), point_axis_values)
            )
    else:
        outcomes = [_evaluate_point(cfg, av) for av in point_axis_values]

    # column discovery in first-seen order, fixed across runs
    columns = []
    for cols, _ in outcomes:
        for key in cols:
            if not isinstance(cols[key], QGrid) and key not in columns:
                columns.append(key)

    tables = {}
    for key in columns:
        sample = next(
            (c[key] for c, _ in outcomes if key in c and not isinstance(c[key], QGrid)),
            0.0,
        )
        dtype = complex if isinstance(sample, complex) else float
        grid = np.full(shape, math.nan, dtype=dtype)
        for flat, (cols, _) in enumerate(outcomes):
            if key in cols:
                grid[index_tuples[flat]] = cols[key]
        tables[key] = grid

    qgrids = {}
    failures = {}
    for flat, (cols, failure) in enumerate(outcomes):
        for key, val in cols.items():
            if isinstance(val, QGrid):
                qgrids[(key, flat)] = val
        if failure is not None:
            failures[flat] = failure

    diagnostics = {
        "points": npoints,
        "failed_points": len(failures),
        "oracle_check": _run_oracle_check(cfg, point_axis_values),
    }
    manifest = {
        "code_version": CODE_VERSION,
        "schema_version": SCHEMA_VERSION,
        "model": cfg.model,
        "fixed_params_mhz": {
            k: _json_value(
                from_angular(v) if k in _FREQUENCY_FIELDS[cfg.model] else v
            )
            for k, v in sorted(cfg.fixed_params.items())
        },
        "axes": [
            {"name": a.name, "min": a.min, "max": a.max,
             "count": a.count, "scale": a.scale}
            for a in cfg.axes
        ],
        "observables": list(cfg.observables),
        "units": "frequencies are nu = omega/2pi in MHz",
        "pgm_intensity": "linear, v -> round(255*(v - min)/(max - min))",
    }
    return SweepResult(
        manifest=manifest,
        axes=[(a.name, axis_arrays[i]) for i, a in enumerate(cfg.axes)],
        tables=tables,
        qgrids=qgrids,
        failures=failures,
        diagnostics=diagnostics,
    )


def _run_oracle_check(cfg, point_axis_values):
    oc = cfg.oracle_check
    if not oc or not oc.get("enabled", False) or cfg.model != "parametric_duffing":
        return None
    tol = float(oc.get("tolerance", 1e-6))
    max_points = int(oc.get("max_points", 3))
    start_dim = int(oc.get("start_dim", 16))
    rng = random.Random(20_000_101)  # fixed seed: deterministic subsample
    chosen = sorted(
        rng.sample(range(len(point_axis_values)),
                   min(max_points, len(point_axis_values)))
    )
    report = []
    for flat in chosen:
        try:
            params = _build_params(
                cfg.model, _point_values(cfg, point_axis_values[flat])
            )
            analytic = paramp.moment(params, 1, 1, control=cfg.control)
            om = _OracleModel(params, start_dim=start_dim)
            ref = om.moment(1, 1)
            err = abs(analytic - ref) / max(abs(ref), 1e-9)
            report.append(
                {"point": flat, "rel_error": err, "passed": bool(err <= tol)}
            )
        except FpsteadyError as exc:
            report.append(
                {"point": flat, "error": f"{type(exc).__name__}: {exc}",
                 "passed": False}
            )
    return report


# ---------------------------------------------------------------------------
# emission

def _fmt(x):
    """Shortest-roundtrip decimal text for one real value."""
    if isinstance(x, (np.floating, np.integer)):
        x = float(x)
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(x)


def _json_value(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return float(v)
    return v


def csv_lines(result: SweepResult):
    """CSV body: '#' manifest header lines, column header, one row per point."""
    lines = []
    for key in ("code_version", "schema_version", "model", "units"):
        lines.append(f"# {key}: {result.manifest[key]}")
    lines.append(
        "# fixed: " + json.dumps(result.manifest["fixed_params_mhz"],
                                 sort_keys=True)
    )
    for ax in result.manifest["axes"]:
        lines.append("# axis: " + json.dumps(ax, sort_keys=True))
    if result.failures:
        lines.append(f"# failed_points: {len(result.failures)}")

    header = [name for name, _ in result.axes]
    flat_cols = []
    for key, grid in result.tables.items():
        if np.iscomplexobj(grid):
            flat_cols.append((key + "_re", grid.real))
            flat_cols.append((key + "_im", grid.imag))
        else:
            flat_cols.append((key, grid))
    header += [name for name, _ in flat_cols]
    header.append("status")
    lines.append(",".join(header))

    axis_arrays = [vals for _, vals in result.axes]
    shape = tuple(len(a) for a in axis_arrays) or (1,)
    for flat, idx in enumerate(np.ndindex(*shape)):
        row = [_fmt(axis_arrays[d][idx[d]]) for d in range(len(axis_arrays))]
        row += [_fmt(grid[idx]) for _, grid in flat_cols]
        failure = result.failures.get(flat)
        row.append("ok" if failure is None else failure.error_type)
        lines.append(",".join(row))
    return lines


def pgm_bytes(values, lo=None, hi=None):
    """Binary P5 PGM (row-major, maxval 255) of a real 2-D array."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise ConfigError("PGM output needs a 2-D real table")
    lo = float(np.nanmin(v)) if lo is None else lo
    hi = float(np.nanmax(v)) if hi is None else hi
    span = hi - lo if hi > lo else 1.0
    pix = np.clip(np.round(255.0 * (v - lo) / span), 0, 255)
    pix = np.nan_to_num(pix, nan=0.0).astype(np.uint8)
    header = f"P5\n{v.shape[1]} {v.shape[0]}\n255\n".encode("ascii")
    return header + pix.tobytes()


def ppm_bytes(values, lo=None, hi=None):
    """Binary P6 PPM with the documented blue-to-red mapping.

    Intensity t in [0,1] maps to (r, g, b) = (255*t, 0, 255*(1-t)).
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise ConfigError("PPM output needs a 2-D real table")
    lo = float(np.nanmin(v)) if lo is None else lo
    hi = float(np.nanmax(v)) if hi is None else hi
    span = hi - lo if hi > lo else 1.0
    t = np.clip((v - lo) / span, 0.0, 1.0)
    t = np.nan_to_num(t, nan=0.0)
    rgb = np.empty(v.shape + (3,), dtype=np.uint8)
    rgb[..., 0] = np.round(255.0 * t)
    rgb[..., 1] = 0
    rgb[..., 2] = np.round(255.0 * (1.0 - t))
    header = f"P6\n{v.shape[1]} {v.shape[0]}\n255\n".encode("ascii")
    return header + rgb.tobytes()


def emit(result: SweepResult, cfg: SweepConfig):
    """Write the sweep outputs; returns the list of files written.

    CSV is always written; JSON mirrors the full result when requested; PGM
    is written for each 2-D real table (and each stored Q grid).
    """
    prefix = cfg.output_prefix
    directory = os.path.dirname(prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)
    written = []

    csv_path = prefix + ".csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(csv_lines(result)) + "\n")
    written.append(csv_path)

    if cfg.output_format == "json":
        doc = {
            "manifest": result.manifest,
            "axes": {name: list(map(float, vals)) for name, vals in result.axes},
            "tables": {
                key: [_json_value(v) for v in grid.ravel()]
                for key, grid in result.tables.items()
            },
            "failures": {
                str(k): {"error_type": f.error_type, "message": f.message}
                for k, f in sorted(result.failures.items())
            },
            "diagnostics": result.diagnostics,
        }
        json_path = prefix + ".json"
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True, default=_json_value)
            fh.write("\n")
        written.append(json_path)

    if cfg.output_format == "pgm":
        for key, grid in result.tables.items():
            if not np.iscomplexobj(grid) and grid.ndim == 2:
                path = f"{prefix}_{key}.pgm"
                with open(path, "wb") as fh:
                    fh.write(pgm_bytes(grid))
                written.append(path)

    for (key, flat), qgrid in sorted(result.qgrids.items()):
        path = f"{prefix}_{key}_{flat}.pgm"
        with open(path, "wb") as fh:
            fh.write(pgm_bytes(qgrid.values))
        written.append(path)
    return written
