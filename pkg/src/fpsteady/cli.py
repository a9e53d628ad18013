"""Command-line interface.

Subcommands:
  sweep <config>           run a parameter sweep and emit CSV/JSON/PGM
  point <config>           evaluate the config's observables at fixed_params
  phase-diagram            emit the mean-field phase classification grid
  validate                 oracle-vs-analytic cross-check suite
  figures                  regenerate all bundled figure-class outputs
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import oracle, paramp, sweep
from .errors import FpsteadyError
from .phasespace import GridSpec


def _cmd_sweep(args):
    cfg = sweep.load_config(args.config)
    if args.prefix:
        cfg.output_prefix = args.prefix
    result = sweep.run_sweep(cfg)
    written = sweep.emit(result, cfg)
    for path in written:
        print(path)
    if result.failures:
        print(f"warning: {len(result.failures)} grid point(s) failed "
              f"(see status column)", file=sys.stderr)
    report = result.diagnostics.get("oracle_check")
    if report is not None and not all(r.get("passed") for r in report):
        print("oracle check FAILED", file=sys.stderr)
        return 1
    return 0


def _cmd_point(args):
    cfg = sweep.load_config(args.config)
    cfg.axes = []  # evaluate at fixed_params only
    result = sweep.run_sweep(cfg)
    if result.failures:
        failure = result.failures[0]
        print(json.dumps({"error": failure.error_type,
                          "message": failure.message}, indent=1))
        return 1
    out = {}
    for key, grid in result.tables.items():
        val = grid.ravel()[0]
        out[key] = sweep._json_value(complex(val) if np.iscomplexobj(grid)
                                     else float(val))
    print(json.dumps(out, indent=1, sort_keys=True))
    return 0


def _cmd_phase_diagram(args):
    cfg = sweep.parse_config({
        "schema_version": sweep.SCHEMA_VERSION,
        "model": "parametric_duffing",
        "observables": ["phase"],
        "fixed": {"gamma1": args.gamma1, "gamma2": 0.0, "u": args.u,
                  "eps1": 0.0},
        "axes": [
            {"name": "delta", "min": args.delta_min, "max": args.delta_max,
             "count": args.count},
            {"name": "eps2", "min": args.eps2_min, "max": args.eps2_max,
             "count": args.count},
        ],
        "output": {"format": "pgm", "prefix": args.prefix},
    }, where="phase-diagram")
    result = sweep.run_sweep(cfg)
    for path in sweep.emit(result, cfg):
        print(path)
    return 1 if result.failures else 0


def _check(name, passed, detail, failures):
    status = "PASS" if passed else "FAIL"
    print(f"[{status}] {name}: {detail}")
    if not passed:
        failures.append(name)


def _cmd_validate(args):
    """Analytic-vs-oracle cross checks at desk scale."""
    failures = []

    # exact parametric model, three-phase drive sequence (gamma1 units)
    for e2, dim in ((2.0, 30), (4.25, 40), (6.25, 50)):
        p = paramp.ParampParams(delta=-12.0, eps1=0.0, eps2=e2, u=5.0,
                                gamma1=1.0)
        spec = sweep._oracle_spec_for_paramp(p, dim)
        state = oracle.steady_state(oracle.build_liouvillian(spec), spec.dims)
        ref = oracle.expectation_string(state, "ad0 a0")
        val = paramp.moment(p, 1, 1)
        err = abs(val - ref) / abs(ref)
        _check(f"paramp nbar eps2={e2}", err < 1e-6, f"rel error {err:.2e}",
               failures)

    # generic complex-parameter point, mixed losses and coherent drive
    p = paramp.ParampParams(delta=0.7, eps1=1.2 + 0.8j, eps2=1.5 - 0.6j,
                            u=-0.9, gamma1=1.0, gamma2=0.4)
    spec = sweep._oracle_spec_for_paramp(p, 40)
    state = oracle.steady_state(oracle.build_liouvillian(spec), spec.dims)
    for m, n, string in ((1, 1, "ad0 a0"), (0, 2, "a0 a0"),
                         (2, 2, "ad0 ad0 a0 a0")):
        ref = oracle.expectation_string(state, string)
        val = paramp.moment(p, m, n)
        err = abs(val - ref) / abs(ref)
        _check(f"paramp moment({m},{n})", err < 1e-6, f"rel error {err:.2e}",
               failures)

    # P(n) against the density-matrix diagonal
    p = paramp.ParampParams(delta=-12.0, eps1=0.0, eps2=4.25, u=5.0,
                            gamma1=1.0)
    spec = sweep._oracle_spec_for_paramp(p, 40)
    state = oracle.steady_state(oracle.build_liouvillian(spec), spec.dims)
    worst = max(abs(paramp.pn(p, n) - state.rho[n, n].real)
                for n in range(15))
    _check("paramp P(n)", worst < 1e-6, f"max abs error {worst:.2e}", failures)

    # Q-function pointwise against the coherent-state trace
    grid = GridSpec.square(3.0, 41)
    q_analytic = paramp.qfunction(p, grid)
    q_oracle = oracle.qfunction_from_rho(state, grid)
    worst = float(np.max(np.abs(q_analytic.values - q_oracle.values)))
    _check("paramp Q grid", worst < 1e-6, f"max abs error {worst:.2e}",
           failures)

    # mean-field classifier vs direct stability expectations
    probes = (
        (0.0, 0.5, paramp.Phase.One),
        (-2.0, 1.5, paramp.Phase.Three),
        (0.0, 2.0, paramp.Phase.Two),
    )
    ok = all(
        paramp.classical_fixed_points(
            paramp.ParampParams(delta=d, eps1=0.0, eps2=e2, u=1.0, gamma1=1.0)
        ).phase is expect
        for d, e2, expect in probes
    )
    _check("mean-field phases", ok, "One/Three/Two sequence", failures)

    if failures:
        print(f"{len(failures)} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def _cmd_figures(args):
    from . import figures  # deferred: pulls in matplotlib

    written = figures.render_all(args.outdir, names=args.only or None)
    for path in written:
        print(path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fpsteady",
        description="Steady states of driven dissipative nonlinear oscillators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a sweep from a TOML config")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--prefix", help="override output.prefix")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_point = sub.add_parser("point", help="evaluate one parameter point")
    p_point.add_argument("config")
    p_point.set_defaults(fn=_cmd_point)

    p_phase = sub.add_parser("phase-diagram",
                             help="mean-field phase classification grid")
    p_phase.add_argument("--delta-min", type=float, default=-3.0)
    p_phase.add_argument("--delta-max", type=float, default=3.0)
    p_phase.add_argument("--eps2-min", type=float, default=0.0)
    p_phase.add_argument("--eps2-max", type=float, default=3.0)
    p_phase.add_argument("--count", type=int, default=200)
    p_phase.add_argument("--gamma1", type=float, default=1.0)
    p_phase.add_argument("--u", type=float, default=1.0)
    p_phase.add_argument("--prefix", default="phase_diagram")
    p_phase.set_defaults(fn=_cmd_phase_diagram)

    p_val = sub.add_parser("validate", help="oracle-vs-analytic cross checks")
    p_val.set_defaults(fn=_cmd_validate)

    p_fig = sub.add_parser("figures", help="render bundled figure outputs")
    p_fig.add_argument("--outdir", default="figures")
    p_fig.add_argument("--only", nargs="*", help="subset of figure names")
    p_fig.set_defaults(fn=_cmd_figures)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except FpsteadyError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"IO error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
