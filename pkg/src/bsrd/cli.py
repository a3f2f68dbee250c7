"""Command-line surface.

Subcommands: run, equilibrium, nondim, verify, fit-decay, plot.
Exit codes: 0 success, 1 validation error, 2 runtime/blow-up, 3
verification failure.  Errors print a single machine-parsable line
ERROR:<category>: <message> to stderr.
"""

import argparse
import json
import os
import sys

from . import __version__, config as config_mod, functionals, io as io_mod
from . import params as params_mod
from . import timestepper, verify
from .errors import (
    BlowUpError,
    FitError,
    GeometryError,
    ValidationError,
    VerificationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3


def _error(category, message):
    print(f"ERROR:{category}: {message}", file=sys.stderr)


def _cmd_run(args):
    parsed = config_mod.parse_config(args.config)
    out_dir = io_mod.output_dir(parsed.output)
    prefix = os.path.join(out_dir, parsed.output.prefix)
    if parsed.metadata:
        with open(f"{prefix}_meta.json", "w") as fh:
            json.dump(parsed.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
    writer = io_mod.DiagnosticsWriter(f"{prefix}_diagnostics.csv")
    try:
        traj = timestepper.run(parsed.run_config, on_row=writer.write)
    finally:
        writer.close()
    rc = parsed.run_config
    if parsed.output.snapshots:
        for i, state in enumerate(traj.states):
            io_mod.write_snapshot(state, rc.grid, rc.preset,
                                  f"{prefix}_snapshot_{i:05d}")
    io_mod.write_snapshot(traj.states[-1], rc.grid, rc.preset, f"{prefix}_final")
    print(f"wrote {prefix}_diagnostics.csv ({len(traj.rows)} rows)")
    return EXIT_OK


def _cmd_equilibrium(args):
    parsed = config_mod.parse_config(args.config)
    rc = parsed.run_config
    state = timestepper.initial_state(rc)
    mp = functionals.masses(state, rc.grid, rc.preset)
    area = rc.preset.P_x * rc.preset.H
    eq = functionals.equilibrium(mp.M1, mp.M2, area, rc.preset.P_x)
    print(json.dumps(
        {"u_inf": eq.u_inf, "w_inf": eq.w_inf, "z_inf": eq.z_inf,
         "M1": mp.M1, "M2": mp.M2},
        indent=2, sort_keys=True,
    ))
    return EXIT_OK


def _cmd_nondim(args):
    if os.path.exists(args.json):
        with open(args.json) as fh:
            doc = json.load(fh)
    else:
        try:
            doc = json.loads(args.json)
        except json.JSONDecodeError as err:
            raise ValidationError(
                f"argument is neither a file nor valid JSON: {err.msg}"
            ) from err
    try:
        dim = params_mod.DimensionalParameters(**doc)
    except TypeError as err:
        raise ValidationError(str(err)) from err
    sys_params, gamma, gamma_p = params_mod.nondimensionalize(dim)
    print(json.dumps(
        {
            "delta_omega": sys_params.delta_omega,
            "delta_gamma": sys_params.delta_gamma,
            "delta_gamma_p": sys_params.delta_gamma_p,
            "delta_k": sys_params.delta_k,
            "delta_kp": sys_params.delta_kp,
            "gamma": gamma,
            "gamma_p": gamma_p,
        },
        indent=2, sort_keys=True,
    ))
    return EXIT_OK


def _cmd_verify(args):
    names = [args.suite] if args.suite else None
    results = verify.run_suites(names)
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"{name:<{width}}  {status}  {detail}")
        failed += 0 if ok else 1
    if failed:
        raise VerificationError(f"{failed} of {len(results)} checks failed")
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _cmd_fit_decay(args):
    cols = io_mod.read_diagnostics(args.csv)
    series = [
        (t, e) for t, e in zip(cols["t"], cols["E_rel"])
        if e == e  # drop nan (moving-preset blanks)
    ]
    k, r2 = functionals.fit_decay_rate(series)
    print(json.dumps({"K": k, "R2": r2}, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_plot(args):
    columns = [c.strip() for c in args.cols.split(",") if c.strip()]
    if not columns:
        raise ValidationError("--cols must name at least one column")
    io_mod.emit_plot(args.csv, columns, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bsrd",
        description="Bulk-surface receptor-ligand dynamics on moving domains",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a configuration")
    p.add_argument("config")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("equilibrium", help="print the equilibrium state as JSON")
    p.add_argument("config")
    p.set_defaults(func=_cmd_equilibrium)

    p = sub.add_parser("nondim", help="convert dimensional constants (JSON file or inline)")
    p.add_argument("json")
    p.set_defaults(func=_cmd_nondim)

    p = sub.add_parser("verify", help="run the oracle suites")
    p.add_argument("--suite", choices=sorted(verify.SUITES), default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("fit-decay", help="fit the entropy decay rate from a CSV")
    p.add_argument("csv")
    p.set_defaults(func=_cmd_fit_decay)

    p = sub.add_parser("plot", help="render CSV columns as an SVG chart")
    p.add_argument("csv")
    p.add_argument("--cols", required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_plot)
    return parser


def cli(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ValidationError as err:
        _error("validation", err)
        return EXIT_VALIDATION
    except BlowUpError as err:
        _error("blowup", err)
        return EXIT_RUNTIME
    except (GeometryError, FitError, OSError) as err:
        _error("runtime", err)
        return EXIT_RUNTIME
    except VerificationError as err:
        _error("verification", err)
        return EXIT_VERIFY


def main():
    sys.exit(cli())


if __name__ == "__main__":
    main()
