"""
Command-line entry point.

CLI units: bandwidths in Hz, lengths in mm, wavelengths in microns, grid
times in 1e-13 s. Tables go out as CSV with a header row, records as JSON.
Floats are written with ``repr`` so reruns are byte-identical.

Exit codes: 0 success, 2 invalid input, 3 divergent integrand (or every
sweep point diverged), 4 quadrature failure, 1 anything else.
"""

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .absorption import (
    REFERENCE_SETUP,
    evaluate,
    p2_coherent,
    reference_result,
)
from .biphoton import SetupParams, amplitude_grid
from .dispersion import index_effective, index_ordinary, load_crystal, velocity_bundle
from .errors import (
    AllPointsDivergedError,
    DivergenceError,
    DomainError,
    NoonAbsError,
    QuadratureError,
)
from .ideal_states import scaling_table
from .numerics import DEFAULT_REL_TOL
from .optimize import SWEEP_COLUMNS, THREADS_ENV, load_spec, maximize, sweep, sweep_rows

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_INPUT = 2
EXIT_DIVERGENCE = 3
EXIT_QUADRATURE = 4

SPEC_SCHEMA = """\
spec file (key = value, optional [sweep] header, or JSON with the same keys):
  objective   = pulsed | cw | nofilter_limit
  sigma_e     = <Hz> | log(min, max, n) | log10(lo_exp, hi_exp, n) | lin(min, max, n)
  sigma_o     = same forms
  sigma_p     = same forms (Hz)
  length_mm   = same forms (mm)
  kappa_f     = same forms (Hz)
  lambda_pump = <microns>   (optional, default 0.4)
  crystal     = bbo | <path to [crystal] file>   (optional)
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _add_setup_flags(p):
    p.add_argument("--se", type=float, help="extraordinary-arm filter FWHM (Hz)")
    p.add_argument("--so", type=float, help="ordinary-arm filter FWHM (Hz)")
    p.add_argument("--sp", type=float, help="pump FWHM (Hz)")
    p.add_argument("--L", type=float, dest="L", help="crystal length (mm)")
    p.add_argument("--kf", type=float, help="final-state FWHM of the absorber (Hz)")
    p.add_argument("--lambda-pump", type=float, default=None, help="pump wavelength (um), default 0.4")
    p.add_argument("--crystal", default=None, help="preset name or [crystal] file, default bbo")
    p.add_argument("--config", help="JSON result or spec file whose params fill unset flags")


def _setup_from_args(parser, args, needed):
    values = {}
    if args.config:
        spec = load_spec(args.config)
        if spec.free:
            parser.error("--config must fix every parameter")
        values = {"se": spec.sigma_e, "so": spec.sigma_o, "sp": spec.sigma_p,
                  "L": spec.length * 1e3, "kf": spec.kappa_f,
                  "lambda_pump": spec.lambda_pump, "crystal": spec.crystal}
    for key in ("se", "so", "sp", "L", "kf", "lambda_pump", "crystal"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    missing = [k for k in needed if k not in values]
    if missing:
        parser.error("missing " + ", ".join(f"--{k}" for k in missing))
    crystal = load_crystal(values.get("crystal", "bbo"))
    return SetupParams(
        sigma_e=values.get("se", 1e16),
        sigma_o=values.get("so", 1e16),
        sigma_p=values.get("sp", 0.0),
        length=values.get("L", 0.0) * 1e-3,
        kappa_f=values.get("kf", 1e14),
        lambda_pump=values.get("lambda_pump", 0.4),
        crystal=crystal,
    )


def _reference(setup):
    return REFERENCE_SETUP.with_(lambda_pump=setup.lambda_pump, crystal=setup.crystal)


# command handlers ---------------------------------------------------------

def cmd_dispersion(args, parser):
    crystal = load_crystal(args.crystal or "bbo")
    lam = args.lambda_pump
    v = velocity_bundle(lam, crystal)
    out = {
        "crystal": crystal.name,
        "lambda_pump": lam,
        "optic_axis_angle_deg": crystal.optic_axis_angle_deg,
        "n_ordinary_daughter": float(index_ordinary(2.0 * lam, crystal)),
        "n_effective_daughter": float(index_effective(2.0 * lam, crystal=crystal)),
        "n_effective_pump": float(index_effective(lam, crystal=crystal)),
    }
    out.update({k: float(x) for k, x in v.as_dict().items()})
    _emit(_json_text(out), args.output)


def cmd_ideal_scan(args, parser):
    rows = scaling_table(args.max_n)
    _emit(_csv_text(("N", "thermal", "coherent", "fock", "noon"), rows), args.output)


def cmd_amplitude_grid(args, parser):
    setup = _setup_from_args(parser, args, ("se", "so", "sp", "L"))
    times, mag = amplitude_grid(args.t_min * 1e-13, args.t_max * 1e-13, args.points, setup,
                                full=not args.script_a)
    t = times / 1e-13
    n = len(times)
    rows = ((float(t[i]), float(t[j]), float(mag[i, j])) for i in range(n) for j in range(n))
    _emit(_csv_text(("t1_1e-13s", "t2_1e-13s", "abs_A"), rows), args.output)


def _result_record(setup, kind, rel_tol):
    res = evaluate(setup, kind, rel_tol)
    ref = reference_result(kind if kind != "nofilter_limit" else "nofilter", _reference(setup), rel_tol)
    return res.as_dict(ref)


def _emit_record(rec, args):
    if args.csv:
        cols = [k for k in rec if k != "params"] + list(rec["params"])
        row = [rec[k] for k in rec if k != "params"] + list(rec["params"].values())
        _emit(_csv_text(cols, [row]), args.output)
    else:
        _emit(_json_text(rec), args.output)


def cmd_absorption(args, parser):
    if args.coherent is not None:
        setup = _setup_from_args(parser, args, ("sp", "L", "kf"))
        _emit_record(p2_coherent(setup, args.coherent, args.rel_tol).as_dict(), args)
        return
    needed = ("se", "so", "L") if args.cw else ("se", "so", "sp", "L", "kf")
    setup = _setup_from_args(parser, args, needed)
    _emit_record(_result_record(setup, "cw" if args.cw else "pulsed", args.rel_tol), args)


def cmd_cw_rate(args, parser):
    setup = _setup_from_args(parser, args, ("se", "so", "L"))
    _emit_record(_result_record(setup, "cw", args.rel_tol), args)


def cmd_coherent_compare(args, parser):
    setup = _setup_from_args(parser, args, ("sp", "L", "kf"))
    rec = p2_coherent(setup, args.intensity, args.rel_tol).as_dict()
    _emit_record(rec, args)


def cmd_sweep(args, parser):
    spec = load_spec(args.spec)
    points = sweep(spec, args.threads, args.rel_tol)
    _emit(_csv_text(SWEEP_COLUMNS, sweep_rows(points)), args.output)


def cmd_optimize(args, parser):
    spec = load_spec(args.spec)
    report = maximize(spec, args.tolerance, args.budget, args.threads, args.rel_tol)
    _emit(_json_text(report.as_dict()), args.output)


def cmd_reproduce_figure(args, parser):
    from . import figures, plotting

    data = figures.build(args.figure, args.threads, args.rel_tol)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"fig{args.figure}.csv"
    png_path = out_dir / f"fig{args.figure}.png"
    csv_path.write_text(_csv_text(data.columns, data.rows))
    written = [str(csv_path)]
    if not args.no_png:
        plotting.render(data, png_path)
        written.append(str(png_path))
    _emit(_json_text({"figure": args.figure, "title": data.title, "rows": len(data.rows),
                      "files": written}), args.output)


# parser -------------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("must be positive and finite")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help=f"worker threads for grids (default ${THREADS_ENV} or 1)")
    common.add_argument("--rel-tol", type=_positive_float, default=DEFAULT_REL_TOL,
                        help="quadrature relative tolerance (default 1e-8)")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    parser = _Parser(prog="noonabs", description=__doc__.split("\n\n")[0].strip(),
                     epilog=SPEC_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dispersion", parents=[common], help="group velocities (JSON)")
    p.add_argument("--lambda-pump", type=_positive_float, default=0.4)
    p.add_argument("--crystal", default=None)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("ideal-scan", parents=[common], help="ideal-state scaling table (CSV)")
    p.add_argument("--max-n", type=_positive_int, default=8)
    p.set_defaults(func=cmd_ideal_scan)

    p = sub.add_parser("amplitude-grid", parents=[common], help="|A| on a time grid (CSV)")
    p.add_argument("--t-min", type=float, default=-10.0, help="1e-13 s")
    p.add_argument("--t-max", type=float, default=50.0, help="1e-13 s")
    p.add_argument("--points", type=_positive_int, default=121)
    p.add_argument("--script-a", action="store_true", help="before the 50:50 beam splitter")
    _add_setup_flags(p)
    p.set_defaults(func=cmd_amplitude_grid)

    p = sub.add_parser("absorption", parents=[common], help="P2 (or cw rate) at one setup (JSON)",
                       epilog=SPEC_SCHEMA, formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_setup_flags(p)
    p.add_argument("--cw", action="store_true", help="continuous-wave pump rate")
    p.add_argument("--coherent", type=_positive_float, metavar="I",
                   help="fair coherent-state comparison at intensity I")
    p.add_argument("--csv", action="store_true", help="one-row CSV instead of JSON")
    p.set_defaults(func=cmd_absorption)

    p = sub.add_parser("cw-rate", parents=[common], help="cw two-photon rate (JSON)")
    _add_setup_flags(p)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_cw_rate)

    p = sub.add_parser("coherent-compare", parents=[common], help="coherent vs N00N (JSON)")
    _add_setup_flags(p)
    p.add_argument("--intensity", type=_positive_float, default=1.0)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_coherent_compare)

    for name, func, what in (("sweep", cmd_sweep, "grid evaluation (CSV)"),
                             ("optimize", cmd_optimize, "grid + simplex maximization (JSON)")):
        p = sub.add_parser(name, parents=[common], help=what, epilog=SPEC_SCHEMA,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--spec", required=True, help="spec file path")
        if name == "optimize":
            p.add_argument("--tolerance", type=_positive_float, default=1e-4)
            p.add_argument("--budget", type=_positive_int, default=200)
        p.set_defaults(func=func)

    p = sub.add_parser("reproduce-figure", parents=[common], help="figure dataset (CSV + PNG)")
    p.add_argument("figure", type=int, choices=(1, 3, 4, 5, 6, 7, 8))
    p.add_argument("--out", default=".", help="directory for figN.csv and figN.png")
    p.add_argument("--no-png", action="store_true", help="skip the rendered figure")
    p.set_defaults(func=cmd_reproduce_figure)
    for p in sub.choices.values():
        p.set_defaults(subparser=p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, args.subparser)
    except (DivergenceError, AllPointsDivergedError) as exc:
        sys.stderr.write(f"divergence: {exc}\n")
        return EXIT_DIVERGENCE
    except QuadratureError as exc:
        sys.stderr.write(f"quadrature failure: {exc}\n")
        return EXIT_QUADRATURE
    except (DomainError, OSError, ValueError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except NoonAbsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_OTHER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
