"""Command-line entry point.

Subcommands: ``run <config>``, ``sweep <config>``, ``mms <config>``,
``verify``, ``fit-decay <diagnostics.csv> [--window t_lo t_hi]``.
Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 acceptance
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .config import ConfigError, load_run_config, load_sweep_config
from .diagnostics import fit_decay_rate
from .scheme import SchemeError
from .tridiag import TridiagonalError

USAGE_ERROR = 1
NUMERICAL_ERROR = 2
ACCEPTANCE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage problems, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mhd1d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_p = sub.add_parser("run", help="execute one configured simulation")
    run_p.add_argument("config", help="run configuration file")

    sweep_p = sub.add_parser("sweep", help="one run per axis value")
    sweep_p.add_argument("config", help="sweep configuration file")

    mms_p = sub.add_parser("mms", help="manufactured-solution refinement study")
    mms_p.add_argument("config", help="base run configuration file")
    mms_p.add_argument(
        "--resolutions", type=int, nargs="+", default=[50, 100, 200],
        help="grid sizes, increasing",
    )
    mms_p.add_argument("--t-end", type=float, default=0.5)
    mms_p.add_argument("--dt-factor", type=float, default=1.0)
    mms_p.add_argument(
        "--dt-power", type=int, default=2, choices=(1, 2),
        help="2: dt ~ dx^2 (spatial order), 1: dt ~ dx (control)",
    )

    sub.add_parser("verify", help="run every acceptance criterion")

    fit_p = sub.add_parser("fit-decay", help="exponential rate from a diagnostics CSV")
    fit_p.add_argument("csv", help="diagnostics.csv from a run directory")
    fit_p.add_argument(
        "--window", type=float, nargs=2, metavar=("T_LO", "T_HI"), default=None
    )
    return parser


def _cmd_run(args) -> int:
    from .runner import run_simulation

    cfg = load_run_config(args.config)
    outdir = run_simulation(cfg)
    print(f"run complete: {outdir}")
    return 0


def _cmd_sweep(args) -> int:
    from .runner import run_sweep

    sweep = load_sweep_config(args.config)
    outdir = run_sweep(sweep)
    print(f"sweep complete: {outdir / 'sweep.csv'}")
    return 0


def _cmd_mms(args) -> int:
    from .runner import run_mms

    cfg = load_run_config(args.config)
    outdir = run_mms(
        cfg,
        resolutions=list(args.resolutions),
        t_end=args.t_end,
        dt_factor=args.dt_factor,
        dt_power=args.dt_power,
    )
    for line in (outdir / "mms.csv").read_text().splitlines():
        print(line)
    return 0


def _cmd_verify(_args) -> int:
    from .acceptance import run_all

    results = run_all()
    for result in results:
        print(result.line())
    report = [
        {
            "id": r.cid,
            "name": r.name,
            "passed": r.passed,
            "measured": r.measured,
            "required": r.required,
            "seconds": round(r.seconds, 3),
        }
        for r in results
    ]
    print(json.dumps({"criteria": report, "all_passed": all(r.passed for r in results)}))
    return 0 if all(r.passed for r in results) else ACCEPTANCE_ERROR


def _cmd_fit_decay(args) -> int:
    with open(args.csv, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "t" not in reader.fieldnames \
                or "h1_dist" not in reader.fieldnames:
            print("error: CSV must have 't' and 'h1_dist' columns", file=sys.stderr)
            return USAGE_ERROR
        series = [(float(row["t"]), float(row["h1_dist"])) for row in reader]
    if args.window is not None:
        window = (args.window[0], args.window[1])
    else:
        window = (series[0][0], series[-1][0])
    fit = fit_decay_rate(series, window)
    print(
        json.dumps(
            {
                "rate": fit.eta_hat,
                "r_squared": fit.r_squared,
                "n_samples": fit.n_samples,
                "window": [window[0], window[1]],
            }
        )
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "mms": _cmd_mms,
        "verify": _cmd_verify,
        "fit-decay": _cmd_fit_decay,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (SchemeError, TridiagonalError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
