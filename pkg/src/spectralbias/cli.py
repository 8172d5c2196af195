"""Command-line entry point.

Subcommands::

    spectralbias run <config.json>        # run an experiment, write CSVs
    spectralbias validate <config.json>   # check a config, report field errors
    spectralbias spectrum --kernel F --d D --nmax N [--out FILE]
    spectralbias vignette <name> [--sigma2 S] [--d D] [--out DIR]

Exit codes: 0 success, 1 configuration or usage error, 2 missing or
malformed data files, 3 invariant violation (bound exceeded beyond
Monte Carlo error; outputs and a defect report are still written).
"""

from __future__ import annotations

import argparse
import csv
import sys

from .config import ConfigError, default_config, load_config, validate_config
from .data import DataFormatError, DataUnavailableError
from .experiments import InvariantViolationError, run_experiment
from .kernels import KERNEL_FAMILIES, KernelSpec
from .spectrum import spectrum_table

_EXIT_OK = 0
_EXIT_CONFIG = 1
_EXIT_DATA = 2
_EXIT_INVARIANT = 3

_VIGNETTE_NAMES = {
    "manifold": "vignette-manifold",
    "parity": "vignette-parity",
    "copyhead": "vignette-copyhead",
    "vignette-manifold": "vignette-manifold",
    "vignette-parity": "vignette-parity",
    "vignette-copyhead": "vignette-copyhead",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the config-error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(_EXIT_CONFIG)


def _build_parser() -> _Parser:
    parser = _Parser(prog="spectralbias", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", help="path to a JSON experiment config")

    val_p = sub.add_parser("validate", help="validate a JSON config")
    val_p.add_argument("config", help="path to a JSON experiment config")

    spec_p = sub.add_parser("spectrum", help="tabulate kernel eigenvalues")
    spec_p.add_argument("--kernel", required=True, choices=sorted(KERNEL_FAMILIES))
    spec_p.add_argument("--d", type=int, required=True, help="ambient dimension")
    spec_p.add_argument("--nmax", type=int, required=True, help="largest degree")
    spec_p.add_argument("--out", default=None, help="CSV path (default stdout)")

    vig_p = sub.add_parser("vignette", help="emit a worked-example table")
    vig_p.add_argument("name", choices=sorted(_VIGNETTE_NAMES))
    vig_p.add_argument("--sigma2", type=float, default=None, help="ridge override")
    vig_p.add_argument("--d", type=int, default=None, help="dimension override")
    vig_p.add_argument("--out", default=None, help="output directory")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config)
    for kind, path in sorted(result.csv_paths.items()):
        print(f"{kind}: {path}")
    print(f"manifest: {result.manifest_path}")
    return _EXIT_OK


def _cmd_validate(args) -> int:
    errors = validate_config(args.config)
    if errors:
        for err in errors:
            print(err, file=sys.stderr)
        return _EXIT_CONFIG
    print("ok")
    return _EXIT_OK


def _cmd_spectrum(args) -> int:
    if args.d < 3:
        print("spectrum: --d must be at least 3", file=sys.stderr)
        return _EXIT_CONFIG
    if args.nmax < 0:
        print("spectrum: --nmax must be nonnegative", file=sys.stderr)
        return _EXIT_CONFIG
    lines = spectrum_table(KernelSpec(args.kernel, args.d), args.d, args.nmax)
    columns = ("measure_id", "d", "n", "lambda", "degeneracy")
    handle = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for line in lines:
            row = line.csv_row()
            writer.writerow(
                [repr(v) if isinstance(v, float) else str(v) for v in (row[c] for c in columns)]
            )
    finally:
        if args.out:
            handle.close()
    return _EXIT_OK


def _cmd_vignette(args) -> int:
    overrides = {}
    if args.sigma2 is not None:
        overrides["sigma2"] = args.sigma2
    if args.d is not None:
        overrides["d"] = args.d
    if args.out is not None:
        overrides["out_dir"] = args.out
    config = default_config(_VIGNETTE_NAMES[args.name], **overrides)
    result = run_experiment(config)
    for kind, path in sorted(result.csv_paths.items()):
        print(f"{kind}: {path}")
    return _EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "spectrum": _cmd_spectrum,
    "vignette": _cmd_vignette,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        for detail in getattr(exc, "errors", []):
            if detail != str(exc):
                print(f"  {detail}", file=sys.stderr)
        return _EXIT_CONFIG
    except (DataUnavailableError, DataFormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return _EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
