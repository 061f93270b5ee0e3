"""Command-line entry point: ``dtnlab <experiment> [--config PATH] [--out DIR] ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..assembly import NumericalError, export_coo
from ..eigen import solve_eigensystem
from .config import ConfigError, RunConfig, default_config
from .experiments import EXPERIMENTS, Setup, run_dtn
from .report import write_rows_csv

log = logging.getLogger("dtnlab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtnlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--out", type=Path, help="output directory (default: config output_dir)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="row table format")
    common.add_argument("--dump-matrices", action="store_true",
                        help="write A_II, A_IB and the A_BB diagonal of q as COO text files")
    common.add_argument("--dump-eigenvalues", action="store_true", help="write eigenvalues of q as CSV")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress PASS/FAIL lines")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name, fn in EXPERIMENTS.items():
        doc = (fn.__doc__ or name).strip().splitlines()[0]
        sub.add_parser(name, parents=[common], help=doc, description=doc)
    return parser


def load_config(args) -> RunConfig:
    config = RunConfig.load(args.config) if args.config else default_config(args.experiment)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("seed must be non-negative")
        config = config.replace(seed=args.seed)
    return config


def _dump(config: RunConfig, out: Path, matrices: bool, eigenvalues: bool) -> None:
    setup = Setup(config, tuple(config.grid["counts"]))
    op = setup.operator(config.q)
    if matrices:
        mdir = out / "matrices"
        mdir.mkdir(parents=True, exist_ok=True)
        export_coo(op.a_ii, mdir / "A_II.coo")
        export_coo(op.a_ib, mdir / "A_IB.coo")
        export_coo(np.diag(op.a_bb), mdir / "A_BB.coo")
    if eigenvalues:
        es = solve_eigensystem(op)
        out.mkdir(parents=True, exist_ok=True)
        write_rows_csv([{"k": k + 1, "lambda": float(v)} for k, v in enumerate(es.lambdas)],
                       out / "eigenvalues.csv")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = load_config(args)
        out = args.out or Path(config.output_dir)
        if args.experiment == "dtn":
            out.mkdir(parents=True, exist_ok=True)
            report = run_dtn(config, export_dir=out)
        else:
            report = EXPERIMENTS[args.experiment](config)
        report.write(out, args.format)
        _dump(config, out, args.dump_matrices, args.dump_eigenvalues)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_USAGE
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # grid/potential validation errors surface as ValueError subclasses
        log.error("invalid input: %s", exc)
        return EXIT_USAGE
    if not args.quiet:
        for line in report.lines():
            print(line)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
