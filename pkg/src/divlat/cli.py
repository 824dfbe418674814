"""Command-line front end.

Subcommands::

    divlat compute   --input pairs.csv --format csv [--tolerance X]
    divlat verify    [--families a,b] [--pairs N] [--dims 2,3,5] [--seed S] [--tolerance X]
                     [--out path] [--format json|csv|text]
    divlat constants [--grid-points N] [--out path] [--format json|csv|text]
    divlat pyramid   --input pairs.csv [--format csv|json] [--dot lattice.dot]
    divlat catalog   [--out path]

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import joblib
import pandas as pd

from divlat import distributions, inequalities, measures
from divlat.base_logger import logging
from divlat.constants import MIN_GRID_POINTS, check_polynomials, sweep
from divlat.errors import ConfigError, DivlatError, OddRowCount, RowValidationError
from divlat.generators import ALL_MEASURES
from divlat.pyramid import pyramid_table, to_dot

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

OUTPUT_FORMATS = ("json", "csv", "text")
INPUT_FORMATS = ("csv", "json")
FLOAT_FORMAT = "%.12g"
CHAIN5_LINKS = ("Delta-I", "I-M1", "M1-M2", "M2-h", "h-M3", "M3-J", "J-T", "T-K0", "K0-Psi", "Psi-F")


def default_threads():
    env = os.environ.get("DIVLAT_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"DIVLAT_THREADS must be an integer, got {env!r}")
    return joblib.cpu_count()


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-10
    pairs: int = 10000
    dims: tuple = (2, 3, 5, 10, 50)
    seed: int = 42
    grid_points: int = 10000
    output_format: str = "json"
    threads: int = 1
    families: tuple = field(default=inequalities.FAMILIES)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tolerance}")
        if self.pairs < 1:
            raise ConfigError(f"pairs must be >= 1, got {self.pairs}")
        if not self.dims or any(n < 2 for n in self.dims):
            raise ConfigError(f"every dimension must be >= 2, got {list(self.dims)}")
        if self.grid_points < MIN_GRID_POINTS:
            raise ConfigError(f"grid_points must be >= {MIN_GRID_POINTS}, got {self.grid_points}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {', '.join(OUTPUT_FORMATS)}, got {self.output_format!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        unknown = set(self.families) - set(inequalities.FAMILIES)
        if unknown:
            raise ConfigError(f"unknown families: {', '.join(sorted(unknown))}")


def _rounded(obj):
    if isinstance(obj, float):
        return float(FLOAT_FORMAT % obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(text)
    logging.info("Report written to %s", out)


def emit(payload, fmt, out=None):
    """Write a DataFrame or JSON-ready object in a fixed, reproducible layout."""

    if isinstance(payload, pd.DataFrame):
        if fmt == "csv":
            text = payload.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        elif fmt == "text":
            text = payload.to_string(index=False, float_format=lambda v: FLOAT_FORMAT % v) + "\n"
        else:
            text = json.dumps(_rounded(payload.to_dict(orient="records")), indent=2) + "\n"
    else:
        if fmt == "json":
            text = json.dumps(_rounded(payload), indent=2) + "\n"
        else:
            if isinstance(payload, dict):
                flat = {k: json.dumps(_rounded(v)) if isinstance(v, (dict, list)) else v for k, v in payload.items()}
                payload = [flat]
            frame = pd.DataFrame(payload)
            return emit(frame, fmt, out)
    _write(text, out)


def read_pairs(input_path, fmt):
    """Load consecutive rows as (P, Q) pairs, validating each row.

    Return : list of (Distribution, Distribution).

    """

    rows = distributions.load_rows(input_path, fmt)
    if len(rows) % 2:
        raise OddRowCount(f"{input_path} holds {len(rows)} distributions; rows are paired, so the count must be even")
    dists = []
    for k, row in enumerate(rows):
        try:
            dists.append(distributions.validate(row))
        except (DivlatError, TypeError, ValueError) as err:
            raise RowValidationError(k, err)
    return list(zip(dists[::2], dists[1::2]))


def cmd_compute(input_path, fmt="csv", tolerance=1e-10, output_format="text", out=None):
    """Measure table for every pair in a file.

    Args:
        input_path (string, mandatory)
        fmt (string, optional): input format, csv or json
        tolerance (float, optional)
        output_format (string, optional)
        out (string, optional): report path, stdout when None

    Return : (DataFrame, exit code).

    """

    pairs = read_pairs(input_path, fmt)
    rows = []
    ok = True
    for k, (p, q) in enumerate(pairs):
        values = measures.evaluate_all(p, q)
        slacks = measures.check_chain5(values, tolerance)
        ok = ok and min(slacks) >= -tolerance
        row = {"pair": k, "n": p.n}
        row.update({m.value: values[m].value for m in ALL_MEASURES})
        row.update({f"slack {name}": s for name, s in zip(CHAIN5_LINKS, slacks)})
        rows.append(row)
    df = pd.DataFrame(rows)
    emit(df, output_format, out)
    logging.info("Computed measures for %d pairs from %s", len(pairs), input_path)
    return df, EXIT_OK if ok else EXIT_FAILED


def cmd_verify(config, families=None, out=None):
    """Run catalog records over seeded random pairs.

    Return : (VerificationReport, exit code).

    """

    families = tuple(families or config.families)
    try:
        records = inequalities.select(families)
    except ValueError as err:
        raise ConfigError(str(err))
    pairs = []
    for n in config.dims:
        pairs += distributions.random_pairs(config.pairs, n, config.seed)
    logging.info("Verifying %d records on %d pairs", len(records), len(pairs))
    report = inequalities.verify_suite(records, pairs, config.tolerance, config.threads)
    emit(inequalities.report_to_dict(report), config.output_format, out)
    return report, EXIT_OK if report.ok else EXIT_FAILED


def cmd_constants(config, out=None):
    """Recover every theorem-part constant.

    Return : (DataFrame, exit code).

    """

    check_polynomials()
    estimates = sweep(inequalities.theorem_parts(), config.grid_points, config.threads)
    df = pd.DataFrame([e.as_row() for e in estimates])
    emit(df, config.output_format, out)
    return df, EXIT_OK if all(e.passed for e in estimates) else EXIT_FAILED


def cmd_pyramid(input_path, fmt="csv", dot_path=None, out=None):
    """Pyramid tables for the pairs in a file.

    A single pair is written as one 55-element array, several pairs as an
    array of such arrays. The DOT lattice shows the first pair, with theorem
    constants as dashed edges.

    Return : (list of tables, exit code).

    """

    pairs = read_pairs(input_path, fmt)
    tables = [pyramid_table(p, q) for p, q in pairs]
    emit(tables[0] if len(tables) == 1 else tables, "json", out)
    if dot_path is not None:
        edges = [
            (part.lower.index, part.upper.index, str(part.beta))
            for part in inequalities.theorem_parts()
            if part.lower is not None
        ]
        _write(to_dot(tables[0] if tables else None, edges), dot_path)
    ok = all(min(t) >= -1e-12 for t in tables)
    return tables, EXIT_OK if ok else EXIT_FAILED


def cmd_catalog(out=None):
    rows = inequalities.to_json(inequalities.catalog())
    emit(rows, "json", out)
    return rows, EXIT_OK


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def parse_args(argv=None):
    """Parse command-line arguments for the divlat subcommands.

    Args:
        argv (list of string, optional): defaults to sys.argv[1:]

    Return : args object

    """

    defaults = RunConfig()
    parser = argparse.ArgumentParser(
        prog="divlat", description="Divergence measures, their difference pyramid and its inequalities"
    )
    parser.add_argument("--threads", type=int, default=None, help="worker count (DIVLAT_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="all measures and chain slacks for each pair in a file")
    compute.add_argument("-i", "--input", required=True, help="file of distributions, consecutive rows paired")
    compute.add_argument("-f", "--format", choices=INPUT_FORMATS, default="csv")
    compute.add_argument("--tolerance", type=float, default=defaults.tolerance)
    compute.add_argument("--report-format", choices=OUTPUT_FORMATS, default="text")
    compute.add_argument("-o", "--out", default=None)

    verify = sub.add_parser("verify", help="check catalog inequalities on random pairs")
    verify.add_argument("--families", type=_name_list, default=defaults.families)
    verify.add_argument("--pairs", type=int, default=defaults.pairs)
    verify.add_argument("--dims", type=_int_list, default=defaults.dims)
    verify.add_argument("--seed", type=int, default=defaults.seed)
    verify.add_argument("--tolerance", type=float, default=defaults.tolerance)
    verify.add_argument("-o", "--out", default=None)
    verify.add_argument("--format", choices=OUTPUT_FORMATS, default=defaults.output_format)

    constants = sub.add_parser("constants", help="recover the tight constant of every theorem part")
    constants.add_argument("--grid-points", type=int, default=defaults.grid_points)
    constants.add_argument("-o", "--out", default=None)
    constants.add_argument("--format", choices=OUTPUT_FORMATS, default=defaults.output_format)

    pyramid = sub.add_parser("pyramid", help="the 55 difference measures for each pair in a file")
    pyramid.add_argument("-i", "--input", required=True)
    pyramid.add_argument("-f", "--format", choices=INPUT_FORMATS, default="csv")
    pyramid.add_argument("--dot", default=None, help="also write the lattice as Graphviz DOT")
    pyramid.add_argument("-o", "--out", default=None)

    catalog = sub.add_parser("catalog", help="export the inequality catalog as JSON")
    catalog.add_argument("-o", "--out", default=None)

    return parser.parse_args(argv)


def build_config(args):
    threads = args.threads
    if threads is None or os.environ.get("DIVLAT_THREADS"):
        threads = default_threads()
    kwargs = {"threads": threads}
    if args.command == "verify":
        kwargs.update(
            tolerance=args.tolerance,
            pairs=args.pairs,
            dims=args.dims,
            seed=args.seed,
            output_format=args.format,
            families=args.families,
        )
    elif args.command == "constants":
        kwargs.update(grid_points=args.grid_points, output_format=args.format)
    return RunConfig(**kwargs)


def main(argv=None):
    args = parse_args(argv)
    try:
        config = build_config(args)
        logging.info("divlat %s started", args.command)
        if args.command == "compute":
            _, code = cmd_compute(args.input, args.format, args.tolerance, args.report_format, args.out)
        elif args.command == "verify":
            _, code = cmd_verify(config, out=args.out)
        elif args.command == "constants":
            _, code = cmd_constants(config, out=args.out)
        elif args.command == "pyramid":
            _, code = cmd_pyramid(args.input, args.format, args.dot, args.out)
        else:
            _, code = cmd_catalog(args.out)
    except OSError as err:
        logging.error("I/O error: %s", err)
        sys.stderr.write(f"divlat: {err}\n")
        return EXIT_IO
    except ValueError as err:
        logging.error("%s: %s", type(err).__name__, err)
        sys.stderr.write(f"divlat: {type(err).__name__}: {err}\n")
        return EXIT_USAGE
    logging.info("divlat %s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
