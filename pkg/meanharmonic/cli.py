from __future__ import annotations

from collections.abc import Sequence
import argparse
import json
import logging
import sys

from . import __version__
from .config import COMMANDS, RunConfig
from .errors import InvalidInput, MeanHarmonicException, NumericalError
from .meanvalue import DEFAULT_SAMPLES, ORACLES
from .workbench import Workbench

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(j) for j in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers, got {!r}".format(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanharmonic",
        description="Strongly harmonic polynomials of norm-induced metrics with polynomial weights.",
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug output")
    parser.add_argument("--output", "-o", help="write the result to this file instead of stdout")
    parser.add_argument("--cache-dir", dest="cache_dir", help="keep moment tables and kernel bases as JSON files here")
    parser.add_argument("--format", dest="output_format", choices=("json", "csv"), help="output format (csv only for scan and fp)")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    def norm_arguments(sub: argparse.ArgumentParser, weight: bool = True):
        sub.add_argument("--norm", required=True, help="lp:<p>, lp:<p>@a1,...,an or polytope:<file.json>")
        sub.add_argument("--n", type=int, help="dimension (read from the polytope file if omitted)")
        if weight:
            sub.add_argument("--weight", default="1", help="weight polynomial (default 1)")

    def probe_arguments(sub: argparse.ArgumentParser):
        sub.add_argument("--candidate", required=True, help="polynomial in x1..xn (x, y, z for n ≤ 3)")
        sub.add_argument("--probe", dest="probes", action="append", help="ball x1,...,xn:r; may be repeated")
        sub.add_argument("--probes", dest="probe_count", type=int, help="number of random admissible balls")
        sub.add_argument("--box", help="domain box lo,hi for every coordinate (default -2,2)")
        sub.add_argument("--seed", type=int, default=0)

    sub = commands.add_parser("moments", help="normalized moments of the unit ball")
    norm_arguments(sub, weight=False)
    sub.add_argument("--max-order", dest="max_order", type=int, required=True)

    sub = commands.add_parser("basis", help="canonical basis of the strongly harmonic polynomials")
    norm_arguments(sub)
    sub.add_argument("--degree", type=int, required=True)
    sub.add_argument("--j-list", dest="j_list", type=_int_list, help="orders of the equations (default: all even up to D + deg w)")

    sub = commands.add_parser("verify", help="check the mean value property on balls")
    norm_arguments(sub)
    probe_arguments(sub)
    sub.add_argument("--oracle", choices=ORACLES, default="pizzetti")
    sub.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Monte-Carlo samples per ball")
    sub.add_argument("--tolerance", type=float, default=0.0, help="added to the error bound of the oracle")
    sub.add_argument("--l", type=int, help="also verify against the weights Δw, ..., Δ^l w")

    sub = commands.add_parser("pizzetti", help="ball means by the Pizzetti sum")
    norm_arguments(sub, weight=False)
    probe_arguments(sub)

    sub = commands.add_parser("scan", help="kernel dimension per degree")
    norm_arguments(sub)
    sub.add_argument("--degrees", required=True, help="4..8 or 4,5,6")

    sub = commands.add_parser("fp", help="the ratio Γ(3/p)²/(Γ(5/p)Γ(1/p)) on a grid of p")
    sub.add_argument("--grid", help="comma separated p values (default 1, 1.1, ..., 10, 20, 50, 100)")

    sub = commands.add_parser("bose", help="compare the Bose, iterated Laplace and general Euclidean systems")
    sub.add_argument("--n", type=int, default=2)
    sub.add_argument("--weight", default="1")
    sub.add_argument("--degree", type=int, required=True)
    sub.add_argument("--l", type=int, help="highest Bose equation (default: from the Bose closure order of w)")

    assert set(commands.choices) == set(COMMANDS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = RunConfig(command=args.command).to_dict()
    return RunConfig.from_dict({name: getattr(args, name) for name in fields if hasattr(args, name)} | {"command": args.command})


def run(config: RunConfig, workbench: Workbench) -> tuple[object, int]:
    """
    Execute a validated configuration.

    :return: the JSON object or CSV text to write and the exit code
    """
    command = config.command
    norm = config.norm_spec
    w = config.weight_polynomial

    if command == "moments":
        table = workbench.moment_table(norm, config.max_order)
        result = table.to_dict()
        if table.max_order >= 2:
            result["ellipticity"] = workbench.ellipticity(norm).to_dict()
        return result, EXIT_OK

    if command == "basis":
        return workbench.basis(norm, w, config.degree, config.j_list).to_dict(), EXIT_OK

    if command == "scan":
        report = workbench.scan(norm, w, config.degree_list)
        return (report.to_csv() if config.output_format == "csv" else report.to_dict()), EXIT_OK

    if command == "fp":
        scan = workbench.f_scan(config.p_grid)
        return (scan.to_csv() if config.output_format == "csv" else scan.to_dict()), EXIT_OK

    if command == "bose":
        report = workbench.bose_report(w, config.degree, config.l)
        return report.to_dict(), EXIT_OK if report.equivalent else EXIT_FAILED

    probes = list(config.probe_list)
    if config.probe_count:
        probes += workbench.probes(norm, config.probe_count, config.seed, config.domain_box)

    u = config.candidate_polynomial
    if command == "pizzetti":
        rows = []
        for x, r in probes:
            value = workbench.pizzetti(u, norm, x, r)
            rows.append({"center": [str(c) for c in x], "radius": str(r), "mean": value.to_dict()})
        return {"candidate": str(u), "norm": norm.to_dict(), "means": rows}, EXIT_OK

    report = workbench.verify(u, w, norm, probes, config.oracle, config.domain_box, config.samples, config.seed, config.tolerance)
    result = report.to_dict()
    passed = report.passed
    if config.l is not None:
        iterated = workbench.verify_iterated(u, w, norm, config.l, probes, config.oracle, config.domain_box, config.samples, config.seed)
        result["iterated"] = [r.to_dict() for r in iterated]
        passed = passed and all(r.passed for r in iterated)
    return result, EXIT_OK if passed else EXIT_FAILED


def _write(config: RunConfig, result: object):
    if isinstance(result, str):
        text = result
    else:
        text = json.dumps({"config": config.to_dict(), "result": result}, indent=2) + "\n"
    if config.output is None:
        sys.stdout.write(text)
    else:
        with open(config.output, "w") as out_file:
            out_file.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = config_from_args(args).validate()
        log.info("running %r", config)
        result, code = run(config, Workbench(cache_dir=config.cache_dir))
    except InvalidInput as e:
        log.error("%s", e)
        return EXIT_USAGE
    except NumericalError as e:
        log.error("%s", e)
        return EXIT_NUMERICAL
    except MeanHarmonicException as e:
        log.error("%s", e)
        return EXIT_USAGE

    _write(config, result)
    return code
