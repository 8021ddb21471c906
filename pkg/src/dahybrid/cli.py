"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 domain or model
error, 4 oracle mismatch during ``simulate --check-oracle``.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from .archopt import ArchitectureOptimizer, ArchitecturePlan, compare_architectures
from .archsim import build_lut_contents, export_netlist, simulate_plan
from .compopt import CompressorOptimizer
from .costmodel import OBJECTIVES, CostTables, load_cost_config
from .dacore import QuantizedFilter, SampleWindow, direct_fir, signed_range
from .errors import ConfigSyntaxError, ConfigValidationError, DAError, OracleMismatchError
from .filterio import (
    REFERENCE_BANDS,
    REFERENCE_SAMPLE_RATE,
    FilterSpecRequest,
    format_coefficients,
    gen_filter,
    load_coefficients,
)
from .lutopt import LutOptimizer

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_ORACLE = 4

log = logging.getLogger("dahybrid")


def load_tables(args) -> CostTables:
    text = Path(args.cost_config).read_text() if args.cost_config else ""
    return load_cost_config(text, coef_width=args.coef_width, input_width=args.input_width)


def emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _filter_for(args, tables: CostTables) -> QuantizedFilter:
    return load_coefficients(args.coef_file, tables.coef_width)


# ---- subcommands


def cmd_gen_filter(args) -> int:
    coef_width = args.coef_width or 16
    if args.f_pass is None or args.f_stop is None:
        if args.order not in REFERENCE_BANDS:
            raise ConfigValidationError("--f-pass/--f-stop", f"required for order {args.order}")
        f_pass, f_stop = REFERENCE_BANDS[args.order]
    else:
        f_pass, f_stop = args.f_pass, args.f_stop
    filt = gen_filter(FilterSpecRequest(args.order, args.sample_rate, f_pass, f_stop, coef_width))
    if args.format == "json":
        emit(args, dump_json({
            "coefficients": list(filt.coefficients),
            "coef_width": filt.coef_width,
            "scale_exponent": filt.scale_exponent,
            "order_n": filt.order_n,
        }))
    else:
        emit(args, format_coefficients(filt))
    return EXIT_OK


def cmd_lut_opt(args) -> int:
    tables = load_tables(args)
    plan = LutOptimizer(tables).optimize(args.k, args.m, args.objective)
    emit(args, dump_json({"schema": "dahybrid.lutplan/1", "k": args.k, "m": args.m, **plan.to_dict()}))
    return EXIT_OK


def cmd_comp_opt(args) -> int:
    tables = load_tables(args)
    if args.catalog:
        tables = tables.with_catalog(args.catalog.split(","))
    tree = CompressorOptimizer(tables).optimize(args.h, args.objective)
    tree.validate()
    emit(args, dump_json({
        "schema": "dahybrid.tree/1",
        "h": args.h,
        "objective": args.objective,
        "tree": tree.to_dict(),
        "rendering": tree.render().splitlines(),
    }))
    if args.render:
        sys.stderr.write(tree.render() + "\n")
    return EXIT_OK


def cmd_optimize(args) -> int:
    tables = load_tables(args)
    filt = None
    if args.coef_file:
        filt = _filter_for(args, tables)
        n = filt.order_n
        if args.order is not None and args.order != n:
            raise ConfigValidationError("--order", f"coefficient file has {n} taps, not {args.order}")
    elif args.order is not None:
        n = args.order
    else:
        raise ConfigValidationError("optimize", "give --order or --coef-file")
    plan = ArchitectureOptimizer(tables).optimize(n, args.objective)
    emit(args, plan.to_json())
    if args.netlist:
        if filt is None:
            raise ConfigValidationError("--netlist", "needs --coef-file to fill LUT contents")
        doc = export_netlist(plan, build_lut_contents(plan, filt))
        doc.validate()
        Path(args.netlist).write_text(doc.to_json())
    return EXIT_OK


def cmd_compare(args) -> int:
    tables = load_tables(args)
    orders = [int(x) for x in args.orders.split(",") if x.strip()]
    report = compare_architectures(tables, orders, args.objective)
    emit(args, report.to_json() if args.format == "json" else report.to_csv())
    return EXIT_OK


def _stream(args, filt: QuantizedFilter, input_width: int) -> list[int]:
    if args.samples:
        values = []
        for lineno, raw in enumerate(Path(args.samples).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip().replace("−", "-")
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ConfigValidationError(f"{args.samples}:{lineno}", f"not an integer: {line!r}") from None
        return values
    lo, hi = signed_range(input_width)
    rng = random.Random(args.seed)
    return [rng.randint(lo, hi) for _ in range(args.random)]


def cmd_simulate(args) -> int:
    doc = json.loads(Path(args.plan).read_text())
    plan = ArchitecturePlan.from_dict(doc)
    filt = load_coefficients(args.coef_file, plan.coef_width)
    width = args.input_width or plan.input_width
    contents = build_lut_contents(plan, filt)
    stream = _stream(args, filt, width)
    history = [0] * plan.order_n
    lines = []
    mismatches = 0
    for x in stream:
        history = [x] + history[:-1]
        window = SampleWindow(tuple(history), width)
        y = simulate_plan(plan, filt, contents, window)
        if args.check_oracle:
            ref = direct_fir(filt, window)
            if ref != y:
                mismatches += 1
                log.error("oracle mismatch at sample %d: simulated %d, direct form %d", len(lines), y.value, ref.value)
        lines.append(f"{y.value}\n")
    emit(args, "".join(lines))
    if mismatches:
        raise OracleMismatchError(f"{mismatches} output(s) disagree with the direct form")
    return EXIT_OK


# ---- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cost-config", metavar="PATH", help="JSON cost configuration (defaults if omitted)")
    common.add_argument("--objective", choices=OBJECTIVES, default="delay")
    common.add_argument("--coef-width", type=int, help="coefficient width C (default 16)")
    common.add_argument("--input-width", type=int, help="sample width B (default 3)")
    common.add_argument("--seed", type=int, default=0, help="seed for random sample streams")
    common.add_argument("--out", metavar="PATH", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="dahybrid",
        description="Hybrid LUT + compressor distributed-arithmetic FIR architecture explorer.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("gen-filter", parents=[common], help="windowed-sinc lowpass coefficients")
    p.add_argument("--order", type=int, required=True, help="number of taps N")
    p.add_argument("--sample-rate", type=float, default=REFERENCE_SAMPLE_RATE)
    p.add_argument("--f-pass", type=float)
    p.add_argument("--f-stop", type=float)
    p.set_defaults(func=cmd_gen_filter)

    p = sub.add_parser("lut-opt", parents=[common], help="partition k address bits into m LUTs")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_lut_opt)

    p = sub.add_parser("comp-opt", parents=[common], help="build an h:2 compressor tree")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--catalog", help="comma-separated subset of catalog names, e.g. 3:2,4:2")
    p.add_argument("--render", action="store_true", help="also print an ASCII tree to stderr")
    p.set_defaults(func=cmd_comp_opt)

    p = sub.add_parser("optimize", parents=[common], help="extract the optimal architecture")
    p.add_argument("--order", type=int)
    p.add_argument("--coef-file", metavar="PATH")
    p.add_argument("--netlist", metavar="PATH", help="also write the structural netlist JSON")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", parents=[common], help="hybrid vs pure-LUT vs LUT-less delays")
    p.add_argument("--orders", default=",".join(str(n) for n in REFERENCE_BANDS))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", parents=[common], help="bit-exact simulation of a plan")
    p.add_argument("--plan", required=True, metavar="PATH")
    p.add_argument("--coef-file", required=True, metavar="PATH")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--samples", metavar="PATH", help="one signed sample per line, oldest first")
    src.add_argument("--random", type=int, metavar="COUNT", help="random samples drawn with --seed")
    p.add_argument("--check-oracle", action="store_true", help="verify every output against the direct form")
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.format is None:
        args.format = {"compare": "csv", "gen-filter": "text"}.get(args.command, "json")
    try:
        return args.func(args)
    except (ConfigSyntaxError, ConfigValidationError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OracleMismatchError as exc:
        log.error("%s", exc)
        return EXIT_ORACLE
    except (DAError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_DOMAIN
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
