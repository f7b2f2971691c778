"""Command-line interface: ``causalweb <subcommand> ...``.

Exit status is 0 on success, 1 on invalid input and 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import TABLES, run_bench
from .core import AnalysisSpec, NumericalError, ValidationError, parse_drivers
from .decomposition import full_decomposition
from .diagnostics import confounder_scan, missing_process_test
from .io import read_csv, read_result, write_csv, write_result, write_text
from .simulators import MODELS, simulate_coupled_lorenz, simulate_lorenz63, simulate_model
from .web import build_web, to_dot, to_json

log = logging.getLogger("causalweb")


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1), not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _add_analysis_args(p):
    p.add_argument("--data", required=True, help="input CSV with a header row")
    p.add_argument("--target", required=True)
    p.add_argument("--lead", type=int, default=1, help="target lead L (default 1)")
    p.add_argument("--drivers", required=True, help='driver blocks, "name:lag[,lag];..."')
    p.add_argument("--k", type=int, default=4, help="nearest neighbours (default 4)")
    p.add_argument("--reference", choices=("cauchy", "gaussian", "uniform"), default="cauchy")
    p.add_argument("--tail-cut", type=float, default=0.0425)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default $CAUSALWEB_THREADS or CPU count)")
    p.add_argument("--seed", type=int, default=None, help="recorded in the result")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causalweb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a benchmark system to CSV")
    p.add_argument("--model", required=True, choices=(*MODELS, "lorenz63", "coupled-lorenz"))
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=0.0, help="coupling for coupled-lorenz")
    p.add_argument("--dt", type=float, default=0.01, help="time step for Lorenz systems")
    p.add_argument("--noise-notation", choices=("variance", "std"), default="variance")
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="decompose a target into driver mlinks")
    _add_analysis_args(p)
    p.add_argument("--out", required=True, help="result JSON")

    p = sub.add_parser("diagnose", help="missing-process test and confounder scan")
    _add_analysis_args(p)
    p.add_argument("--obs-noise", type=float, required=True,
                   help="observational noise std of the target")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--threshold", type=float, default=0.15)
    p.add_argument("--confounder-tol", type=float, default=0.02, help="in nats")
    p.add_argument("--out", default=None, help="optional result JSON with diagnostics")

    p = sub.add_parser("export-web", help="render a result as a causal web")
    p.add_argument("--result", required=True)
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--threshold", type=float, default=0.01)
    p.add_argument("--percent", action="store_true", help="label DOT edges in percent")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="reproduce a benchmark table")
    p.add_argument("--table", required=True, choices=tuple(TABLES))
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--noise-notation", choices=("variance", "std"), default="variance")
    p.add_argument("--runs", type=int, default=1, help="realisations per point (coupled)")
    return parser


def _spec_from(args) -> AnalysisSpec:
    return AnalysisSpec(args.target, tuple(parse_drivers(args.drivers)), lead=args.lead,
                        k=args.k, reference=args.reference, tail_cut=args.tail_cut)


def _summary(result) -> str:
    lines = [f"target {result.spec.target}: I_full={result.i_full:.4f} W_x={result.w_x:.4f} "
             f"W_total={result.w_total:.4f} nats"]
    for label, cs in result.cs_by_label().items():
        lines.append(f"  cs({label}) = {cs:.3f}")
    lines.append(f"  cs(noise) = {result.cs_noise:.3f}")
    return "\n".join(lines)


def cmd_simulate(args):
    if args.model == "lorenz63":
        data = simulate_lorenz63(args.steps, dt=args.dt, seed=args.seed)
    elif args.model == "coupled-lorenz":
        data = simulate_coupled_lorenz(args.eps, args.steps, dt=args.dt, seed=args.seed)
    else:
        data = simulate_model(args.model, args.steps, args.seed,
                              noise_notation=args.noise_notation)
    write_csv(data, args.out)
    print(f"wrote {data.length} rows of {', '.join(data.names)} to {args.out}")


def cmd_analyze(args):
    result = full_decomposition(read_csv(args.data), _spec_from(args),
                                threads=args.threads, seed=args.seed)
    write_result(result, args.out)
    print(_summary(result))


def cmd_diagnose(args):
    data = read_csv(args.data)
    spec = _spec_from(args)
    result = full_decomposition(data, spec, threads=args.threads, seed=args.seed)
    report = missing_process_test(data, spec, args.obs_noise, n_reps=args.reps, seed=args.seed,
                                  threshold=args.threshold, threads=args.threads)
    suspects = confounder_scan(result, args.confounder_tol)
    result.diagnostics = {"missing_process": report.to_dict(), "confounder_candidates": suspects}
    print(_summary(result))
    print(f"noise share {report.cs_noise_base:.3f} -> {report.cs_noise_perturbed_mean:.3f} "
          f"+- {report.cs_noise_perturbed_std:.3f} (relative change {report.rel_change:.1%}): "
          f"{report.verdict}")
    print("confounder candidates: " + (", ".join(suspects) if suspects else "none"))
    if args.out:
        write_result(result, args.out)


def cmd_export_web(args):
    web = build_web(read_result(args.result), args.threshold)
    text = to_dot(web, percent=args.percent) if args.format == "dot" else to_json(web)
    write_text(text, args.out)
    print(f"wrote {len(web.edges)} links to {args.out}")


def cmd_bench(args):
    options = {"seed": args.seed, "threads": args.threads}
    if args.steps is not None:
        options["steps"] = args.steps
    if args.table in ("3", "5", "7", "diagnostics"):
        options["noise_notation"] = args.noise_notation
    if args.table == "coupled":
        options["n_runs"] = args.runs
    report = run_bench(args.table, **options)
    print(report.format())
    n_checked = sum(r.checked for r in report.rows) + len(report.checks)
    print(f"{n_checked - len(report.failures)}/{n_checked} within tolerance")


COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "diagnose": cmd_diagnose,
    "export-web": cmd_export_web,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except (ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
