"""Command line entry point.

    conjsub solve --problem shor --method csgi --eps 0.1,0.01,0.001
    conjsub reproduce table1 --format markdown
    conjsub list

Exit status: 0 on success, 1 when `solve` misses an accuracy target,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..core import NonFiniteError
from ..problems import PROBLEMS
from .experiment import (
    METHODS,
    REFERENCE_TABLES,
    table_row,
    config_from_mapping,
    reproduce_table,
    solve,
)
from .report import context_table, emit_report

EXIT_OK, EXIT_NOT_REACHED, EXIT_USAGE = 0, 1, 2


def _key_value(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conjsub", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-entry ratios")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one method on one problem")
    s.add_argument("--config", type=Path, help="TOML experiment file; flags override its values")
    s.add_argument("--problem", help="catalog name, e.g. shor or l1:3")
    s.add_argument("--dim", type=int, dest="dimension", help="problem dimension")
    s.add_argument("--method", choices=sorted(METHODS))
    s.add_argument("--eps", type=_float_list, action="append",
                   help="target accuracies (comma-separated, repeatable)")
    s.add_argument("--max-evals", type=int)
    s.add_argument("--x0", type=_float_list, help="starting point, comma-separated")
    s.add_argument("--trace", help="write a JSON-lines trace here")
    s.add_argument("--param", type=_key_value, action="append", default=[], metavar="KEY=VALUE",
                   help="method parameter (repeatable)")
    s.add_argument("--format", choices=("csv", "markdown"), default="markdown")

    r = sub.add_parser("reproduce", help="re-run a benchmark table on Shor's problem")
    r.add_argument("table", choices=sorted(REFERENCE_TABLES))
    r.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    r.add_argument("--out", type=Path, help="write the report here instead of stdout")
    r.add_argument("--workers", type=int, default=1)

    sub.add_parser("list", help="list problems and methods")
    return parser


def _cmd_solve(args) -> int:
    data = {}
    if args.config is not None:
        from .experiment import load_config

        cfg = load_config(args.config)
        data = {
            "problem": cfg.problem, "method": cfg.method, "params": dict(cfg.method_params),
            "eps": list(cfg.eps_ladder), "max_evals": cfg.max_evals,
        }
        for key, value in (("x0", cfg.x0), ("trace", cfg.trace_path), ("dimension", cfg.dimension)):
            if value is not None:
                data[key] = value
    eps = [e for group in args.eps for e in group] if args.eps else None
    config = config_from_mapping(
        data,
        problem=args.problem,
        method=args.method,
        dimension=args.dimension,
        eps=eps,
        max_evals=args.max_evals,
        x0=args.x0,
        trace=args.trace,
        params=dict(args.param),
    )
    result = solve(config)
    row = table_row(config, result)
    print(f"problem      {config.problem}")
    print(f"method       {config.method}")
    print(f"best value   {result.best_value!r}")
    if row.best_gap == row.best_gap:
        print(f"gap          {row.best_gap:.6g}")
    print(f"evaluations  {result.total_evals}")
    print(f"termination  {result.termination}")
    print("best point   " + " ".join(repr(float(v)) for v in result.best_point))
    if row.entries:
        print()
        print(emit_report([row], args.format), end="")
    return EXIT_NOT_REACHED if any(e.it is None for e in row.entries) else EXIT_OK


def _cmd_reproduce(args) -> int:
    rows = reproduce_table(args.table, workers=args.workers)
    text = emit_report(rows, args.format)
    if args.format == "markdown":
        gaps = [f"{r.method}: best gap {r.best_gap:.4g} after {r.total_evals} evaluations"
                + (f" (published {r.reference_best_gap:g})" if r.reference_best_gap is not None else "")
                for r in rows]
        text += "\n" + "\n".join(gaps) + "\n\nPublished columns not re-run:\n\n" + context_table(args.table)
    if args.out is not None:
        try:
            args.out.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"conjsub: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_list(args) -> int:
    print("problems:")
    for name, factory in PROBLEMS.items():
        spec = factory()
        print(f"  {name:<10} dim {spec.dimension}" + (f"  f* = {spec.f_star!r}" if spec.f_star is not None else ""))
    print("methods:")
    for name, method in METHODS.items():
        print(f"  {name:<10} {method.description}")
        print(f"  {'':<10} params: {', '.join(method.params)}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"solve": _cmd_solve, "reproduce": _cmd_reproduce, "list": _cmd_list}[args.command]
    try:
        return handler(args)
    except ValueError as exc:  # includes ConfigError
        print(f"conjsub: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteError as exc:
        print(f"conjsub: run aborted: {exc}", file=sys.stderr)
        return EXIT_NOT_REACHED
    except OSError as exc:
        print(f"conjsub: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
