"""Command-line front end.

``fairaudit --input FILE --outcome COL --group COL --probs COL [...]`` audits
a prediction table; ``fairaudit demo [...]`` writes a synthetic one.

Exit codes: 0 success, 2 invalid input or arguments, 3 inference failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .demo import DemoDesign, generate_demo
from .errors import FairAuditError, InferenceError, InvalidParameter
from .ingest import ColumnMap, CutoffRule, load_table, parse_condition
from .inference import BootstrapConfig, default_threads
from .metrics import METRIC_IDS
from .report import RENDER_FORMATS, eval_single, get_fairness_metrics, render

log = logging.getLogger("fairaudit")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFERENCE = 3


def _audit_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fairaudit",
        description="Group fairness audit of a binary classifier with bootstrap CIs. "
        "Run 'fairaudit demo -h' for the synthetic data generator.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--input", required=True, help="CSV or JSON (array of objects) file, '-' for stdin")
    p.add_argument("--format", choices=("csv", "json"), help="input format (default: from extension)")
    p.add_argument("--outcome", required=True, help="binary outcome column")
    p.add_argument("--group", required=True, help="protected attribute column (two labels)")
    p.add_argument("--probs", required=True, help="predicted probability column")
    p.add_argument("--condition-col", help="column used for conditional statistical parity")
    p.add_argument("--condition", help="condition on --condition-col, e.g. '>=60' or '==Male'")
    p.add_argument("--cutoff", type=float, default=0.5, help="prob >= cutoff counts as positive (default 0.5)")
    p.add_argument("--alpha", type=float, default=0.05, help="1 - confidence level (default 0.05)")
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap replicates (default 1000)")
    p.add_argument("--seed", type=int, default=42, help="master random seed (default 42)")
    p.add_argument(
        "--max-degenerate", type=float, default=0.10,
        help="largest tolerated fraction of degenerate replicates (default 0.10)",
    )
    p.add_argument("--metric", default="all", choices=("all", *METRIC_IDS))
    p.add_argument("--output", choices=RENDER_FORMATS, default="table")
    p.add_argument("--reference-group", help="label used as group 2 (ratio denominator)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _demo_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fairaudit demo",
        description="Write a synthetic table (columns y, g, p, age) with planted "
        "FNR/FPR gaps between group A and reference group B at cutoff 0.5.",
    )
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--fnr-gap", type=float, default=0.0)
    p.add_argument("--fpr-gap", type=float, default=0.0)
    p.add_argument("--base-rates", type=float, nargs=2, default=(0.3, 0.3), metavar=("A", "B"))
    p.add_argument("--fnr-reference", type=float, default=0.2)
    p.add_argument("--fpr-reference", type=float, default=0.1)
    p.add_argument("--group-share", type=float, default=0.5)
    p.add_argument("--output", "-o", help="output file (default stdout)")
    return p


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise InvalidParameter(f"cannot read {path}: {exc.strerror}") from None


def _run_audit(args: argparse.Namespace) -> str:
    if (args.condition is None) != (args.condition_col is None):
        raise InvalidParameter("--condition and --condition-col must be given together")
    fmt = args.format or ("json" if args.input.lower().endswith(".json") else "csv")
    extras = (args.condition_col,) if args.condition_col else ()
    columns = ColumnMap(args.outcome, args.group, args.probs, extras)
    table = load_table(_read_input(args.input), fmt, columns, reference=args.reference_group)
    cond = parse_condition(args.condition, args.condition_col) if args.condition else None
    rule = CutoffRule(args.cutoff)
    cfg = BootstrapConfig(args.bootstrap, args.alpha, args.seed, args.max_degenerate)
    threads = args.threads if args.threads is not None else default_threads()
    if threads < 1:
        raise InvalidParameter(f"--threads must be >= 1, got {threads}")
    log.info("loaded %d rows, groups %s / %s", table.n, *table.labels)

    if args.metric == "all":
        result = get_fairness_metrics(table, rule, cond, cfg, threads)
    else:
        result = eval_single(table, args.metric, rule, cond, cfg, threads)
    return render(result, args.output)


def _run_demo(args: argparse.Namespace) -> str:
    design = DemoDesign(
        fnr_gap=args.fnr_gap,
        fpr_gap=args.fpr_gap,
        base_rates=tuple(args.base_rates),
        fnr_reference=args.fnr_reference,
        fpr_reference=args.fpr_reference,
        group_share=args.group_share,
    )
    text = generate_demo(args.n, args.seed, design)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        return ""
    return text


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["demo"]:
        args = _demo_parser().parse_args(argv[1:])
        runner = _run_demo
    else:
        args = _audit_parser().parse_args(argv)
        runner = _run_audit
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        out = runner(args)
    except InferenceError as err:
        print(f"fairaudit: error: {err.code}: {err}", file=sys.stderr)
        return EXIT_INFERENCE
    except FairAuditError as err:
        print(f"fairaudit: error: {err.code}: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    sys.stdout.write(out)
    sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
