"""Command-line entry point (``mibound``).

Records are printed as one JSON object with fixed keys per subcommand;
tables are CSV.  Exit codes: 0 success, 1 internal failure, 2 invalid
arguments, 3 a bound violation found by ``oracle-verify``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import traceback
from dataclasses import asdict
from pathlib import Path

from . import bounds, counterexample, figures, oracle, planner, unlearning

ENV_OUTPUT_DIR = "MIBOUND_OUTPUT_DIR"
EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3

HEADLINE_EPS = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0)

FIGURE_TITLES = {
    "mi_bounds": "Accuracy bounds at p = 0.5",
    "mi_bound_prob": "Positive accuracy bound vs prior",
    "priv_amp_comp": "Batch vs dataset sampling amplification",
    "threshold_pos_acc": "Threshold attack positive accuracy",
    "threshold_acc": "Threshold attack accuracy",
    "sab_comparison": "Positive accuracy bounds vs prior (eps = 1)",
    "mi_adv": "Positive advantage bound vs prior",
    "del_capacity": "Deletion capacity (B = 0.8, N = 10000, eps = 1)",
}


class UsageError(Exception):
    pass


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _nonneg(text: str) -> float:
    value = _finite(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return value


def _prob(text: str) -> float:
    value = _finite(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]: {text!r}")
    return value


def _open_prob(text: str) -> float:
    value = _finite(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return value


def _rate(text: str) -> float:
    value = _finite(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1]: {text!r}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return value


def _positive(text: str) -> float:
    value = _finite(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return value


def _seed(text: str) -> int:
    value = _count(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError(f"must be < 2**64: {text!r}")
    return value


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _record(record: dict) -> str:
    return json.dumps(record, allow_nan=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _output_dir(args) -> Path:
    target = args.output_dir or os.environ.get(ENV_OUTPUT_DIR)
    if not target:
        raise UsageError(f"--output-dir is required (or set {ENV_OUTPUT_DIR})")
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_bounds(args) -> int:
    pos = bounds.positive_accuracy_bounds(args.eps, args.prior)
    neg = bounds.negative_accuracy_bounds(args.eps, args.prior)
    record = {
        "eps": args.eps,
        "prior": args.prior,
        "lower": pos.lower,
        "upper": pos.upper,
        "negative_lower": neg.lower,
        "negative_upper": neg.upper,
    }
    if 0.0 < args.prior < 1.0:
        record["advantage_upper"] = bounds.mi_advantage_upper(args.eps, args.prior)
    _emit(_record(record), args.output)
    return EXIT_OK


def headline_rows(eps_values=HEADLINE_EPS, prior: float = 0.5):
    for e in eps_values:
        yield (e, bounds.positive_accuracy_bounds(e, prior).upper,
               bounds.baseline_erlingsson(e), bounds.baseline_sablayrolles(e, prior),
               bounds.baseline_yeom(e))


HEADLINE_HEADER = ("eps", "ours", "erlingsson", "sablayrolles", "yeom")


def cmd_baselines(args) -> int:
    rows = [
        row + (bounds.baseline_sablayrolles_raw(row[0], args.prior), bounds.baseline_yeom_raw(row[0]))
        for row in headline_rows(args.eps, args.prior)
    ]
    _emit(_csv(HEADLINE_HEADER + ("sablayrolles_raw", "yeom_raw"), rows), args.output)
    return EXIT_OK


def cmd_plan(args) -> int:
    record = {"eps": args.eps}
    if args.target is not None:
        record["target"] = args.target
        rate = planner.max_rate_for_target(args.eps, args.target)
    else:
        rate = planner.SubsampleRate(args.rate)
    size = 0 if args.size is None else args.size
    result = planner.plan(args.eps, rate, size).to_record()
    record["rate"] = result["rate"]
    record["certified_upper"] = result["certified_upper"]
    if args.size is not None:
        record["original_size"] = result["original_size"]
        record["expected_size"] = result["expected_size"]
    _emit(_record(record), args.output)
    return EXIT_OK


def cmd_subsample(args) -> int:
    with open(args.ids, encoding="utf-8") as fh:
        ids = [line.rstrip("\r\n") for line in fh if line.strip()]
    if not ids:
        raise UsageError(f"--ids: {args.ids} contains no identifiers")
    if len(set(ids)) != len(ids):
        raise UsageError(f"--ids: {args.ids} contains duplicate identifiers")
    kept = planner.subsample(ids, planner.SubsampleRate(args.rate), args.seed)
    _emit("".join(f"{x}\n" for x in kept), args.output)
    return EXIT_OK


def cmd_unlearn(args) -> int:
    if not 0 < args.c < args.n:
        raise UsageError(f"--c must lie in (0, --n), got {args.c!r}")
    policy = unlearning.UnlearningPolicy(args.b, args.eps, args.n, args.c)
    result = unlearning.deletion_capacity(policy)
    record = {
        "eps": args.eps,
        "n": args.n,
        "c": args.c,
        "b": args.b,
        "per_request_lower": result.per_request_lower,
        "capacity": result.capacity,
        "whole_requests": result.whole_requests,
    }
    if args.requests is not None:
        record["requests"] = args.requests
        record["covered"] = args.requests <= result.capacity
    _emit(_record(record), args.output)
    return EXIT_OK


def _load(args):
    try:
        return oracle.load_config(args.config)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise UsageError(f"--config: {exc}") from None


def cmd_oracle_verify(args) -> int:
    u, m = _load(args)
    eps = oracle.mechanism_epsilon(m)
    reports = oracle.verify_bounds(u, m)
    violations = [r for r in reports if not r.inside]
    swaps = [oracle.lemma1_check(u, i) for i in range(u.n)]
    record = {
        "points": u.n,
        "outcomes": m.outcome_count,
        "epsilon": eps,
        "checked": len(reports),
        "violations": len(violations),
        "prior_swap_ok": all(swaps),
        "prior_swap_max_error": max(r.max_abs_error for r in swaps),
    }
    if args.report:
        rows = [(r.point_index, r.outcome_id, r.posterior, r.bound_interval.lower,
                 r.bound_interval.upper, int(r.inside)) for r in reports]
        Path(args.report).write_text(
            _csv(("point", "outcome", "posterior", "lower", "upper", "inside"), rows), encoding="utf-8")
    _emit(_record(record), args.output)
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_oracle_sim(args) -> int:
    u, m = _load(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    rows = oracle.simulate_mi_game(u, m, args.trials, args.seed)
    header = tuple(asdict(rows[0]).keys())
    _emit(_csv(header, [tuple(asdict(r).values()) for r in rows]), args.output)
    return EXIT_OK


def _cfg(args) -> counterexample.CounterexampleConfig:
    return counterexample.CounterexampleConfig(w0=args.w0, grad_step=args.grad_step,
                                               sigma=args.sigma, prior_x2=args.prior)


def cmd_counterexample(args) -> int:
    cfg = _cfg(args)
    best, acc = counterexample.max_overall_accuracy(cfg)
    record = {
        "w0": cfg.w0,
        "grad_step": cfg.grad_step,
        "sigma": cfg.sigma,
        "prior": cfg.prior_x2,
        "best_alpha_offset": best.alpha_offset,
        "best_alpha": best.absolute(cfg),
        "max_accuracy": acc,
    }
    if args.alpha is not None:
        record["alpha_offset"] = args.alpha
        record["positive_accuracy"] = counterexample.positive_accuracy(args.alpha, cfg)
        record["accuracy"] = counterexample.overall_accuracy(args.alpha, cfg)
    if args.witness is not None:
        if not args.witness < 1:
            raise UsageError("--witness must be < 1")
        w = counterexample.positive_accuracy_supremum_demo(cfg, args.witness)
        record["witness"] = args.witness
        record["witness_alpha_offset"] = w.alpha_offset
        record["witness_positive_accuracy"] = counterexample.positive_accuracy(w, cfg)
    _emit(_record(record), args.output)
    return EXIT_OK


def write_figure(figure_id: str, out_dir: Path) -> list[Path]:
    series = figures.build_figure(figures.FigureSpec(figure_id))
    written = figures.write_csv(series, out_dir / f"{figure_id}.csv")
    written.append(figures.write_svg(series, out_dir / f"{figure_id}.svg", FIGURE_TITLES[figure_id]))
    return written


def cmd_figure(args) -> int:
    out_dir = _output_dir(args)
    written = write_figure(args.id, out_dir)
    _emit(_record({"figure": args.id, "files": [p.name for p in written]}), args.output)
    return EXIT_OK


def reproduce_all(output_dir) -> list[Path]:
    """Write every figure's CSV/SVG pair and ``headline.csv`` into ``output_dir``."""
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fid in figures.FIGURE_IDS:
        written.extend(write_figure(fid, out_dir))
    headline = out_dir / "headline.csv"
    with open(headline, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_csv(HEADLINE_HEADER, headline_rows()))
    written.append(headline)
    return written


def cmd_reproduce(args) -> int:
    written = reproduce_all(_output_dir(args))
    _emit(_record({"files": [p.name for p in written]}), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mibound",
        description="Membership-inference accuracy bounds under epsilon-DP.",
        epilog="Records are single JSON objects; tables are CSV. Exit codes: "
               "0 ok, 1 internal error, 2 bad arguments, 3 bound violation.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text, func):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        p.set_defaults(func=func)
        return p

    p = add("bounds", "Positive/negative accuracy bounds. Keys: eps, prior, lower, upper, "
            "negative_lower, negative_upper, advantage_upper.", cmd_bounds)
    p.add_argument("--eps", type=_nonneg, required=True)
    p.add_argument("--prior", type=_prob, required=True)

    p = add("baselines", "CSV comparing our bound with prior-work bounds.", cmd_baselines)
    p.add_argument("--eps", type=_nonneg, nargs="+", default=list(HEADLINE_EPS))
    p.add_argument("--prior", type=_prob, default=0.5)

    p = add("plan", "Sub-sampling plan. Keys: eps, target, rate, certified_upper, "
            "original_size, expected_size.", cmd_plan)
    p.add_argument("--eps", type=_nonneg, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", type=_open_prob, help="target positive-accuracy bound")
    g.add_argument("--rate", type=_rate, help="sub-sampling rate T")
    p.add_argument("--size", type=_count, default=None, help="original dataset size")

    p = add("subsample", "Keep each id of a newline-delimited file with probability --rate.",
            cmd_subsample)
    p.add_argument("--ids", required=True)
    p.add_argument("--rate", type=_rate, required=True)
    p.add_argument("--seed", type=_seed, required=True)

    p = add("unlearn", "Deletion capacity. Keys: eps, n, c, b, per_request_lower, capacity, "
            "whole_requests, requests, covered.", cmd_unlearn)
    p.add_argument("--eps", type=_nonneg, required=True)
    p.add_argument("--n", type=_count, required=True, help="universe size N")
    p.add_argument("--c", type=_positive, required=True, help="expected training size")
    p.add_argument("--b", type=_open_prob, default=0.8, help="guarantee level B")
    p.add_argument("--requests", type=_count, default=None)

    p = add("oracle-verify", "Exhaustive bound check. Keys: points, outcomes, epsilon, checked, "
            "violations, prior_swap_ok, prior_swap_max_error.", cmd_oracle_verify)
    p.add_argument("--config", required=True)
    p.add_argument("--report", default=None, help="optional per-posterior CSV")

    p = add("oracle-sim", "Monte Carlo MI game against the Bayes-optimal adversary (CSV).",
            cmd_oracle_sim)
    p.add_argument("--config", required=True)
    p.add_argument("--trials", type=_count, default=100_000)
    p.add_argument("--seed", type=_seed, required=True)

    p = add("counterexample", "Threshold attack on one DP-SGD step. Keys: w0, grad_step, sigma, "
            "prior, best_alpha_offset, best_alpha, max_accuracy, alpha_offset, "
            "positive_accuracy, accuracy, witness, witness_alpha_offset, "
            "witness_positive_accuracy.", cmd_counterexample)
    p.add_argument("--sigma", type=_positive, default=counterexample.DEFAULT_SIGMA)
    p.add_argument("--grad-step", type=_positive, default=1.0)
    p.add_argument("--w0", type=_finite, default=1e6)
    p.add_argument("--prior", type=_open_prob, default=0.5)
    p.add_argument("--alpha", type=_finite, default=None, help="threshold offset from w0")
    p.add_argument("--witness", type=_finite, default=None,
                   help="find a threshold with positive accuracy above this level")

    p = add("figure", "Write one figure's CSV and SVG.", cmd_figure)
    p.add_argument("--id", choices=figures.FIGURE_IDS, required=True)
    p.add_argument("--output-dir", default=None)

    p = add("reproduce", "Write every figure plus headline.csv.", cmd_reproduce)
    p.add_argument("--output-dir", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"mibound {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
