"""Command-line driver: ``anonymize`` and ``evaluate``.

Exit codes: 0 success, 1 input or validation error, 2 strict realization
infeasible, 3 solver limit reached.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .anonymizer import AnonymizationParams, verify_k_anonymous
from .clustering import detect_communities, precision_index
from .errors import (
    GraphValidationError,
    InfeasibleError,
    InvalidPlanError,
    ParameterError,
    ParseError,
    SolverTimeoutError,
)
from .graph import Graph, degree_sequence, format_edge_list, load_graph
from .ilp.bnb import DEFAULT_TIME_LIMIT
from .metrics import METRIC_NAMES, UtilityReport, utility_error_report
from .pipeline import AnonymizationResult, anonymize_graph
from .realization import RealizationMode

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_TIMEOUT = 3

PRECISION_INDEX_NAME = "pair-agreement (Rand) index"


@dataclass(frozen=True)
class PipelineConfig:
    input: Path
    out: Path
    report: Path
    k: int
    t: int = 0
    mode: str = "relaxed"
    lam: Fraction = Fraction(1)
    time_limit: float = DEFAULT_TIME_LIMIT
    a: int | None = None
    d: int | None = None
    parity_repair: bool = False

    def validate(self) -> None:
        if self.k < 2:
            raise ParameterError(f"k must be at least 2, got {self.k}")
        if self.t < 0:
            raise ParameterError(f"t must be non-negative, got {self.t}")
        if not self.time_limit > 0:
            raise ParameterError("time limit must be positive")
        if self.mode not in ("strict", "relaxed"):
            raise ParameterError(f"mode must be strict or relaxed, got {self.mode!r}")
        if not self.lam > 0:
            raise ParameterError("lambda must be positive")


@dataclass
class PipelineOutcome:
    code: int
    summary: str
    errors: dict[str, float] | None = None
    precision_error: float | None = None


def _clustering_section(g: Graph, g2: Graph) -> tuple[dict, UtilityReport, float]:
    c1, c2 = detect_communities(g), detect_communities(g2)
    report = utility_error_report(g, g2, c1, c2)
    index = precision_index(c1, c2)
    section = {
        "method": "greedy modularity agglomeration",
        "index": PRECISION_INDEX_NAME,
        "original_clusters": c1.count,
        "anonymized_clusters": c2.count,
        "precision_index": index,
        "precision_error": 1.0 - index,
    }
    return section, report, 1.0 - index


def _plan_section(g: Graph, result: AnonymizationResult) -> dict:
    labels = g.labels
    plan = result.plan
    adds, dels = plan.per_vertex_counts(g.n)
    return {
        "additions": [[labels[u], labels[v]] for u, v in sorted(plan.additions)],
        "deletions": [[labels[u], labels[v]] for u, v in sorted(plan.deletions)],
        "slack": {str(labels[v]): s for v, s in enumerate(plan.slack_used) if s},
        "total_slack": plan.total_slack,
        "size": plan.size,
        "objective": result.objective,
        "max_additions_per_vertex": int(adds.max(initial=0)),
        "max_deletions_per_vertex": int(dels.max(initial=0)),
    }


def _sequence_section(result: AnonymizationResult) -> dict:
    seq = result.sequence
    return {
        "budget_floor": result.budget_floor,
        "parity_repaired": seq.parity_repaired,
        "theta_l1": seq.theta.l1,
        "theta_sum": seq.theta.total,
        "chunks": [
            {"start": c.start, "end": c.end, "anchor": c.anchor, "a": c.a, "d": c.d, "window": list(c.window)}
            for c in seq.chunks
        ],
    }


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps LF endings on every platform
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load(path: Path) -> Graph:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = load_graph(path)
    for w in caught:
        print(f"warning: {path}: {w.message}", file=sys.stderr)
    return g


def run_pipeline(cfg: PipelineConfig) -> PipelineOutcome:
    """Load, anonymize, realize, evaluate and write the artifacts for one ``k``."""
    cfg.validate()
    g = _load(cfg.input)
    params = AnonymizationParams(cfg.k, cfg.t, cfg.a, cfg.d)
    params.validate(g.n)
    mode = RealizationMode(cfg.mode, cfg.lam)
    result = anonymize_graph(g, params, mode, parity_repair=cfg.parity_repair, time_limit=cfg.time_limit)
    g2 = result.anonymized
    section, utility, perr = _clustering_section(g, g2)
    max_slack = max((abs(s) for s in result.plan.slack_used), default=0)
    document = {
        "parameters": {
            "k": cfg.k,
            "t": cfg.t,
            "mode": cfg.mode,
            "lambda": str(cfg.lam),
            "a": cfg.a,
            "d": cfg.d,
            "parity_repair": cfg.parity_repair,
        },
        "graph": {"vertices": g.n, "edges_before": g.m, "edges_after": g2.m},
        "anonymization": _sequence_section(result),
        "plan": _plan_section(g, result),
        "k_anonymous": verify_k_anonymous(degree_sequence(g2), cfg.k, cfg.t + max_slack),
        "utility": utility.to_dict(),
        "clustering": section,
    }
    _write(cfg.out, format_edge_list(g2))
    _write(cfg.report, json.dumps(document, indent=2) + "\n")
    plan = result.plan
    summary = (
        f"k={cfg.k} t={cfg.t} mode={cfg.mode} edits={plan.size} "
        f"(+{len(plan.additions)} -{len(plan.deletions)}) slack={plan.total_slack} "
        f"precision_error={perr:.6f}"
    )
    return PipelineOutcome(EXIT_OK, summary, utility.errors, perr)


def evaluate_files(original: Path, anonymized: Path, report: Path | None) -> PipelineOutcome:
    g, g2 = _load(original), _load(anonymized)
    if g.n != g2.n or g.labels != g2.labels:
        raise GraphValidationError(
            f"vertex sets differ: {original} has {g.n} vertices, {anonymized} has {g2.n}"
        )
    section, utility, perr = _clustering_section(g, g2)
    document = {"utility": utility.to_dict(), "clustering": section}
    if report is not None:
        _write(report, json.dumps(document, indent=2) + "\n")
    worst = max((e for e in utility.errors.values() if math.isfinite(e)), default=0.0)
    summary = f"max_relative_error={worst:.6f} precision_error={perr:.6f}"
    return PipelineOutcome(EXIT_OK, summary, utility.errors, perr)


def _per_k_path(path: Path, k: int, batch: bool) -> Path:
    if not batch:
        return path
    return path.with_name(f"{path.stem}.k{k}{path.suffix}")


def _batch_csv(rows: list[tuple[int, PipelineOutcome]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["k", *METRIC_NAMES, "precision_error"]
    writer.writerow(header)

    def cell(x: float | None) -> str:
        return "" if x is None or not math.isfinite(x) else repr(float(x))

    for k, outcome in rows:
        writer.writerow([k, *(cell(outcome.errors[name]) for name in METRIC_NAMES), cell(outcome.precision_error)])
    means = []
    for name in [*METRIC_NAMES, "precision_error"]:
        vals = [
            (o.precision_error if name == "precision_error" else o.errors[name]) for _, o in rows
        ]
        vals = [v for v in vals if v is not None and math.isfinite(v)]
        means.append(cell(sum(vals) / len(vals)) if vals else "")
    writer.writerow(["mean", *means])
    return buf.getvalue()


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degree-anon",
        description="Multi-parameterized k-degree anonymization of networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    anon = sub.add_parser("anonymize", help="anonymize a graph and report utility loss")
    anon.add_argument("--input", type=Path, required=True, help="edge-list file")
    anon.add_argument("--k", type=int, nargs="+", required=True, help="anonymity level; several values run a batch")
    anon.add_argument("--t", type=int, default=0, help="degree tolerance (default 0)")
    anon.add_argument("--mode", choices=("strict", "relaxed"), default="relaxed")
    anon.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1), help="slack penalty (relaxed mode)")
    anon.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT, help="solver limit in seconds")
    anon.add_argument("--a", type=int, default=None, help="max additions per vertex")
    anon.add_argument("--d", type=int, default=None, help="max deletions per vertex (defaults to --a)")
    anon.add_argument(
        "--parity-repair",
        action="store_true",
        help="adjust the target by one unit when its degree sum is odd",
    )
    anon.add_argument("--out", type=Path, required=True, help="anonymized edge list")
    anon.add_argument("--report", type=Path, required=True, help="JSON report")
    anon.add_argument("--csv", type=Path, default=None, help="per-k relative errors as CSV")

    ev = sub.add_parser("evaluate", help="compare two graphs without anonymizing")
    ev.add_argument("--original", type=Path, required=True)
    ev.add_argument("--anonymized", type=Path, required=True)
    ev.add_argument("--report", type=Path, default=None)
    return parser


def _guarded(fn, *args) -> PipelineOutcome:
    try:
        return fn(*args)
    except InfeasibleError as exc:
        return PipelineOutcome(EXIT_INFEASIBLE, f"infeasible ({exc.reason}): {exc}")
    except SolverTimeoutError as exc:
        return PipelineOutcome(EXIT_TIMEOUT, f"solver limit reached: {exc}")
    except (ParseError, GraphValidationError, ParameterError, InvalidPlanError, OSError) as exc:
        return PipelineOutcome(EXIT_INPUT, f"error: {exc}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "evaluate":
        outcome = _guarded(evaluate_files, args.original, args.anonymized, args.report)
        print(outcome.summary, file=sys.stdout if outcome.code == EXIT_OK else sys.stderr)
        return outcome.code

    ks = list(dict.fromkeys(args.k))
    batch = len(ks) > 1
    rows: list[tuple[int, PipelineOutcome]] = []
    for k in ks:
        cfg = PipelineConfig(
            input=args.input,
            out=_per_k_path(args.out, k, batch),
            report=_per_k_path(args.report, k, batch),
            k=k,
            t=args.t,
            mode=args.mode,
            lam=args.lam,
            time_limit=args.time_limit,
            a=args.a,
            d=args.d,
            parity_repair=args.parity_repair,
        )
        outcome = _guarded(run_pipeline, cfg)
        if outcome.code != EXIT_OK:
            print(outcome.summary, file=sys.stderr)
            return outcome.code
        print(outcome.summary)
        rows.append((k, outcome))
    if args.csv is not None:
        try:
            _write(args.csv, _batch_csv(rows))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
