"""Command-line entry point: extract, solve, analyze, generate, pipeline.

Every command writes a JSON manifest next to its outputs recording the
resolved parameters, input digests, seed, and wall time. Exit codes: 1 for
usage errors, 2 for data/IO errors, 3 for unexpected internal failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .analysis import (
    cluster_composition,
    coalition_loyalty,
    detect_mediation,
    leadership_strength,
    polarization_summary,
)
from .core import DataError, Deputy, Partition, SignedGraph, VoteClustError, validate_partition
from .extract import (
    DENOMINATOR_ALL,
    DENOMINATOR_BOTH_VOTED,
    AgreementScheme,
    ExtractionConfig,
    VoteData,
    build_network,
    parse_vote_data,
)
from .fileio import (
    read_coalition_map,
    read_graph,
    read_leader_map,
    read_partition,
    sha256_of,
    write_graph,
    write_json,
    write_partition,
    write_report_csv,
    write_votes_csv,
)
from .imbalance import ProblemKind, relative_imbalance, srcc_imbalance
from .solver import SolverParams, SolveResult, ils_solve
from .synth import BlocSpec, SynthConfig, generate

ALL_REPORTS = ("mediation", "loyalty", "leadership", "composition", "polarization", "sri")
DEFAULT_REPORTS = "mediation,composition,sri"

_SCHEMES = {
    "v1": AgreementScheme.V1_HALF_AGREEMENT,
    "v2": AgreementScheme.V2_ABSENCE_OF_OPINION,
}

_DENOMINATORS = {"all": DENOMINATOR_ALL, "both-voted": DENOMINATOR_BOTH_VOTED}


class UsageError(VoteClustError):
    """Bad flags or flag combinations; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _fmt(value: float, decimals: int = 6) -> str:
    return f"{value:.{decimals}f}"


def _manifest(path: Path, command: str, parameters: dict[str, Any],
              inputs: Sequence[Path], outputs: Sequence[Path],
              seed: int | None, started: float) -> None:
    write_json(path, {
        "tool": "voteclust",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "inputs": {str(p): sha256_of(p) for p in inputs},
        "outputs": {str(p): sha256_of(p) for p in outputs},
        "wall_time_seconds": time.perf_counter() - started,
    })


def _load_votes(path: Path) -> VoteData:
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    with open(path, encoding="utf-8", newline="") as handle:
        return parse_vote_data(handle, fmt)


def _year_of(date: str, proposition: str) -> int:
    head = date.split("-")[0]
    if len(head) != 4 or not head.isdigit():
        raise DataError(f"proposition {proposition!r}: malformed date {date!r}")
    return int(head)


def _period_filter(dates: dict[str, str], year: int | None,
                   year_from: int | None, year_to: int | None):
    if year is None and year_from is None and year_to is None:
        return None, {}
    if year is not None and (year_from is not None or year_to is not None):
        raise UsageError("--year cannot be combined with --from/--to")
    if year is not None:
        lo = hi = year
    else:
        lo = year_from if year_from is not None else -10**9
        hi = year_to if year_to is not None else 10**9
    if not dates:
        raise DataError("year filtering requested but the vote file has no date column")

    def keep(proposition_id: str) -> bool:
        date = dates.get(proposition_id)
        if date is None:
            raise DataError(f"proposition {proposition_id!r} has no date; "
                            "cannot apply the year filter")
        return lo <= _year_of(date, proposition_id) <= hi

    return keep, {"year": year, "from": year_from, "to": year_to}


def _extract_stage(votes_path: Path, scheme: str, threshold: float,
                   year: int | None, year_from: int | None, year_to: int | None,
                   denominator: str) -> tuple[SignedGraph, VoteData, dict[str, Any]]:
    data = _load_votes(votes_path)
    period, period_params = _period_filter(data.proposition_dates, year, year_from, year_to)
    try:
        config = ExtractionConfig(
            scheme=_SCHEMES[scheme],
            edge_threshold=threshold,
            period_filter=period,
            denominator=_DENOMINATORS[denominator],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    graph = build_network(data.records, data.deputies, config)
    parameters = {
        "votes": str(votes_path),
        "scheme": scheme,
        "threshold": threshold,
        "denominator": denominator,
        **period_params,
    }
    return graph, data, parameters


def cmd_extract(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    votes_path = Path(args.votes)
    graph, data, parameters = _extract_stage(
        votes_path, args.scheme, args.threshold, args.year,
        args.year_from, args.year_to, args.denominator,
    )
    out = Path(args.output)
    write_graph(out, graph, data.deputies)
    _manifest(out.with_name(out.name + ".manifest.json"), "extract", parameters,
              [votes_path], [out], None, started)
    print(f"wrote {out}: {graph.n} vertices, {graph.m} edges")
    return 0


def _problem_from_flags(problem: str, k: int | None) -> ProblemKind:
    if problem == "srcc":
        if k is None:
            raise UsageError("--k is required for --problem srcc")
        return ProblemKind.srcc(k)
    if k is not None:
        raise UsageError("--k only applies to --problem srcc")
    return ProblemKind.cc()


def _solve_result_payload(graph: SignedGraph, result: SolveResult,
                          problem: ProblemKind) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "problem": problem.name,
        "k": result.best_partition.k,
        "value": result.best_value,
        "total_abs_weight": graph.total_abs_weight(),
        "iterations_run": result.iterations_run,
        "wall_time_seconds": result.wall_time_seconds,
        "trace": [[i, v] for i, v in result.trace],
    }
    if problem.is_srcc:
        payload["relative_imbalance_pct"] = (
            relative_imbalance(graph, result.breakdown) if graph.m else None
        )
        payload["block_signs"] = {
            f"{a},{b}": sign
            for (a, b), sign in sorted(result.breakdown.block_signs.items())
        }
    return payload


def _solve_stage(graph: SignedGraph, args: argparse.Namespace) -> tuple[SolveResult, ProblemKind, dict[str, Any]]:
    problem = _problem_from_flags(args.problem, args.k)
    try:
        params = SolverParams(
            problem=problem,
            seed=args.seed,
            max_iterations=args.iterations,
            max_no_improve=args.no_improve,
            time_limit_seconds=args.time_limit,
            perturbation_strength=args.perturbation,
            construction_alpha=args.alpha,
            restarts=args.restarts,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    result = ils_solve(graph, params, threads=args.threads)
    parameters = {
        "problem": problem.name,
        "k": problem.k,
        "seed": args.seed,
        "iterations": args.iterations,
        "no_improve": args.no_improve,
        "time_limit": args.time_limit,
        "restarts": args.restarts,
        "perturbation": args.perturbation,
        "alpha": args.alpha,
        "threads": args.threads,
    }
    return result, problem, parameters


def cmd_solve(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    graph_path = Path(args.graph)
    graph, _ = read_graph(graph_path)
    result, problem, parameters = _solve_stage(graph, args)
    prefix = Path(args.output)
    partition_path = prefix.with_name(prefix.name + ".partition.json")
    result_path = prefix.with_name(prefix.name + ".result.json")
    write_partition(partition_path, result.best_partition)
    write_json(result_path, _solve_result_payload(graph, result, problem))
    _manifest(prefix.with_name(prefix.name + ".manifest.json"), "solve",
              {**parameters, "graph": str(graph_path)},
              [graph_path], [partition_path, result_path], args.seed, started)
    print(f"best value {result.best_value:.6f} with k={result.best_partition.k} "
          f"({result.iterations_run} iterations)")
    return 0


def _selected_reports(spec_text: str) -> list[str]:
    names = [s.strip() for s in spec_text.split(",") if s.strip()]
    unknown = [s for s in names if s not in ALL_REPORTS]
    if unknown:
        raise UsageError(f"unknown report(s): {', '.join(unknown)}; "
                         f"available: {', '.join(ALL_REPORTS)}")
    if not names:
        raise UsageError("--reports selected nothing")
    return names


def _analyze_stage(graph: SignedGraph, deputies: Sequence[Deputy],
                   partition: Partition, args: argparse.Namespace,
                   prefix: Path) -> tuple[list[Path], dict[str, Any]]:
    reports = _selected_reports(args.reports)
    needs_coalitions = {"loyalty", "polarization"} & set(reports)
    if needs_coalitions and not args.coalitions:
        raise UsageError(
            f"--coalitions is required for report(s): {', '.join(sorted(needs_coalitions))}"
        )
    if "leadership" in reports and not args.leaders:
        raise UsageError("--leaders is required for the leadership report")
    if not 0.0 < args.mediation_threshold < 1.0:
        raise UsageError("--mediation-threshold must be in (0, 1)")

    coalition = (read_coalition_map(Path(args.coalitions), default=args.default_alliance)
                 if args.coalitions else None)
    leaders = read_leader_map(Path(args.leaders), deputies) if args.leaders else None

    outputs: list[Path] = []

    def emit(name: str, header: Sequence[str], rows: list[Sequence[Any]],
             payload: Any) -> None:
        csv_path = prefix.with_name(f"{prefix.name}.{name}.csv")
        json_path = prefix.with_name(f"{prefix.name}.{name}.json")
        write_report_csv(csv_path, header, rows)
        write_json(json_path, payload)
        outputs.extend([csv_path, json_path])

    k = partition.k
    if "mediation" in reports:
        verdicts = detect_mediation(graph, partition, threshold=args.mediation_threshold,
                                    weight_based=not args.mediation_count_based)
        emit(
            "mediation",
            ["cluster", "internal_positive_ratio", "external_positive_ratio", "is_mediator"],
            [[v.cluster, _fmt(v.internal_positive_ratio), _fmt(v.external_positive_ratio),
              str(v.is_mediator).lower()] for v in verdicts],
            {"threshold": args.mediation_threshold,
             "weight_based": not args.mediation_count_based,
             "clusters": [asdict(v) for v in verdicts]},
        )
    if "loyalty" in reports:
        rows = coalition_loyalty(partition, deputies, coalition)
        emit(
            "loyalty",
            ["alliance", "party", "members"] + [f"pct_c{c}" for c in range(k)]
            + ["plurality_cluster", "unfaithful"],
            [[r.alliance, r.party, r.members, *(_fmt(p, 2) for p in r.cluster_pct),
              r.plurality_cluster, str(r.unfaithful).lower()] for r in rows],
            {"rows": [asdict(r) for r in rows]},
        )
    if "leadership" in reports:
        rows = leadership_strength(partition, deputies, leaders)
        emit(
            "leadership",
            ["party", "percentage", "weak"],
            [[r.party, _fmt(r.percentage, 2), str(r.weak).lower()] for r in rows],
            {"rows": [asdict(r) for r in rows]},
        )
    if "composition" in reports:
        rows = cluster_composition(partition, deputies)
        emit(
            "composition",
            ["cluster", "party", "count"],
            [[r.cluster, r.party, r.count] for r in rows],
            {"rows": [asdict(r) for r in rows]},
        )
    if "polarization" in reports:
        report = polarization_summary(partition, deputies, coalition)
        emit(
            "polarization",
            ["cluster", "size", "dominant_alliance", "dominance_share"],
            [[r.cluster, r.size, r.dominant_alliance, _fmt(r.dominance_share, 4)]
             for r in report.rows],
            {"polarized": report.polarized, "coverage": report.coverage,
             "rows": [asdict(r) for r in report.rows]},
        )
        print(f"polarization verdict: {'POLARIZED' if report.polarized else 'not polarized'} "
              f"(top-2 coverage {report.coverage:.1%})")
    if "sri" in reports:
        breakdown = srcc_imbalance(graph, partition)
        pct = relative_imbalance(graph, breakdown) if graph.m else None
        emit(
            "sri",
            ["total", "relative_pct", "total_abs_weight"],
            [[_fmt(breakdown.total), "" if pct is None else _fmt(pct),
              _fmt(graph.total_abs_weight())]],
            {"total": breakdown.total,
             "relative_pct": pct,
             "total_abs_weight": graph.total_abs_weight(),
             "blocks": [
                 {"a": a, "b": b, "pos": pos, "neg": neg,
                  "sign": breakdown.block_signs[(a, b)]}
                 for (a, b), pos, neg in breakdown.blocks.blocks()
             ]},
        )

    parameters = {
        "reports": reports,
        "mediation_threshold": args.mediation_threshold,
        "mediation_count_based": args.mediation_count_based,
        "coalitions": args.coalitions,
        "leaders": args.leaders,
        "default_alliance": args.default_alliance,
    }
    return outputs, parameters


def cmd_analyze(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    graph_path, partition_path = Path(args.graph), Path(args.partition)
    graph, deputies = read_graph(graph_path)
    partition = read_partition(partition_path)
    if not validate_partition(graph, partition):
        raise DataError(f"{partition_path} does not partition the vertices of {graph_path}")
    prefix = Path(args.output)
    outputs, parameters = _analyze_stage(graph, deputies, partition, args, prefix)
    inputs = [graph_path, partition_path]
    if args.coalitions:
        inputs.append(Path(args.coalitions))
    if args.leaders:
        inputs.append(Path(args.leaders))
    _manifest(prefix.with_name(prefix.name + ".manifest.json"), "analyze",
              {**parameters, "graph": str(graph_path), "partition": str(partition_path)},
              inputs, outputs, None, started)
    print(f"wrote {len(outputs)} report files with prefix {prefix}")
    return 0


def _parse_blocs(text: str) -> tuple[BlocSpec, ...]:
    """Bloc grammar: comma-separated SIZE[:PARTY[|PARTY...]]; unnamed blocs
    get parties B1, B2, ... with equal weights within a bloc."""
    blocs = []
    for i, chunk in enumerate(text.split(",")):
        chunk = chunk.strip()
        if not chunk:
            raise UsageError("empty bloc spec")
        size_text, _, parties_text = chunk.partition(":")
        try:
            size = int(size_text)
        except ValueError:
            raise UsageError(f"bloc size {size_text!r} is not an integer") from None
        parties = [p.strip() for p in parties_text.split("|") if p.strip()] or [f"B{i + 1}"]
        try:
            blocs.append(BlocSpec(size=size, parties={p: 1.0 for p in parties}))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return tuple(blocs)


def cmd_generate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        config = SynthConfig(
            n_deputies=args.deputies,
            n_propositions=args.propositions,
            blocs=_parse_blocs(args.blocs),
            discipline=args.discipline,
            abstain_rate=args.abstain_rate,
            absent_rate=args.absent_rate,
            obstruction_rate=args.obstruction_rate,
            mediator_fraction=args.mediator_fraction,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    deputies, records, truth = generate(config)
    prefix = Path(args.output)
    votes_path = prefix.with_name(prefix.name + ".votes.csv")
    truth_path = prefix.with_name(prefix.name + ".ground_truth.json")
    write_votes_csv(votes_path, deputies, records)
    write_partition(truth_path, truth)
    parameters = {
        "deputies": args.deputies,
        "propositions": args.propositions,
        "blocs": args.blocs,
        "discipline": args.discipline,
        "abstain_rate": args.abstain_rate,
        "absent_rate": args.absent_rate,
        "obstruction_rate": args.obstruction_rate,
        "mediator_fraction": args.mediator_fraction,
    }
    _manifest(prefix.with_name(prefix.name + ".manifest.json"), "generate", parameters,
              [], [votes_path, truth_path], args.seed, started)
    print(f"wrote {votes_path} ({len(records)} records) and {truth_path}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    votes_path = Path(args.votes)

    graph, data, extract_params = _extract_stage(
        votes_path, args.scheme, args.threshold, args.year,
        args.year_from, args.year_to, args.denominator,
    )
    graph_path = out_dir / "network.graph"
    write_graph(graph_path, graph, data.deputies)

    result, problem, solve_params = _solve_stage(graph, args)
    partition_path = out_dir / "partition.json"
    result_path = out_dir / "result.json"
    write_partition(partition_path, result.best_partition)
    write_json(result_path, _solve_result_payload(graph, result, problem))

    _, roster = read_graph(graph_path)
    report_outputs, analyze_params = _analyze_stage(
        graph, roster, result.best_partition, args, out_dir / "report",
    )

    inputs = [votes_path]
    if args.coalitions:
        inputs.append(Path(args.coalitions))
    if args.leaders:
        inputs.append(Path(args.leaders))
    outputs = [graph_path, partition_path, result_path, *report_outputs]
    _manifest(out_dir / "manifest.json", "pipeline",
              {"extract": extract_params, "solve": solve_params, "analyze": analyze_params},
              inputs, outputs, args.seed, started)
    print(f"pipeline complete: {len(outputs)} files in {out_dir}")
    return 0


def _add_extract_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scheme", choices=sorted(_SCHEMES), required=True,
                        help="abstention scoring scheme")
    parser.add_argument("--threshold", type=float, default=0.001,
                        help="drop edges with |weight| below this (default 0.001)")
    parser.add_argument("--year", type=int, default=None,
                        help="keep propositions dated in this year")
    parser.add_argument("--from", dest="year_from", type=int, default=None,
                        help="first year of the period (inclusive)")
    parser.add_argument("--to", dest="year_to", type=int, default=None,
                        help="last year of the period (inclusive)")
    parser.add_argument("--denominator", choices=["all", "both-voted"], default="all",
                        help="average over all propositions or only co-attended ones")


def _add_solve_flags(parser: argparse.ArgumentParser, require_seed: bool) -> None:
    parser.add_argument("--problem", choices=["cc", "srcc"], required=True)
    parser.add_argument("--k", type=int, default=None,
                        help="fixed cluster count (required for srcc)")
    parser.add_argument("--seed", type=int, required=require_seed,
                        default=None if require_seed else 0)
    parser.add_argument("--iterations", type=int, default=500)
    parser.add_argument("--no-improve", dest="no_improve", type=int, default=50)
    parser.add_argument("--time-limit", dest="time_limit", type=float, default=None)
    parser.add_argument("--restarts", type=int, default=1)
    parser.add_argument("--perturbation", type=float, default=0.1)
    parser.add_argument("--alpha", type=float, default=0.3)
    parser.add_argument("--threads", type=int, default=1,
                        help="concurrent restarts (results identical to sequential)")


def _add_analyze_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--coalitions", default=None,
                        help="CSV party,alliance (loyalty/polarization reports)")
    parser.add_argument("--leaders", default=None,
                        help="CSV party,leader_deputy_id (leadership report)")
    parser.add_argument("--default-alliance", default=None,
                        help="alliance label for unmapped parties (e.g. NONE); "
                             "without it unmapped parties are an error")
    parser.add_argument("--mediation-threshold", type=float, default=0.9)
    parser.add_argument("--mediation-count-based", action="store_true",
                        help="use edge-count ratios instead of weight ratios")
    parser.add_argument("--reports", default=DEFAULT_REPORTS,
                        help=f"comma-separated subset of {','.join(ALL_REPORTS)}")


def build_parser() -> _Parser:
    parser = _Parser(prog="voteclust",
                     description="Signed vote-agreement networks: extraction, "
                                 "clustering, and political-structure reports.")
    parser.add_argument("--version", action="version", version=f"voteclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="votes file -> signed agreement graph")
    p.add_argument("votes", help="vote records (.csv or .json)")
    p.add_argument("-o", "--output", required=True, help="graph file to write")
    _add_extract_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("solve", help="graph -> partition via iterated local search")
    p.add_argument("graph", help="graph file from extract")
    p.add_argument("-o", "--output", required=True,
                   help="output prefix (.partition.json / .result.json)")
    _add_solve_flags(p, require_seed=False)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="graph + partition -> report tables")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("-o", "--output", required=True, help="output prefix for reports")
    _add_analyze_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="synthetic planted-coalition vote dataset")
    p.add_argument("-o", "--output", required=True,
                   help="output prefix (.votes.csv / .ground_truth.json)")
    p.add_argument("--deputies", type=int, required=True)
    p.add_argument("--propositions", type=int, required=True)
    p.add_argument("--blocs", required=True,
                   help="comma-separated SIZE[:PARTY[|PARTY...]] bloc specs")
    p.add_argument("--discipline", type=float, default=0.95)
    p.add_argument("--abstain-rate", type=float, default=0.0)
    p.add_argument("--absent-rate", type=float, default=0.0)
    p.add_argument("--obstruction-rate", type=float, default=0.0)
    p.add_argument("--mediator-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("pipeline", help="extract -> solve -> analyze into a run directory")
    p.add_argument("votes", help="vote records (.csv or .json)")
    p.add_argument("--out-dir", required=True)
    _add_extract_flags(p)
    _add_solve_flags(p, require_seed=True)
    _add_analyze_flags(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except VoteClustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # last resort: anything unexpected is exit 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
