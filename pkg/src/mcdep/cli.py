"""Command-line interface.

Subcommands: ``analyze`` (dependency report + optional DOT), ``solve``
(oracle / isolated / cooperative), ``decide`` (threshold decision),
``timegraph`` (expanded or compressed time graph as DOT), ``gen`` (random
instance files).

Exit codes: 0 success, 1 usage, 2 parse/validation, 3 budget exceeded,
4 infeasible.  The root seed defaults to 0, can be set via the MCDEP_SEED
environment variable, and is overridden by --seed.  All output is
deterministic; --jobs only bounds internal parallelism and never changes
results (the current implementation evaluates sequentially).
"""

from __future__ import annotations

import argparse
import os
import sys

from .analysis import DEFAULT_SPACE_BUDGET, analyze_problem, is_multicomponent
from .dot import export_dot
from .errors import (
    BudgetExceededError,
    InfeasibleJointError,
    InfeasibleSolutionError,
    InvalidArgumentError,
    McdepError,
    ModelViolationError,
    ParseError,
)
from .fileio import gen_lrp, load_instance
from .model import DEFAULT_JOINT_BUDGET, decide
from .report import analysis_report, solve_report, time_analysis_report
from .schedpack import episode_greedy, episode_optimum
from .solvers import brute_force_joint, cooperative_search, solve_isolated
from .timemodel import compress_time_graph, detect_time_dependency, expand_time_graph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INFEASIBLE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _root_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("MCDEP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvalidArgumentError(f"MCDEP_SEED must be an integer, got {env!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcdep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="detect and classify dependencies")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=DEFAULT_SPACE_BUDGET)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dot", metavar="PATH", default=None)
    p.add_argument("--allow-sampling", action="store_true")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("solve", help="run a solver")
    p.add_argument("file")
    p.add_argument("--solver", choices=("oracle", "isolated", "coop"), required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--budget", type=int, default=DEFAULT_JOINT_BUDGET)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("decide", help="is there a joint solution at or under --k")
    p.add_argument("file")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_JOINT_BUDGET)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("timegraph", help="render the time-dependency graph as DOT")
    p.add_argument("file")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--compressed", action="store_true")

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--kind", choices=("lrp",), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--locations", type=int, default=3)
    p.add_argument("--clients", type=int, default=4)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--out", metavar="PATH", default=None)
    return parser


def _cmd_analyze(args) -> int:
    loaded = load_instance(args.file)
    seed = _root_seed(args.seed)
    if args.jobs < 1:
        raise InvalidArgumentError("--jobs must be >= 1")
    if loaded.problem is not None:
        analysis = analyze_problem(
            loaded.problem,
            budget=args.budget,
            seed=seed,
            allow_sampling=args.allow_sampling,
            samples=args.samples,
        )
        if analysis.graph.partial:
            connected = multicomponent = None
        else:
            multicomponent = is_multicomponent(analysis.graph)
            connected = _is_connected(analysis.graph)
        print(
            analysis_report(args.file, loaded.problem, analysis, connected, multicomponent),
            end="",
        )
        if args.dot:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(export_dot(analysis.graph))
        return EXIT_BUDGET if analysis.graph.partial else EXIT_OK

    pipeline = loaded.pipeline
    verdicts = []
    for stream in pipeline.streams:
        verdicts.append(detect_time_dependency(pipeline, stream.target, stream.source))
    graph = compress_time_graph(expand_time_graph(pipeline, 2))
    multicomponent = is_multicomponent(graph)
    connected = _is_connected(graph)
    print(
        time_analysis_report(args.file, pipeline, verdicts, connected, multicomponent),
        end="",
    )
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(graph))
    return EXIT_OK


def _is_connected(graph) -> bool:
    ids = [i for i, _ in graph.nodes]
    if len(ids) <= 1:
        return True
    adjacency = {i: set() for i in ids}
    for e in graph.edges:
        if e.source != e.target:
            adjacency[e.source].add(e.target)
            adjacency[e.target].add(e.source)
    seen = {ids[0]}
    frontier = [ids[0]]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency[node]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen) == len(ids)


def _cmd_solve(args) -> int:
    loaded = load_instance(args.file)
    seed = _root_seed(args.seed)
    if args.jobs < 1:
        raise InvalidArgumentError("--jobs must be >= 1")
    if loaded.problem is not None:
        problem = loaded.problem
        if args.solver == "oracle":
            result = brute_force_joint(problem, budget=args.budget)
        elif args.solver == "isolated":
            result = solve_isolated(problem, budget=args.budget)
        else:
            result = cooperative_search(
                problem, seed=seed, max_iters=args.iters, budget=args.budget
            )
        names = [c.name for c in problem.components]
        print(solve_report(args.file, args.solver, result, names), end="")
        return EXIT_INFEASIBLE if result.status == "infeasible_none_found" else EXIT_OK

    data = loaded.data
    if args.solver == "oracle":
        result, episode = episode_optimum(data)
        status = "optimal_exhaustive"
    elif args.solver == "isolated":
        result, episode = episode_greedy(data)
        status = "heuristic"
    else:
        raise InvalidArgumentError(
            "the cooperative solver is defined for composite problems only; "
            "pipelines support --solver oracle|isolated"
        )
    print(f"instance: {args.file}")
    print(f"solver: {args.solver}")
    print(f"status: {status}")
    print(f"value: {result.value!r}")
    print(f"windows: {result.delay_windows}")
    print(f"containers: {result.containers}")
    print(f"complete: {'true' if result.complete else 'false'}")
    print("--8<-- report")
    print("schema=mcdep.solve.v1")
    print(f"solver={args.solver}")
    print(f"status={status}")
    print(f"value={result.value!r}")
    print(f"windows={result.delay_windows}")
    print(f"containers={result.containers}")
    print(f"complete={'true' if result.complete else 'false'}")
    print("--8<--")
    return EXIT_OK if result.complete else EXIT_INFEASIBLE


def _cmd_decide(args) -> int:
    loaded = load_instance(args.file)
    if loaded.problem is None:
        raise InvalidArgumentError("decide requires a composite problem instance")
    verdict = decide(loaded.problem, args.k, budget=args.budget)
    print(f"instance: {args.file}")
    print(f"k: {args.k!r}")
    print(f"verdict: {verdict.kind}")
    if verdict.witness is not None:
        names = [c.name for c in loaded.problem.components]
        for name, cfg in zip(names, verdict.witness.configs):
            print(f"witness {name}: {cfg.value}")
    print("--8<-- report")
    print("schema=mcdep.decide.v1")
    print(f"k={args.k!r}")
    print(f"verdict={verdict.kind}")
    if verdict.witness is not None:
        print(f"witness={','.join(str(v) for v in verdict.witness.values())}")
    print("--8<--")
    return EXIT_BUDGET if verdict.kind == "budget_exceeded" else EXIT_OK


def _cmd_timegraph(args) -> int:
    loaded = load_instance(args.file)
    if loaded.pipeline is None:
        raise InvalidArgumentError("timegraph requires a pipeline instance (kind schedpack)")
    expanded = expand_time_graph(loaded.pipeline, args.horizon)
    graph = compress_time_graph(expanded) if args.compressed else expanded
    print(export_dot(graph), end="")
    return EXIT_OK


def _cmd_gen(args) -> int:
    text = gen_lrp(args.seed, locations=args.locations, clients=args.clients, k=args.k)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "solve": _cmd_solve,
        "decide": _cmd_decide,
        "timegraph": _cmd_timegraph,
        "gen": _cmd_gen,
    }
    try:
        return handlers[args.command](args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceededError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (InfeasibleSolutionError, InfeasibleJointError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidArgumentError, ModelViolationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except McdepError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
