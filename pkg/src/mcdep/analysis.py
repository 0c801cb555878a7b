"""Detection and classification of dependencies between components.

A component depends on another when changing the other's configuration
changes the instance it has to solve.  Such a dependency is classified by
what the instance change does to the dependent component's feasible set:

* ``fitness``      — the feasible set is identical across reachable
                     instances; only objective values can shift.
* ``feasibility``  — at least two reachable instances have different
                     feasible sets.  The stronger form; when both effects
                     are present only the feasibility edge is kept.

"Independent" is only ever claimed after exhaustive enumeration; sampling
can produce witnesses but never proofs of absence.  Instances are compared
by their canonical byte serializations.  Feasible sets are compared over
instances actually reachable through the declared instance mappings, since
unreachable instances cannot matter to the composite.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import prod

from .errors import (
    BudgetExceededError,
    ClassificationBudgetError,
    InvalidArgumentError,
    PartialGraphError,
)
from .model import (
    CompositeProblem,
    Instance,
    SolutionConfig,
)

#: Default cap on the size of any single enumerated configuration space.
DEFAULT_SPACE_BUDGET = 1 << 16

#: Cap on the pair-times-context work product of one exhaustive detection.
WORK_CAP = 1 << 24

#: Default number of sampled candidate pairs / contexts in sampled mode.
DEFAULT_SAMPLES = 512

#: Objective evaluations allowed while probing for an omitted fitness effect.
FITNESS_SCAN_CAP = 1 << 19


@dataclass(frozen=True)
class DependencyVerdict:
    """Outcome of instance-dependency detection for one ordered pair."""

    kind: str  # "dependent" | "independent_exhaustive" | "independent_sampled" | "budget_exceeded"
    witness: tuple[SolutionConfig, SolutionConfig] | None = None
    contexts_exhaustive: bool | None = None
    samples: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class Classification:
    """Fitness/feasibility classification of an established dependency."""

    label: str  # "fitness" | "feasibility"
    instances_compared: int
    reachable_exhaustive: bool
    witness_instances: tuple[Instance, Instance] | None = None
    witness_contexts: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    distinguishing_value: int | None = None
    feasible_set_sizes: tuple[int, int] | None = None
    omitted_fitness: bool = False


@dataclass(frozen=True)
class DependencyEdge:
    """Directed edge: changes to ``source``'s solution shape ``target``'s instance."""

    source: int
    target: int
    label: str  # "fitness" | "feasibility" | "time"

    def __post_init__(self) -> None:
        if self.label not in ("fitness", "feasibility", "time"):
            raise InvalidArgumentError(f"unknown edge label {self.label!r}")
        if self.source == self.target and self.label != "time":
            raise InvalidArgumentError("self-loops are only allowed for time edges")


@dataclass(frozen=True)
class DependencyGraph:
    """Directed labeled graph over components."""

    nodes: tuple[tuple[int, str], ...]  # (component id, name)
    edges: tuple[DependencyEdge, ...]
    partial: bool = False
    unknown_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        ids = {i for i, _ in self.nodes}
        for e in self.edges:
            if e.source not in ids or e.target not in ids:
                raise InvalidArgumentError("edge endpoints must be graph nodes")

    def name_of(self, i: int) -> str:
        for cid, name in self.nodes:
            if cid == i:
                return name
        raise InvalidArgumentError(f"unknown component id {i}")


@dataclass(frozen=True)
class PairAnalysis:
    source: int
    target: int
    verdict: DependencyVerdict
    classification: Classification | None = None
    error: str | None = None
    sub_seed: int = 0


@dataclass(frozen=True)
class ProblemAnalysis:
    graph: DependencyGraph
    pairs: tuple[PairAnalysis, ...]
    budget: int
    seed: int
    sampling: bool


def _other_ids(problem: CompositeProblem, exclude: tuple[int, ...]) -> list[int]:
    return [c.id for c in problem.components if c.id not in exclude]


def _config_table(problem: CompositeProblem, i: int) -> list[SolutionConfig]:
    spec = problem.component(i)
    return [SolutionConfig(spec.encoding_width, v) for v in range(spec.space_size)]


def _full_context_values(
    ctx_ids: list[int], rest_ids: list[int], rest_values: tuple[int, ...], j: int, sj_value: int
) -> tuple[int, ...]:
    """Assemble the context-value tuple for the target: values for every id in
    ``ctx_ids`` (ascending), taking ``sj_value`` for ``j`` and the rest from
    ``rest_values`` (aligned with ``rest_ids``)."""
    lookup = dict(zip(rest_ids, rest_values))
    lookup[j] = sj_value
    return tuple(lookup[k] for k in ctx_ids)


def detect_instance_dependency(
    problem: CompositeProblem,
    i: int,
    j: int,
    budget: int = DEFAULT_SPACE_BUDGET,
    *,
    allow_sampling: bool = False,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> DependencyVerdict:
    """Does changing component ``j``'s configuration change ``i``'s instance?

    Dependent means: there is a pair of ``j`` configurations whose induced
    instances for ``i`` differ for *every* assignment of the remaining
    components.  With two components the remaining-context set is the single
    empty tuple.
    """
    if i == j:
        raise InvalidArgumentError("a component cannot be instance-dependent on itself")
    spec_i = problem.component(i)
    spec_j = problem.component(j)
    sj = spec_j.space_size
    ctx_ids = _other_ids(problem, (i,))
    rest_ids = _other_ids(problem, (i, j))
    rest_sizes = [problem.component(k).space_size for k in rest_ids]
    ctx_total = prod(rest_sizes) if rest_sizes else 1

    tables = {k: _config_table(problem, k) for k in ctx_ids}

    chi_bytes: dict[tuple[int, ...], bytes] = {}

    def instance_bytes(ctx_values: tuple[int, ...]) -> bytes:
        got = chi_bytes.get(ctx_values)
        if got is None:
            ctx = tuple(tables[k][v] for k, v in zip(ctx_ids, ctx_values))
            got = spec_i.chi(ctx).canonical
            chi_bytes[ctx_values] = got
        return got

    pairs_count = sj * (sj - 1) // 2
    exhaustive = (
        sj <= budget and ctx_total <= budget and pairs_count * ctx_total <= WORK_CAP
    )

    if exhaustive:
        rest_assignments = list(itertools.product(*[range(s) for s in rest_sizes]))
        for s1 in range(sj - 1):
            for s2 in range(s1 + 1, sj):
                hit = True
                for rest in rest_assignments:
                    b1 = instance_bytes(
                        _full_context_values(ctx_ids, rest_ids, rest, j, s1)
                    )
                    b2 = instance_bytes(
                        _full_context_values(ctx_ids, rest_ids, rest, j, s2)
                    )
                    if b1 == b2:
                        hit = False
                        break
                if hit:
                    return DependencyVerdict(
                        "dependent",
                        witness=(
                            SolutionConfig(spec_j.encoding_width, s1),
                            SolutionConfig(spec_j.encoding_width, s2),
                        ),
                        contexts_exhaustive=True,
                    )
        return DependencyVerdict("independent_exhaustive")

    if not allow_sampling:
        return DependencyVerdict("budget_exceeded", seed=seed)

    rng = random.Random(seed)
    if ctx_total <= samples:
        contexts = list(itertools.product(*[range(s) for s in rest_sizes]))
        contexts_exhaustive = True
    else:
        contexts = [
            tuple(rng.randrange(s) for s in rest_sizes) for _ in range(samples)
        ]
        contexts_exhaustive = False
    for t in range(samples):
        s1 = rng.randrange(sj)
        s2 = rng.randrange(sj)
        if s1 == s2:
            continue
        if s1 > s2:
            s1, s2 = s2, s1
        hit = all(
            instance_bytes(_full_context_values(ctx_ids, rest_ids, rest, j, s1))
            != instance_bytes(_full_context_values(ctx_ids, rest_ids, rest, j, s2))
            for rest in contexts
        )
        if hit:
            return DependencyVerdict(
                "dependent",
                witness=(
                    SolutionConfig(spec_j.encoding_width, s1),
                    SolutionConfig(spec_j.encoding_width, s2),
                ),
                contexts_exhaustive=contexts_exhaustive,
                samples=t + 1,
                seed=seed,
            )
    return DependencyVerdict("independent_sampled", samples=samples, seed=seed)


def replay_instance_witness(
    problem: CompositeProblem,
    i: int,
    j: int,
    s1_value: int,
    s2_value: int,
    budget: int = DEFAULT_SPACE_BUDGET,
) -> bool:
    """Re-check a dependency witness: the two configurations must induce
    different instances for every enumerable remaining-context assignment."""
    spec_j = problem.component(j)
    ctx_ids = _other_ids(problem, (i,))
    rest_ids = _other_ids(problem, (i, j))
    rest_sizes = [problem.component(k).space_size for k in rest_ids]
    rest_total = prod(rest_sizes) if rest_sizes else 1
    if rest_total > budget:
        raise BudgetExceededError("context space too large to replay exhaustively")
    tables = {k: _config_table(problem, k) for k in ctx_ids}
    spec_i = problem.component(i)
    for rest in itertools.product(*[range(s) for s in rest_sizes]):
        vals1 = _full_context_values(ctx_ids, rest_ids, rest, j, s1_value)
        vals2 = _full_context_values(ctx_ids, rest_ids, rest, j, s2_value)
        ctx1 = tuple(tables[k][v] for k, v in zip(ctx_ids, vals1))
        ctx2 = tuple(tables[k][v] for k, v in zip(ctx_ids, vals2))
        if spec_i.chi(ctx1).canonical == spec_i.chi(ctx2).canonical:
            return False
    return True


def classify_dependency(
    problem: CompositeProblem,
    i: int,
    j: int,
    budget: int = DEFAULT_SPACE_BUDGET,
    *,
    allow_sampling: bool = False,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> Classification:
    """Classify an established dependency of ``i`` on ``j``.

    Compares the feasible sets of ``i`` across reachable instances (the image
    of the instance mapping over enumerated or sampled contexts).  Differing
    sets mean feasibility-dependency and come with a concrete witness;
    otherwise the dependency only moves objective values, i.e. fitness.

    Call only after detection returned dependent.
    """
    spec_i = problem.component(i)
    problem.component(j)
    si = spec_i.space_size
    if si > budget:
        raise ClassificationBudgetError(
            f"feasible-set comparison infeasible at this budget "
            f"(component {i} has {si} configurations, budget {budget})",
            attempted=si,
            budget=budget,
        )
    ctx_ids = _other_ids(problem, (i,))
    ctx_sizes = [problem.component(k).space_size for k in ctx_ids]
    ctx_total = prod(ctx_sizes) if ctx_sizes else 1
    tables = {k: _config_table(problem, k) for k in ctx_ids}
    configs_i = _config_table(problem, i)

    if ctx_total <= budget:
        context_values = itertools.product(*[range(s) for s in ctx_sizes])
        reachable_exhaustive = True
    elif allow_sampling:
        rng = random.Random(seed)
        context_values = (
            tuple(rng.randrange(s) for s in ctx_sizes) for _ in range(samples)
        )
        reachable_exhaustive = False
    else:
        raise ClassificationBudgetError(
            f"feasible-set comparison infeasible at this budget "
            f"(context space of {ctx_total} assignments, budget {budget})",
            attempted=ctx_total,
            budget=budget,
        )

    # one representative instance (plus the context that produced it) per
    # distinct canonical byte form, in first-seen order
    instances: dict[bytes, tuple[Instance, tuple[int, ...]]] = {}
    for values in context_values:
        ctx = tuple(tables[k][v] for k, v in zip(ctx_ids, values))
        inst = spec_i.chi(ctx)
        if inst.canonical not in instances:
            instances[inst.canonical] = (inst, tuple(values))

    ordered = sorted(instances.items(), key=lambda kv: kv[0])
    bitmaps = []
    for canon, (inst, _vals) in ordered:
        bm = 0
        for v, cfg in enumerate(configs_i):
            if spec_i.feasible(inst, cfg):
                bm |= 1 << v
        bitmaps.append(bm)

    base_bm = bitmaps[0]
    differing = None
    for t in range(1, len(ordered)):
        if bitmaps[t] != base_bm:
            differing = t
            break

    if differing is None:
        return Classification(
            label="fitness",
            instances_compared=len(ordered),
            reachable_exhaustive=reachable_exhaustive,
        )

    inst_a, ctx_a = ordered[0][1]
    inst_b, ctx_b = ordered[differing][1]
    diff_bits = base_bm ^ bitmaps[differing]
    distinguishing = (diff_bits & -diff_bits).bit_length() - 1
    omitted = _fitness_effect_present(
        problem, i, ordered, bitmaps, tables, ctx_ids, configs_i
    )
    return Classification(
        label="feasibility",
        instances_compared=len(ordered),
        reachable_exhaustive=reachable_exhaustive,
        witness_instances=(inst_a, inst_b),
        witness_contexts=(ctx_a, ctx_b),
        distinguishing_value=distinguishing,
        feasible_set_sizes=(base_bm.bit_count(), bitmaps[differing].bit_count()),
        omitted_fitness=omitted,
    )


def _fitness_effect_present(problem, i, ordered, bitmaps, tables, ctx_ids, configs_i):
    """Best-effort probe: does some configuration, feasible under two reachable
    instances, score differently on them?  When true alongside differing
    feasible sets, the weaker fitness edge is the one being omitted."""
    spec_i = problem.component(i)
    evals = 0
    inst_a, vals_a = ordered[0][1]
    ctx_a = tuple(tables[k][v] for k, v in zip(ctx_ids, vals_a))
    for t in range(1, len(ordered)):
        shared = bitmaps[0] & bitmaps[t]
        if not shared:
            continue
        inst_b, vals_b = ordered[t][1]
        ctx_b = tuple(tables[k][v] for k, v in zip(ctx_ids, vals_b))
        v = 0
        while shared:
            if shared & 1:
                cfg = configs_i[v]
                za = float(spec_i.objective(inst_a, cfg, ctx_a))
                zb = float(spec_i.objective(inst_b, cfg, ctx_b))
                evals += 2
                if abs(za - zb) > 1e-9:
                    return True
                if evals >= FITNESS_SCAN_CAP:
                    return False
            shared >>= 1
            v += 1
    return False


def analyze_problem(
    problem: CompositeProblem,
    budget: int = DEFAULT_SPACE_BUDGET,
    seed: int = 0,
    *,
    allow_sampling: bool = False,
    samples: int = DEFAULT_SAMPLES,
) -> ProblemAnalysis:
    """Run detection and classification over every ordered component pair.

    Each pair gets its own deterministic sub-seed (root seed XOR pair index)
    so results are identical regardless of scheduling.  When both a fitness
    and a feasibility effect exist for a pair, only the feasibility edge is
    kept and the omission is recorded on the pair report.
    """
    n = problem.n
    pairs: list[PairAnalysis] = []
    edges: list[DependencyEdge] = []
    unknown: list[tuple[int, int]] = []
    for i in range(1, n + 1):  # target
        for j in range(1, n + 1):  # source
            if i == j:
                continue
            sub_seed = seed ^ ((i - 1) * n + (j - 1))
            verdict = detect_instance_dependency(
                problem,
                i,
                j,
                budget,
                allow_sampling=allow_sampling,
                samples=samples,
                seed=sub_seed,
            )
            classification = None
            error = None
            if verdict.kind == "dependent":
                try:
                    classification = classify_dependency(
                        problem,
                        i,
                        j,
                        budget,
                        allow_sampling=allow_sampling,
                        samples=samples,
                        seed=sub_seed,
                    )
                    edges.append(DependencyEdge(j, i, classification.label))
                except ClassificationBudgetError as err:
                    error = str(err)
                    unknown.append((j, i))
            elif verdict.kind == "budget_exceeded":
                unknown.append((j, i))
            pairs.append(
                PairAnalysis(j, i, verdict, classification, error, sub_seed)
            )
    graph = DependencyGraph(
        nodes=tuple((c.id, c.name) for c in problem.components),
        edges=tuple(edges),
        partial=bool(unknown),
        unknown_pairs=tuple(unknown),
    )
    return ProblemAnalysis(graph, tuple(pairs), budget, seed, allow_sampling)


def build_dependency_graph(
    problem: CompositeProblem,
    budget: int = DEFAULT_SPACE_BUDGET,
    seed: int = 0,
    *,
    allow_sampling: bool = False,
    samples: int = DEFAULT_SAMPLES,
) -> DependencyGraph:
    """The labeled dependency graph over all ordered component pairs."""
    return analyze_problem(
        problem, budget, seed, allow_sampling=allow_sampling, samples=samples
    ).graph


def is_multicomponent(graph: DependencyGraph) -> bool:
    """True when the graph is connected (undirected reading, self-loops ignored)
    and has at least two components to connect.

    Refuses to answer on partial graphs.
    """
    if graph.partial:
        raise PartialGraphError(
            "connectivity is indeterminate: some pairs are unresolved "
            f"({graph.unknown_pairs})"
        )
    ids = [i for i, _ in graph.nodes]
    if len(ids) < 2:
        return False
    adjacency: dict[int, set[int]] = {i: set() for i in ids}
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
