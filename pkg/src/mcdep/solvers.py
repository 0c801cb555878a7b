"""Reference solution strategies for composite problems.

Three strategies with deliberately different awareness of the coupling
between components:

* ``brute_force_joint`` enumerates the whole joint space and is the ground
  truth every other result is measured against.
* ``solve_isolated`` optimises each component on its own, ignoring the
  effect its choice has on the others' instances.
* ``cooperative_search`` is a seeded round-robin coordinate descent over the
  joint objective.

The gap between the isolated strategy and the oracle on coupled problems is
the concrete evidence that components cannot be solved in isolation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import BudgetExceededError, InfeasibleJointError, InvalidArgumentError
from .model import (
    DEFAULT_JOINT_BUDGET,
    CompositeProblem,
    JointSolution,
    SolutionConfig,
    evaluate_overall,
    feasible_joint_entries,
    joint_from_values,
    map_instance,
    weighted_value,
    zeros_context,
)

#: Joint-value spread treated as a tie when collecting the set of optima.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class SolveResult:
    joint: JointSolution | None
    value: float | None
    status: str  # "optimal_exhaustive" | "heuristic" | "infeasible_none_found"
    evaluations: int
    seed: int | None = None
    history: tuple[float, ...] = ()
    diagnostic: str | None = None

    def to_json(self) -> str:
        """Deterministic serialization; equal results give equal bytes."""
        payload = {
            "joint": list(self.joint.values()) if self.joint is not None else None,
            "value": repr(self.value) if self.value is not None else None,
            "status": self.status,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "history": [repr(v) for v in self.history],
            "diagnostic": self.diagnostic,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def brute_force_joint(
    problem: CompositeProblem, budget: int = DEFAULT_JOINT_BUDGET
) -> SolveResult:
    """Exhaustive enumeration of the joint space; the oracle for everything else.

    Ties are broken toward the lexicographically smallest joint bitstring.
    Refuses (rather than truncates) when the joint space exceeds the budget.
    """
    size = problem.joint_space_size()
    if size > budget:
        raise BudgetExceededError(
            f"joint space of {size} configurations exceeds budget {budget}",
            required=size,
            budget=budget,
        )
    best_values = None
    best = None
    for values, zs in feasible_joint_entries(problem):
        v = weighted_value(problem, zs)
        if best is None or v < best:
            best = v
            best_values = values
    if best_values is None:
        return SolveResult(None, None, "infeasible_none_found", size)
    joint = joint_from_values(problem, best_values)
    # re-evaluate through the public path so the reported value is re-checked
    value = evaluate_overall(problem, joint)
    return SolveResult(joint, value, "optimal_exhaustive", size)


def brute_force_all_optima(
    problem: CompositeProblem,
    budget: int = DEFAULT_JOINT_BUDGET,
    tie_tol: float = TIE_TOL,
) -> tuple[JointSolution, ...]:
    """Every feasible joint solution within ``tie_tol`` of the global minimum."""
    size = problem.joint_space_size()
    if size > budget:
        raise BudgetExceededError(
            f"joint space of {size} configurations exceeds budget {budget}",
            required=size,
            budget=budget,
        )
    entries = feasible_joint_entries(problem)
    if not entries:
        return ()
    values = [(weighted_value(problem, zs), vals) for vals, zs in entries]
    vmin = min(v for v, _ in values)
    return tuple(
        joint_from_values(problem, vals) for v, vals in values if v <= vmin + tie_tol
    )


def _baseline_config(problem: CompositeProblem, j: int) -> SolutionConfig:
    """All-zeros configuration, repaired to the nearest feasible one by an
    ascending scan against the instance induced by all-zero contexts."""
    spec = problem.component(j)
    instance = map_instance(problem, j, zeros_context(problem, j))
    for v in range(spec.space_size):
        cfg = SolutionConfig(spec.encoding_width, v)
        if spec.feasible(instance, cfg):
            return cfg
    return SolutionConfig.zeros(spec.encoding_width)


def solve_isolated(
    problem: CompositeProblem, budget: int = DEFAULT_JOINT_BUDGET
) -> SolveResult:
    """Optimise each component independently, then compose.

    Components are processed in id order; component i sees the best
    configurations found so far for earlier components and fixed baseline
    configurations for the ones not yet optimised.  The composition is then
    evaluated jointly, which is exactly where coupled problems lose.
    """
    for spec in problem.components:
        if spec.space_size > budget:
            raise BudgetExceededError(
                f"component {spec.id} space of {spec.space_size} exceeds budget {budget}",
                required=spec.space_size,
                budget=budget,
            )
    baselines = {spec.id: _baseline_config(problem, spec.id) for spec in problem.components}
    best: dict[int, SolutionConfig] = {}
    evaluations = 0
    unoptimised = []
    for spec in problem.components:
        i = spec.id
        ctx = tuple(
            best[c.id] if c.id < i else baselines[c.id]
            for c in problem.components
            if c.id != i
        )
        instance = map_instance(problem, i, ctx)
        best_cfg = None
        best_z = None
        for v in range(spec.space_size):
            cfg = SolutionConfig(spec.encoding_width, v)
            if not spec.feasible(instance, cfg):
                continue
            z = float(spec.objective(instance, cfg, ctx))
            evaluations += 1
            if best_z is None or z < best_z:
                best_z = z
                best_cfg = cfg
        if best_cfg is None:
            best_cfg = SolutionConfig.zeros(spec.encoding_width)
            unoptimised.append(i)
        best[i] = best_cfg
    joint = JointSolution(tuple(best[c.id] for c in problem.components))
    diagnostic = (
        "no feasible configuration for components "
        + ",".join(str(i) for i in unoptimised)
        if unoptimised
        else None
    )
    try:
        value = evaluate_overall(problem, joint)
        evaluations += 1
    except InfeasibleJointError as err:
        offenders = ",".join(str(i) for i in err.component_ids)
        return SolveResult(
            joint,
            None,
            "infeasible_none_found",
            evaluations,
            diagnostic=f"composition infeasible for components {offenders}",
        )
    return SolveResult(joint, value, "heuristic", evaluations, diagnostic=diagnostic)


def _feasible_start(
    problem: CompositeProblem,
    rng: random.Random,
    restarts: int,
    budget: int,
) -> tuple[JointSolution | None, int]:
    """Seeded random restarts, then an ascending deterministic scan.

    The scan keeps a run from spuriously failing on problems whose feasible
    set is a thin slice of the joint space.
    """
    evaluations = 0
    widths = [c.encoding_width for c in problem.components]
    for _ in range(restarts):
        joint = joint_from_values(
            problem, [rng.randrange(1 << w) for w in widths]
        )
        evaluations += 1
        try:
            evaluate_overall(problem, joint)
            return joint, evaluations
        except InfeasibleJointError:
            continue
    size = problem.joint_space_size()
    if size <= budget:
        for values, _zs in feasible_joint_entries(problem):
            return joint_from_values(problem, values), evaluations
    return None, evaluations


def cooperative_search(
    problem: CompositeProblem,
    seed: int = 0,
    max_iters: int = 100,
    budget: int = DEFAULT_JOINT_BUDGET,
    restarts: int = 100,
    start: JointSolution | None = None,
) -> SolveResult:
    """Round-robin coordinate descent over the joint objective.

    Each sweep re-optimises one component at a time with the others held
    fixed, accepting only strict improvement of the overall value, so the
    accepted-value sequence is strictly decreasing and the search terminates.
    Deterministic for a fixed seed.
    """
    if max_iters < 1:
        raise InvalidArgumentError(f"max_iters must be >= 1, got {max_iters}")
    rng = random.Random(seed)
    evaluations = 0
    if start is not None:
        current = start
        value = evaluate_overall(problem, current)
        evaluations += 1
    else:
        current, evaluations = _feasible_start(problem, rng, restarts, budget)
        if current is None:
            return SolveResult(
                None,
                None,
                "infeasible_none_found",
                evaluations,
                seed=seed,
                diagnostic=f"no feasible joint solution found after {restarts} restarts",
            )
        value = evaluate_overall(problem, current)
        evaluations += 1
    history = [value]
    for _sweep in range(max_iters):
        improved = False
        for spec in problem.components:
            i = spec.id
            if spec.space_size <= budget:
                candidates = range(spec.space_size)
            else:
                candidates = sorted(rng.sample(range(spec.space_size), budget))
            best_v = value
            best_cfg = None
            for v in candidates:
                if v == current.configs[i - 1].value:
                    continue
                cfg = SolutionConfig(spec.encoding_width, v)
                trial = JointSolution(
                    tuple(
                        cfg if c.id == i else old
                        for c, old in zip(problem.components, current.configs)
                    )
                )
                evaluations += 1
                try:
                    tv = evaluate_overall(problem, trial)
                except InfeasibleJointError:
                    continue
                if tv < best_v:
                    best_v = tv
                    best_cfg = cfg
            if best_cfg is not None:
                current = JointSolution(
                    tuple(
                        best_cfg if c.id == i else old
                        for c, old in zip(problem.components, current.configs)
                    )
                )
                value = best_v
                history.append(value)
                improved = True
        if not improved:
            break
    return SolveResult(
        current, value, "heuristic", evaluations, seed=seed, history=tuple(history)
    )
