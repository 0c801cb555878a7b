"""Core objects for optimisation problems built from interacting components.

A composite problem is an ordered set of components.  Each component owns a
fixed-width bitstring configuration space, a feasibility predicate, an
objective, and an instance mapping that turns the other components'
configurations into the concrete instance this component must solve.  The
overall objective is a weighted sum of the component objectives, evaluated
on the instances the configurations induce for each other.

Everything here is a pure function over immutable values; results do not
depend on evaluation order, and repeated calls with equal arguments return
equal results.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Iterator, Sequence

from .errors import (
    InfeasibleJointError,
    InfeasibleSolutionError,
    InvalidArgumentError,
    ModelViolationError,
)

#: Default cap on the size of a fully enumerated joint configuration space.
DEFAULT_JOINT_BUDGET = 1 << 20

#: Absolute tolerance used when comparing objective values in tests/tie checks.
ABS_TOL = 1e-9


def _plain(value: Any) -> Any:
    """Normalise a payload to plain JSON-compatible data (tuples become lists)."""
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if not isinstance(k, str):
                raise ModelViolationError(f"payload dict keys must be strings, got {k!r}")
            out[k] = _plain(v)
        return out
    if isinstance(value, float) and not math.isfinite(value):
        raise ModelViolationError("payload floats must be finite")
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    raise ModelViolationError(f"payload contains unsupported type {type(value).__name__}")


def canonical_payload_bytes(payload: Any) -> bytes:
    """Deterministic byte serialization of an instance payload.

    Two instances compare equal exactly when these bytes are identical.
    """
    return json.dumps(
        _plain(payload), sort_keys=True, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


@dataclass(frozen=True, order=True)
class SolutionConfig:
    """A fixed-width bitstring configuration; every bit pattern is a member
    of the component's configuration space, feasibility is a separate test."""

    width: int
    value: int

    def __post_init__(self) -> None:
        if self.width < 0:
            raise InvalidArgumentError(f"width must be >= 0, got {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise InvalidArgumentError(
                f"value {self.value} does not fit in {self.width} bits"
            )

    @classmethod
    def zeros(cls, width: int) -> "SolutionConfig":
        return cls(width, 0)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "SolutionConfig":
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise InvalidArgumentError("bits must be 0 or 1")
            value = (value << 1) | b
        return cls(len(bits), value)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.width - 1 - i)) & 1 for i in range(self.width))


@dataclass(frozen=True, eq=False)
class Instance:
    """One concrete problem instance for a component.

    ``payload`` is component-specific data (depot sets, item volumes, ...).
    Equality is byte equality of the canonical payload serialization.
    """

    component_id: int
    dimension: int
    payload: Any
    canonical: bytes = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InvalidArgumentError(f"dimension must be >= 1, got {self.dimension}")
        object.__setattr__(self, "canonical", canonical_payload_bytes(self.payload))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.component_id == other.component_id
            and self.dimension == other.dimension
            and self.canonical == other.canonical
        )

    def __hash__(self) -> int:
        return hash((self.component_id, self.dimension, self.canonical))


ChiMapping = Callable[[tuple[SolutionConfig, ...]], Instance]
FeasiblePredicate = Callable[[Instance, SolutionConfig], bool]
Objective = Callable[[Instance, SolutionConfig, tuple[SolutionConfig, ...]], float]


@dataclass(frozen=True, eq=False)
class ComponentSpec:
    """Declaration of one component.

    ``chi`` maps the tuple of the *other* components' configurations (in
    ascending component-id order) to this component's instance.  It must be
    deterministic and total over raw configurations.  ``chi``/``feasible``/
    ``objective`` may be ``None`` only for components used purely inside a
    time pipeline, where coupling comes from data streams instead.

    Specs compare by identity so problems containing callables stay hashable.
    """

    id: int
    name: str
    encoding_width: int
    dimension: int
    chi: ChiMapping | None = None
    feasible: FeasiblePredicate | None = None
    objective: Objective | None = None

    def __post_init__(self) -> None:
        if self.id < 1:
            raise InvalidArgumentError(f"component ids start at 1, got {self.id}")
        if self.encoding_width < 0:
            raise InvalidArgumentError("encoding width must be >= 0")
        if self.dimension < 1:
            raise InvalidArgumentError("component dimension must be >= 1")
        if not self.name:
            raise InvalidArgumentError("component name must be non-empty")

    @property
    def space_size(self) -> int:
        return 1 << self.encoding_width

    def configs(self) -> Iterator[SolutionConfig]:
        for v in range(self.space_size):
            yield SolutionConfig(self.encoding_width, v)


@dataclass(frozen=True)
class CompositeProblem:
    """An ordered set of components plus the overall-objective weights."""

    components: tuple[ComponentSpec, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.components)
        if n < 2:
            raise InvalidArgumentError("a composite problem needs at least 2 components")
        ids = [c.id for c in self.components]
        if ids != list(range(1, n + 1)):
            raise InvalidArgumentError(f"component ids must be 1..{n} in order, got {ids}")
        if len(self.weights) != n:
            raise InvalidArgumentError("one weight per component required")
        for w in self.weights:
            if not math.isfinite(w):
                raise InvalidArgumentError("weights must be finite reals")
        for c in self.components:
            if c.chi is None or c.feasible is None or c.objective is None:
                raise InvalidArgumentError(
                    f"component {c.id} ({c.name}) lacks an instance mapping, predicate "
                    "or objective and cannot join a composite problem"
                )

    @property
    def n(self) -> int:
        return len(self.components)

    def component(self, i: int) -> ComponentSpec:
        if not 1 <= i <= self.n:
            raise InvalidArgumentError(f"component index {i} out of range 1..{self.n}")
        return self.components[i - 1]

    def context_widths(self, i: int) -> tuple[int, ...]:
        self.component(i)
        return tuple(c.encoding_width for c in self.components if c.id != i)

    def joint_space_size(self) -> int:
        return 1 << sum(c.encoding_width for c in self.components)

    def with_weights(self, weights: Sequence[float]) -> "CompositeProblem":
        return replace(self, weights=tuple(float(w) for w in weights))


def make_problem(
    components: Sequence[ComponentSpec], weights: Sequence[float] | None = None
) -> CompositeProblem:
    """Build a composite problem; omitted weights default to 1 for every component."""
    components = tuple(components)
    if weights is None:
        weights = (1.0,) * len(components)
    return CompositeProblem(components, tuple(float(w) for w in weights))


@dataclass(frozen=True)
class JointSolution:
    """One configuration per component, ordered by component id."""

    configs: tuple[SolutionConfig, ...]

    def values(self) -> tuple[int, ...]:
        return tuple(c.value for c in self.configs)


def joint_from_values(problem: CompositeProblem, values: Sequence[int]) -> JointSolution:
    if len(values) != problem.n:
        raise InvalidArgumentError("one value per component required")
    return JointSolution(
        tuple(
            SolutionConfig(c.encoding_width, v)
            for c, v in zip(problem.components, values)
        )
    )


def context_of(problem: CompositeProblem, joint: JointSolution, i: int) -> tuple[SolutionConfig, ...]:
    """The configurations of every component except ``i``, in id order."""
    problem.component(i)
    return tuple(cfg for c, cfg in zip(problem.components, joint.configs) if c.id != i)


def zeros_context(problem: CompositeProblem, i: int) -> tuple[SolutionConfig, ...]:
    return tuple(SolutionConfig.zeros(w) for w in problem.context_widths(i))


def _check_context(problem: CompositeProblem, i: int, context: Sequence[SolutionConfig]) -> tuple[SolutionConfig, ...]:
    widths = problem.context_widths(i)
    if len(context) != len(widths):
        raise InvalidArgumentError(
            f"context for component {i} needs {len(widths)} entries, got {len(context)}"
        )
    for cfg, w in zip(context, widths):
        if not isinstance(cfg, SolutionConfig):
            raise InvalidArgumentError("context entries must be SolutionConfig values")
        if cfg.width != w:
            raise InvalidArgumentError(
                f"context width mismatch: expected {w}, got {cfg.width}"
            )
    return tuple(context)


def map_instance(
    problem: CompositeProblem, i: int, context: Sequence[SolutionConfig]
) -> Instance:
    """Apply component ``i``'s instance mapping to the other components' configs."""
    spec = problem.component(i)
    context = _check_context(problem, i, context)
    instance = spec.chi(context)
    if not isinstance(instance, Instance):
        raise ModelViolationError(
            f"instance mapping of component {i} returned {type(instance).__name__}"
        )
    if instance.component_id != i:
        raise ModelViolationError(
            f"instance mapping of component {i} returned an instance tagged "
            f"for component {instance.component_id}"
        )
    if instance.dimension != spec.dimension:
        raise ModelViolationError(
            f"instance mapping of component {i} returned dimension "
            f"{instance.dimension}, declared {spec.dimension}"
        )
    return instance


def is_feasible(
    problem: CompositeProblem, i: int, instance: Instance, s: SolutionConfig
) -> bool:
    """Membership of ``s`` in component ``i``'s feasible set for ``instance``."""
    spec = problem.component(i)
    if s.width != spec.encoding_width:
        raise InvalidArgumentError(
            f"config width {s.width} does not match component {i} width "
            f"{spec.encoding_width}"
        )
    return bool(spec.feasible(instance, s))


def _predicate_name(fn: Callable) -> str:
    return getattr(fn, "__name__", "feasible")


def evaluate_component(
    problem: CompositeProblem,
    i: int,
    instance: Instance,
    s: SolutionConfig,
    context: Sequence[SolutionConfig],
) -> float:
    """Component ``i``'s objective value; rejects infeasible configurations."""
    spec = problem.component(i)
    context = _check_context(problem, i, context)
    if not is_feasible(problem, i, instance, s):
        raise InfeasibleSolutionError(i, _predicate_name(spec.feasible))
    z = spec.objective(instance, s, context)
    zf = float(z)
    if not math.isfinite(zf):
        raise ModelViolationError(f"objective of component {i} returned {z!r}")
    return zf


def evaluate_overall(problem: CompositeProblem, joint: JointSolution) -> float:
    """Weighted sum of component objectives over the induced instances.

    Every component's induced instance must deem its configuration feasible;
    otherwise the joint solution is rejected with the full offender list.
    """
    if len(joint.configs) != problem.n:
        raise InvalidArgumentError("joint solution arity does not match the problem")
    for spec, cfg in zip(problem.components, joint.configs):
        if cfg.width != spec.encoding_width:
            raise InvalidArgumentError(
                f"joint config for component {spec.id} has width {cfg.width}, "
                f"expected {spec.encoding_width}"
            )
    contexts = {}
    instances = {}
    offenders = []
    for spec, cfg in zip(problem.components, joint.configs):
        ctx = context_of(problem, joint, spec.id)
        inst = map_instance(problem, spec.id, ctx)
        contexts[spec.id] = ctx
        instances[spec.id] = inst
        if not is_feasible(problem, spec.id, inst, cfg):
            offenders.append(spec.id)
    if offenders:
        raise InfeasibleJointError(tuple(offenders))
    terms = []
    for spec, cfg, w in zip(problem.components, joint.configs, problem.weights):
        z = evaluate_component(problem, spec.id, instances[spec.id], cfg, contexts[spec.id])
        terms.append(w * z)
    return math.fsum(terms)


def reduce_to_component(problem: CompositeProblem, i: int) -> CompositeProblem:
    """Copy of the problem whose overall objective is component ``i`` alone."""
    problem.component(i)
    return problem.with_weights(
        tuple(1.0 if c.id == i else 0.0 for c in problem.components)
    )


def permute_components(problem: CompositeProblem, order: Sequence[int]) -> CompositeProblem:
    """Relabel components so that new component ``q`` is old component ``order[q-1]``.

    Instance mappings and objectives are wrapped to reorder their context
    tuples, so the permuted problem evaluates identically on permuted joints.
    """
    n = problem.n
    if sorted(order) != list(range(1, n + 1)):
        raise InvalidArgumentError(f"order must be a permutation of 1..{n}")
    order = tuple(order)
    new_specs = []
    for q in range(1, n + 1):
        old = problem.component(order[q - 1])
        old_ctx_ids = [j for j in range(1, n + 1) if j != old.id]
        new_ctx_ids = [p for p in range(1, n + 1) if p != q]
        # position, within the new context tuple, of each old context entry
        reorder = tuple(
            new_ctx_ids.index(order.index(j) + 1) for j in old_ctx_ids
        )

        def make_chi(inner: ChiMapping, idx: tuple[int, ...], new_id: int) -> ChiMapping:
            def chi(context: tuple[SolutionConfig, ...]) -> Instance:
                inst = inner(tuple(context[p] for p in idx))
                return Instance(new_id, inst.dimension, inst.payload)

            return chi

        def make_feasible(inner: FeasiblePredicate, old_id: int) -> FeasiblePredicate:
            def feasible(instance: Instance, s: SolutionConfig) -> bool:
                return inner(Instance(old_id, instance.dimension, instance.payload), s)

            feasible.__name__ = _predicate_name(inner)
            return feasible

        def make_objective(inner: Objective, idx: tuple[int, ...], old_id: int) -> Objective:
            def objective(
                instance: Instance, s: SolutionConfig, context: tuple[SolutionConfig, ...]
            ) -> float:
                retagged = Instance(old_id, instance.dimension, instance.payload)
                return inner(retagged, s, tuple(context[p] for p in idx))

            return objective

        new_specs.append(
            ComponentSpec(
                id=q,
                name=old.name,
                encoding_width=old.encoding_width,
                dimension=old.dimension,
                chi=make_chi(old.chi, reorder, q),
                feasible=make_feasible(old.feasible, old.id),
                objective=make_objective(old.objective, reorder, old.id),
            )
        )
    new_weights = tuple(problem.weights[order[q - 1] - 1] for q in range(1, n + 1))
    return CompositeProblem(tuple(new_specs), new_weights)


# --- joint enumeration -------------------------------------------------------

# The table of feasible joint configurations and their per-component objective
# values is independent of the weights, so reweighted copies of a problem share
# it.  Keyed on the components tuple, which hashes by spec identity.


@lru_cache(maxsize=32)
def _joint_table(
    components: tuple[ComponentSpec, ...]
) -> tuple[tuple[tuple[int, ...], tuple[float, ...]], ...]:
    n = len(components)
    widths = [c.encoding_width for c in components]
    config_objs = [
        [SolutionConfig(w, v) for v in range(1 << w)] for w in widths
    ]
    chi_cache: list[dict[tuple[int, ...], Instance]] = [{} for _ in range(n)]
    feas_bitmaps: list[dict[bytes, int]] = [{} for _ in range(n)]

    def instance_for(idx: int, values: tuple[int, ...]) -> Instance:
        key = values[:idx] + values[idx + 1 :]
        inst = chi_cache[idx].get(key)
        if inst is None:
            ctx = tuple(
                config_objs[j][key[j if j < idx else j - 1]]
                for j in range(n)
                if j != idx
            )
            spec = components[idx]
            inst = spec.chi(ctx)
            if not isinstance(inst, Instance) or inst.component_id != spec.id:
                raise ModelViolationError(
                    f"instance mapping of component {spec.id} violated its contract"
                )
            if inst.dimension != spec.dimension:
                raise ModelViolationError(
                    f"instance mapping of component {spec.id} returned dimension "
                    f"{inst.dimension}, declared {spec.dimension}"
                )
            chi_cache[idx][key] = inst
        return inst

    def bitmap_for(idx: int, inst: Instance) -> int:
        bm = feas_bitmaps[idx].get(inst.canonical)
        if bm is None:
            spec = components[idx]
            bm = 0
            for v, cfg in enumerate(config_objs[idx]):
                if spec.feasible(inst, cfg):
                    bm |= 1 << v
            feas_bitmaps[idx][inst.canonical] = bm
        return bm

    entries = []
    for values in itertools.product(*[range(1 << w) for w in widths]):
        insts = []
        ok = True
        for idx in range(n):
            inst = instance_for(idx, values)
            if not (bitmap_for(idx, inst) >> values[idx]) & 1:
                ok = False
                break
            insts.append(inst)
        if not ok:
            continue
        zs = []
        for idx in range(n):
            ctx = tuple(
                config_objs[j][values[j]] for j in range(n) if j != idx
            )
            z = float(components[idx].objective(insts[idx], config_objs[idx][values[idx]], ctx))
            if not math.isfinite(z):
                raise ModelViolationError(
                    f"objective of component {components[idx].id} returned {z!r}"
                )
            zs.append(z)
        entries.append((values, tuple(zs)))
    return tuple(entries)


def feasible_joint_entries(
    problem: CompositeProblem,
) -> tuple[tuple[tuple[int, ...], tuple[float, ...]], ...]:
    """All feasible joint configurations with per-component objective values,
    ascending in the lexicographic order of the concatenated bitstring.

    The result is cached per components tuple; the first call enumerates the
    full joint space, so guard it with a budget check for large problems.
    """
    return _joint_table(problem.components)


def weighted_value(problem: CompositeProblem, zs: Sequence[float]) -> float:
    return math.fsum(w * z for w, z in zip(problem.weights, zs))


@dataclass(frozen=True)
class DecisionVerdict:
    """Outcome of the threshold decision: yes (with witness), no, or out of budget."""

    kind: str  # "yes" | "no" | "budget_exceeded"
    witness: JointSolution | None = None


def decide(
    problem: CompositeProblem, k: float, budget: int = DEFAULT_JOINT_BUDGET
) -> DecisionVerdict:
    """Is there a feasible joint solution with overall value <= k?

    Answers only after exhaustive enumeration; a joint space larger than the
    budget yields ``budget_exceeded``, never a silent "no".
    """
    size = problem.joint_space_size()
    if size > budget:
        return DecisionVerdict("budget_exceeded")
    for values, zs in feasible_joint_entries(problem):
        if weighted_value(problem, zs) <= k:
            return DecisionVerdict("yes", joint_from_values(problem, values))
    return DecisionVerdict("no")
