"""Time-windowed coupling between components.

Some components receive a stream of data produced by another component's
decisions, window after window.  The coupling of interest here is on the
*dimension* of the downstream instance: two different upstream decisions in
window d can hand the downstream component instances of different sizes in
window d (or d+1).  Payload changes at a fixed dimension are ordinary
instance-dependency territory and are deliberately not detected here.

The structure is rendered as two graphs: an expanded one with a node per
(component, window) pair, and its quotient by component, where self-loops
(a component feeding its own next window) are meaningful and allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .analysis import DependencyEdge, DependencyGraph
from .errors import InvalidArgumentError
from .model import ComponentSpec

#: Hard cap on simulated windows when running a pipeline to exhaustion.
HORIZON_CAP = 52


@dataclass(frozen=True)
class TimeWindow:
    """One processing window; duration is in abstract capacity units."""

    index: int
    duration: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise InvalidArgumentError("window indices start at 0")
        if self.duration <= 0:
            raise InvalidArgumentError("window duration must be positive")


@dataclass(frozen=True, eq=False)
class DataStream:
    """A directed data feed between components.

    ``payload_fn(source_payload, source_solution)`` yields the target's
    instance payload; it must depend only on its two arguments.  ``lag`` is 0
    for within-window feeds and 1 for feeds into the next window.
    """

    source: int
    target: int
    payload_fn: Callable[[Any, Any], Any]
    lag: int = 0

    def __post_init__(self) -> None:
        if self.lag not in (0, 1):
            raise InvalidArgumentError("stream lag must be 0 or 1")
        if self.source == self.target and self.lag == 0:
            raise InvalidArgumentError("a within-window self-stream is a cycle")


@dataclass(frozen=True, eq=False)
class TimePipeline:
    """Components plus declared data streams and per-component decision spaces.

    ``choices`` enumerates the candidate solutions a component can adopt for
    a given payload; ``dimension_of`` measures an instance payload (defaults
    to ``len``).  The pipeline runs until the driving payloads are exhausted
    or the horizon cap is hit.
    """

    components: tuple[ComponentSpec, ...]
    streams: tuple[DataStream, ...]
    initial_payloads: Mapping[int, Any]
    choices: Mapping[int, Callable[[Any], Sequence[Any]]] = field(default_factory=dict)
    dimension_of: Mapping[int, Callable[[Any], int]] = field(default_factory=dict)
    horizon_cap: int = HORIZON_CAP

    def __post_init__(self) -> None:
        ids = [c.id for c in self.components]
        if len(ids) != len(set(ids)) or not ids:
            raise InvalidArgumentError("pipeline components need unique ids")
        if self.horizon_cap < 1:
            raise InvalidArgumentError("horizon cap must be >= 1")
        for s in self.streams:
            if s.source not in ids or s.target not in ids:
                raise InvalidArgumentError(
                    f"stream {s.source}->{s.target} references unknown components"
                )
        seen: dict[tuple[int, int], DataStream] = {}
        for s in self.streams:
            key = (s.target, s.lag)
            if key in seen:
                raise InvalidArgumentError(
                    f"component {s.target} has two incoming streams with lag {s.lag}"
                )
            seen[key] = s
        self._check_within_window_acyclic(ids)

    def _check_within_window_acyclic(self, ids: list[int]) -> None:
        succ = {i: [] for i in ids}
        indeg = {i: 0 for i in ids}
        for s in self.streams:
            if s.lag == 0:
                succ[s.source].append(s.target)
                indeg[s.target] += 1
        queue = [i for i in ids if indeg[i] == 0]
        done = 0
        while queue:
            node = queue.pop()
            done += 1
            for nxt in succ[node]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    queue.append(nxt)
        if done != len(ids):
            raise InvalidArgumentError("within-window stream graph contains a cycle")

    def component_name(self, i: int) -> str:
        for c in self.components:
            if c.id == i:
                return c.name
        raise InvalidArgumentError(f"unknown component id {i}")

    def stream_between(self, j: int, i: int) -> DataStream | None:
        for s in self.streams:
            if s.source == j and s.target == i:
                return s
        return None

    def measure(self, i: int, payload: Any) -> int:
        fn = self.dimension_of.get(i, len)
        return int(fn(payload))


@dataclass(frozen=True)
class TimeDependencyVerdict:
    """Outcome of dimension-coupling detection over a declared stream."""

    kind: str  # "time_dependent" | "not_detected"
    source: int
    target: int
    source_payload: Any = None
    witness: tuple[Any, Any, int, int] | None = None  # choice_a, choice_b, dim_a, dim_b
    choices_examined: int = 0


def detect_time_dependency(
    pipeline: TimePipeline, i: int, j: int
) -> TimeDependencyVerdict:
    """Can two different decisions of ``j`` change the dimension of ``i``'s instance?

    Probes the declared stream j -> i with ``j``'s enumerated decision space
    on its initial payload; the witness carries both choices and both
    resulting dimensions so it can be replayed through the stream.
    """
    stream = pipeline.stream_between(j, i)
    if stream is None:
        raise InvalidArgumentError(f"no data stream declared from {j} to {i}")
    if j not in pipeline.initial_payloads:
        raise InvalidArgumentError(f"component {j} has no initial payload to probe")
    if j not in pipeline.choices:
        raise InvalidArgumentError(f"component {j} declares no decision space")
    payload = pipeline.initial_payloads[j]
    candidates = list(pipeline.choices[j](payload))
    dims: dict[int, Any] = {}
    for examined, choice in enumerate(candidates, start=1):
        dim = pipeline.measure(i, stream.payload_fn(payload, choice))
        if dims and dim not in dims:
            first_dim, first_choice = next(iter(dims.items()))
            return TimeDependencyVerdict(
                "time_dependent",
                source=j,
                target=i,
                source_payload=payload,
                witness=(first_choice, choice, first_dim, dim),
                choices_examined=examined,
            )
        dims.setdefault(dim, choice)
    return TimeDependencyVerdict(
        "not_detected",
        source=j,
        target=i,
        source_payload=payload,
        choices_examined=len(candidates),
    )


def replay_time_witness(pipeline: TimePipeline, verdict: TimeDependencyVerdict) -> bool:
    """Re-run a dimension witness through the stream and confirm both dimensions."""
    if verdict.witness is None:
        return False
    stream = pipeline.stream_between(verdict.source, verdict.target)
    if stream is None:
        return False
    choice_a, choice_b, dim_a, dim_b = verdict.witness
    got_a = pipeline.measure(verdict.target, stream.payload_fn(verdict.source_payload, choice_a))
    got_b = pipeline.measure(verdict.target, stream.payload_fn(verdict.source_payload, choice_b))
    return got_a == dim_a and got_b == dim_b and dim_a != dim_b


@dataclass(frozen=True)
class ExpandedTimeGraph:
    """One node per (component id, window index); edges never point backward in time."""

    nodes: tuple[tuple[int, int], ...]
    edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    names: tuple[tuple[int, str], ...]

    def __post_init__(self) -> None:
        node_set = set(self.nodes)
        for (src, dst) in self.edges:
            if src not in node_set or dst not in node_set:
                raise InvalidArgumentError("expanded edge endpoints must be nodes")
            if dst[1] < src[1]:
                raise InvalidArgumentError("time edges cannot point backward")

    def name_of(self, node: tuple[int, int]) -> str:
        for cid, name in self.names:
            if cid == node[0]:
                return f"{name}_{node[1]}"
        raise InvalidArgumentError(f"unknown component id {node[0]}")


def expand_time_graph(pipeline: TimePipeline, realized_horizon: int) -> ExpandedTimeGraph:
    """Unroll the declared streams over the given number of windows."""
    if realized_horizon < 1:
        raise InvalidArgumentError(f"horizon must be >= 1, got {realized_horizon}")
    nodes = tuple(
        (c.id, d)
        for c in pipeline.components
        for d in range(realized_horizon)
    )
    edges = []
    for d in range(realized_horizon):
        for s in pipeline.streams:
            if s.lag == 0:
                edges.append(((s.source, d), (s.target, d)))
            elif d + 1 < realized_horizon:
                edges.append(((s.source, d), (s.target, d + 1)))
    return ExpandedTimeGraph(
        nodes=nodes,
        edges=tuple(edges),
        names=tuple((c.id, c.name) for c in pipeline.components),
    )


def compress_time_graph(expanded: ExpandedTimeGraph) -> DependencyGraph:
    """Quotient the expanded graph by component id.

    A time-labeled edge j -> i exists exactly when any window-level edge
    between the two components exists; self-loops are kept (a component can
    feed its own next window).
    """
    pairs = sorted({(src[0], dst[0]) for src, dst in expanded.edges})
    edges = tuple(DependencyEdge(j, i, "time") for j, i in pairs)
    return DependencyGraph(nodes=expanded.names, edges=edges)


def run_pipeline(
    pipeline: TimePipeline,
    choose: Callable[[int, Any], Any],
    cap: int | None = None,
) -> tuple[dict[int, Any], ...]:
    """Simulate windows until every driving payload is exhausted or ``cap`` hits.

    Returns, per window, the payload each deciding component saw.  Components
    are processed in within-window topological order; lag-1 streams carry
    payloads into the next window.
    """
    cap = pipeline.horizon_cap if cap is None else min(cap, pipeline.horizon_cap)
    order = _topo_order(pipeline)
    current: dict[int, Any] = dict(pipeline.initial_payloads)
    history = []
    for _d in range(cap):
        if not any(
            pipeline.measure(i, p) > 0 for i, p in current.items() if p is not None
        ):
            break
        nxt: dict[int, Any] = {}
        seen: dict[int, Any] = dict(current)
        for cid in order:
            payload = seen.get(cid)
            if payload is None:
                continue
            solution = choose(cid, payload) if cid in pipeline.choices else None
            for s in pipeline.streams:
                if s.source != cid:
                    continue
                out = s.payload_fn(payload, solution)
                if s.lag == 0:
                    seen[s.target] = out
                else:
                    nxt[s.target] = out
        history.append(seen)
        current = nxt
    return tuple(history)


def realized_horizon(
    pipeline: TimePipeline, choose: Callable[[int, Any], Any], cap: int | None = None
) -> tuple[int, bool]:
    """Number of windows until exhaustion under ``choose``; False when capped."""
    history = run_pipeline(pipeline, choose, cap)
    cap = pipeline.horizon_cap if cap is None else min(cap, pipeline.horizon_cap)
    return len(history), len(history) < cap or not history


def _topo_order(pipeline: TimePipeline) -> list[int]:
    ids = [c.id for c in pipeline.components]
    succ = {i: [] for i in ids}
    indeg = {i: 0 for i in ids}
    for s in pipeline.streams:
        if s.lag == 0:
            succ[s.source].append(s.target)
            indeg[s.target] += 1
    order = []
    queue = sorted(i for i in ids if indeg[i] == 0)
    while queue:
        node = queue.pop(0)
        order.append(node)
        ready = []
        for nxt in succ[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
        queue = sorted(queue + ready)
    return order
