"""Small table-driven composite problems for controls and synthetic fixtures.

Each component has a cost table over its configuration values.  Couplings
are declared explicitly:

* a ``value`` coupling feeds the source's raw configuration value into the
  target's instance payload and rescales the target's costs by
  ``1 + sum(values)`` — the instance changes, the feasible set does not;
* a ``parity`` coupling additionally constrains feasibility: a target
  configuration is feasible only when its value parity matches the combined
  parity of its parity-coupled sources.

A problem with no couplings at all is fully separable (every instance
mapping is constant), which makes it the natural control case.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgumentError
from .model import (
    CompositeProblem,
    ComponentSpec,
    Instance,
    SolutionConfig,
    make_problem,
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Declarative description of a table-driven composite problem."""

    components: tuple[tuple[int, str, int], ...]  # (id, name, width)
    costs: tuple[tuple[int, int, float], ...] = ()  # (component id, value, cost)
    value_couples: tuple[tuple[int, int], ...] = ()  # (target, source)
    parity_couples: tuple[tuple[int, int], ...] = ()
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        ids = [cid for cid, _n, _w in self.components]
        if ids != list(range(1, len(ids) + 1)):
            raise InvalidArgumentError(f"component ids must be 1..n in order, got {ids}")
        widths = {cid: w for cid, _n, w in self.components}
        for cid, value, _cost in self.costs:
            if cid not in widths:
                raise InvalidArgumentError(f"cost entry for unknown component {cid}")
            if not 0 <= value < (1 << widths[cid]):
                raise InvalidArgumentError(
                    f"cost entry value {value} out of range for component {cid}"
                )
        for target, source in self.value_couples + self.parity_couples:
            if target not in widths or source not in widths:
                raise InvalidArgumentError(
                    f"coupling {target}<-{source} references unknown components"
                )
            if target == source:
                raise InvalidArgumentError("a component cannot couple to itself")
        if self.weights is not None and len(self.weights) != len(self.components):
            raise InvalidArgumentError("one weight per component required")


def build_synthetic_problem(spec: SyntheticSpec) -> CompositeProblem:
    n = len(spec.components)
    widths = {cid: w for cid, _name, w in spec.components}
    cost_tables = {cid: [0.0] * (1 << w) for cid, _name, w in spec.components}
    for cid, value, cost in spec.costs:
        cost_tables[cid][value] = float(cost)
    inputs_of = {cid: [] for cid, _n, _w in spec.components}
    for target, source in spec.value_couples:
        inputs_of[target].append((source, "value"))
    for target, source in spec.parity_couples:
        inputs_of[target].append((source, "parity"))
    for cid in inputs_of:
        inputs_of[cid].sort()

    specs = []
    for cid, name, width in spec.components:
        other_ids = [o for o, _n, _w in spec.components if o != cid]
        sources = inputs_of[cid]
        dimension = len(sources) + 1

        def make_chi(cid=cid, other_ids=other_ids, sources=sources, dimension=dimension):
            def chi(context: tuple[SolutionConfig, ...]) -> Instance:
                by_id = dict(zip(other_ids, context))
                payload = {
                    "inputs": [
                        [src, kind, by_id[src].value] for src, kind in sources
                    ]
                }
                return Instance(cid, dimension, payload)

            return chi

        def make_feasible(cid=cid):
            def table_parity(instance: Instance, s: SolutionConfig) -> bool:
                parities = [
                    value & 1
                    for _src, kind, value in instance.payload["inputs"]
                    if kind == "parity"
                ]
                if not parities:
                    return True
                target = 0
                for p in parities:
                    target ^= p
                return (s.value & 1) == target

            return table_parity

        def make_objective(cid=cid, table=cost_tables[cid]):
            def table_cost(
                instance: Instance, s: SolutionConfig, context: tuple[SolutionConfig, ...]
            ) -> float:
                scale = 1.0
                for _src, kind, value in instance.payload["inputs"]:
                    if kind == "value":
                        scale += value
                return table[s.value] * scale

            return table_cost

        specs.append(
            ComponentSpec(
                id=cid,
                name=name,
                encoding_width=width,
                dimension=dimension,
                chi=make_chi(),
                feasible=make_feasible(),
                objective=make_objective(),
            )
        )
    return make_problem(tuple(specs), spec.weights)


def separable_control(widths: tuple[int, ...], tables: tuple[tuple[float, ...], ...]) -> CompositeProblem:
    """A composite with constant instance mappings both ways: the case where
    optimising components in isolation is exactly optimal."""
    if len(widths) != len(tables):
        raise InvalidArgumentError("one cost table per component required")
    components = tuple(
        (i + 1, f"C{i + 1}", w) for i, w in enumerate(widths)
    )
    costs = []
    for i, table in enumerate(tables):
        if len(table) != 1 << widths[i]:
            raise InvalidArgumentError(
                f"cost table for component {i + 1} must have {1 << widths[i]} entries"
            )
        for v, c in enumerate(table):
            costs.append((i + 1, v, float(c)))
    return build_synthetic_problem(
        SyntheticSpec(components=components, costs=tuple(costs))
    )
