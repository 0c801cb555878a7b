"""Warehouse location plus distribution routing, wired as a two-component problem.

Component 1 (FLP) picks k open distribution centers and assigns every client
to one of them; component 2 (VRP) orders each center's clients into a closed
delivery tour.  Each side's instance is induced by the other side's
configuration: the routing instance is the open depots plus the client
partition the assignment implies, and the location instance carries the
region membership the routes imply, which the assignment must agree with.

Costs are Euclidean doubles, unrounded: assignment distances plus
establishment costs (base plus a per-client rate) on the location side, and
closed-tour lengths on the routing side.

Encodings are dense bitstrings so that whole spaces stay enumerable:

* FLP: a k-subset rank over the locations, then one slot digit per client
  selecting among the open centers in ascending id order.
* VRP: one permutation rank over all clients, then k-1 cut positions
  splitting the permutation into per-center ordered segments.  Segment d
  belongs to the d-th open center in ascending id order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb, factorial

from .encoding import (
    bits_for,
    pack_fields,
    rank_permutation,
    rank_subset,
    unpack_fields,
    unrank_permutation,
    unrank_subset,
)
from .errors import InvalidArgumentError, ModelViolationError
from .model import (
    CompositeProblem,
    ComponentSpec,
    Instance,
    JointSolution,
    SolutionConfig,
    evaluate_overall,
    make_problem,
)

FLP_ID = 1
VRP_ID = 2


@dataclass(frozen=True)
class Location:
    id: int
    x: float
    y: float
    base_cost: float
    per_client_cost: float


@dataclass(frozen=True)
class Client:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class LrpInstanceData:
    """Static problem data: candidate locations, clients, and how many centers open."""

    locations: tuple[Location, ...]
    clients: tuple[Client, ...]
    k: int

    def __post_init__(self) -> None:
        if not self.locations:
            raise InvalidArgumentError("at least one location required")
        if [l.id for l in self.locations] != list(range(len(self.locations))):
            raise InvalidArgumentError("location ids must be 0..m-1 in order")
        if [c.id for c in self.clients] != list(range(len(self.clients))):
            raise InvalidArgumentError("client ids must be 0..n-1 in order")
        if not 1 <= self.k <= len(self.locations):
            raise InvalidArgumentError(
                f"k must satisfy 1 <= k <= |locations| "
                f"(got k={self.k}, {len(self.locations)} locations)"
            )
        for l in self.locations:
            if not (math.isfinite(l.x) and math.isfinite(l.y)):
                raise InvalidArgumentError(f"location {l.id} has non-finite coordinates")
            if l.base_cost < 0 or l.per_client_cost < 0:
                raise InvalidArgumentError(f"location {l.id} has negative costs")
        for c in self.clients:
            if not (math.isfinite(c.x) and math.isfinite(c.y)):
                raise InvalidArgumentError(f"client {c.id} has non-finite coordinates")
        if self.k >= max(len(self.clients), 1):
            warnings.warn(
                f"k={self.k} is not lower than the number of clients "
                f"({len(self.clients)}); opening that many centers is rarely useful",
                stacklevel=2,
            )

    @property
    def n_locations(self) -> int:
        return len(self.locations)

    @property
    def n_clients(self) -> int:
        return len(self.clients)


def _dist(ax: float, ay: float, bx: float, by: float) -> float:
    return math.hypot(ax - bx, ay - by)


# --- FLP configuration codec --------------------------------------------------


def flp_layout(data: LrpInstanceData) -> tuple[int, int, int]:
    """(subset-rank width, per-client digit width, total width)."""
    subset_bits = bits_for(comb(data.n_locations, data.k))
    digit_bits = bits_for(data.k)
    return subset_bits, digit_bits, subset_bits + digit_bits * data.n_clients


@dataclass(frozen=True)
class FlpConfig:
    """Open centers plus a client-to-center assignment (decoded form)."""

    open_ids: tuple[int, ...]
    assignment: tuple[int, ...]  # client id -> location id


def make_flp_config(
    data: LrpInstanceData, open_ids: tuple[int, ...], assignment: dict[int, int]
) -> FlpConfig:
    open_sorted = tuple(sorted(open_ids))
    if len(open_sorted) != data.k or len(set(open_sorted)) != data.k:
        raise InvalidArgumentError(f"exactly k={data.k} distinct open locations required")
    for lid in open_sorted:
        if not 0 <= lid < data.n_locations:
            raise InvalidArgumentError(f"unknown location id {lid}")
    if sorted(assignment) != list(range(data.n_clients)):
        raise InvalidArgumentError("every client must be assigned exactly once")
    for cid, lid in assignment.items():
        if lid not in open_sorted:
            raise InvalidArgumentError(
                f"client {cid} assigned to closed location {lid}"
            )
    return FlpConfig(open_sorted, tuple(assignment[c] for c in range(data.n_clients)))


def encode_flp_config(data: LrpInstanceData, cfg: FlpConfig) -> int:
    subset_bits, digit_bits, _w = flp_layout(data)
    subset_rank = rank_subset(cfg.open_ids, data.n_locations)
    digits = tuple(cfg.open_ids.index(lid) for lid in cfg.assignment)
    return pack_fields(
        (subset_rank,) + digits, (subset_bits,) + (digit_bits,) * data.n_clients
    )


def decode_flp_config(data: LrpInstanceData, value: int) -> FlpConfig | None:
    """Strict decode; None when the bit pattern is not a valid configuration."""
    subset_bits, digit_bits, _w = flp_layout(data)
    fields = unpack_fields(value, (subset_bits,) + (digit_bits,) * data.n_clients)
    subset_rank, digits = fields[0], fields[1:]
    if subset_rank >= comb(data.n_locations, data.k):
        return None
    if any(d >= data.k for d in digits):
        return None
    open_ids = unrank_subset(subset_rank, data.n_locations, data.k)
    return FlpConfig(open_ids, tuple(open_ids[d] for d in digits))


def canonical_flp_config(data: LrpInstanceData, value: int) -> FlpConfig:
    """Total decode: out-of-range fields wrap around so every bit pattern maps
    to some configuration (the instance mapping must be total)."""
    subset_bits, digit_bits, _w = flp_layout(data)
    fields = unpack_fields(value, (subset_bits,) + (digit_bits,) * data.n_clients)
    subset_rank = fields[0] % comb(data.n_locations, data.k)
    digits = tuple(d % data.k for d in fields[1:])
    open_ids = unrank_subset(subset_rank, data.n_locations, data.k)
    return FlpConfig(open_ids, tuple(open_ids[d] for d in digits))


def flp_partition(data: LrpInstanceData, cfg: FlpConfig) -> tuple[tuple[int, ...], ...]:
    """Client ids per open-center slot (slot d = d-th open center by id)."""
    return tuple(
        tuple(c for c in range(data.n_clients) if cfg.assignment[c] == lid)
        for lid in cfg.open_ids
    )


def nearest_assignment(data: LrpInstanceData, open_ids: tuple[int, ...]) -> FlpConfig:
    """Assign every client to its nearest open center; ties go to the lower id."""
    open_sorted = tuple(sorted(open_ids))
    assignment = {}
    for c in data.clients:
        best = min(
            (l for l in data.locations if l.id in open_sorted),
            key=lambda l: (_dist(c.x, c.y, l.x, l.y), l.id),
        )
        assignment[c.id] = best.id
    return make_flp_config(data, open_sorted, assignment)


# --- VRP configuration codec --------------------------------------------------


def vrp_layout(data: LrpInstanceData) -> tuple[int, int, int]:
    """(permutation-rank width, per-cut width, total width)."""
    rank_bits = bits_for(factorial(data.n_clients))
    cut_bits = bits_for(data.n_clients + 1)
    return rank_bits, cut_bits, rank_bits + cut_bits * (data.k - 1)


@dataclass(frozen=True)
class VrpRoutes:
    """Ordered client sequence per open-center slot (decoded form)."""

    routes: tuple[tuple[int, ...], ...]


def make_vrp_routes(data: LrpInstanceData, routes: tuple[tuple[int, ...], ...]) -> VrpRoutes:
    if len(routes) != data.k:
        raise InvalidArgumentError(f"exactly k={data.k} routes required")
    flat = [c for route in routes for c in route]
    for c in flat:
        if not 0 <= c < data.n_clients:
            raise InvalidArgumentError(f"route references unknown client {c}")
    if sorted(flat) != list(range(data.n_clients)):
        raise InvalidArgumentError("routes must cover every client exactly once")
    return VrpRoutes(tuple(tuple(route) for route in routes))


def encode_vrp_routes(data: LrpInstanceData, routes: VrpRoutes) -> int:
    rank_bits, cut_bits, _w = vrp_layout(data)
    perm = tuple(c for route in routes.routes for c in route)
    rank = rank_permutation(perm)
    cuts = []
    acc = 0
    for route in routes.routes[:-1]:
        acc += len(route)
        cuts.append(acc)
    return pack_fields(
        (rank,) + tuple(cuts), (rank_bits,) + (cut_bits,) * (data.k - 1)
    )


def decode_vrp_routes(data: LrpInstanceData, value: int) -> VrpRoutes | None:
    """Strict decode; None for invalid ranks or non-monotone cut positions."""
    rank_bits, cut_bits, _w = vrp_layout(data)
    fields = unpack_fields(value, (rank_bits,) + (cut_bits,) * (data.k - 1))
    rank, cuts = fields[0], list(fields[1:])
    n = data.n_clients
    if rank >= factorial(n):
        return None
    if any(c > n for c in cuts) or cuts != sorted(cuts):
        return None
    perm = unrank_permutation(rank, n)
    bounds = [0] + cuts + [n]
    return VrpRoutes(
        tuple(tuple(perm[bounds[d] : bounds[d + 1]]) for d in range(data.k))
    )


def canonical_vrp_routes(data: LrpInstanceData, value: int) -> VrpRoutes:
    """Total decode: rank and cuts wrap, cuts are sorted into monotone order."""
    rank_bits, cut_bits, _w = vrp_layout(data)
    fields = unpack_fields(value, (rank_bits,) + (cut_bits,) * (data.k - 1))
    n = data.n_clients
    rank = fields[0] % factorial(n)
    cuts = sorted(c % (n + 1) for c in fields[1:])
    perm = unrank_permutation(rank, n)
    bounds = [0] + cuts + [n]
    return VrpRoutes(
        tuple(tuple(perm[bounds[d] : bounds[d + 1]]) for d in range(data.k))
    )


# --- instance mappings ----------------------------------------------------------


def _clients_payload(data: LrpInstanceData) -> list[list[float]]:
    return [[float(c.id), c.x, c.y] for c in data.clients]


def _locations_payload(data: LrpInstanceData) -> list[list[float]]:
    return [
        [float(l.id), l.x, l.y, l.base_cost, l.per_client_cost] for l in data.locations
    ]


def lrp_chi_vrp(data: LrpInstanceData, flp: FlpConfig) -> Instance:
    """Routing instance induced by a location configuration: the open depots
    and the client region of each, canonically sorted."""
    partition = flp_partition(data, flp)
    payload = {
        "depots": [
            [float(lid), data.locations[lid].x, data.locations[lid].y]
            for lid in flp.open_ids
        ],
        "regions": [list(region) for region in partition],
        "clients": _clients_payload(data),
    }
    return Instance(VRP_ID, data.n_clients + data.k, payload)


def lrp_chi_flp(data: LrpInstanceData, vrp: VrpRoutes) -> Instance:
    """Location instance induced by a routing configuration: the region
    membership the routes imply.  Visit order inside a route is irrelevant,
    so two route sets with equal membership give byte-identical instances."""
    membership = [sorted(route) for route in vrp.routes]
    payload = {
        "membership": membership,
        "locations": _locations_payload(data),
        "clients": _clients_payload(data),
        "k": data.k,
    }
    return Instance(FLP_ID, data.n_locations, payload)


# --- component construction -----------------------------------------------------


def build_lrp_problem(
    data: LrpInstanceData, weights: tuple[float, float] | None = None
) -> CompositeProblem:
    """Wire the two components into a composite problem.

    The instance mappings are memoised per configuration value; they stay
    pure because decoding is deterministic.
    """
    _sb, _db, flp_width = flp_layout(data)
    _rb, _cb, vrp_width = vrp_layout(data)

    flp_instances: dict[int, Instance] = {}
    vrp_instances: dict[int, Instance] = {}

    def flp_instance_mapping(context: tuple[SolutionConfig, ...]) -> Instance:
        value = context[0].value
        inst = flp_instances.get(value)
        if inst is None:
            inst = lrp_chi_flp(data, canonical_vrp_routes(data, value))
            flp_instances[value] = inst
        return inst

    def flp_feasible(instance: Instance, s: SolutionConfig) -> bool:
        cfg = decode_flp_config(data, s.value)
        if cfg is None:
            return False
        partition = flp_partition(data, cfg)
        membership = instance.payload["membership"]
        return [list(region) for region in partition] == membership

    def flp_objective(
        instance: Instance, s: SolutionConfig, context: tuple[SolutionConfig, ...]
    ) -> float:
        cfg = decode_flp_config(data, s.value)
        if cfg is None:
            raise ModelViolationError("objective called on an invalid configuration")
        locs = {int(row[0]): row for row in instance.payload["locations"]}
        clients = {int(row[0]): row for row in instance.payload["clients"]}
        assign_cost = math.fsum(
            _dist(clients[c][1], clients[c][2], locs[lid][1], locs[lid][2])
            for c, lid in enumerate(cfg.assignment)
        )
        counts = {lid: 0 for lid in cfg.open_ids}
        for lid in cfg.assignment:
            counts[lid] += 1
        establish = math.fsum(
            locs[lid][3] + locs[lid][4] * counts[lid] for lid in cfg.open_ids
        )
        return assign_cost + establish

    def vrp_instance_mapping(context: tuple[SolutionConfig, ...]) -> Instance:
        value = context[0].value
        inst = vrp_instances.get(value)
        if inst is None:
            inst = lrp_chi_vrp(data, canonical_flp_config(data, value))
            vrp_instances[value] = inst
        return inst

    def vrp_feasible(instance: Instance, s: SolutionConfig) -> bool:
        routes = decode_vrp_routes(data, s.value)
        if routes is None:
            return False
        regions = instance.payload["regions"]
        return [sorted(route) for route in routes.routes] == regions

    def vrp_objective(
        instance: Instance, s: SolutionConfig, context: tuple[SolutionConfig, ...]
    ) -> float:
        routes = decode_vrp_routes(data, s.value)
        if routes is None:
            raise ModelViolationError("objective called on an invalid configuration")
        clients = {int(row[0]): row for row in instance.payload["clients"]}
        total = 0.0
        for depot, route in zip(instance.payload["depots"], routes.routes):
            if not route:
                continue
            points = [(clients[c][1], clients[c][2]) for c in route]
            legs = [_dist(depot[1], depot[2], points[0][0], points[0][1])]
            for a, b in zip(points, points[1:]):
                legs.append(_dist(a[0], a[1], b[0], b[1]))
            legs.append(_dist(points[-1][0], points[-1][1], depot[1], depot[2]))
            total += math.fsum(legs)
        return total

    flp = ComponentSpec(
        id=FLP_ID,
        name="FLP",
        encoding_width=flp_width,
        dimension=data.n_locations,
        chi=flp_instance_mapping,
        feasible=flp_feasible,
        objective=flp_objective,
    )
    vrp = ComponentSpec(
        id=VRP_ID,
        name="VRP",
        encoding_width=vrp_width,
        dimension=data.n_clients + data.k,
        chi=vrp_instance_mapping,
        feasible=vrp_feasible,
        objective=vrp_objective,
    )
    return make_problem((flp, vrp), weights)


def lrp_overall(problem: CompositeProblem, joint: JointSolution) -> float:
    """Total cost: assignment distances + establishment costs + route lengths."""
    return evaluate_overall(problem, joint)


def lrp_total_cost(data: LrpInstanceData, flp: FlpConfig, routes: VrpRoutes) -> float:
    """The same total computed directly from decoded configurations; used to
    cross-check the component split."""
    assign = math.fsum(
        _dist(
            data.clients[c].x,
            data.clients[c].y,
            data.locations[lid].x,
            data.locations[lid].y,
        )
        for c, lid in enumerate(flp.assignment)
    )
    counts = {lid: 0 for lid in flp.open_ids}
    for lid in flp.assignment:
        counts[lid] += 1
    establish = math.fsum(
        data.locations[lid].base_cost
        + data.locations[lid].per_client_cost * counts[lid]
        for lid in flp.open_ids
    )
    tours = 0.0
    for lid, route in zip(flp.open_ids, routes.routes):
        if not route:
            continue
        depot = data.locations[lid]
        pts = [data.clients[c] for c in route]
        legs = [_dist(depot.x, depot.y, pts[0].x, pts[0].y)]
        for a, b in zip(pts, pts[1:]):
            legs.append(_dist(a.x, a.y, b.x, b.y))
        legs.append(_dist(pts[-1].x, pts[-1].y, depot.x, depot.y))
        tours += math.fsum(legs)
    return assign + establish + tours
