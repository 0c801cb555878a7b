"""Line-oriented instance files: parsing, canonical serialization, generation.

Grammar (UTF-8, ``#`` starts a comment, blank lines ignored):

    kind lrp
      k <int>
      location <id> <x> <y> <base_cost> <per_client_cost>
      client <id> <x> <y>
      alpha <a_flp> <a_vrp>            (optional, defaults 1 1)

    kind schedpack
      machines <int>
      week_hours <int>
      product <id> <volume> <machine,hours> ...
      demand <product_id> <count>
      container <capacity> <rent>
      alpha <a_delay> <a_rent>         (optional, defaults 1 1)

    kind synthetic
      component <id> <name> <width>
      objective <id> <value> <cost>    (unlisted values cost 0)
      couple <target> <source>         (value coupling)
      parity <target> <source>         (feasibility coupling)
      alpha <a_1> ... <a_n>            (optional, defaults all 1)

Unknown keys are rejected and every parse error carries its line number.
``serialize_*`` emit the canonical form; generated files round-trip
byte-identically through load-then-serialize.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidArgumentError, ParseError
from .lrp import Client, Location, LrpInstanceData, build_lrp_problem
from .model import CompositeProblem
from .schedpack import Product, SchedPackData, build_sp_pipeline
from .synthetic import SyntheticSpec, build_synthetic_problem
from .timemodel import TimePipeline

KINDS = ("lrp", "schedpack", "synthetic")


@dataclass(frozen=True)
class LoadedInstance:
    kind: str
    data: object
    problem: CompositeProblem | None = None
    pipeline: TimePipeline | None = None
    weights: tuple[float, ...] | None = None


def _fmt(x: float) -> str:
    xf = float(x)
    return str(int(xf)) if xf.is_integer() else repr(xf)


def _number(token: str, line: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(line, f"{what} must be a decimal number, got {token!r}") from None


def _integer(token: str, line: int, what: str) -> int:
    value = _number(token, line, what)
    if value != int(value):
        raise ParseError(line, f"{what} must be an integer, got {token!r}")
    return int(value)


def _significant_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((lineno, body.split()))
    return out


def parse_instance_text(text: str) -> LoadedInstance:
    lines = _significant_lines(text)
    if not lines:
        raise ParseError(1, "empty instance file")
    lineno, tokens = lines[0]
    if tokens[0] != "kind" or len(tokens) != 2:
        raise ParseError(lineno, "first record must be 'kind <lrp|schedpack|synthetic>'")
    kind = tokens[1]
    if kind not in KINDS:
        raise ParseError(lineno, f"unknown kind {kind!r}")
    body = lines[1:]
    if kind == "lrp":
        return _parse_lrp(body)
    if kind == "schedpack":
        return _parse_schedpack(body)
    return _parse_synthetic(body)


def load_instance(path: str | Path) -> LoadedInstance:
    """Parse and fully validate an instance file into a ready-to-use problem."""
    return parse_instance_text(Path(path).read_text(encoding="utf-8"))


# --- lrp ---------------------------------------------------------------------


def _parse_lrp(body: list[tuple[int, list[str]]]) -> LoadedInstance:
    k = None
    locations: dict[int, Location] = {}
    clients: dict[int, Client] = {}
    alpha = None
    for lineno, tokens in body:
        key, args = tokens[0], tokens[1:]
        if key == "k":
            if k is not None:
                raise ParseError(lineno, "duplicate 'k' record")
            if len(args) != 1:
                raise ParseError(lineno, "'k' takes one integer")
            k = _integer(args[0], lineno, "k")
        elif key == "location":
            if len(args) != 5:
                raise ParseError(lineno, "'location' takes id x y base_cost per_client_cost")
            lid = _integer(args[0], lineno, "location id")
            if lid in locations:
                raise ParseError(lineno, f"duplicate location id {lid}")
            locations[lid] = Location(
                lid,
                _number(args[1], lineno, "x"),
                _number(args[2], lineno, "y"),
                _number(args[3], lineno, "base_cost"),
                _number(args[4], lineno, "per_client_cost"),
            )
        elif key == "client":
            if len(args) != 3:
                raise ParseError(lineno, "'client' takes id x y")
            cid = _integer(args[0], lineno, "client id")
            if cid in clients:
                raise ParseError(lineno, f"duplicate client id {cid}")
            clients[cid] = Client(
                cid, _number(args[1], lineno, "x"), _number(args[2], lineno, "y")
            )
        elif key == "alpha":
            if len(args) != 2:
                raise ParseError(lineno, "'alpha' takes two weights")
            alpha = tuple(_number(a, lineno, "alpha") for a in args)
        else:
            raise ParseError(lineno, f"unknown key {key!r} for kind lrp")
    if k is None:
        raise ParseError(body[-1][0] if body else 1, "missing 'k' record")
    if not locations:
        raise ParseError(body[-1][0] if body else 1, "at least one location required")
    data = LrpInstanceData(
        locations=tuple(locations[i] for i in sorted(locations)),
        clients=tuple(clients[i] for i in sorted(clients)),
        k=k,
    )
    weights = alpha if alpha is not None else (1.0, 1.0)
    return LoadedInstance(
        kind="lrp",
        data=data,
        problem=build_lrp_problem(data, weights),
        weights=weights,
    )


def serialize_lrp(data: LrpInstanceData, weights: tuple[float, float] = (1.0, 1.0)) -> str:
    lines = ["kind lrp", f"k {data.k}"]
    for l in data.locations:
        lines.append(
            f"location {l.id} {_fmt(l.x)} {_fmt(l.y)} {_fmt(l.base_cost)} "
            f"{_fmt(l.per_client_cost)}"
        )
    for c in data.clients:
        lines.append(f"client {c.id} {_fmt(c.x)} {_fmt(c.y)}")
    lines.append(f"alpha {_fmt(weights[0])} {_fmt(weights[1])}")
    return "\n".join(lines) + "\n"


# --- schedpack ---------------------------------------------------------------


def _parse_schedpack(body: list[tuple[int, list[str]]]) -> LoadedInstance:
    machines = None
    week_hours = None
    products: dict[int, Product] = {}
    demand: dict[int, int] = {}
    container = None
    alpha = None
    for lineno, tokens in body:
        key, args = tokens[0], tokens[1:]
        if key == "machines":
            if machines is not None or len(args) != 1:
                raise ParseError(lineno, "'machines' takes one integer, once")
            machines = _integer(args[0], lineno, "machines")
        elif key == "week_hours":
            if week_hours is not None or len(args) != 1:
                raise ParseError(lineno, "'week_hours' takes one integer, once")
            week_hours = _integer(args[0], lineno, "week_hours")
        elif key == "product":
            if len(args) < 3:
                raise ParseError(
                    lineno, "'product' takes id volume and at least one machine,hours pair"
                )
            pid = _integer(args[0], lineno, "product id")
            if pid in products:
                raise ParseError(lineno, f"duplicate product id {pid}")
            volume = _number(args[1], lineno, "volume")
            ops = []
            for pair in args[2:]:
                if "," not in pair:
                    raise ParseError(lineno, f"operation {pair!r} must be machine,hours")
                m_str, h_str = pair.split(",", 1)
                ops.append(
                    (
                        _integer(m_str, lineno, "machine id"),
                        _integer(h_str, lineno, "operation hours"),
                    )
                )
            products[pid] = Product(pid, volume, tuple(ops))
        elif key == "demand":
            if len(args) != 2:
                raise ParseError(lineno, "'demand' takes product_id count")
            pid = _integer(args[0], lineno, "product id")
            if pid in demand:
                raise ParseError(lineno, f"duplicate demand for product {pid}")
            demand[pid] = _integer(args[1], lineno, "demand count")
        elif key == "container":
            if container is not None or len(args) != 2:
                raise ParseError(lineno, "'container' takes capacity rent, once")
            container = (
                _number(args[0], lineno, "capacity"),
                _number(args[1], lineno, "rent"),
            )
        elif key == "alpha":
            if len(args) != 2:
                raise ParseError(lineno, "'alpha' takes two weights")
            alpha = tuple(_number(a, lineno, "alpha") for a in args)
        else:
            raise ParseError(lineno, f"unknown key {key!r} for kind schedpack")
    last = body[-1][0] if body else 1
    if machines is None:
        raise ParseError(last, "missing 'machines' record")
    if week_hours is None:
        raise ParseError(last, "missing 'week_hours' record")
    if not products:
        raise ParseError(last, "at least one product required")
    if container is None:
        raise ParseError(last, "missing 'container' record")
    for pid in demand:
        if pid not in products:
            raise ParseError(last, f"demand references unknown product {pid}")
    ordered = tuple(products[i] for i in sorted(products))
    data = SchedPackData(
        machines=machines,
        week_hours=week_hours,
        products=ordered,
        demand=tuple(demand.get(p.id, 0) for p in ordered),
        container_capacity=container[0],
        container_rent=container[1],
        alpha_delay=alpha[0] if alpha else 1.0,
        alpha_rent=alpha[1] if alpha else 1.0,
    )
    return LoadedInstance(
        kind="schedpack",
        data=data,
        pipeline=build_sp_pipeline(data),
        weights=(data.alpha_delay, data.alpha_rent),
    )


def serialize_schedpack(data: SchedPackData) -> str:
    lines = [
        "kind schedpack",
        f"machines {data.machines}",
        f"week_hours {data.week_hours}",
    ]
    for p in data.products:
        ops = " ".join(f"{m},{h}" for m, h in p.operations)
        lines.append(f"product {p.id} {_fmt(p.volume)} {ops}")
    for p in data.products:
        lines.append(f"demand {p.id} {data.demand[p.id]}")
    lines.append(
        f"container {_fmt(data.container_capacity)} {_fmt(data.container_rent)}"
    )
    lines.append(f"alpha {_fmt(data.alpha_delay)} {_fmt(data.alpha_rent)}")
    return "\n".join(lines) + "\n"


# --- synthetic ---------------------------------------------------------------


def _parse_synthetic(body: list[tuple[int, list[str]]]) -> LoadedInstance:
    components: list[tuple[int, str, int]] = []
    costs: list[tuple[int, int, float]] = []
    value_couples: list[tuple[int, int]] = []
    parity_couples: list[tuple[int, int]] = []
    alpha = None
    for lineno, tokens in body:
        key, args = tokens[0], tokens[1:]
        if key == "component":
            if len(args) != 3:
                raise ParseError(lineno, "'component' takes id name width")
            components.append(
                (
                    _integer(args[0], lineno, "component id"),
                    args[1],
                    _integer(args[2], lineno, "width"),
                )
            )
        elif key == "objective":
            if len(args) != 3:
                raise ParseError(lineno, "'objective' takes component_id value cost")
            costs.append(
                (
                    _integer(args[0], lineno, "component id"),
                    _integer(args[1], lineno, "config value"),
                    _number(args[2], lineno, "cost"),
                )
            )
        elif key == "couple":
            if len(args) != 2:
                raise ParseError(lineno, "'couple' takes target source")
            value_couples.append(
                (
                    _integer(args[0], lineno, "target id"),
                    _integer(args[1], lineno, "source id"),
                )
            )
        elif key == "parity":
            if len(args) != 2:
                raise ParseError(lineno, "'parity' takes target source")
            parity_couples.append(
                (
                    _integer(args[0], lineno, "target id"),
                    _integer(args[1], lineno, "source id"),
                )
            )
        elif key == "alpha":
            alpha = tuple(_number(a, lineno, "alpha") for a in args)
        else:
            raise ParseError(lineno, f"unknown key {key!r} for kind synthetic")
    if not components:
        raise ParseError(body[-1][0] if body else 1, "at least one component required")
    spec = SyntheticSpec(
        components=tuple(components),
        costs=tuple(costs),
        value_couples=tuple(value_couples),
        parity_couples=tuple(parity_couples),
        weights=alpha,
    )
    return LoadedInstance(
        kind="synthetic",
        data=spec,
        problem=build_synthetic_problem(spec),
        weights=spec.weights or (1.0,) * len(spec.components),
    )


def serialize_synthetic(spec: SyntheticSpec) -> str:
    lines = ["kind synthetic"]
    for cid, name, width in spec.components:
        lines.append(f"component {cid} {name} {width}")
    for cid, value, cost in spec.costs:
        lines.append(f"objective {cid} {value} {_fmt(cost)}")
    for target, source in spec.value_couples:
        lines.append(f"couple {target} {source}")
    for target, source in spec.parity_couples:
        lines.append(f"parity {target} {source}")
    weights = spec.weights or (1.0,) * len(spec.components)
    lines.append("alpha " + " ".join(_fmt(w) for w in weights))
    return "\n".join(lines) + "\n"


def serialize_instance(loaded: LoadedInstance) -> str:
    """Canonical text form of a loaded instance (the round-trip target)."""
    if loaded.kind == "lrp":
        return serialize_lrp(loaded.data, loaded.weights or (1.0, 1.0))
    if loaded.kind == "schedpack":
        return serialize_schedpack(loaded.data)
    if loaded.kind == "synthetic":
        return serialize_synthetic(loaded.data)
    raise InvalidArgumentError(f"unknown kind {loaded.kind!r}")


# --- generation --------------------------------------------------------------


def gen_lrp(
    seed: int, locations: int = 3, clients: int = 4, k: int = 2
) -> str:
    """A seeded random location-routing instance in canonical text form.

    Sizes default to a joint space small enough for exhaustive comparisons;
    coordinates and costs are integers so the text round-trips exactly.
    """
    if locations < 1 or clients < 0 or not 1 <= k <= locations:
        raise InvalidArgumentError("need locations >= k >= 1 and clients >= 0")
    rng = random.Random(seed)
    locs = tuple(
        Location(
            i,
            float(rng.randint(0, 20)),
            float(rng.randint(0, 20)),
            float(rng.randint(5, 30)),
            float(rng.randint(0, 5)),
        )
        for i in range(locations)
    )
    clis = tuple(
        Client(i, float(rng.randint(0, 20)), float(rng.randint(0, 20)))
        for i in range(clients)
    )
    data = LrpInstanceData(locations=locs, clients=clis, k=k)
    return serialize_lrp(data, (1.0, 1.0))
