"""Weekly job-shop scheduling feeding container packing across time windows.

A plant runs a weekly schedule on m machines; every item of a product passes
through that product's machine sequence without preemption, at integer-hour
granularity.  Items whose final operation completes inside the window are
finished and handed to the packing stage, which loads them into rented
containers; everything else carries over (with completed operations kept) to
the next week.  The episode cost is the number of windows needed until the
demand is exhausted plus the total container rent.

The week schedule space enumerated here is the set of priority-greedy
schedules: pick an item priority order and a prefix length, then dispatch
each chosen item's remaining operations in order, skipping anything that
cannot complete inside the window.  That keeps the space finite and
desk-scale while still realising both couplings of interest (how many items
finish this week, and what is left for next week).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    InfeasibleSolutionError,
    InvalidArgumentError,
    ModelViolationError,
)
from .model import ComponentSpec
from .timemodel import HORIZON_CAP, DataStream, TimePipeline

JSSP_ID = 1
BPP_ID = 2

#: Pending sets larger than this make the schedule space explode.
MAX_ENUMERABLE_ITEMS = 8


@dataclass(frozen=True)
class Product:
    id: int
    volume: float
    operations: tuple[tuple[int, int], ...]  # (machine id, duration hours)


@dataclass(frozen=True)
class SchedPackData:
    machines: int
    week_hours: int
    products: tuple[Product, ...]
    demand: tuple[int, ...]  # per product id
    container_capacity: float
    container_rent: float
    alpha_delay: float = 1.0
    alpha_rent: float = 1.0

    def __post_init__(self) -> None:
        if self.machines < 1:
            raise InvalidArgumentError("at least one machine required")
        if self.week_hours < 1:
            raise InvalidArgumentError("week_hours must be positive")
        if [p.id for p in self.products] != list(range(len(self.products))):
            raise InvalidArgumentError("product ids must be 0..p-1 in order")
        if len(self.demand) != len(self.products):
            raise InvalidArgumentError("one demand count per product required")
        for p in self.products:
            if p.volume <= 0:
                raise InvalidArgumentError(f"product {p.id} volume must be positive")
            if not p.operations:
                raise InvalidArgumentError(f"product {p.id} needs at least one operation")
            for mach, dur in p.operations:
                if not 0 <= mach < self.machines:
                    raise InvalidArgumentError(
                        f"product {p.id} references unknown machine {mach}"
                    )
                if dur <= 0:
                    raise InvalidArgumentError(f"product {p.id} has a non-positive duration")
        for c in self.demand:
            if c < 0:
                raise InvalidArgumentError("demand counts must be >= 0")
        if self.products and self.container_capacity < max(p.volume for p in self.products):
            raise InvalidArgumentError(
                "container capacity must cover the largest product volume"
            )
        if self.container_rent < 0:
            raise InvalidArgumentError("container rent must be >= 0")

    def product(self, pid: int) -> Product:
        return self.products[pid]

    def total_demand(self) -> int:
        return sum(self.demand)


@dataclass(frozen=True, order=True)
class PendingItem:
    """One item still to be (fully) manufactured; ``next_op`` operations are done."""

    product_id: int
    uid: int
    next_op: int = 0


def initial_pending(data: SchedPackData) -> tuple[PendingItem, ...]:
    items = []
    uid = 0
    for p in data.products:
        for _ in range(data.demand[p.id]):
            items.append(PendingItem(p.id, uid))
            uid += 1
    return tuple(items)


def _canonical(items: list[PendingItem]) -> tuple[PendingItem, ...]:
    return tuple(sorted(items, key=lambda it: (it.product_id, it.next_op, it.uid)))


@dataclass(frozen=True)
class WeekSchedule:
    """Per machine, the ordered list of (item uid, operation index) it will run."""

    dispatch: tuple[tuple[tuple[int, int], ...], ...]


@dataclass(frozen=True)
class WeekOutcome:
    finished: tuple[PendingItem, ...]
    carryover: tuple[PendingItem, ...]
    op_ends: tuple[tuple[tuple[int, int], int], ...]  # ((uid, op), end hour)


def simulate_week(
    data: SchedPackData, pending: tuple[PendingItem, ...], schedule: WeekSchedule
) -> WeekOutcome:
    """Run one window.  An item is finished exactly when its final operation
    completes within the window; partial progress persists into the carryover.
    """
    if len(schedule.dispatch) != data.machines:
        raise InvalidArgumentError(
            f"schedule must cover {data.machines} machines, got {len(schedule.dispatch)}"
        )
    items = {it.uid: it for it in pending}
    if len(items) != len(pending):
        raise InvalidArgumentError("pending items must have unique uids")
    per_item: dict[int, list[int]] = {}
    for mach, lst in enumerate(schedule.dispatch):
        for uid, op in lst:
            if uid not in items:
                raise InvalidArgumentError(f"schedule references unknown item uid {uid}")
            ops = data.product(items[uid].product_id).operations
            if not items[uid].next_op <= op < len(ops):
                raise InvalidArgumentError(
                    f"operation {op} of item {uid} is out of range or already done"
                )
            if ops[op][0] != mach:
                raise InvalidArgumentError(
                    f"operation {op} of item {uid} belongs on machine {ops[op][0]}, "
                    f"not {mach}"
                )
            per_item.setdefault(uid, []).append(op)
    for uid, ops_listed in per_item.items():
        start = items[uid].next_op
        if sorted(ops_listed) != list(range(start, start + len(ops_listed))):
            raise InvalidArgumentError(
                f"item {uid} operations must form a gap-free run from {start}"
            )

    clock = [0] * data.machines
    pointer = [0] * data.machines
    progress = {uid: it.next_op for uid, it in items.items()}
    ends: dict[tuple[int, int], int] = {}
    while True:
        moved = False
        for mach in range(data.machines):
            lst = schedule.dispatch[mach]
            while pointer[mach] < len(lst):
                uid, op = lst[pointer[mach]]
                if progress[uid] != op:
                    break  # predecessor still running elsewhere
                ready = ends.get((uid, op - 1), 0) if op > items[uid].next_op else 0
                start = max(clock[mach], ready)
                end = start + data.product(items[uid].product_id).operations[op][1]
                if end > data.week_hours:
                    raise InfeasibleSolutionError(
                        JSSP_ID,
                        "week_capacity",
                        f"operation {op} of item {uid} would end at hour {end} "
                        f"(window is {data.week_hours}h)",
                    )
                clock[mach] = end
                ends[(uid, op)] = end
                progress[uid] = op + 1
                pointer[mach] += 1
                moved = True
        if not moved:
            break
    for mach in range(data.machines):
        if pointer[mach] < len(schedule.dispatch[mach]):
            raise InfeasibleSolutionError(
                JSSP_ID,
                "precedence",
                "dispatch lists deadlock: an operation waits on one queued behind it",
            )

    finished = []
    carryover = []
    for uid in sorted(items):
        item = items[uid]
        done = progress[uid]
        if done == len(data.product(item.product_id).operations):
            finished.append(PendingItem(item.product_id, uid, done))
        else:
            carryover.append(PendingItem(item.product_id, uid, done))
    return WeekOutcome(
        finished=_canonical(finished),
        carryover=_canonical(carryover),
        op_ends=tuple(sorted(ends.items())),
    )


def bpp_dimension(finished: tuple[PendingItem, ...]) -> int:
    """Size of the packing instance a finished batch induces."""
    return len(finished)


def finished_volumes(data: SchedPackData, finished: tuple[PendingItem, ...]) -> tuple[float, ...]:
    return tuple(data.product(it.product_id).volume for it in sorted(finished, key=lambda i: i.uid))


# --- schedule construction -------------------------------------------------------


def build_priority_schedule(
    data: SchedPackData,
    pending: tuple[PendingItem, ...],
    priority: tuple[int, ...],
    limit: int,
) -> WeekSchedule:
    """Greedy dispatch: walk the first ``limit`` items in priority order and
    append each remaining operation that can still complete in the window."""
    items = {it.uid: it for it in pending}
    clock = [0] * data.machines
    dispatch: list[list[tuple[int, int]]] = [[] for _ in range(data.machines)]
    for uid in priority[:limit]:
        item = items[uid]
        ops = data.product(item.product_id).operations
        ready = 0
        for op in range(item.next_op, len(ops)):
            mach, dur = ops[op]
            start = max(clock[mach], ready)
            end = start + dur
            if end > data.week_hours:
                break
            dispatch[mach].append((uid, op))
            clock[mach] = end
            ready = end
    return WeekSchedule(tuple(tuple(lst) for lst in dispatch))


def enumerate_week_schedules(
    data: SchedPackData, pending: tuple[PendingItem, ...]
) -> tuple[WeekSchedule, ...]:
    """All distinct priority-greedy schedules for this pending set.

    Items in the same (product, progress) state are interchangeable, so
    priority orders are enumerated over state classes, not raw uids.
    """
    if len(pending) > MAX_ENUMERABLE_ITEMS:
        raise InvalidArgumentError(
            f"pending set of {len(pending)} items is too large to enumerate "
            f"(cap {MAX_ENUMERABLE_ITEMS})"
        )
    if not pending:
        return (WeekSchedule(tuple(() for _ in range(data.machines))),)
    canon = _canonical(list(pending))
    keys = [(it.product_id, it.next_op) for it in canon]
    seen = {}
    for perm in sorted(set(itertools.permutations(keys))):
        queues: dict[tuple[int, int], list[int]] = {}
        for it in canon:
            queues.setdefault((it.product_id, it.next_op), []).append(it.uid)
        taken = {k: 0 for k in queues}
        order = []
        for key in perm:
            order.append(queues[key][taken[key]])
            taken[key] += 1
        for limit in range(len(order) + 1):
            schedule = build_priority_schedule(data, canon, tuple(order), limit)
            seen.setdefault(schedule.dispatch, schedule)
    return tuple(seen[key] for key in sorted(seen))


# --- container packing -----------------------------------------------------------


@dataclass(frozen=True)
class PackingPlan:
    """Container index per finished item (items in ascending uid order)."""

    assignment: tuple[int, ...]

    @property
    def containers(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0


def enumerate_packings(
    volumes: tuple[float, ...], capacity: float
) -> tuple[PackingPlan, ...]:
    """Every capacity-valid partition of the items, in canonical
    first-appearance container numbering."""
    plans: list[PackingPlan] = []
    assignment: list[int] = []
    loads: list[float] = []

    def rec(idx: int) -> None:
        if idx == len(volumes):
            plans.append(PackingPlan(tuple(assignment)))
            return
        v = volumes[idx]
        for b in range(len(loads)):
            if loads[b] + v <= capacity:
                loads[b] += v
                assignment.append(b)
                rec(idx + 1)
                assignment.pop()
                loads[b] -= v
        if v <= capacity:
            loads.append(v)
            assignment.append(len(loads) - 1)
            rec(idx + 1)
            assignment.pop()
            loads.pop()

    rec(0)
    return tuple(plans)


def packing_loads(
    volumes: tuple[float, ...], plan: PackingPlan, capacity: float
) -> tuple[float, ...]:
    """Per-container load; raises when any container overflows."""
    if len(plan.assignment) != len(volumes):
        raise InvalidArgumentError(
            f"plan covers {len(plan.assignment)} items, batch has {len(volumes)}"
        )
    loads = [0.0] * plan.containers
    for v, b in zip(volumes, plan.assignment):
        loads[b] += v
    for b, load in enumerate(loads):
        if load > capacity:
            raise InfeasibleSolutionError(
                BPP_ID,
                "container_capacity",
                f"container {b} loaded to {load} over capacity {capacity}",
            )
    return tuple(loads)


@lru_cache(maxsize=4096)
def _min_containers(volumes: tuple[float, ...], capacity: float) -> int:
    if not volumes:
        return 0
    return min(p.containers for p in enumerate_packings(volumes, capacity))


def min_containers(data: SchedPackData, finished: tuple[PendingItem, ...]) -> int:
    return _min_containers(tuple(sorted(finished_volumes(data, finished))), data.container_capacity)


def best_packing(data: SchedPackData, finished: tuple[PendingItem, ...]) -> PackingPlan:
    """First enumerated plan reaching the minimum container count."""
    volumes = finished_volumes(data, finished)
    plans = enumerate_packings(volumes, data.container_capacity)
    target = min(p.containers for p in plans) if plans else 0
    for p in plans:
        if p.containers == target:
            return p
    return PackingPlan(())


# --- episodes ---------------------------------------------------------------------

Episode = tuple[tuple[WeekSchedule, PackingPlan], ...]


@dataclass(frozen=True)
class EpisodeResult:
    value: float
    complete: bool
    delay_windows: int
    containers: int


def sp_overall(data: SchedPackData, episode: Episode) -> EpisodeResult:
    """Cost of a chained episode: windows-until-exhaustion plus container rent.

    The windows must chain (week d+1 works on week d's carryover) and every
    plan must pack exactly that week's finished items within capacity.  An
    episode that ends with demand left over is costed but flagged incomplete.
    """
    pending = initial_pending(data)
    containers = 0
    last_finish = None
    for d, (schedule, plan) in enumerate(episode):
        try:
            outcome = simulate_week(data, pending, schedule)
        except InvalidArgumentError as err:
            raise ModelViolationError(
                f"episode does not chain at window {d}: {err}"
            ) from err
        volumes = finished_volumes(data, outcome.finished)
        if len(plan.assignment) != len(volumes):
            raise ModelViolationError(
                f"episode does not chain at window {d}: plan covers "
                f"{len(plan.assignment)} items, week finished {len(volumes)}"
            )
        packing_loads(volumes, plan, data.container_capacity)
        containers += plan.containers
        if outcome.finished:
            last_finish = d
        pending = outcome.carryover
    delay = (last_finish + 1) if last_finish is not None else 0
    value = data.alpha_delay * delay + data.alpha_rent * (
        data.container_rent * containers
    )
    return EpisodeResult(
        value=value,
        complete=not pending,
        delay_windows=delay,
        containers=containers,
    )


def _state_key(pending: tuple[PendingItem, ...]) -> tuple[tuple[int, int, int], ...]:
    counts: dict[tuple[int, int], int] = {}
    for it in pending:
        counts[(it.product_id, it.next_op)] = counts.get((it.product_id, it.next_op), 0) + 1
    return tuple(sorted((pid, op, c) for (pid, op), c in counts.items()))


def _advanced(pending: tuple[PendingItem, ...], outcome: WeekOutcome) -> int:
    before = sum(it.next_op for it in pending)
    after = sum(it.next_op for it in outcome.finished) + sum(
        it.next_op for it in outcome.carryover
    )
    return after - before


def episode_optimum(data: SchedPackData) -> tuple[EpisodeResult, Episode]:
    """Exhaustively optimal episode over the priority-greedy schedule space.

    States are multisets of (product, progress); every considered week
    advances at least one operation, so the recursion is finite.  Packing is
    chosen per week at its own minimum, which is optimal because rent is
    linear and containers do not carry across weeks.
    """
    memo: dict[tuple, float | None] = {}

    def solve(pending: tuple[PendingItem, ...]) -> float | None:
        if not pending:
            return 0.0
        key = _state_key(pending)
        if key in memo:
            return memo[key]
        memo[key] = None  # cycle guard; every candidate strictly advances
        best = None
        for schedule in enumerate_week_schedules(data, pending):
            outcome = simulate_week(data, pending, schedule)
            if _advanced(pending, outcome) == 0:
                continue
            sub = solve(outcome.carryover)
            if sub is None:
                continue
            cost = (
                data.alpha_delay
                + data.alpha_rent * data.container_rent * min_containers(data, outcome.finished)
                + sub
            )
            if best is None or cost < best:
                best = cost
        memo[key] = best
        return best

    pending = initial_pending(data)
    total = solve(pending)
    if not pending:
        return EpisodeResult(0.0, True, 0, 0), ()
    if total is None:
        raise InvalidArgumentError(
            "demand cannot be exhausted: no schedule advances any operation"
        )

    episode: list[tuple[WeekSchedule, PackingPlan]] = []
    while pending:
        for schedule in enumerate_week_schedules(data, pending):
            outcome = simulate_week(data, pending, schedule)
            if _advanced(pending, outcome) == 0:
                continue
            sub = solve(outcome.carryover)
            if sub is None:
                continue
            cost = (
                data.alpha_delay
                + data.alpha_rent * data.container_rent * min_containers(data, outcome.finished)
                + sub
            )
            if cost == solve(pending):
                episode.append((schedule, best_packing(data, outcome.finished)))
                pending = outcome.carryover
                break
        else:
            raise ModelViolationError("optimum reconstruction failed to progress")
    return sp_overall(data, tuple(episode)), tuple(episode)


def episode_greedy(data: SchedPackData) -> tuple[EpisodeResult, Episode]:
    """Finish-as-much-as-possible heuristic: per week, the schedule finishing
    the most items (ties to the first enumerated), packed at minimum rent."""
    pending = initial_pending(data)
    episode: list[tuple[WeekSchedule, PackingPlan]] = []
    for _week in range(HORIZON_CAP):
        if not pending:
            break
        best_sched = None
        best_key = None
        for schedule in enumerate_week_schedules(data, pending):
            outcome = simulate_week(data, pending, schedule)
            key = (len(outcome.finished), _advanced(pending, outcome))
            if best_key is None or key > best_key:
                best_key = key
                best_sched = (schedule, outcome)
        if best_sched is None or best_key == (0, 0):
            break
        schedule, outcome = best_sched
        episode.append((schedule, best_packing(data, outcome.finished)))
        pending = outcome.carryover
    return sp_overall(data, tuple(episode)), tuple(episode)


def random_episode(
    data: SchedPackData, seed: int, max_windows: int = 8
) -> tuple[Episode, tuple[WeekOutcome, ...]]:
    """A seeded random (schedule, packing) sequence, useful for invariant checks."""
    import random as _random

    rng = _random.Random(seed)
    pending = initial_pending(data)
    episode = []
    outcomes = []
    for _ in range(max_windows):
        if not pending:
            break
        schedules = enumerate_week_schedules(data, pending)
        schedule = rng.choice(schedules)
        outcome = simulate_week(data, pending, schedule)
        plans = enumerate_packings(
            finished_volumes(data, outcome.finished), data.container_capacity
        )
        plan = rng.choice(plans) if plans else PackingPlan(())
        episode.append((schedule, plan))
        outcomes.append(outcome)
        pending = outcome.carryover
    return tuple(episode), tuple(outcomes)


# --- pipeline glue ----------------------------------------------------------------


def build_sp_pipeline(data: SchedPackData) -> TimePipeline:
    """Declare the two stream couplings: this week's finished items feed the
    packer within the window, and the carryover feeds next week's scheduler."""

    def finished_stream(pending, schedule):
        return simulate_week(data, pending, schedule).finished

    def carry_stream(pending, schedule):
        return simulate_week(data, pending, schedule).carryover

    dim = max(1, data.total_demand())
    jssp = ComponentSpec(JSSP_ID, "JSSP", 0, dim)
    bpp = ComponentSpec(BPP_ID, "BPP", 0, dim)
    return TimePipeline(
        components=(jssp, bpp),
        streams=(
            DataStream(JSSP_ID, BPP_ID, finished_stream, lag=0),
            DataStream(JSSP_ID, JSSP_ID, carry_stream, lag=1),
        ),
        initial_payloads={JSSP_ID: initial_pending(data)},
        choices={
            JSSP_ID: lambda pending: enumerate_week_schedules(data, pending),
            BPP_ID: lambda finished: enumerate_packings(
                finished_volumes(data, finished), data.container_capacity
            ),
        },
    )


def default_chooser(data: SchedPackData):
    """Deterministic pipeline driver: greedy max-finish schedules, min-rent packing."""

    def choose(component_id: int, payload):
        if component_id == JSSP_ID:
            best = None
            best_key = None
            for schedule in enumerate_week_schedules(data, payload):
                outcome = simulate_week(data, payload, schedule)
                key = (len(outcome.finished), _advanced(payload, outcome))
                if best_key is None or key > best_key:
                    best_key = key
                    best = schedule
            return best
        return best_packing(data, payload)

    return choose
