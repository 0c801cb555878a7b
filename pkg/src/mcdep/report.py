"""Human-readable reports with a machine-readable key=value block appended.

The machine block is fenced between ``--8<-- report`` markers so scripts can
diff verdicts without parsing prose.  Every dependent verdict embeds its
replayable witness (configuration values, and for feasibility labels the two
contexts whose instances tell the feasible sets apart).
"""

from __future__ import annotations

from .analysis import ProblemAnalysis
from .model import CompositeProblem
from .solvers import SolveResult
from .timemodel import TimeDependencyVerdict, TimePipeline

FENCE_OPEN = "--8<-- report"
FENCE_CLOSE = "--8<--"


def _block(pairs: list[tuple[str, str]]) -> str:
    lines = [FENCE_OPEN]
    lines.extend(f"{k}={v}" for k, v in pairs)
    lines.append(FENCE_CLOSE)
    return "\n".join(lines)


def parse_machine_block(text: str) -> dict[str, str]:
    """Extract the key=value block from a report."""
    lines = text.splitlines()
    try:
        start = lines.index(FENCE_OPEN)
    except ValueError:
        return {}
    out = {}
    for line in lines[start + 1 :]:
        if line == FENCE_CLOSE:
            break
        key, _, value = line.partition("=")
        out[key] = value
    return out


def _csv(values) -> str:
    return ",".join(str(v) for v in values)


def analysis_report(
    label: str,
    problem: CompositeProblem,
    analysis: ProblemAnalysis,
    connected: bool | None,
    multicomponent: bool | None,
) -> str:
    names = {c.id: c.name for c in problem.components}
    human = [f"instance: {label} (composite, {problem.n} components)"]
    human.append(
        "components: "
        + "  ".join(
            f"{c.id}={c.name} (width {c.encoding_width})" for c in problem.components
        )
    )
    mode = "sampling" if analysis.sampling else "exhaustive"
    human.append(f"budget: {analysis.budget}   seed: {analysis.seed}   mode: {mode}")
    human.append("")

    kv: list[tuple[str, str]] = [
        ("schema", "mcdep.analyze.v1"),
        ("kind", "composite"),
        ("components", _csv(f"{c.id}:{c.name}:{c.encoding_width}" for c in problem.components)),
        ("budget", str(analysis.budget)),
        ("seed", str(analysis.seed)),
        ("mode", mode),
    ]
    for pair in analysis.pairs:
        src, dst = names[pair.source], names[pair.target]
        tag = f"pair.{src}->{dst}"
        verdict = pair.verdict
        kv.append((f"{tag}.verdict", verdict.kind))
        if verdict.kind == "dependent":
            s1, s2 = verdict.witness
            kv.append((f"{tag}.witness", f"{s1.value},{s2.value}"))
            kv.append(
                (
                    f"{tag}.contexts",
                    "exhaustive" if verdict.contexts_exhaustive else f"sampled:{verdict.samples}",
                )
            )
            line = f"pair {src} -> {dst}: dependent"
            cls = pair.classification
            if cls is not None:
                kv.append((f"{tag}.label", cls.label))
                kv.append(
                    (f"{tag}.instances_compared", str(cls.instances_compared))
                )
                kv.append(
                    (
                        f"{tag}.reachable",
                        "exhaustive" if cls.reachable_exhaustive else "sampled",
                    )
                )
                line += f" ({cls.label})"
                if cls.label == "feasibility":
                    kv.append(
                        (f"{tag}.feasible_sets", _csv(cls.feasible_set_sizes))
                    )
                    kv.append(
                        (f"{tag}.distinguishing", str(cls.distinguishing_value))
                    )
                    ctx_a, ctx_b = cls.witness_contexts
                    kv.append((f"{tag}.witness_context_a", _csv(ctx_a)))
                    kv.append((f"{tag}.witness_context_b", _csv(ctx_b)))
                    kv.append(
                        (f"{tag}.omitted_fitness", "true" if cls.omitted_fitness else "false")
                    )
            human.append(line)
            human.append(f"  witness configs of {src}: s1={s1.value} s2={s2.value}")
            if cls is not None and cls.label == "feasibility":
                sizes = cls.feasible_set_sizes
                human.append(
                    f"  feasible sets differ across reachable instances "
                    f"(|F| {sizes[0]} vs {sizes[1]}; distinguishing config "
                    f"{cls.distinguishing_value})"
                )
                if cls.omitted_fitness:
                    human.append(
                        "  a fitness effect is also present; the weaker edge is omitted"
                    )
        elif verdict.kind == "independent_exhaustive":
            human.append(f"pair {src} -> {dst}: independent (exhaustive)")
        elif verdict.kind == "independent_sampled":
            kv.append((f"{tag}.samples", str(verdict.samples)))
            human.append(
                f"pair {src} -> {dst}: not detected "
                f"({verdict.samples} samples, seed {pair.sub_seed})"
            )
        else:
            human.append(f"pair {src} -> {dst}: budget exceeded (pair unresolved)")
        if pair.error:
            kv.append((f"{tag}.error", pair.error))
            human.append(f"  error: {pair.error}")

    kv.append(("partial", "true" if analysis.graph.partial else "false"))
    human.append("")
    if connected is None:
        human.append("graph: connectivity indeterminate (partial analysis)")
        kv.append(("connected", "indeterminate"))
        kv.append(("multicomponent", "indeterminate"))
    else:
        kv.append(("connected", "true" if connected else "false"))
        kv.append(("multicomponent", "true" if multicomponent else "false"))
        verdict_txt = (
            "a multi-component problem with internal dependencies"
            if multicomponent
            else "not multi-component (components are separable)"
        )
        human.append(f"graph: connected={'true' if connected else 'false'} -> {verdict_txt}")
    kv.append(
        (
            "note.instances",
            "instances compared by canonical bytes; feasible sets compared over "
            "instances reachable through the declared mappings",
        )
    )
    kv.append(
        ("note.connectivity", "connectivity evaluated on the undirected skeleton")
    )
    human.append(
        "interpretation: canonical-byte instance equality; reachable instances only; "
        "undirected connectivity"
    )
    human.append("")
    return "\n".join(human) + "\n" + _block(kv) + "\n"


def time_analysis_report(
    label: str,
    pipeline: TimePipeline,
    verdicts: list[TimeDependencyVerdict],
    connected: bool,
    multicomponent: bool,
) -> str:
    names = {c.id: c.name for c in pipeline.components}
    human = [f"instance: {label} (pipeline, {len(pipeline.components)} components)"]
    kv: list[tuple[str, str]] = [
        ("schema", "mcdep.analyze.v1"),
        ("kind", "pipeline"),
        ("components", _csv(f"{c.id}:{c.name}" for c in pipeline.components)),
    ]
    for v in verdicts:
        src, dst = names[v.source], names[v.target]
        tag = f"stream.{src}->{dst}"
        kv.append((f"{tag}.verdict", v.kind))
        if v.kind == "time_dependent":
            _a, _b, dim_a, dim_b = v.witness
            kv.append((f"{tag}.dimensions", f"{dim_a},{dim_b}"))
            kv.append((f"{tag}.choices_examined", str(v.choices_examined)))
            human.append(
                f"stream {src} -> {dst}: time dependent "
                f"(dimension {dim_a} vs {dim_b} from two upstream decisions)"
            )
        else:
            kv.append((f"{tag}.choices_examined", str(v.choices_examined)))
            human.append(
                f"stream {src} -> {dst}: not detected "
                f"({v.choices_examined} decisions examined)"
            )
    kv.append(("connected", "true" if connected else "false"))
    kv.append(("multicomponent", "true" if multicomponent else "false"))
    human.append(
        f"compressed graph: connected={'true' if connected else 'false'}"
        + (" -> a multi-component problem via time coupling" if multicomponent else "")
    )
    human.append("")
    return "\n".join(human) + "\n" + _block(kv) + "\n"


def solve_report(label: str, solver: str, result: SolveResult, names: list[str]) -> str:
    human = [f"instance: {label}", f"solver: {solver}", f"status: {result.status}"]
    kv: list[tuple[str, str]] = [
        ("schema", "mcdep.solve.v1"),
        ("solver", solver),
        ("status", result.status),
        ("evaluations", str(result.evaluations)),
    ]
    if result.value is not None:
        human.append(f"value: {result.value!r}")
        kv.append(("value", repr(result.value)))
    if result.joint is not None:
        for name, cfg in zip(names, result.joint.configs):
            human.append(f"config {name}: {cfg.value}")
            kv.append((f"joint.{name}", str(cfg.value)))
    if result.seed is not None:
        kv.append(("seed", str(result.seed)))
    if result.history:
        kv.append(("history", _csv(repr(v) for v in result.history)))
    if result.diagnostic:
        human.append(f"diagnostic: {result.diagnostic}")
        kv.append(("diagnostic", result.diagnostic))
    human.append("")
    return "\n".join(human) + "\n" + _block(kv) + "\n"
