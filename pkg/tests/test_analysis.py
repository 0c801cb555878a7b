import pytest

from mcdep.analysis import (
    DependencyEdge,
    DependencyGraph,
    analyze_problem,
    build_dependency_graph,
    classify_dependency,
    detect_instance_dependency,
    is_multicomponent,
    replay_instance_witness,
)
from mcdep.errors import (
    ClassificationBudgetError,
    InvalidArgumentError,
    PartialGraphError,
)
from mcdep.synthetic import SyntheticSpec, build_synthetic_problem, separable_control


def _constant_pair():
    return separable_control((2, 2), ((0, 1, 2, 3), (0, 1, 2, 3)))


def _zero_width_source():
    spec = SyntheticSpec(
        components=((1, "NARROW", 0), (2, "WIDE", 2)),
        value_couples=((2, 1),),
    )
    return build_synthetic_problem(spec)


def test_detect_on_lrp_both_directions(lrp_t1):
    problem = lrp_t1.problem
    for target, source in ((2, 1), (1, 2)):
        verdict = detect_instance_dependency(problem, target, source)
        assert verdict.kind == "dependent"
        assert verdict.contexts_exhaustive is True
        s1, s2 = verdict.witness
        assert replay_instance_witness(problem, target, source, s1.value, s2.value)


def test_detect_constant_mapping_is_independent():
    problem = _constant_pair()
    verdict = detect_instance_dependency(problem, 2, 1)
    assert verdict.kind == "independent_exhaustive"
    assert verdict.witness is None


def test_detect_zero_width_source_is_independent():
    problem = _zero_width_source()
    # the source admits a single configuration, so no witness pair can exist
    assert detect_instance_dependency(problem, 2, 1).kind == "independent_exhaustive"
    # while the wide component genuinely drives nothing here either
    assert detect_instance_dependency(problem, 1, 2).kind == "independent_exhaustive"


def test_detect_rejects_self_pair(lrp_t1):
    with pytest.raises(InvalidArgumentError):
        detect_instance_dependency(lrp_t1.problem, 1, 1)


def test_detect_budget_exceeded_without_sampling(lrp_t1):
    verdict = detect_instance_dependency(lrp_t1.problem, 1, 2, budget=4)
    assert verdict.kind == "budget_exceeded"


def test_detect_sampled_witness_and_reproducibility(lrp_t1):
    problem = lrp_t1.problem
    a = detect_instance_dependency(
        problem, 1, 2, budget=4, allow_sampling=True, samples=64, seed=5
    )
    b = detect_instance_dependency(
        problem, 1, 2, budget=4, allow_sampling=True, samples=64, seed=5
    )
    assert a == b
    assert a.kind == "dependent"
    # evidence is monotone: the sampled witness survives the exhaustive budget
    s1, s2 = a.witness
    assert replay_instance_witness(problem, 1, 2, s1.value, s2.value)
    full = detect_instance_dependency(problem, 1, 2)
    assert full.kind == "dependent"


def test_sampling_never_claims_independence():
    problem = _constant_pair()
    verdict = detect_instance_dependency(
        problem, 2, 1, budget=1, allow_sampling=True, samples=16, seed=0
    )
    assert verdict.kind == "independent_sampled"
    assert verdict.samples == 16


def test_classify_lrp_feasibility_both_ways(lrp_t1):
    problem = lrp_t1.problem
    routing = classify_dependency(problem, 2, 1)
    assert routing.label == "feasibility"
    assert routing.reachable_exhaustive
    assert routing.omitted_fitness  # location changes also move route costs
    x1, x2 = routing.witness_instances
    assert x1.canonical != x2.canonical
    # the distinguishing configuration is feasible for exactly one of the two
    cfg = problem.component(2)
    from mcdep.model import SolutionConfig

    s = SolutionConfig(cfg.encoding_width, routing.distinguishing_value)
    assert cfg.feasible(x1, s) != cfg.feasible(x2, s)

    location = classify_dependency(problem, 1, 2)
    assert location.label == "feasibility"
    # the location objective ignores the membership constraint, so no
    # fitness effect exists to omit in that direction
    assert not location.omitted_fitness


def test_classify_fitness_when_feasible_sets_constant():
    spec = SyntheticSpec(
        components=((1, "SRC", 2), (2, "DST", 2)),
        costs=((2, 0, 1.0), (2, 1, 2.0)),
        value_couples=((2, 1),),
    )
    problem = build_synthetic_problem(spec)
    assert detect_instance_dependency(problem, 2, 1).kind == "dependent"
    cls = classify_dependency(problem, 2, 1)
    assert cls.label == "fitness"
    assert cls.witness_instances is None


def test_classify_parity_is_feasibility(parity_pair):
    cls = classify_dependency(parity_pair.problem, 2, 1)
    assert cls.label == "feasibility"
    assert cls.feasible_set_sizes == (2, 2)


def test_classify_budget_error_carries_attempted_count(lrp_t1):
    with pytest.raises(ClassificationBudgetError) as err:
        classify_dependency(lrp_t1.problem, 2, 1, budget=16)
    assert "feasible-set comparison infeasible" in str(err.value)
    assert err.value.attempted == 1024


def test_graph_lrp_shape_and_omission_rule(lrp_t1):
    analysis = analyze_problem(lrp_t1.problem, budget=1 << 16, seed=0)
    graph = analysis.graph
    assert not graph.partial
    assert graph.nodes == ((1, "FLP"), (2, "VRP"))
    assert sorted((e.source, e.target, e.label) for e in graph.edges) == [
        (1, 2, "feasibility"),
        (2, 1, "feasibility"),
    ]
    # omission rule: at most one edge per ordered pair, never a fitness edge
    # alongside a feasibility one
    seen = {}
    for e in graph.edges:
        assert (e.source, e.target) not in seen
        seen[(e.source, e.target)] = e.label
    flagged = {
        (p.source, p.target): p.classification.omitted_fitness
        for p in analysis.pairs
        if p.classification is not None
    }
    assert flagged[(1, 2)] is True
    assert flagged[(2, 1)] is False
    assert is_multicomponent(graph)


def test_graph_constant_mappings_empty_edges():
    graph = build_dependency_graph(_constant_pair())
    assert graph.edges == ()
    assert not is_multicomponent(graph)


def test_graph_three_component_path(path3):
    graph = build_dependency_graph(path3.problem)
    assert sorted((e.source, e.target, e.label) for e in graph.edges) == [
        (1, 2, "fitness"),
        (2, 3, "fitness"),
    ]
    assert is_multicomponent(graph)


def test_graph_partial_on_budget(lrp_t1):
    graph = build_dependency_graph(lrp_t1.problem, budget=4)
    assert graph.partial
    assert graph.unknown_pairs
    with pytest.raises(PartialGraphError):
        is_multicomponent(graph)


def test_exhaustive_mode_determinism(lrp_t1):
    a = analyze_problem(lrp_t1.problem, budget=1 << 16, seed=0)
    b = analyze_problem(lrp_t1.problem, budget=1 << 16, seed=0)
    assert a == b


def test_witness_soundness_for_all_emitted_witnesses(lrp_t1, path3, parity_pair):
    for loaded in (lrp_t1, path3, parity_pair):
        analysis = analyze_problem(loaded.problem)
        for pair in analysis.pairs:
            if pair.verdict.kind != "dependent":
                continue
            s1, s2 = pair.verdict.witness
            assert replay_instance_witness(
                loaded.problem, pair.target, pair.source, s1.value, s2.value
            )
            cls = pair.classification
            if cls is not None and cls.label == "feasibility":
                # replay the feasible-set witness from its recorded contexts
                from mcdep.model import SolutionConfig, map_instance

                ctx_a, ctx_b = cls.witness_contexts
                widths = [
                    c.encoding_width
                    for c in loaded.problem.components
                    if c.id != pair.target
                ]
                rebuilt_a = map_instance(
                    loaded.problem,
                    pair.target,
                    tuple(SolutionConfig(w, v) for w, v in zip(widths, ctx_a)),
                )
                rebuilt_b = map_instance(
                    loaded.problem,
                    pair.target,
                    tuple(SolutionConfig(w, v) for w, v in zip(widths, ctx_b)),
                )
                assert rebuilt_a == cls.witness_instances[0]
                assert rebuilt_b == cls.witness_instances[1]


def test_edge_and_graph_validation():
    with pytest.raises(InvalidArgumentError):
        DependencyEdge(1, 1, "fitness")
    DependencyEdge(1, 1, "time")  # self-loops are fine for time edges
    with pytest.raises(InvalidArgumentError):
        DependencyEdge(1, 2, "bogus")
    with pytest.raises(InvalidArgumentError):
        DependencyGraph(((1, "A"),), (DependencyEdge(1, 2, "fitness"),))


def test_is_multicomponent_shapes():
    two_nodes = DependencyGraph(((1, "A"), (2, "B")), ())
    assert not is_multicomponent(two_nodes)
    path = DependencyGraph(
        ((1, "A"), (2, "B"), (3, "C")),
        (DependencyEdge(1, 2, "fitness"), DependencyEdge(2, 3, "feasibility")),
    )
    assert is_multicomponent(path)
    lonely = DependencyGraph(((1, "A"),), ())
    assert not is_multicomponent(lonely)
