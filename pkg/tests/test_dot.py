import pytest

from mcdep.analysis import DependencyEdge, DependencyGraph
from mcdep.dot import export_dot
from mcdep.errors import InvalidArgumentError


def test_edgeless_graph_lists_nodes():
    graph = DependencyGraph(((1, "A"), (2, "B")), ())
    assert export_dot(graph) == 'digraph G {\n  "A";\n  "B";\n}\n'


def test_isolated_nodes_mix_with_edges():
    graph = DependencyGraph(
        ((1, "A"), (2, "B"), (3, "C")),
        (DependencyEdge(1, 2, "fitness"),),
    )
    assert export_dot(graph) == (
        'digraph G {\n'
        '  "C";\n'
        '  "A" -> "B" [label="fitness"];\n'
        '}\n'
    )


def test_edges_sorted_by_labels():
    graph = DependencyGraph(
        ((1, "B"), (2, "A")),
        (DependencyEdge(1, 2, "feasibility"), DependencyEdge(2, 1, "feasibility")),
    )
    # sorting is by rendered names, not ids
    assert export_dot(graph).splitlines()[1:3] == [
        '  "A" -> "B" [label="feasibility"];',
        '  "B" -> "A" [label="feasibility"];',
    ]


def test_rejects_unknown_graph_type():
    with pytest.raises(InvalidArgumentError):
        export_dot(object())


def test_golden_stability_is_exactly_reproducible(lrp_t1):
    from mcdep.analysis import build_dependency_graph

    a = export_dot(build_dependency_graph(lrp_t1.problem))
    b = export_dot(build_dependency_graph(lrp_t1.problem))
    assert a == b
