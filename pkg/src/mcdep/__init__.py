"""Multi-component optimisation problems: modeling, dependency analysis, solvers.

Declare components with bitstring configuration spaces, connect them with
instance mappings, detect and classify the dependencies between them
(fitness / feasibility / time), build the labeled dependency graph, and
compare exhaustive, isolated and cooperative solving strategies on
reference composite problems.
"""

from .analysis import (
    DEFAULT_SPACE_BUDGET,
    Classification,
    DependencyEdge,
    DependencyGraph,
    DependencyVerdict,
    PairAnalysis,
    ProblemAnalysis,
    analyze_problem,
    build_dependency_graph,
    classify_dependency,
    detect_instance_dependency,
    is_multicomponent,
    replay_instance_witness,
)
from .dot import export_dot
from .errors import (
    BudgetExceededError,
    ClassificationBudgetError,
    InfeasibleJointError,
    InfeasibleSolutionError,
    InvalidArgumentError,
    McdepError,
    ModelViolationError,
    ParseError,
    PartialGraphError,
)
from .fileio import (
    LoadedInstance,
    gen_lrp,
    load_instance,
    parse_instance_text,
    serialize_instance,
)
from .model import (
    DEFAULT_JOINT_BUDGET,
    ComponentSpec,
    CompositeProblem,
    DecisionVerdict,
    Instance,
    JointSolution,
    SolutionConfig,
    canonical_payload_bytes,
    context_of,
    decide,
    evaluate_component,
    evaluate_overall,
    feasible_joint_entries,
    is_feasible,
    joint_from_values,
    make_problem,
    map_instance,
    permute_components,
    reduce_to_component,
)
from .solvers import (
    SolveResult,
    brute_force_all_optima,
    brute_force_joint,
    cooperative_search,
    solve_isolated,
)
from .timemodel import (
    DataStream,
    ExpandedTimeGraph,
    TimeDependencyVerdict,
    TimePipeline,
    TimeWindow,
    compress_time_graph,
    detect_time_dependency,
    expand_time_graph,
    realized_horizon,
    replay_time_witness,
    run_pipeline,
)

__version__ = "0.1.0"
