"""greenroute: energy-efficient routing by switching off network links.

Find routings of capacitated undirected networks that satisfy every demand
while activating as few links as possible: removal heuristics, an exact
solver for small instances, a library of load and edge-count lower bounds,
grid constructions, fault-tolerant spanner tooling, and batch experiment
drivers.
"""

from .bounds import (
    BoundReport,
    balanced_grid_partition,
    complete_graph_edge_bound,
    cut_load_bound,
    evaluate_bounds,
    grid_construction,
    grid_construction_load_estimate,
    grid_full_load_bound,
    grid_subgraph_load_bound,
    grid_tree_load,
    min_bisection,
    path_length_edge_bound,
    random_trial_success_probability,
    spanning_tree_load_bound,
    tree_load,
)
from .exact import (
    BUDGET_EXCEEDED,
    FEASIBLE,
    INFEASIBLE,
    OPTIMAL,
    ExactResult,
    FeasibilityResult,
    exact_feasible,
    exact_min_edges,
    export_merp_lp,
)
from .graph import (
    EXCLUDED,
    UNBOUNDED,
    CutPartition,
    Demand,
    DemandSet,
    Edge,
    Network,
    all_pairs_distances,
    cut_of_partition,
    generate_adversarial,
    generate_topology,
    ordered_distance_sum,
    shortest_path,
)
from .heuristics import (
    SolutionSubgraph,
    SweepReport,
    SweepRow,
    find_lambda_threshold,
    lle_heuristic,
    random_heuristic,
    sweep,
)
from .io_formats import (
    GraphParseError,
    LpModel,
    LpRow,
    parse_graph_text,
    parse_lp_mini,
    parse_sndlib,
    write_csv_report,
    write_graph_text,
)
from .metrics import (
    MetricsRow,
    avg_disjoint_paths,
    avg_route_length,
    energy_estimate,
    spared_and_of,
    stretch,
)
from .routing import (
    INFEASIBLE_BY_HEURISTIC,
    MIN_EDGE_WEIGHT,
    RoutingState,
    baseline_route,
    route_demands,
    validate_routing,
)
from .spanner import (
    SpannerExport,
    SpannerParams,
    SpannerSolution,
    check_spanner_support,
    exact_spanner_small,
    export_spanner_lp,
    mean_family_stretch,
    parse_spanner_solution,
    validate_spanner,
    write_spanner_solution,
)

__version__ = "0.1.0"
