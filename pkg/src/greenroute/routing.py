"""Feasible-routing heuristic, routing validation, and greedy baselines.

Demands are inserted one at a time in a seeded random order; each takes the
shortest path under the load-balancing metric capacity/residual, and the
residual capacity is decremented before the next demand is considered.  A
failed order is retried with the next seeded order.  The heuristic failing
says nothing about true infeasibility.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .graph import (
    EXCLUDED,
    UNBOUNDED,
    DemandSet,
    Network,
    _lex_shortest,
)


class _InfeasibleByHeuristic:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "INFEASIBLE_BY_HEURISTIC"


INFEASIBLE_BY_HEURISTIC = _InfeasibleByHeuristic()

#: weight floor: used for UNBOUNDED-capacity edges, and for already-used
#: edges in the min_new_edges baseline.  Strictly positive so shortest-path
#: semantics stay intact.
MIN_EDGE_WEIGHT = Fraction(1, 2**20)

DEFAULT_RETRIES = 5


@dataclass(frozen=True)
class RoutingState:
    """Per-demand paths plus exact per-edge bookkeeping.

    flow[e] + residual[e] == capacity[e] for every edge (UNBOUNDED edges keep
    an UNBOUNDED residual).  paths[i] is the node sequence assigned to
    demand i in the original demand order.
    """

    paths: tuple
    residual: tuple
    flow: tuple
    seed: int = 0
    attempt: int = 0

    def used_edge_ids(self, network: Network) -> frozenset[int]:
        used = set()
        for p in self.paths:
            if p:
                used.update(network.path_edge_ids(p))
        return frozenset(used)


def demand_order(num_demands: int, seed: int, attempt: int) -> list[int]:
    """Seeded uniform shuffle; attempt k is the k-th draw from the stream."""
    rng = random.Random(seed)
    order = list(range(num_demands))
    for _ in range(attempt + 1):
        rng.shuffle(order)
    return order


def _state_from_paths(network, demands, paths, seed, attempt):
    flow = [Fraction(0)] * network.edge_count
    for d, p in zip(demands, paths):
        for eid in network.path_edge_ids(p):
            flow[eid] += d.volume
    residual = []
    for eid, e in enumerate(network.edges):
        if e.capacity is UNBOUNDED:
            residual.append(UNBOUNDED)
        else:
            residual.append(e.capacity - flow[eid])
    return RoutingState(tuple(paths), tuple(residual), tuple(flow), seed, attempt)


def _route_one_order(network, demands, order, allowed, exact_weights):
    """Insert demands in the given order; None when some demand is stuck.

    allowed: optional edge-id set; edges outside it are never used (the
    heuristics route on subgraphs this way without rebuilding networks).
    """
    m = network.edge_count
    n = network.node_count
    adjacency = network.adjacency
    caps = [e.capacity for e in network.edges]
    residual = list(caps)
    eps = MIN_EDGE_WEIGHT if exact_weights else float(MIN_EDGE_WEIGHT)
    if not exact_weights:
        fcap = [0.0 if c is UNBOUNDED else float(c) for c in caps]
        fres = list(fcap)
    paths = [None] * len(demands.demands)
    weights = [None] * m
    for idx in order:
        d = demands.demands[idx]
        vol = d.volume
        for eid in range(m):
            if allowed is not None and eid not in allowed:
                weights[eid] = None
                continue
            r = residual[eid]
            if r is UNBOUNDED:
                weights[eid] = eps
            elif r < vol:
                weights[eid] = None
            elif exact_weights:
                weights[eid] = caps[eid] / r
            else:
                fr = fres[eid]
                weights[eid] = fcap[eid] / fr if fr > 0.0 else float(caps[eid] / r)
        path = _lex_shortest(adjacency, weights, d.s, d.t, n)
        if path is None:
            return None
        paths[idx] = path
        for eid in network.path_edge_ids(path):
            if residual[eid] is not UNBOUNDED:
                residual[eid] -= vol
                if not exact_weights:
                    fres[eid] = float(residual[eid])
    return paths


def route_demands(
    network: Network,
    demands: DemandSet,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
    allowed_edges=None,
    exact_weights: bool = False,
):
    """Seeded insertion routing under the capacity/residual metric.

    Tries up to `retries` seeded demand orders and returns the first
    RoutingState found, else INFEASIBLE_BY_HEURISTIC.  Edges whose residual
    cannot carry the demand are excluded from its shortest-path search.
    Weight ordering uses floats by default; exact_weights=True switches to
    rational arithmetic (slower, bit-identical tie handling in all cases).
    """
    if retries < 1:
        raise ValueError("retries must be >= 1")
    allowed = frozenset(allowed_edges) if allowed_edges is not None else None
    for attempt in range(retries):
        order = demand_order(len(demands.demands), seed, attempt)
        paths = _route_one_order(network, demands, order, allowed, exact_weights)
        if paths is not None:
            return _state_from_paths(network, demands, paths, seed, attempt)
    return INFEASIBLE_BY_HEURISTIC


def validate_routing(network: Network, demands: DemandSet, routing: RoutingState):
    """All constraint violations of a routing; an empty list means valid."""
    violations = []
    flow = [Fraction(0)] * network.edge_count
    for i, d in enumerate(demands.demands):
        p = routing.paths[i] if i < len(routing.paths) else None
        if not p:
            violations.append(f"demand {i} ({d.s}->{d.t}): no path assigned")
            continue
        if p[0] != d.s or p[-1] != d.t:
            violations.append(
                f"demand {i} ({d.s}->{d.t}): path endpoints {p[0]}..{p[-1]}"
            )
            continue
        if len(set(p)) != len(p):
            violations.append(f"demand {i} ({d.s}->{d.t}): path revisits a node")
            continue
        ok = True
        for a, b in zip(p, p[1:]):
            eid = network.edge_id(a, b)
            if eid is None:
                violations.append(f"demand {i} ({d.s}->{d.t}): no edge {a}-{b}")
                ok = False
                break
        if ok:
            for eid in network.path_edge_ids(p):
                flow[eid] += d.volume
    for eid, e in enumerate(network.edges):
        if e.capacity is not UNBOUNDED and flow[eid] > e.capacity:
            violations.append(
                f"edge {eid} ({e.u}-{e.v}): flow {flow[eid]} exceeds "
                f"capacity {e.capacity}"
            )
    return violations


def baseline_route(
    network: Network,
    demands: DemandSet,
    strategy: str,
    order_seed: int = 0,
):
    """Greedy baselines: hop-shortest paths, or fewest newly-used edges.

    Routes the demands in one seeded order.  shortest_path gives every demand
    a hop-shortest residual-feasible path; min_new_edges weighs already-used
    edges at the weight floor so the path minimizes newly added edges, with
    hop count then node sequence as tie-breaks.  Returns (RoutingState,
    used edge-id set) or INFEASIBLE_BY_HEURISTIC.
    """
    if strategy not in ("shortest_path", "min_new_edges"):
        raise ValueError(f"unknown strategy {strategy!r}")
    m = network.edge_count
    caps = [e.capacity for e in network.edges]
    residual = list(caps)
    order = demand_order(len(demands.demands), order_seed, 0)
    paths = [None] * len(demands.demands)
    used = set()
    for idx in order:
        d = demands.demands[idx]
        weights = []
        for eid in range(m):
            r = residual[eid]
            if r is not UNBOUNDED and r < d.volume:
                weights.append(EXCLUDED)
            elif strategy == "min_new_edges" and eid in used:
                weights.append(MIN_EDGE_WEIGHT)
            else:
                weights.append(Fraction(1))
        weights = [None if w is EXCLUDED else w for w in weights]
        path = _lex_shortest(network.adjacency, weights, d.s, d.t, network.node_count)
        if path is None:
            return INFEASIBLE_BY_HEURISTIC
        paths[idx] = path
        for eid in network.path_edge_ids(path):
            used.add(eid)
            if residual[eid] is not UNBOUNDED:
                residual[eid] -= d.volume
    state = _state_from_paths(network, demands, paths, order_seed, 0)
    return state, frozenset(used)
