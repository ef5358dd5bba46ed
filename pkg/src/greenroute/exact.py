"""Exact solvers for desk-scale instances, and LP-file export of the model.

exact_feasible decides whether all demands fit by complete backtracking over
per-demand elementary path choices.  exact_min_edges wraps it in a search
over edge-subset sizes, smallest first, so the first feasible subset found
is provably optimal.  Both honor a search-node budget and report exhaustion
honestly instead of guessing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Optional

from .graph import UNBOUNDED, DemandSet, Network
from .routing import RoutingState, _state_from_paths

FEASIBLE = "FEASIBLE"
INFEASIBLE = "INFEASIBLE"
OPTIMAL = "OPTIMAL"
BUDGET_EXCEEDED = "BUDGET_EXCEEDED"

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class FeasibilityResult:
    status: str
    witness: Optional[RoutingState]
    explored: int


@dataclass(frozen=True)
class ExactResult:
    status: str
    edge_ids: Optional[frozenset[int]]
    witness: Optional[RoutingState]
    explored: int
    elapsed_s: float
    # bracket on the optimum when the budget ran out: sizes below
    # proven_lower are exhausted, best_known is a feasible size if any
    proven_lower: Optional[int] = None
    best_known: Optional[int] = None


class _Budget:
    __slots__ = ("left", "spent")

    def __init__(self, limit):
        self.left = limit
        self.spent = 0

    def tick(self, amount=1) -> bool:
        self.spent += amount
        self.left -= amount
        return self.left >= 0


class _OutOfBudget(Exception):
    pass


def _elementary_paths(adjacency, ok_edge, s, t, node_count):
    """All elementary s-t paths over usable edges, shortest first."""
    out = []
    path = [s]
    on_path = [False] * node_count
    on_path[s] = True

    def extend(u):
        if u == t:
            out.append(tuple(path))
            return
        for v, eid in adjacency[u]:
            if on_path[v] or not ok_edge(eid):
                continue
            on_path[v] = True
            path.append(v)
            extend(v)
            path.pop()
            on_path[v] = False

    extend(s)
    out.sort(key=lambda p: (len(p), p))
    return out


def _pairs_connected(adjacency, ok, pairs, node_count):
    """Every (s,t,vol) pair reachable through edges with ok(eid, vol)."""
    for s, t, vol in pairs:
        seen = {s}
        stack = [s]
        found = False
        while stack and not found:
            u = stack.pop()
            for v, eid in adjacency[u]:
                if v not in seen and ok(eid, vol):
                    if v == t:
                        found = True
                        break
                    seen.add(v)
                    stack.append(v)
        if not found:
            return False
    return True


def exact_feasible(
    network: Network,
    demands: DemandSet,
    budget: int = DEFAULT_BUDGET,
    allowed_edges=None,
    _budget_obj: _Budget = None,
) -> FeasibilityResult:
    """Decide routability by exhaustive backtracking.

    Demands are processed in decreasing volume; each level enumerates the
    demand's elementary paths in increasing hop length over edges whose
    residual still fits it.  A level also fails fast when any remaining
    demand got disconnected.  INFEASIBLE is only returned after the whole
    tree is exhausted; hitting the node budget returns BUDGET_EXCEEDED.
    """
    bud = _budget_obj if _budget_obj is not None else _Budget(budget)
    allowed = set(allowed_edges) if allowed_edges is not None else None
    adjacency = network.adjacency
    m = network.edge_count
    residual = []
    for eid, e in enumerate(network.edges):
        usable = allowed is None or eid in allowed
        residual.append(e.capacity if usable else Fraction(-1))
    order = sorted(
        range(len(demands.demands)),
        key=lambda i: (-demands.demands[i].volume, demands.demands[i].s,
                       demands.demands[i].t),
    )
    paths = [None] * len(demands.demands)

    def fits(eid, vol):
        r = residual[eid]
        return r is UNBOUNDED or r >= vol

    def assign(level) -> bool:
        if level == len(order):
            return True
        idx = order[level]
        d = demands.demands[idx]
        remaining = [
            (demands.demands[j].s, demands.demands[j].t, demands.demands[j].volume)
            for j in order[level + 1:]
        ]
        for path in _elementary_paths(
            adjacency, lambda eid: fits(eid, d.volume), d.s, d.t,
            network.node_count,
        ):
            if not bud.tick():
                raise _OutOfBudget
            eids = network.path_edge_ids(path)
            for eid in eids:
                if residual[eid] is not UNBOUNDED:
                    residual[eid] -= d.volume
            paths[idx] = path
            if _pairs_connected(adjacency, fits, remaining, network.node_count):
                if assign(level + 1):
                    return True
            for eid in eids:
                if residual[eid] is not UNBOUNDED:
                    residual[eid] += d.volume
            paths[idx] = None
        return False

    try:
        ok = assign(0)
    except _OutOfBudget:
        return FeasibilityResult(BUDGET_EXCEEDED, None, bud.spent)
    if not ok:
        return FeasibilityResult(INFEASIBLE, None, bud.spent)
    witness = _state_from_paths(network, demands, paths, seed=0, attempt=0)
    return FeasibilityResult(FEASIBLE, witness, bud.spent)


def _distance_in(adjacency, edge_ok, s, t, node_count):
    from collections import deque

    if s == t:
        return 0
    seen = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, eid in adjacency[u]:
            if v not in seen and edge_ok(eid):
                seen[v] = seen[u] + 1
                if v == t:
                    return seen[v]
                queue.append(v)
    return None


def _min_edges_lower_bound(network: Network, demands: DemandSet) -> int:
    """Cheap valid lower bounds on the optimal subset size."""
    adjacency = network.adjacency
    bound = 1
    # each demand needs a path at least as long as its full-graph distance
    for d in demands.demands:
        dist = _distance_in(adjacency, lambda e: True, d.s, d.t,
                            network.node_count)
        if dist is None:
            return network.edge_count + 1  # provably infeasible
        bound = max(bound, dist)
    # connecting each group of mutually-entangled terminals needs a forest
    parent = list(range(network.node_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    terminals = set()
    for d in demands.demands:
        terminals.add(d.s)
        terminals.add(d.t)
        parent[find(d.s)] = find(d.t)
    groups = {}
    for v in terminals:
        groups.setdefault(find(v), set()).add(v)
    bound = max(bound, sum(len(g) - 1 for g in groups.values()))
    # total kept capacity must cover the total distance-weighted volume
    finite = [e.capacity for e in network.edges if e.capacity is not UNBOUNDED]
    if len(finite) == network.edge_count and finite:
        c_max = max(finite)
        if c_max > 0:
            need = Fraction(0)
            for d in demands.demands:
                dist = _distance_in(adjacency, lambda e: True, d.s, d.t,
                                    network.node_count)
                need += dist * d.volume
            bound = max(bound, ceil(need / c_max))
    return bound


def _subset_capacity_prune(network, demands, subset) -> bool:
    """True when the subset provably lacks capacity for the demands."""
    subset_set = set(subset)
    if any(network.edges[e].capacity is UNBOUNDED for e in subset_set):
        return False
    total_cap = sum(network.edges[e].capacity for e in subset_set)
    need = Fraction(0)
    for d in demands.demands:
        dist = _distance_in(
            network.adjacency, lambda e: e in subset_set, d.s, d.t,
            network.node_count,
        )
        if dist is None:
            return True
        need += dist * d.volume
    return need > total_cap


def exact_min_edges(
    network: Network,
    demands: DemandSet,
    budget: int = DEFAULT_BUDGET,
) -> ExactResult:
    """Minimum-cardinality edge subset admitting a valid routing.

    Subset sizes are searched upward from a lower bound; per size, candidate
    subsets must keep every demand pair connected and pass a capacity check
    before the backtracking feasibility test runs.  Edges pendant at a
    demand endpoint are forced into every candidate.
    """
    t0 = time.perf_counter()
    bud = _Budget(budget)
    m = network.edge_count
    forced = set()
    for d in demands.demands:
        for v in (d.s, d.t):
            if network.degree(v) == 1:
                forced.add(network.adjacency[v][0][1])
    free = [e for e in range(m) if e not in forced]
    lower = max(_min_edges_lower_bound(network, demands), len(forced))
    pairs = [(d.s, d.t, d.volume) for d in demands.demands]

    for k in range(lower, m + 1):
        for extra in combinations(free, k - len(forced)):
            if not bud.tick():
                return ExactResult(
                    BUDGET_EXCEEDED, None, None, bud.spent,
                    time.perf_counter() - t0, proven_lower=k, best_known=None,
                )
            subset = forced | set(extra)
            in_subset = [False] * m
            for e in subset:
                in_subset[e] = True
            if not _pairs_connected(
                network.adjacency, lambda eid, vol: in_subset[eid], pairs,
                network.node_count,
            ):
                continue
            if _subset_capacity_prune(network, demands, subset):
                continue
            res = exact_feasible(network, demands, allowed_edges=subset,
                                 _budget_obj=bud)
            if res.status == BUDGET_EXCEEDED:
                return ExactResult(
                    BUDGET_EXCEEDED, None, None, bud.spent,
                    time.perf_counter() - t0, proven_lower=k, best_known=None,
                )
            if res.status == FEASIBLE:
                return ExactResult(
                    OPTIMAL, frozenset(subset), res.witness, bud.spent,
                    time.perf_counter() - t0, proven_lower=k, best_known=k,
                )
    return ExactResult(INFEASIBLE, None, None, bud.spent,
                       time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# LP-file export

_LINE_WIDTH = 255


def _lp_number(value) -> str:
    """Exact decimal rendering; rejects rationals with no finite expansion."""
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    den = f.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ValueError(
            f"{f} has no exact decimal form; scale the instance to integers"
        )
    shift = max(twos, fives)
    scaled = f.numerator * 10**shift // f.denominator
    s = str(abs(scaled)).rjust(shift + 1, "0")
    digits = s[:-shift] + "." + s[-shift:] if shift else s
    return ("-" if scaled < 0 else "") + digits


def _wrap_terms(label: str, terms: list[str], tail: str) -> list[str]:
    pieces = []
    for i, term in enumerate(terms):
        neg = term.startswith("-")
        body = term[1:] if neg else term
        if i == 0:
            pieces.append(("- " if neg else "") + body)
        else:
            pieces.append(("- " if neg else "+ ") + body)
    lines = []
    current = f" {label}: {pieces[0]}"
    for piece in pieces[1:]:
        if len(current) + 1 + len(piece) > _LINE_WIDTH:
            lines.append(current)
            current = "   " + piece
        else:
            current += " " + piece
    if tail:
        if len(current) + 1 + len(tail) > _LINE_WIDTH:
            lines.append(current)
            current = "   " + tail
        else:
            current += " " + tail
    lines.append(current)
    return lines


def export_merp_lp(network: Network, demands: DemandSet) -> str:
    """Integer program text: binary edge activations, continuous flows.

    One binary x_<eid> per edge and two flow variables per (edge, demand),
    f_<eid>_uv_<did> along the edge's stored orientation and f_<eid>_vu_<did>
    against it.  Only the x variables are integral here; a demand is meant
    to follow one elementary path, which is the stricter per-path reading
    noted in the header comment for external solvers.
    """
    for e in network.edges:
        if e.capacity is UNBOUNDED:
            raise ValueError("LP export requires finite capacities")
    lines = [
        "\\ minimum active-edge routing model",
        "\\ note: demands are unsplittable single paths; integral flows are",
        "\\ required to recover per-demand paths from a solution",
        "Minimize",
    ]
    obj_terms = [f"x_{eid}" for eid in range(network.edge_count)]
    lines += _wrap_terms("obj", obj_terms, "")
    lines.append("Subject To")
    for did, d in enumerate(demands.demands):
        for node in range(network.node_count):
            terms = []
            for v, eid in network.adjacency[node]:
                into = "vu" if network.edges[eid].u == node else "uv"
                out = "uv" if network.edges[eid].u == node else "vu"
                terms.append(f"f_{eid}_{into}_{did}")
                terms.append(f"-f_{eid}_{out}_{did}")
            if d.s == node:
                rhs = -d.volume
            elif d.t == node:
                rhs = d.volume
            else:
                rhs = Fraction(0)
            lines += _wrap_terms(
                f"flow_{did}_{node}", terms, f"= {_lp_number(rhs)}"
            )
    for eid, e in enumerate(network.edges):
        terms = []
        for did in range(len(demands.demands)):
            terms.append(f"f_{eid}_uv_{did}")
            terms.append(f"f_{eid}_vu_{did}")
        terms.append(f"-{_lp_number(e.capacity)} x_{eid}")
        lines += _wrap_terms(f"cap_{eid}", terms, "<= 0")
    lines.append("Binary")
    for eid in range(network.edge_count):
        lines.append(f" x_{eid}")
    lines.append("End")
    return "\n".join(lines) + "\n"
