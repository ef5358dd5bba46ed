"""Lower bounds on active edges and on the load, plus grid constructions.

Loads here are the minimum uniform edge capacity that lets the all-to-all
demands (volume kappa per ordered pair) route; all bounds scale linearly in
kappa.  Arithmetic is exact rational; ceilings appear only where the bounded
quantity is inherently integral (edge counts, integer capacity grids).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Optional

from .graph import (
    UNBOUNDED,
    CutPartition,
    DemandSet,
    Network,
    cut_of_partition,
    generate_topology,
)


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: Fraction
    params: dict
    note: str  # what the value lower-bounds: edges, load, or ratio


# ---------------------------------------------------------------------------
# general bounds


def path_length_edge_bound(network: Network, demands: DemandSet) -> int:
    """Edges needed so total capacity covers distance-weighted total volume.

    Requires a uniform finite capacity; distances are hop counts in the full
    network, so the value lower-bounds the optimal kept-edge count.
    """
    c = network.uniform_capacity()
    if c is None or c is UNBOUNDED:
        raise ValueError("bound needs a uniform finite capacity")
    if c <= 0:
        raise ValueError("capacity must be positive")
    from .exact import _distance_in

    need = Fraction(0)
    for d in demands.demands:
        dist = _distance_in(network.adjacency, lambda e: True, d.s, d.t,
                            network.node_count)
        if dist is None:
            raise ValueError(f"demand ({d.s},{d.t}) is disconnected")
        need += dist * d.volume
    return ceil(need / c)


def cut_load_bound(partition: CutPartition, kappa=1) -> Fraction:
    """Capacity each cut edge needs to carry the cross traffic: 2k|S||S~|/cut."""
    if not partition.cut_edges:
        raise ValueError("cut is empty (disconnected partition)")
    kappa = Fraction(kappa)
    return (
        2 * kappa * len(partition.side_S) * len(partition.side_S_bar)
        / len(partition.cut_edges)
    )


def min_bisection(network: Network, mode: str = "exact", seed: int = 0,
                  restarts: int = 64) -> CutPartition:
    """Balanced partition minimizing the cut; exact search or local search.

    exact: branch-and-bound over assignments, practical up to 24 nodes.
    heuristic: seeded multi-start best-swap descent; any bisection found
    still yields a valid (possibly weaker) load bound.
    """
    n = network.node_count
    if n < 2:
        raise ValueError("need at least two nodes")
    size_s = (n + 1) // 2
    if mode == "exact":
        if n > 24:
            raise ValueError("exact bisection is limited to 24 nodes; "
                             "use mode='heuristic'")
        best = _bisection_exact(network, size_s)
    elif mode == "heuristic":
        best = _bisection_local_search(network, size_s, seed, restarts)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return cut_of_partition(network, best)


def _cut_size(network, side):
    return sum(1 for e in network.edges if (e.u in side) != (e.v in side))


def _bisection_exact(network, size_s):
    n = network.node_count
    best_cut = network.edge_count + 1
    best_side = None
    side = [None] * n  # True = S

    # order nodes by degree so the cut grows (and prunes) early
    node_order = sorted(range(n), key=lambda v: -network.degree(v))
    incident = network.adjacency

    def descend(pos, in_s, in_sbar, cut):
        nonlocal best_cut, best_side
        if cut >= best_cut:
            return
        if in_s > size_s or in_sbar > n - size_s:
            return
        if pos == n:
            best_cut = cut
            best_side = [v for v in range(n) if side[v]]
            return
        v = node_order[pos]
        # when n is even the sides are interchangeable; pin the first node
        choices = (True,) if pos == 0 and 2 * size_s == n else (True, False)
        for value in choices:
            side[v] = value
            extra = sum(
                1 for w, _ in incident[v]
                if side[w] is not None and side[w] != value
            )
            descend(pos + 1, in_s + value, in_sbar + (not value), cut + extra)
            side[v] = None

    descend(0, 0, 0, 0)
    return best_side


def _bisection_local_search(network, size_s, seed, restarts):
    n = network.node_count
    rng = random.Random(seed)
    best_side = None
    best_cut = None
    nodes = list(range(n))
    for _ in range(restarts):
        rng.shuffle(nodes)
        side = set(nodes[:size_s])
        cut = _cut_size(network, side)
        improved = True
        while improved:
            improved = False
            best_gain = 0
            best_pair = None
            for u in sorted(side):
                for v in sorted(set(range(n)) - side):
                    candidate = (side - {u}) | {v}
                    c = _cut_size(network, candidate)
                    if cut - c > best_gain:
                        best_gain = cut - c
                        best_pair = (u, v)
            if best_pair:
                u, v = best_pair
                side = (side - {u}) | {v}
                cut -= best_gain
                improved = True
        if best_cut is None or cut < best_cut:
            best_cut = cut
            best_side = sorted(side)
    return best_side


# ---------------------------------------------------------------------------
# trees


def tree_load(network: Network, kappa=1) -> Fraction:
    """All-to-all load of a tree: the centroid edge carries 2k*v*(n-v).

    Computed by maximizing 2*kappa*v(e)*(n-v(e)) over edges, where removing
    e splits the tree into components of sizes v(e) and n-v(e).
    """
    n = network.node_count
    if network.edge_count != n - 1 or not network.is_connected():
        raise ValueError("input is not a tree")
    kappa = Fraction(kappa)
    if n == 1:
        return Fraction(0)
    # subtree sizes from a rooted DFS; every edge separates child subtree
    parent_edge = {0: None}
    order = [0]
    stack = [0]
    seen = {0}
    while stack:
        u = stack.pop()
        for v, eid in network.adjacency[u]:
            if v not in seen:
                seen.add(v)
                parent_edge[v] = eid
                order.append(v)
                stack.append(v)
    size = [1] * n
    for v in reversed(order[1:]):
        for w, eid in network.adjacency[v]:
            if parent_edge.get(w) == eid and w != v:
                size[v] += size[w]
    best = Fraction(0)
    for v in order[1:]:
        s = size[v]
        best = max(best, 2 * kappa * s * (n - s))
    return best


def spanning_tree_load_bound(n: int, delta_max: int, kappa=1,
                             as_printed: bool = False) -> Fraction:
    """Least possible load of any spanning tree given the max degree.

    The largest centroid branch has at least B = ceil((n-1)/delta_max)
    nodes, so the load is at least 2*kappa*B*(n-B).  as_printed=True keeps
    the mixed-rounding variant 2k*ceil((n-1)/d)*(n - floor((n-1)/d)) for
    reference; it overshoots whenever delta_max does not divide n-1.
    """
    if n < 2 or delta_max < 1:
        raise ValueError("need n >= 2 and delta_max >= 1")
    kappa = Fraction(kappa)
    b_hi = -((n - 1) // -delta_max)  # ceil
    if as_printed:
        b_lo = (n - 1) // delta_max
        return 2 * kappa * b_hi * (n - b_lo)
    return 2 * kappa * b_hi * (n - b_hi)


# ---------------------------------------------------------------------------
# complete graphs


def complete_graph_edge_bound(n: int, c, kappa=1) -> int:
    """Edges an all-to-all routing needs on a complete graph.

    Every missing edge turns two unit routes into 2+ hops, which feeds the
    capacity-coverage argument: at least 2k*n(n-1)/(c+2k) edges, and never
    fewer than a spanning tree.
    """
    c = Fraction(c)
    kappa = Fraction(kappa)
    if c < 2 * kappa:
        raise ValueError("all-to-all routing on a complete graph needs c >= 2k")
    frac = 2 * kappa * n * (n - 1) / (c + 2 * kappa)
    return ceil(max(frac, Fraction(n - 1)))


# ---------------------------------------------------------------------------
# square grids (kappa = 1 throughout, scale linearly for other volumes)


def _grid_center(a: int) -> tuple[int, int]:
    m = (a - 1) // 2 if a % 2 else a // 2
    return m, m


def balanced_grid_partition(a: int):
    """Center node plus 4 connected parts of sizes ceil/floor((a^2-1)/4).

    Grown by repeatedly letting the currently-smallest branch claim an
    unclaimed cell adjacent to it, which keeps the four branches balanced.
    """
    if a < 3:
        raise ValueError("need a >= 3")
    r0, c0 = _grid_center(a)
    center = r0 * a + c0
    anchors = [
        (r0 - 1) * a + c0,
        r0 * a + (c0 - 1),
        r0 * a + (c0 + 1),
        (r0 + 1) * a + c0,
    ]
    branches = [{anchor} for anchor in anchors]
    claimed = {center, *anchors}
    total = a * a

    def neighbors(cell):
        r, c = divmod(cell, a)
        if r > 0:
            yield cell - a
        if r + 1 < a:
            yield cell + a
        if c > 0:
            yield cell - 1
        if c + 1 < a:
            yield cell + 1

    while len(claimed) < total:
        progressed = False
        for b in sorted(range(4), key=lambda i: (len(branches[i]), i)):
            frontier = sorted(
                v
                for cell in branches[b]
                for v in neighbors(cell)
                if v not in claimed
            )
            if frontier:
                branches[b].add(frontier[0])
                claimed.add(frontier[0])
                progressed = True
                break
        if not progressed:  # pragma: no cover - grids never strand cells
            raise RuntimeError("balanced partition failed to cover the grid")
    return center, [frozenset(b) for b in branches]


def grid_tree_load(a: int):
    """Best spanning-tree load of the a x a grid, with the tree achieving it.

    The optimal tree has a degree-4 centroid with near-equal branches; the
    load is 2*ceil((a^2-1)/4)*(a^2 - ceil((a^2-1)/4)), about 3a^4/8.
    Returns (load, tree_network).
    """
    if a < 3:
        raise ValueError("need a >= 3")
    n = a * a
    big = -((n - 1) // -4)
    load = 2 * big * (n - big)
    grid = generate_topology("grid", a)
    center, branches = balanced_grid_partition(a)
    tree_edges = set()
    for branch in branches:
        anchor = next(
            v for v in sorted(branch)
            if any(w == center for w, _ in grid.adjacency[v])
        )
        tree_edges.add(grid.edge_id(center, anchor))
        # BFS tree of the branch cells, rooted at the anchor
        seen = {anchor}
        queue = [anchor]
        while queue:
            u = queue.pop(0)
            for v, eid in grid.adjacency[u]:
                if v in branch and v not in seen:
                    seen.add(v)
                    tree_edges.add(eid)
                    queue.append(v)
        if seen != set(branch):  # pragma: no cover
            raise RuntimeError("branch is not connected")
    tree = grid.restricted_to(tree_edges)
    if tree.edge_count != n - 1:  # pragma: no cover
        raise RuntimeError("construction did not produce a spanning tree")
    achieved = tree_load(tree)
    if achieved != load:  # pragma: no cover
        raise RuntimeError(f"constructed tree has load {achieved}, wanted {load}")
    return load, tree


def grid_full_load_bound(a: int) -> Fraction:
    """Middle-cut load bound of the full a x a grid: a^3/2 for even sides."""
    if a < 2:
        raise ValueError("need a >= 2")
    half = Fraction(a**3, 2)
    if a % 2 == 0:
        return half
    return half * (1 - Fraction(1, a) + Fraction(1, a**2) - Fraction(1, a**3))


def grid_construction(a: int, q: int) -> Network:
    """Subgraph interpolating between spanning tree (q=1) and full grid (q=a).

    The grid is split into q x q near-equal blocks; blocks are linked into a
    coarse grid by one boundary edge per adjacent pair, and each block's
    nodes are spanned by a tree rooted centrally.  Edge count is
    n + p - 2*sqrt(p) with p = q*q regions.
    """
    if a < 2 or not (1 <= q <= a):
        raise ValueError("need a >= 2 and 1 <= q <= a")
    grid = generate_topology("grid", a)
    # near-equal block boundaries: first (a % q) blocks get the extra cell
    sizes = [(a + q - 1 - i) // q for i in range(q)]
    starts = [sum(sizes[:i]) for i in range(q + 1)]
    block_of = [0] * a
    for b in range(q):
        for x in range(starts[b], starts[b + 1]):
            block_of[x] = b

    kept = set()
    # one tree per block, BFS from the block's central cell
    for br in range(q):
        for bc in range(q):
            cells = [
                r * a + c
                for r in range(starts[br], starts[br + 1])
                for c in range(starts[bc], starts[bc + 1])
            ]
            mid_r = (starts[br] + starts[br + 1] - 1) // 2
            mid_c = (starts[bc] + starts[bc + 1] - 1) // 2
            root = mid_r * a + mid_c
            cellset = set(cells)
            seen = {root}
            queue = [root]
            while queue:
                u = queue.pop(0)
                for v, eid in grid.adjacency[u]:
                    if v in cellset and v not in seen:
                        seen.add(v)
                        kept.add(eid)
                        queue.append(v)
    # one link per adjacent block pair, at the middle of the shared border
    for br in range(q):
        mid_r = (starts[br] + starts[br + 1] - 1) // 2
        for bc in range(q - 1):
            c_left = starts[bc + 1] - 1
            kept.add(grid.edge_id(mid_r * a + c_left, mid_r * a + c_left + 1))
    for bc in range(q):
        mid_c = (starts[bc] + starts[bc + 1] - 1) // 2
        for br in range(q - 1):
            r_up = starts[br + 1] - 1
            kept.add(grid.edge_id(r_up * a + mid_c, (r_up + 1) * a + mid_c))
    out = grid.restricted_to(kept)
    expected = a * a + q * q - 2 * q
    if out.edge_count != expected:  # pragma: no cover
        raise RuntimeError(f"built {out.edge_count} edges, wanted {expected}")
    return out


def grid_construction_load_estimate(a: int, q: int) -> Fraction:
    """Announced load order of the block construction; an estimate only.

    The region-grid term n^2/(4*sqrt(p)) dominates; the intra-block term is
    kept as stated even though its scale is debatable, so callers should
    measure the construction rather than trust this number.
    """
    n = a * a
    p = q * q
    return Fraction(n**2, 4 * q) + Fraction(3 * n**2, 8 * p**2)


def grid_subgraph_load_bound(a: int, k: int) -> Fraction:
    """Load bound for any k-edge subgraph of the a x a grid.

    Removing edges can only lengthen shortest paths: the distance total
    starts at 2a^3(a^2-1)/3 and grows by at least 2a(a-1) per fully removed
    column and 4*(a-i) for the i-th removal within a partial column.
    Dividing by k spreads the total over the remaining edges.
    """
    if a < 2:
        raise ValueError("need a >= 2")
    n = a * a
    m = 2 * a * (a - 1)
    if not (n - 1 <= k <= m):
        raise ValueError(f"k must be between {n - 1} and {m}")
    base = Fraction(2 * a**3 * (a**2 - 1), 3)
    removed = m - k
    full_cols = removed // a
    leftover = removed - full_cols * (a - 1)
    increments = full_cols * 2 * a * (a - 1)
    increments += 4 * sum(a - i for i in range(1, leftover + 1))
    return (base + increments) / k


# ---------------------------------------------------------------------------
# random-removal success probability


def random_trial_success_probability(total_edges: int, optimal_size: int,
                                     removal_fraction) -> Fraction:
    """Chance that removing mu*|E| random edges misses the optimum entirely.

    Exact hypergeometric survival C(|E|-|E*|, mu|E|) / C(|E|, mu|E|); the
    complement is the probability of having killed the optimal solution.
    """
    mu = Fraction(removal_fraction)
    draws = mu * total_edges
    if draws.denominator != 1:
        raise ValueError("mu*|E| must be an integer number of edges")
    draws = int(draws)
    if draws < 0 or draws > total_edges:
        raise ValueError("removal count out of range")
    if not (0 <= optimal_size <= total_edges):
        raise ValueError("optimal size out of range")
    return Fraction(
        math.comb(total_edges - optimal_size, draws),
        math.comb(total_edges, draws),
    )


# ---------------------------------------------------------------------------
# report assembly (used by the command-line front end)


def evaluate_bounds(network: Network, kappa=1, lam=None,
                    bisection_mode: Optional[str] = None,
                    seed: int = 0, grid_side: Optional[int] = None
                    ) -> list[BoundReport]:
    """All applicable bounds for a topology; inapplicable ones are skipped.

    grid_side marks the input as a known a x a grid so the grid-specific
    bounds apply; callers that generate the topology know this.
    """
    kappa = Fraction(kappa)
    n = network.node_count
    reports = []
    mode = bisection_mode or ("exact" if n <= 24 else "heuristic")
    try:
        partition = min_bisection(network, mode=mode, seed=seed)
        load = cut_load_bound(partition, kappa)
        reports.append(BoundReport(
            "bisection_cut", Fraction(len(partition.cut_edges)),
            {"side_S": len(partition.side_S), "mode": mode},
            "minimum balanced cut size",
        ))
        reports.append(BoundReport(
            "cut_load", load, {"kappa": str(kappa)},
            "lower bound on the load c",
        ))
        reports.append(BoundReport(
            "lambda1_bound", Fraction(ceil(load / kappa)), {},
            "lower bound on the feasibility ratio",
        ))
    except ValueError:
        pass
    delta = network.max_degree()
    reports.append(BoundReport(
        "delta_max", Fraction(delta), {}, "maximum node degree",
    ))
    reports.append(BoundReport(
        "tree_load_bound", spanning_tree_load_bound(n, delta, kappa),
        {"kappa": str(kappa)}, "lower bound on any spanning-tree load",
    ))
    if lam is not None:
        lam = Fraction(lam)
        capacitated = network.with_uniform_capacity(lam * kappa)
        demands = DemandSet.all_to_all(n, kappa)
        reports.append(BoundReport(
            "path_length_edges",
            Fraction(path_length_edge_bound(capacitated, demands)),
            {"lambda": str(lam)}, "lower bound on kept edges",
        ))
        if network.edge_count == n * (n - 1) // 2:
            reports.append(BoundReport(
                "complete_graph_edges",
                Fraction(complete_graph_edge_bound(n, lam * kappa, kappa)),
                {"lambda": str(lam)}, "lower bound on kept edges",
            ))
    if grid_side is not None and grid_side >= 2:
        side = grid_side
        if n != side * side:
            raise ValueError("grid_side does not match the node count")
        reports.append(BoundReport(
            "grid_full_load", grid_full_load_bound(side) * kappa,
            {"a": side}, "lower bound on the full-grid load",
        ))
        if side >= 3:
            load, _ = grid_tree_load(side)
            reports.append(BoundReport(
                "grid_tree_load", load * kappa, {"a": side},
                "best spanning-tree load",
            ))
    return reports
