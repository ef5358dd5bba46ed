"""Unit-capacity flow helpers: edge-disjoint path counts and families.

Undirected edges are modeled as a pair of unit-capacity arcs.  Minimum-cost
solutions (and maximum-flow values) never need both directions of an edge,
so flow decompositions yield genuinely edge-disjoint elementary paths.
"""

from __future__ import annotations

from collections import deque

from .graph import Network


def _arcs(network: Network, allowed=None):
    """adjacency[u] = list of (v, edge_id) restricted to allowed edge ids."""
    if allowed is None:
        return network.adjacency
    allowed = set(allowed)
    return tuple(
        tuple((v, eid) for v, eid in nbrs if eid in allowed)
        for nbrs in network.adjacency
    )


def max_edge_disjoint_paths(network: Network, s: int, t: int, allowed=None,
                            limit=None) -> int:
    """Maximum number of pairwise edge-disjoint s-t paths (Menger)."""
    if s == t:
        raise ValueError("endpoints must differ")
    adj = _arcs(network, allowed)
    # flow[eid] in {-1, 0, 1}: +1 means u->v along the edge's stored order
    flow = [0] * network.edge_count
    value = 0
    while limit is None or value < limit:
        parent = _augmenting_path_bfs(network, adj, flow, s, t)
        if parent is None:
            return value
        v = t
        while v != s:
            u, eid = parent[v]
            flow[eid] += 1 if network.edges[eid].u == u else -1
            v = u
        value += 1
    return value


def _augmenting_path_bfs(network, adj, flow, s, t):
    parent = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, eid in adj[u]:
            if v in parent:
                continue
            direction = 1 if network.edges[eid].u == u else -1
            # residual along u->v exists unless the arc is already saturated
            if flow[eid] * direction >= 1:
                continue
            parent[v] = (u, eid)
            if v == t:
                return parent
            queue.append(v)
    return None


def min_hop_disjoint_paths(network: Network, s: int, t: int, count: int,
                           allowed=None):
    """`count` edge-disjoint s-t paths minimizing total hop count, or None.

    Successive shortest augmentations on the unit-cost residual network give
    the optimum total length; the flow is then decomposed into paths.
    """
    if s == t:
        raise ValueError("endpoints must differ")
    adj = _arcs(network, allowed)
    n = network.node_count
    flow = [0] * network.edge_count
    for _ in range(count):
        parent = _cheapest_augmenting_path(network, adj, flow, s, t, n)
        if parent is None:
            return None
        v = t
        while v != s:
            u, eid = parent[v]
            flow[eid] += 1 if network.edges[eid].u == u else -1
            v = u
    return _decompose_unit_flow(network, adj, flow, s, t, count)


def _cheapest_augmenting_path(network, adj, flow, s, t, n):
    """Bellman-Ford-style search; residual arcs that undo flow cost -1."""
    INF = float("inf")
    dist = [INF] * n
    dist[s] = 0
    parent = [None] * n
    in_queue = [False] * n
    queue = deque([s])
    in_queue[s] = True
    while queue:
        u = queue.popleft()
        in_queue[u] = False
        du = dist[u]
        for v, eid in adj[u]:
            direction = 1 if network.edges[eid].u == u else -1
            f = flow[eid] * direction
            if f >= 1:
                continue
            cost = -1 if f == -1 else 1
            if du + cost < dist[v]:
                dist[v] = du + cost
                parent[v] = (u, eid)
                if not in_queue[v]:
                    queue.append(v)
                    in_queue[v] = True
    if dist[t] == INF:
        return None
    out = {}
    v = t
    while v != s:
        u, eid = parent[v]
        out[v] = (u, eid)
        v = u
    return out


def _decompose_unit_flow(network, adj, flow, s, t, count):
    # min-cost unit flow is acyclic and single-direction per edge, so
    # repeatedly walking unused flow arcs from s gives elementary paths
    out_arcs = [[] for _ in range(network.node_count)]
    for eid, f in enumerate(flow):
        if f == 0:
            continue
        e = network.edges[eid]
        a, b = (e.u, e.v) if f > 0 else (e.v, e.u)
        out_arcs[a].append((b, eid))
    for arcs in out_arcs:
        arcs.sort()
    paths = []
    for _ in range(count):
        path = [s]
        u = s
        while u != t:
            v, eid = out_arcs[u].pop(0)
            path.append(v)
            u = v
        paths.append(tuple(path))
    return paths
