"""Graph and demand data model, shortest paths, cuts, and topology generators.

Networks are simple undirected graphs with one capacity per edge.  Node ids
are dense integers 0..n-1, edge ids 0..m-1 (the position in the edge list).
Capacities are exact rationals, or the sentinel UNBOUNDED for gadget edges
that must never constrain a routing.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np


class _Unbounded:
    """Sentinel for edges with no capacity limit."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __deepcopy__(self, memo):
        return self

    def __copy__(self):
        return self


class _Excluded:
    """Sentinel weight for edges that a shortest-path query must not use."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EXCLUDED"


UNBOUNDED = _Unbounded()
EXCLUDED = _Excluded()

Capacity = Union[Fraction, _Unbounded]


def as_capacity(value) -> Capacity:
    """Coerce a user-supplied capacity to an exact rational or UNBOUNDED."""
    if value is UNBOUNDED:
        return UNBOUNDED
    cap = Fraction(value)
    if cap < 0:
        raise ValueError(f"capacity must be non-negative, got {value}")
    return cap


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    capacity: Capacity


@dataclass(frozen=True)
class Network:
    """Undirected capacitated graph. Immutable; safe to share across threads."""

    node_count: int
    edges: tuple[Edge, ...]
    node_labels: Optional[tuple[str, ...]] = None
    # adjacency[u] = tuple of (neighbor, edge_id); built once in __post_init__
    _adjacency: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        if self.node_labels is not None and len(self.node_labels) != self.node_count:
            raise ValueError("node_labels length must equal node_count")
        seen = set()
        adj = [[] for _ in range(self.node_count)]
        for eid, e in enumerate(self.edges):
            if not (0 <= e.u < self.node_count and 0 <= e.v < self.node_count):
                raise ValueError(f"edge {eid} endpoint out of range: ({e.u},{e.v})")
            if e.u == e.v:
                raise ValueError(f"edge {eid} is a self-loop at node {e.u}")
            key = (e.u, e.v) if e.u < e.v else (e.v, e.u)
            if key in seen:
                raise ValueError(f"parallel edge between {key[0]} and {key[1]}")
            seen.add(key)
            adj[e.u].append((e.v, eid))
            adj[e.v].append((e.u, eid))
        object.__setattr__(self, "_adjacency", tuple(tuple(sorted(a)) for a in adj))

    @staticmethod
    def from_edge_list(node_count, edge_list, node_labels=None) -> "Network":
        """Build from (u, v, capacity) triples; edge ids follow list order."""
        edges = tuple(Edge(u, v, as_capacity(c)) for u, v, c in edge_list)
        labels = tuple(node_labels) if node_labels is not None else None
        return Network(node_count, edges, labels)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self):
        return self._adjacency

    def degree(self, node: int) -> int:
        return len(self._adjacency[node])

    def max_degree(self) -> int:
        return max(len(a) for a in self._adjacency)

    def edge_id(self, u: int, v: int) -> Optional[int]:
        for nbr, eid in self._adjacency[u]:
            if nbr == v:
                return eid
        return None

    def capacities(self) -> tuple:
        return tuple(e.capacity for e in self.edges)

    def uniform_capacity(self) -> Optional[Capacity]:
        caps = {e.capacity for e in self.edges}
        return next(iter(caps)) if len(caps) == 1 else None

    def with_uniform_capacity(self, c) -> "Network":
        cap = as_capacity(c)
        edges = tuple(Edge(e.u, e.v, cap) for e in self.edges)
        return Network(self.node_count, edges, self.node_labels)

    def restricted_to(self, edge_ids: Iterable[int]) -> "Network":
        """Subgraph on the same node set; edge ids are renumbered densely."""
        keep = sorted(set(edge_ids))
        edges = tuple(self.edges[i] for i in keep)
        return Network(self.node_count, edges, self.node_labels)

    def is_connected(self) -> bool:
        if self.node_count == 1:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v, _ in self._adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.node_count

    def path_edge_ids(self, path: Sequence[int]) -> list[int]:
        """Edge ids along a node sequence; raises if an edge is missing."""
        ids = []
        for a, b in zip(path, path[1:]):
            eid = self.edge_id(a, b)
            if eid is None:
                raise ValueError(f"no edge between {a} and {b}")
            ids.append(eid)
        return ids


@dataclass(frozen=True)
class Demand:
    s: int
    t: int
    volume: Fraction


@dataclass(frozen=True)
class DemandSet:
    """Ordered-pair demands; (s,t) and (t,s) are distinct.

    Duplicate (s,t) pairs are rejected unless allow_duplicate_pairs is set;
    only the partition gadget family needs parallel demands, and demands are
    addressed by index everywhere so duplicates stay unambiguous.
    """

    demands: tuple[Demand, ...]
    allow_duplicate_pairs: bool = field(default=False, compare=False)

    def __post_init__(self):
        seen = set()
        for d in self.demands:
            if d.s == d.t:
                raise ValueError(f"demand with equal endpoints: {d.s}")
            if d.volume <= 0:
                raise ValueError(f"demand ({d.s},{d.t}) has non-positive volume")
            if (d.s, d.t) in seen and not self.allow_duplicate_pairs:
                raise ValueError(f"duplicate demand ({d.s},{d.t})")
            seen.add((d.s, d.t))

    @staticmethod
    def from_tuples(triples, allow_duplicate_pairs: bool = False) -> "DemandSet":
        return DemandSet(
            tuple(Demand(s, t, Fraction(v)) for s, t, v in triples),
            allow_duplicate_pairs,
        )

    @staticmethod
    def all_to_all(node_count: int, kappa=1) -> "DemandSet":
        """Uniform demands of volume kappa between every ordered node pair."""
        vol = Fraction(kappa)
        return DemandSet(
            tuple(
                Demand(s, t, vol)
                for s in range(node_count)
                for t in range(node_count)
                if s != t
            )
        )

    def __len__(self):
        return len(self.demands)

    def __iter__(self):
        return iter(self.demands)

    def uniform_volume(self) -> Optional[Fraction]:
        vols = {d.volume for d in self.demands}
        return next(iter(vols)) if len(vols) == 1 else None

    def endpoints(self) -> set[int]:
        out = set()
        for d in self.demands:
            out.add(d.s)
            out.add(d.t)
        return out


@dataclass(frozen=True)
class CutPartition:
    side_S: frozenset[int]
    side_S_bar: frozenset[int]
    cut_edges: frozenset[int]


def cut_of_partition(network: Network, side_S: Iterable[int]) -> CutPartition:
    """Cut induced by a node subset S: edges with exactly one endpoint in S."""
    S = frozenset(side_S)
    if not S or len(S) >= network.node_count:
        raise ValueError("S must be a nonempty proper subset of the nodes")
    if any(not (0 <= v < network.node_count) for v in S):
        raise ValueError("S contains an unknown node id")
    S_bar = frozenset(range(network.node_count)) - S
    cut = frozenset(
        eid for eid, e in enumerate(network.edges) if (e.u in S) != (e.v in S)
    )
    return CutPartition(S, S_bar, cut)


# ---------------------------------------------------------------------------
# topology generators


def generate_topology(kind: str, size: int, capacity=1) -> Network:
    """Canonical test topologies: complete n, grid a (row-major), star n, path n."""
    if size < 1:
        raise ValueError("size parameter must be >= 1")
    cap = as_capacity(capacity)
    if kind == "complete":
        edges = [(u, v, cap) for u in range(size) for v in range(u + 1, size)]
        return Network.from_edge_list(size, edges)
    if kind == "grid":
        a = size
        edges = []
        for r in range(a):
            for c in range(a):
                node = r * a + c
                if c + 1 < a:
                    edges.append((node, node + 1, cap))
                if r + 1 < a:
                    edges.append((node, node + a, cap))
        return Network.from_edge_list(a * a, edges)
    if kind == "star":
        # node 0 is the hub
        edges = [(0, v, cap) for v in range(1, size)]
        return Network.from_edge_list(size, edges)
    if kind == "path":
        edges = [(v, v + 1, cap) for v in range(size - 1)]
        return Network.from_edge_list(size, edges)
    raise ValueError(f"unknown topology kind {kind!r}")


def generate_adversarial(kind: str, **params):
    """Instance families on which greedy and shortest-path routing do badly.

    sp_trap(num_demands, x=3): two hub nodes u, v joined by one (x+1)-edge
    path of UNBOUNDED capacity and num_demands disjoint x-edge paths of unit
    capacity; demand i enters at a pendant s_i-u edge and leaves at v-t_i.
    Shortest-path routing needs 5|D| edges (at x=3) while 2|D|+x+1 suffice.

    partition_gadget(num_demands, c, x): 3 disjoint 2-edge u-v paths and
    num_demands disjoint x-edge u-v paths, all of capacity c; u->v demands
    with volumes summing to 3c (equal split by default).

    long_path_augment(base, demands, x): copy of the base network plus an
    x-edge UNBOUNDED path between the endpoints of every demand.

    Returns (Network, DemandSet).
    """
    if kind == "sp_trap":
        return _sp_trap(params["num_demands"], params.get("x", 3))
    if kind == "partition_gadget":
        return _partition_gadget(
            params["num_demands"], params["c"], params["x"], params.get("volumes")
        )
    if kind == "long_path_augment":
        return _long_path_augment(params["base"], params["demands"], params["x"])
    raise ValueError(f"unknown adversarial kind {kind!r}")


def _sp_trap(num_demands: int, x: int = 3):
    if num_demands < 1:
        raise ValueError("need at least one demand")
    if x < 2:
        raise ValueError("middle paths need at least 2 edges")
    edges = []
    u, v = 0, 1
    next_node = 2

    def chain(a, b, length, cap):
        nonlocal next_node
        prev = a
        for i in range(length - 1):
            edges.append((prev, next_node, cap))
            prev = next_node
            next_node += 1
        edges.append((prev, b, cap))

    chain(u, v, x + 1, UNBOUNDED)
    for _ in range(num_demands):
        chain(u, v, x, 1)
    sources, sinks = [], []
    for _ in range(num_demands):
        s = next_node
        next_node += 1
        edges.append((s, u, 1))
        sources.append(s)
    for _ in range(num_demands):
        t = next_node
        next_node += 1
        edges.append((v, t, 1))
        sinks.append(t)
    net = Network.from_edge_list(next_node, edges)
    dems = DemandSet.from_tuples([(s, t, 1) for s, t in zip(sources, sinks)])
    return net, dems


def _partition_gadget(num_demands: int, c, x: int, volumes=None):
    if num_demands < 1 or x < 1:
        raise ValueError("num_demands and x must be >= 1")
    cap = as_capacity(c)
    if cap is UNBOUNDED:
        raise ValueError("partition gadget needs a finite capacity")
    edges = []
    u, v = 0, 1
    next_node = 2

    def chain(length):
        nonlocal next_node
        prev = u
        for _ in range(length - 1):
            edges.append((prev, next_node, cap))
            prev = next_node
            next_node += 1
        edges.append((prev, v, cap))

    for _ in range(3):
        chain(2)
    for _ in range(num_demands):
        chain(x)
    net = Network.from_edge_list(next_node, edges)
    if volumes is None:
        volumes = [Fraction(3) * cap / num_demands] * num_demands
    if sum(Fraction(w) for w in volumes) != 3 * cap:
        raise ValueError("demand volumes must sum to 3c")
    # this family is inherently a multiset of parallel u->v demands
    dems = DemandSet.from_tuples(
        [(u, v, w) for w in volumes], allow_duplicate_pairs=True
    )
    return net, dems


def _long_path_augment(base: Network, demands: DemandSet, x: int):
    if x < 1:
        raise ValueError("x must be >= 1")
    edges = [(e.u, e.v, e.capacity) for e in base.edges]
    next_node = base.node_count
    for d in demands:
        prev = d.s
        for _ in range(x - 1):
            edges.append((prev, next_node, UNBOUNDED))
            prev = next_node
            next_node += 1
        edges.append((prev, d.t, UNBOUNDED))
    net = Network.from_edge_list(next_node, edges)
    return net, demands


# ---------------------------------------------------------------------------
# shortest paths and distances


def _dijkstra_dist(adjacency, weights, source, node_count):
    """Distance labels from source under per-edge weights (None = unusable)."""
    dist = [None] * node_count
    dist[source] = 0
    heap = [(0, source)]
    pop, push = heapq.heappop, heapq.heappush
    while heap:
        d, u = pop(heap)
        du = dist[u]
        if du is not None and d > du:
            continue
        for v, eid in adjacency[u]:
            w = weights[eid]
            if w is None:
                continue
            nd = d + w
            dv = dist[v]
            if dv is None or nd < dv:
                dist[v] = nd
                push(heap, (nd, v))
    return dist


def shortest_path(network: Network, edge_weights, s: int, t: int):
    """Minimum-weight elementary path from s to t, or None if unreachable.

    edge_weights maps edge id -> positive weight, or EXCLUDED to forbid the
    edge.  Ties between equal-weight paths break to the lexicographically
    smallest node sequence, which makes every caller reproducible.  Weight
    arithmetic uses whatever numeric type the caller supplies (exact for
    int/Fraction weights).
    """
    if s == t:
        raise ValueError("endpoints must differ")
    weights = [None if w is EXCLUDED else w for w in edge_weights]
    for w in weights:
        if w is not None and w <= 0:
            raise ValueError("edge weights must be positive")
    return _lex_shortest(network.adjacency, weights, s, t, network.node_count)


def _lex_shortest(adjacency, weights, s, t, node_count):
    """Lex-smallest min-weight path using one Dijkstra pass from t.

    With strictly positive weights the lex-minimal shortest path can be
    grown greedily from s: at node u take the smallest neighbor v with
    dist_t(u) == dist_t(v) + w(u,v).  Dijkstra assigned dist_t(u) by exactly
    that addition for some neighbor, so a witness edge always exists even
    under inexact (float) weight arithmetic.
    """
    dist_t = _dijkstra_dist(adjacency, weights, t, node_count)
    if dist_t[s] is None:
        return None
    path = [s]
    u = s
    while u != t:
        du = dist_t[u]
        for v, eid in adjacency[u]:  # adjacency is sorted by neighbor id
            w = weights[eid]
            if w is None:
                continue
            dv = dist_t[v]
            # strict decrease keeps the walk finite whatever the weights
            if dv is not None and dv < du and dv + w == du:
                u = v
                path.append(v)
                break
        else:  # pragma: no cover - impossible with positive weights
            raise AssertionError("shortest-path extraction lost the trail")
    return path


def all_pairs_distances(network: Network) -> np.ndarray:
    """Hop-distance matrix; np.inf marks disconnected pairs."""
    n = network.node_count
    out = np.full((n, n), np.inf)
    for s in range(n):
        for node, d in _bfs_levels(network, s):
            out[s, node] = d
    return out


def _bfs_levels(network: Network, source: int):
    dist = {source: 0}
    frontier = [source]
    yield source, 0
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v, _ in network.adjacency[u]:
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
                    yield v, d
        frontier = nxt


def ordered_distance_sum(network: Network) -> int:
    """Sum of hop distances over ordered node pairs (twice the Wiener index)."""
    total = 0
    reached = None
    for s in range(network.node_count):
        count = 0
        for _, d in _bfs_levels(network, s):
            total += d
            count += 1
        reached = count
        if count != network.node_count:
            raise ValueError("graph is disconnected")
    assert reached == network.node_count
    return total
