"""Fault-tolerant spanners: subgraphs keeping gamma edge-disjoint paths per
ordered node pair within a pooled distance budget gamma*(alpha*d + beta).

The integer program is exported for external solvers; tiny instances can be
solved in-repo by subset enumeration, and any candidate solution (including
externally produced ones) can be validated path by path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Optional

from .exact import _lp_number, _wrap_terms
from .flows import max_edge_disjoint_paths, min_hop_disjoint_paths
from .graph import Network, all_pairs_distances


class _Sentinel:
    def __init__(self, name):
        self._name = name

    def __bool__(self):
        return False

    def __repr__(self):
        return self._name


INFEASIBLE = _Sentinel("INFEASIBLE")
BUDGET_EXCEEDED = _Sentinel("BUDGET_EXCEEDED")


@dataclass(frozen=True)
class SpannerParams:
    alpha: Fraction
    beta: Fraction
    gamma: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.alpha < 1:
            raise ValueError("multiplicative stretch must be >= 1")
        if self.beta < 0:
            raise ValueError("additive stretch must be >= 0")
        if not isinstance(self.gamma, int) or self.gamma < 1:
            raise ValueError("need an integer number of disjoint paths >= 1")

    def budget(self, distance: int) -> Fraction:
        """Pooled hop budget for the whole path family of one pair."""
        return self.gamma * (self.alpha * distance + self.beta)


@dataclass(frozen=True)
class SpannerSolution:
    kept_edges: frozenset[int]
    # families[(s, t)] = tuple of node-sequence paths, pairwise edge-disjoint
    families: dict
    spared_pct: Optional[Fraction] = None
    mean_stretch: Optional[Fraction] = None


@dataclass(frozen=True)
class SpannerExport:
    text: str
    # ordered pairs whose full-graph disjoint-path count is already below
    # gamma: the model cannot be feasible when this is nonempty
    infeasible_pairs: tuple


def _ordered_pairs(n):
    return [(s, t) for s in range(n) for t in range(n) if s != t]


def check_spanner_support(network: Network, gamma: int):
    """Ordered pairs that cannot reach gamma disjoint paths even in full G."""
    bad = []
    for s, t in combinations(range(network.node_count), 2):
        have = max_edge_disjoint_paths(network, s, t, limit=gamma)
        if have < gamma:
            bad.append((s, t, have))
            bad.append((t, s, have))
    return sorted(bad)


def export_spanner_lp(network: Network, params: SpannerParams) -> SpannerExport:
    """Integer program for the minimum spanner with disjoint-path demands.

    Same variable scheme as the routing export; flow variables are binary
    here because each (pair, edge, direction) carries at most one of the
    gamma unit paths.  The distance row pools the whole family's hops.
    """
    n = network.node_count
    dist = all_pairs_distances(network)
    pairs = _ordered_pairs(n)
    for s, t in pairs:
        if dist[s, t] == float("inf"):
            raise ValueError(f"pair ({s},{t}) is disconnected")
    gamma = params.gamma
    lines = [
        "\\ minimum fault-tolerant spanner model",
        f"\\ disjoint paths per pair: {gamma}; "
        f"pooled budget {_lp_number(params.alpha)}*d + {_lp_number(params.beta)}",
        "Minimize",
    ]
    lines += _wrap_terms(
        "obj", [f"x_{eid}" for eid in range(network.edge_count)], ""
    )
    lines.append("Subject To")
    for did, (s, t) in enumerate(pairs):
        for node in range(n):
            terms = []
            for v, eid in network.adjacency[node]:
                into = "vu" if network.edges[eid].u == node else "uv"
                out = "uv" if network.edges[eid].u == node else "vu"
                terms.append(f"f_{eid}_{into}_{did}")
                terms.append(f"-f_{eid}_{out}_{did}")
            rhs = -gamma if node == s else (gamma if node == t else 0)
            lines += _wrap_terms(f"flow_{did}_{node}", terms, f"= {rhs}")
    for did in range(len(pairs)):
        for eid in range(network.edge_count):
            lines += _wrap_terms(
                f"use_{did}_{eid}",
                [f"f_{eid}_uv_{did}", f"f_{eid}_vu_{did}", f"-x_{eid}"],
                "<= 0",
            )
    for did, (s, t) in enumerate(pairs):
        terms = []
        for eid in range(network.edge_count):
            terms.append(f"f_{eid}_uv_{did}")
            terms.append(f"f_{eid}_vu_{did}")
        budget = params.budget(int(dist[s, t]))
        lines += _wrap_terms(f"dist_{did}", terms, f"<= {_lp_number(budget)}")
    lines.append("Binary")
    for eid in range(network.edge_count):
        lines.append(f" x_{eid}")
    for did in range(len(pairs)):
        for eid in range(network.edge_count):
            lines.append(f" f_{eid}_uv_{did}")
            lines.append(f" f_{eid}_vu_{did}")
    lines.append("End")
    text = "\n".join(lines) + "\n"
    return SpannerExport(text, tuple(check_spanner_support(network, gamma)))


def _family_for_pair(network, kept, s, t, gamma, budget):
    """Min-total-hop disjoint family within kept edges, if within budget."""
    paths = min_hop_disjoint_paths(network, s, t, gamma, allowed=kept)
    if paths is None:
        return None
    total = sum(len(p) - 1 for p in paths)
    if total > budget:
        return None
    return tuple(paths)


def exact_spanner_small(network: Network, params: SpannerParams,
                        budget: int = 200_000):
    """Optimal spanner by subset enumeration, smallest edge sets first.

    Intended for instances up to a dozen edges; each candidate subset is
    checked pair by pair with a unit-capacity disjoint-path search plus the
    pooled distance test.  Returns the budget sentinel when the enumeration
    allowance runs out.
    """
    n = network.node_count
    m = network.edge_count
    dist = all_pairs_distances(network)
    pairs = [(s, t) for s, t in combinations(range(n), 2)]
    for s, t in pairs:
        if dist[s, t] == float("inf"):
            return INFEASIBLE
    if check_spanner_support(network, params.gamma):
        return INFEASIBLE
    gamma = params.gamma
    # every node must keep degree >= gamma; also stay spanning-connected
    lower = max(n - 1, ceil(gamma * n / 2))
    spent = 0
    for k in range(lower, m + 1):
        for subset in combinations(range(m), k):
            spent += 1
            if spent > budget:
                return BUDGET_EXCEEDED
            kept = frozenset(subset)
            degree = [0] * n
            for eid in kept:
                degree[network.edges[eid].u] += 1
                degree[network.edges[eid].v] += 1
            if min(degree) < gamma:
                continue
            families = {}
            ok = True
            for s, t in pairs:
                fam = _family_for_pair(
                    network, kept, s, t, gamma, params.budget(int(dist[s, t]))
                )
                if fam is None:
                    ok = False
                    break
                families[(s, t)] = fam
                families[(t, s)] = tuple(tuple(reversed(p)) for p in fam)
            if ok:
                sol = SpannerSolution(kept, families)
                return _with_metrics(network, sol, params)
    return INFEASIBLE


def _with_metrics(network, solution, params):
    spared = Fraction(100) * (network.edge_count - len(solution.kept_edges)) \
        / network.edge_count
    stretch = mean_family_stretch(network, solution, params)
    return SpannerSolution(solution.kept_edges, dict(solution.families),
                           spared, stretch)


def mean_family_stretch(network: Network, solution: SpannerSolution,
                        params: SpannerParams) -> Optional[Fraction]:
    """Mean over pairs of family hop totals relative to the full graph.

    The baseline is the minimum-total-hop family of gamma disjoint paths in
    the full network (found by successive shortest augmentations), matching
    how spanner quality is reported against an unconstrained routing.
    """
    ratios = []
    for (s, t), fam in sorted(solution.families.items()):
        base = min_hop_disjoint_paths(network, s, t, params.gamma)
        if base is None:
            return None
        base_total = sum(len(p) - 1 for p in base)
        fam_total = sum(len(p) - 1 for p in fam)
        ratios.append(Fraction(fam_total, base_total))
    if not ratios:
        return None
    return sum(ratios) / len(ratios)


def validate_spanner(network: Network, solution: SpannerSolution,
                     params: SpannerParams,
                     require_all_pairs: bool = True) -> list[str]:
    """All violations of a candidate solution; empty list means valid.

    Checks each family for path count, elementarity, kept-edge membership,
    pairwise edge-disjointness, and the pooled distance budget against
    full-graph distances.  require_all_pairs also demands every ordered
    pair be covered.
    """
    violations = []
    dist = all_pairs_distances(network)
    kept = solution.kept_edges
    for eid in kept:
        if not (0 <= eid < network.edge_count):
            violations.append(f"kept edge {eid} does not exist")
    if require_all_pairs:
        for s, t in _ordered_pairs(network.node_count):
            if (s, t) not in solution.families:
                violations.append(f"pair ({s},{t}): no path family")
    for (s, t), fam in sorted(solution.families.items()):
        label = f"pair ({s},{t})"
        if len(fam) != params.gamma:
            violations.append(
                f"{label}: {len(fam)} paths, expected {params.gamma}"
            )
            continue
        used_edges = []
        bad = False
        for p in fam:
            if p[0] != s or p[-1] != t:
                violations.append(f"{label}: path endpoints {p[0]}..{p[-1]}")
                bad = True
                break
            if len(set(p)) != len(p):
                violations.append(f"{label}: path revisits a node")
                bad = True
                break
            try:
                eids = network.path_edge_ids(p)
            except ValueError as exc:
                violations.append(f"{label}: {exc}")
                bad = True
                break
            missing = [e for e in eids if e not in kept]
            if missing:
                violations.append(
                    f"{label}: path uses dropped edge {missing[0]}"
                )
                bad = True
                break
            used_edges.append(set(eids))
        if bad:
            continue
        for i, j in combinations(range(len(used_edges)), 2):
            shared = used_edges[i] & used_edges[j]
            if shared:
                violations.append(
                    f"{label}: paths {i} and {j} share edge {sorted(shared)[0]}"
                )
        total = sum(len(p) - 1 for p in fam)
        budget = params.budget(int(dist[s, t]))
        if total > budget:
            violations.append(
                f"{label}: family hop total {total} exceeds budget {budget}"
            )
    return violations


# ---------------------------------------------------------------------------
# solution files (plain text, used by the command-line validator)


def write_spanner_solution(network: Network, solution: SpannerSolution,
                           params: SpannerParams) -> str:
    lines = [
        "SPANNER",
        f"ALPHA {_lp_number(params.alpha)} BETA {_lp_number(params.beta)} "
        f"GAMMA {params.gamma}",
        f"EDGES {len(solution.kept_edges)}",
    ]
    for eid in sorted(solution.kept_edges):
        e = network.edges[eid]
        lines.append(f"{e.u} {e.v}")
    fams = sorted(solution.families.items())
    lines.append(f"PAIRS {len(fams)}")
    for (s, t), fam in fams:
        paths = " ; ".join(" ".join(str(v) for v in p) for p in fam)
        lines.append(f"{s} {t} : {paths}")
    return "\n".join(lines) + "\n"


def parse_spanner_solution(network: Network, text: str):
    """Read back a solution file; returns (SpannerSolution, SpannerParams)."""
    lines = [l.strip() for l in text.splitlines()
             if l.strip() and not l.startswith("#")]
    if not lines or lines[0] != "SPANNER":
        raise ValueError("not a spanner solution file")
    header = lines[1].split()
    alpha, beta, gamma = Fraction(header[1]), Fraction(header[3]), int(header[5])
    params = SpannerParams(alpha, beta, gamma)
    edge_count = int(lines[2].split()[1])
    kept = set()
    pos = 3
    for _ in range(edge_count):
        u, v = map(int, lines[pos].split())
        eid = network.edge_id(u, v)
        if eid is None:
            raise ValueError(f"solution keeps unknown edge {u}-{v}")
        kept.add(eid)
        pos += 1
    pair_count = int(lines[pos].split()[1])
    pos += 1
    families = {}
    for _ in range(pair_count):
        head, _, tail = lines[pos].partition(":")
        s, t = map(int, head.split())
        fam = tuple(
            tuple(int(v) for v in chunk.split())
            for chunk in tail.split(";")
        )
        families[(s, t)] = fam
        pos += 1
    return SpannerSolution(frozenset(kept), families), params
