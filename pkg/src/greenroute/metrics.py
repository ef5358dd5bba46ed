"""Evaluation metrics: route lengths, stretch, fault tolerance, energy.

All quantities are exact rationals so reports serialize reproducibly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .flows import max_edge_disjoint_paths
from .graph import Network
from .routing import RoutingState


@dataclass(frozen=True)
class MetricsRow:
    avg_route_length: Fraction
    stretch: Optional[Fraction]
    avg_disjoint_paths: Fraction
    spared_pct: Fraction
    overprovisioning: Optional[Fraction]
    energy_mwh_per_year: Fraction


def avg_route_length(routing: RoutingState) -> Fraction:
    """Mean hop count over the assigned demand paths."""
    if not routing.paths or any(p is None for p in routing.paths):
        raise ValueError("routing must assign a path to every demand")
    total = sum(len(p) - 1 for p in routing.paths)
    return Fraction(total, len(routing.paths))


def stretch(new_routing: RoutingState, baseline_routing: RoutingState) -> Fraction:
    """Ratio of average route lengths, new over baseline (same demand set)."""
    if len(new_routing.paths) != len(baseline_routing.paths):
        raise ValueError("routings cover different demand sets")
    for p, q in zip(new_routing.paths, baseline_routing.paths):
        if p[0] != q[0] or p[-1] != q[-1]:
            raise ValueError("routings cover different demand sets")
    return avg_route_length(new_routing) / avg_route_length(baseline_routing)


def avg_disjoint_paths(network: Network) -> Fraction:
    """Mean over unordered node pairs of the max edge-disjoint path count.

    Pairs separated by a disconnection count 0, matching the convention that
    fault tolerance collapses when the graph splits.
    """
    n = network.node_count
    if n < 2:
        raise ValueError("need at least two nodes")
    total = 0
    pairs = 0
    for s, t in combinations(range(n), 2):
        total += max_edge_disjoint_paths(network, s, t)
        pairs += 1
    return Fraction(total, pairs)


def spared_and_of(edges_total: int, edges_kept: int, lam, lam1):
    """Spared-interface percentage and the overprovisioning factor."""
    lam = Fraction(lam)
    lam1 = Fraction(lam1)
    if lam1 <= 0:
        raise ValueError("smallest feasible ratio must be positive")
    if lam < lam1:
        raise ValueError("ratio below the feasibility threshold")
    spared = Fraction(100) * (edges_total - edges_kept) / edges_total
    return spared, lam / lam1


def energy_estimate(
    spared_edges,
    watts_per_interface=100,
    interfaces_per_edge=2,
    hours_per_year=8760,
) -> Fraction:
    """Yearly MWh saved by switching the spared interfaces off.

    The defaults (two 100 W interfaces per link, always-on) are explicit
    knobs: published per-linecard figures vary and real deployments meter
    differently, so the estimate is parametric rather than calibrated.
    """
    for v in (spared_edges, watts_per_interface, interfaces_per_edge,
              hours_per_year):
        if Fraction(v) < 0:
            raise ValueError("inputs must be non-negative")
    return (
        Fraction(spared_edges)
        * Fraction(interfaces_per_edge)
        * Fraction(watts_per_interface)
        * Fraction(hours_per_year)
        / 10**6
    )
