"""Edge-removal heuristics for minimizing the number of active links.

Both heuristics start from the full network with a witness routing and keep
trying to drop edges, recomputing a witness after each removal.  Removing an
edge and failing to re-route marks it tried; any successful removal clears
the tried set (loads change, previously hopeless edges may become droppable).
The loop ends when every kept edge has been tried, so the result is locally
minimal for the given retry budget.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graph import UNBOUNDED, DemandSet, Network
from .metrics import avg_disjoint_paths, avg_route_length, stretch
from .routing import (
    DEFAULT_RETRIES,
    INFEASIBLE_BY_HEURISTIC,
    RoutingState,
    route_demands,
)


@dataclass(frozen=True)
class Provenance:
    heuristic: str
    seed: int
    lam: Optional[Fraction] = None  # capacity/demand ratio when uniform
    kappa: Optional[Fraction] = None


@dataclass(frozen=True)
class SolutionSubgraph:
    """Kept edge set with a witness routing that certifies feasibility."""

    kept_edges: frozenset[int]
    witness: RoutingState
    provenance: Provenance
    # every member was tried for removal after the last successful removal
    unremovable: frozenset[int] = frozenset()

    @property
    def edge_count(self) -> int:
        return len(self.kept_edges)


def _provenance(network, demands, name, seed):
    cap = network.uniform_capacity()
    kappa = demands.uniform_volume()
    lam = None
    if cap is not None and cap is not UNBOUNDED and kappa:
        lam = Fraction(cap) / kappa
    return Provenance(name, seed, lam, kappa)


def _removal_key(capacity, residual, eid):
    # least-loaded first: smallest capacity/residual; fully-loaded edges
    # (residual 0) go last; UNBOUNDED edges look fresh (ratio ~1)
    if residual is UNBOUNDED or capacity is UNBOUNDED:
        return (0, Fraction(1), eid)
    if residual == 0:
        return (1, Fraction(0), eid)
    return (0, capacity / residual, eid)


def _removal_loop(network, demands, seed, retries, pick, name, exact_weights):
    witness = route_demands(
        network, demands, seed, retries, exact_weights=exact_weights
    )
    if witness is INFEASIBLE_BY_HEURISTIC:
        return INFEASIBLE_BY_HEURISTIC
    kept = set(range(network.edge_count))
    tried = set()
    while True:
        candidates = kept - tried
        if not candidates:
            break
        eid = pick(candidates, witness)
        attempt = route_demands(
            network,
            demands,
            seed,
            retries,
            allowed_edges=kept - {eid},
            exact_weights=exact_weights,
        )
        if attempt is INFEASIBLE_BY_HEURISTIC:
            tried.add(eid)
        else:
            kept.discard(eid)
            witness = attempt
            tried.clear()
    return SolutionSubgraph(
        frozenset(kept),
        witness,
        _provenance(network, demands, name, seed),
        unremovable=frozenset(kept),
    )


def lle_heuristic(
    network: Network,
    demands: DemandSet,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
    exact_weights: bool = False,
):
    """Remove, in priority, the least loaded edges (smallest capacity/residual)."""

    def pick(candidates, witness):
        return min(
            candidates,
            key=lambda eid: _removal_key(
                network.edges[eid].capacity, witness.residual[eid], eid
            ),
        )

    return _removal_loop(network, demands, seed, retries, pick, "lle", exact_weights)


def random_heuristic(
    network: Network,
    demands: DemandSet,
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
    exact_weights: bool = False,
):
    """Remove uniformly random edges; the comparison baseline for lle."""
    rng = random.Random(seed)

    def pick(candidates, witness):
        return rng.choice(sorted(candidates))

    return _removal_loop(
        network, demands, seed, retries, pick, "random", exact_weights
    )


HEURISTICS = {"lle": lle_heuristic, "random": random_heuristic}


@dataclass(frozen=True)
class SweepRow:
    lam: Fraction
    heuristic: str
    seed: Optional[int]  # None marks the best-over-seeds row
    edges_total: int
    edges_kept: Optional[int]
    spared_pct: Optional[Fraction]
    feasible: bool
    stretch: Optional[Fraction]
    avg_disjoint_paths: Optional[Fraction]
    runtime_s: float


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def best_rows(self):
        return [r for r in self.rows if r.seed is None]


def sweep(
    network: Network,
    kappa,
    lambdas,
    heuristic_id: str = "lle",
    seeds=(0,),
    retries: int = DEFAULT_RETRIES,
    compute_metrics: bool = True,
) -> SweepReport:
    """Run a heuristic over capacity/demand ratios; one row per (ratio, seed).

    Capacities are set uniformly to ratio * kappa and the demand set is
    all-to-all with volume kappa.  A best-over-seeds row (seed None) is
    appended per ratio.  Infeasible runs are flagged, not errors.
    """
    heuristic = HEURISTICS[heuristic_id]
    kappa = Fraction(kappa)
    demands = DemandSet.all_to_all(network.node_count, kappa)
    m = network.edge_count
    rows = []
    for lam in sorted(Fraction(l) for l in lambdas):
        if lam <= 0:
            raise ValueError("capacity/demand ratios must be positive")
        capacitated = network.with_uniform_capacity(lam * kappa)
        best = None
        for seed in seeds:
            t0 = time.perf_counter()
            sol = heuristic(capacitated, demands, seed=seed, retries=retries)
            dt = time.perf_counter() - t0
            if sol is INFEASIBLE_BY_HEURISTIC:
                rows.append(
                    SweepRow(lam, heuristic_id, seed, m, None, None, False,
                             None, None, dt)
                )
                continue
            stretch_val = disjoint = None
            if compute_metrics:
                baseline = route_demands(capacitated, demands, seed, retries)
                if baseline is not INFEASIBLE_BY_HEURISTIC:
                    stretch_val = stretch(sol.witness, baseline)
                disjoint = avg_disjoint_paths(
                    capacitated.restricted_to(sol.kept_edges)
                )
            row = SweepRow(
                lam, heuristic_id, seed, m, len(sol.kept_edges),
                Fraction(100) * (m - len(sol.kept_edges)) / m, True,
                stretch_val, disjoint, dt,
            )
            rows.append(row)
            if best is None or row.edges_kept < best.edges_kept:
                best = row
        if best is not None:
            rows.append(
                SweepRow(lam, heuristic_id, None, m, best.edges_kept,
                         best.spared_pct, True, best.stretch,
                         best.avg_disjoint_paths, best.runtime_s)
            )
    return SweepReport(tuple(rows))


def find_lambda_threshold(
    network: Network,
    kappa,
    target: str = "feasible",
    heuristic_id: str = "lle",
    seeds=(0,),
    retries: int = DEFAULT_RETRIES,
    lambda_max: int = None,
) -> int:
    """Smallest integer ratio at which the target holds, by binary search.

    target "feasible": the routing heuristic succeeds on the full network.
    target "tree": the removal heuristic reaches a spanning tree (n-1 edges).
    Feasibility is monotone in capacity, which justifies the bisection; the
    tree target inherits the assumption (heuristic noise is possible there).
    """
    if not network.is_connected():
        raise ValueError("network must be connected")
    if target not in ("feasible", "tree"):
        raise ValueError(f"unknown target {target!r}")
    kappa = Fraction(kappa)
    n = network.node_count
    if lambda_max is None:
        # a path-shaped spanning tree always carries the all-to-all demands
        lambda_max = n * n

    def probe(lam: int) -> bool:
        capacitated = network.with_uniform_capacity(lam * kappa)
        demands = DemandSet.all_to_all(n, kappa)
        for seed in seeds:
            if target == "feasible":
                got = route_demands(capacitated, demands, seed, retries)
                if got is not INFEASIBLE_BY_HEURISTIC:
                    return True
            else:
                sol = HEURISTICS[heuristic_id](
                    capacitated, demands, seed=seed, retries=retries
                )
                if sol is not INFEASIBLE_BY_HEURISTIC and sol.edge_count == n - 1:
                    return True
        return False

    lo, hi = 1, 1
    while not probe(hi):
        lo = hi + 1
        hi *= 2
        if hi > lambda_max:
            raise ValueError(f"target {target!r} not reached below {lambda_max}")
    while lo < hi:
        mid = (lo + hi) // 2
        if probe(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo
