"""Breadth-first edge search: grow a classical seed of M arcs around a start node."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from qwseed.constants import DEFAULT, Constants
from qwseed.errors import InputError
from qwseed.graph import ArcGraph, QueryLedger, degree_query, neighbor_query

log = logging.getLogger(__name__)


@dataclass
class SeedSet:
    nodes: list[int]
    edges: list[tuple[int, int]]
    total_degree: int
    exhausted: bool = False
    # arc indices of ``edges`` in the graph's CSR layout
    arc_ids: list[int] = field(default_factory=list)
    # how many neighbors of the last dequeued node were scanned before stopping
    last_scanned: int = 0


def bfs_edge_search(
    g: ArcGraph, ledger: QueryLedger | None, i: int, M: int, trace: bool = False
) -> SeedSet:
    """Collect the first M arcs found by a breadth-first scan from ``i``.

    An arc (u, v) is kept the first time it is scanned with v not yet dequeued,
    so each undirected edge contributes at most one arc. The enqueue guard
    checks both the dequeued set and the queue, which keeps every node from
    being processed twice. If the component runs out first, the result is
    flagged ``exhausted``.
    """
    if M < 1:
        raise InputError("M must be a positive integer")
    g._check_node(i)
    S: list[int] = []
    in_S: set[int] = set()
    E: list[tuple[int, int]] = []
    arc_ids: list[int] = []
    B = deque([i])
    in_B = {i}
    total_degree = 0
    while B:
        u = B.popleft()
        in_B.discard(u)
        S.append(u)
        in_S.add(u)
        d = degree_query(g, ledger, u)
        total_degree += d
        if trace:
            log.debug("dequeue %d (degree %d)", u, d)
        for k in range(1, d + 1):
            v = neighbor_query(g, ledger, u, k)
            if v not in in_S:
                E.append((u, v))
                arc_ids.append(int(g.offsets[u]) + k - 1)
                if trace:
                    log.debug("add arc (%d, %d), |E| = %d", u, v, len(E))
                if len(E) == M:
                    return SeedSet(S, E, total_degree, False, arc_ids, last_scanned=k)
            if v not in in_S and v not in in_B:
                B.append(v)
                in_B.add(v)
    return SeedSet(S, E, total_degree, True, arc_ids, last_scanned=g.degree(S[-1]))


def seed_arcs(g: ArcGraph, seed: SeedSet, ledger: QueryLedger | None) -> np.ndarray:
    """Arc indices of E(S) for the seed's node set.

    Every dequeued node except possibly the last had its whole neighbor list
    scanned; the remaining neighbors of the last one are queried here.
    """
    if seed.nodes:
        last = seed.nodes[-1]
        for k in range(seed.last_scanned + 1, g.degree(last) + 1):
            neighbor_query(g, ledger, last, k)
    return g.arcs_of(seed.nodes)


def seed_state_size_schedule(
    M: int,
    gamma: float,
    D: int | None = None,
    constants: Constants = DEFAULT,
) -> int:
    """Target total degree d(S) for doubling round M.

    Walk-step mode: ceil(c * M^(1/3) * gamma^(-1/3)).
    Degree-bound mode (D given): ceil(c * M^(1/3) * D^(1/3) * gamma^(-e)) with
    e = ``constants.degree_bound_gamma_exp``.
    """
    if M < 1:
        raise InputError("M must be >= 1")
    if not 0 < gamma <= 1:
        raise InputError("gamma must lie in (0, 1]")
    if D is None:
        x = constants.seed_c * (M / gamma) ** (1.0 / 3.0)
    else:
        if D < 1:
            raise InputError("degree bound must be >= 1")
        x = constants.seed_c * (M * D) ** (1.0 / 3.0) * gamma ** (-constants.degree_bound_gamma_exp)
    # cube roots of perfect cubes come back a few ulps high
    return max(1, math.ceil(x * (1 - 1e-12)))
