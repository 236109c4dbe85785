"""Brute-force classical reference: walk matrix, stationary law, spectrum, components.

Everything on the quantum side is checked against this module, so it favours
dense exact linear algebra over speed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from qwseed.errors import InputError
from qwseed.graph import ArcGraph, Graph


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray  # descending
    spectral_gap: float
    stationary: np.ndarray
    is_bipartite: bool
    component_id: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.component_id.max()) + 1 if len(self.component_id) else 0


def transition_matrix(g: ArcGraph) -> np.ndarray:
    """P(i, j) = (number of arcs i -> j) / d(i); multi-arcs and loops count with multiplicity."""
    P = np.zeros((g.n, g.n))
    np.add.at(P, (g.sources, g.targets), 1.0)
    deg = g.degrees
    if np.any(deg == 0):
        raise InputError(f"isolated node {int(np.argmin(deg))}: random walk undefined")
    return P / deg[:, None]


def components(g: ArcGraph) -> np.ndarray:
    label = np.full(g.n, -1, dtype=np.int64)
    c = 0
    for root in range(g.n):
        if label[root] >= 0:
            continue
        label[root] = c
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in g.neighbors(i):
                if label[j] < 0:
                    label[j] = c
                    queue.append(j)
        c += 1
    return label


def is_bipartite(g: ArcGraph) -> bool:
    color = np.full(g.n, -1, dtype=np.int64)
    for root in range(g.n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in g.neighbors(i):
                if color[j] < 0:
                    color[j] = 1 - color[i]
                    queue.append(j)
                elif color[j] == color[i]:
                    return False
    return True


def analyze(g: ArcGraph) -> SpectralReport:
    if g.n == 0:
        raise InputError("empty graph")
    deg = g.degrees.astype(float)
    if np.any(deg == 0):
        raise InputError(f"isolated node {int(np.argmin(deg))}: random walk undefined")
    A = np.zeros((g.n, g.n))
    np.add.at(A, (g.sources, g.targets), 1.0)
    # D^{1/2} P D^{-1/2} = D^{-1/2} A D^{-1/2} is symmetric with the spectrum of P
    inv_sqrt = 1.0 / np.sqrt(deg)
    sym = A * inv_sqrt[:, None] * inv_sqrt[None, :]
    lam = np.sort(np.linalg.eigvalsh(sym))[::-1]
    if g.n == 1:
        gap = 1.0
    else:
        gap = 1.0 - max(abs(lam[1]), abs(lam[-1]))
    return SpectralReport(
        eigenvalues=lam,
        spectral_gap=float(gap),
        stationary=deg / deg.sum(),
        is_bipartite=is_bipartite(g),
        component_id=components(g),
    )


@dataclass(frozen=True)
class Component:
    nodes: np.ndarray  # sorted original ids
    subgraph: Graph
    index_of: dict[int, int]


def component_of(g: Graph, s: int) -> Component:
    g._check_node(s)
    seen = {s}
    queue = deque([s])
    while queue:
        i = queue.popleft()
        for j in g.neighbors(i).tolist():
            if j not in seen:
                seen.add(j)
                queue.append(j)
    nodes = np.array(sorted(seen), dtype=np.int64)
    index_of = {int(v): k for k, v in enumerate(nodes)}
    adj = [[index_of[int(j)] for j in g.neighbors(int(v))] for v in nodes]
    return Component(nodes=nodes, subgraph=Graph(len(nodes), adj, name=f"{g.name}[{s}]"), index_of=index_of)
