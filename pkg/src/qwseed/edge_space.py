"""States over the arc space: one complex amplitude per ordered pair (i, j)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from qwseed.constants import DEFAULT
from qwseed.errors import InputError
from qwseed.graph import ArcGraph


@dataclass(frozen=True, eq=False)
class EdgeState:
    space: ArcGraph
    amps: np.ndarray

    def __post_init__(self):
        if self.amps.shape != (self.space.m,):
            raise InputError(f"amplitude vector has shape {self.amps.shape}, expected ({self.space.m},)")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "EdgeState":
        nrm = self.norm
        if nrm == 0:
            raise InputError("cannot normalize the zero vector")
        return EdgeState(self.space, self.amps / nrm)

    def is_normalized(self, tol: float = DEFAULT.norm_tol) -> bool:
        return abs(self.norm - 1.0) <= tol

    def index(self, i: int, j: int) -> int:
        return arc_index(self.space, i, j)

    def __getitem__(self, arc: tuple[int, int]) -> complex:
        return complex(self.amps[self.index(*arc)])


def arc_index(space: ArcGraph, i: int, j: int) -> int:
    """Dense index of (i, j); for multigraphs this is the first matching arc."""
    nbrs = space.neighbors(i)
    hits = np.flatnonzero(nbrs == j)
    if not len(hits):
        raise InputError(f"({i},{j}) is not an arc")
    return int(space.offsets[i] + hits[0])


def uniform_over_arcs(space: ArcGraph, arcs: Iterable[int]) -> EdgeState:
    arcs = np.unique(np.asarray(list(arcs), dtype=np.int64))
    if not len(arcs):
        raise InputError("empty arc set")
    amps = np.zeros(space.m, dtype=complex)
    amps[arcs] = 1.0 / np.sqrt(len(arcs))
    return EdgeState(space, amps)


def make_pi(g: ArcGraph) -> EdgeState:
    if g.m == 0:
        raise InputError("graph has no arcs")
    return EdgeState(g, np.full(g.m, 1.0 / np.sqrt(g.m), dtype=complex))


def make_seed_state(g: ArcGraph, S: Iterable[int]) -> EdgeState:
    """|S> = d(S)^(-1/2) * sum over arcs leaving S."""
    nodes = sorted(set(int(i) for i in S))
    if not nodes:
        raise InputError("seed node set is empty")
    for i in nodes:
        g._check_node(i)
    arcs = g.arcs_of(nodes)
    if not len(arcs):
        raise InputError("seed nodes have no arcs")
    return uniform_over_arcs(g, arcs)


def component_pi(g: ArcGraph, nodes: Iterable[int]) -> EdgeState:
    """Uniform superposition over the arcs of a (component) node set."""
    return make_seed_state(g, nodes)


def _same_space(a: EdgeState, b: EdgeState) -> None:
    if a.space is not b.space and not (
        a.space.m == b.space.m and np.array_equal(a.space.targets, b.space.targets)
        and np.array_equal(a.space.offsets, b.space.offsets)
    ):
        raise InputError("states live on different arc spaces")


def inner_product(a: EdgeState, b: EdgeState) -> complex:
    _same_space(a, b)
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: EdgeState, b: EdgeState) -> float:
    """|<a|b>| for unit vectors, clipped into [0, 1]."""
    return float(min(1.0, abs(inner_product(a, b))))


def distance(a: EdgeState, b: EdgeState) -> float:
    _same_space(a, b)
    return float(np.linalg.norm(a.amps - b.amps))


def dump_state(state: EdgeState, cutoff: float = 0.0) -> str:
    """One line per arc: 'i j re im'."""
    src = state.space.sources
    tgt = state.space.targets
    lines = []
    for a, z in enumerate(state.amps):
        if abs(z) > cutoff or cutoff == 0.0:
            lines.append(f"{src[a]} {tgt[a]} {z.real:.17g} {z.imag:.17g}\n")
    return "".join(lines)
