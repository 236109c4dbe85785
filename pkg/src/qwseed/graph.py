"""Undirected graphs behind a local degree/neighbor query interface, plus the cost ledger.

Graphs are stored in CSR form over ordered pairs (arcs): ``offsets[i]:offsets[i+1]``
indexes the arcs leaving node ``i`` and ``targets`` holds their heads. ``m`` counts
arcs, so an undirected edge contributes two.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from qwseed.errors import InputError, ParseError


@dataclass
class QueryLedger:
    degree_queries: int = 0
    neighbor_queries: int = 0
    qw_steps: int = 0
    qram_reflections: int = 0
    qram_build_items: int = 0
    classical_ops: int = 0
    rng_draws: int = 0

    def snapshot(self) -> "QueryLedger":
        return dataclasses.replace(self)

    def diff(self, earlier: "QueryLedger") -> "QueryLedger":
        return QueryLedger(
            **{k: getattr(self, k) - getattr(earlier, k) for k in self.as_dict()}
        )

    def absorb(self, other: "QueryLedger") -> None:
        for k, v in other.as_dict().items():
            setattr(self, k, getattr(self, k) + v)

    def as_dict(self) -> dict[str, int]:
        return dataclasses.asdict(self)


class ArcGraph:
    """CSR arc structure shared by simple graphs and the coin-space permutation graphs.

    ``partner[a]`` is the index of the reverse arc of ``a``; it must be an involution
    with ``targets[partner[a]] == source(a)``.
    """

    def __init__(self, offsets: np.ndarray, targets: np.ndarray, partner: np.ndarray):
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.targets = np.asarray(targets, dtype=np.int64)
        self.partner = np.asarray(partner, dtype=np.int64)
        self.offsets.flags.writeable = False
        self.targets.flags.writeable = False
        self.partner.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.targets)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.degrees)

    def degree(self, i: int) -> int:
        self._check_node(i)
        return int(self.offsets[i + 1] - self.offsets[i])

    def neighbor(self, i: int, k: int) -> int:
        """k-th neighbor of i, with 1-based k."""
        d = self.degree(i)
        if not 1 <= k <= d:
            raise InputError(f"neighbor index k={k} out of range [1, {d}] for node {i}")
        return int(self.targets[self.offsets[i] + k - 1])

    def neighbors(self, i: int) -> np.ndarray:
        self._check_node(i)
        return self.targets[self.offsets[i] : self.offsets[i + 1]]

    def arc_range(self, i: int) -> range:
        return range(int(self.offsets[i]), int(self.offsets[i + 1]))

    def arcs_of(self, nodes: Iterable[int]) -> np.ndarray:
        """Arc indices of E(S): all arcs starting in ``nodes``."""
        chunks = [np.arange(self.offsets[i], self.offsets[i + 1]) for i in nodes]
        return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)

    def _check_node(self, i: int) -> None:
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self.n):
            raise InputError(f"invalid node id {i!r} (n={self.n})")


class Graph(ArcGraph):
    """Simple undirected graph: no self-loops, no duplicate neighbors, sorted adjacency."""

    def __init__(self, n: int, adjacency: Sequence[Sequence[int]], name: str = ""):
        if n < 0 or len(adjacency) != n:
            raise InputError("adjacency must have one list per node")
        lists = [sorted(int(j) for j in nbrs) for nbrs in adjacency]
        for i, nbrs in enumerate(lists):
            for a, b in zip(nbrs, nbrs[1:]):
                if a == b:
                    raise InputError(f"duplicate neighbor {a} of node {i}")
            for j in nbrs:
                if not 0 <= j < n:
                    raise InputError(f"neighbor {j} of node {i} out of range")
                if j == i:
                    raise InputError(f"self-loop at node {i}")
        offsets = np.zeros(n + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(nb) for nb in lists])
        targets = np.fromiter((j for nb in lists for j in nb), dtype=np.int64, count=int(offsets[-1]))
        sources = np.repeat(np.arange(n), np.diff(offsets))
        # reverse arc of (i, j) lives in j's sorted list at the position of i
        partner = np.empty_like(targets)
        for a, (i, j) in enumerate(zip(sources, targets)):
            lo, hi = offsets[j], offsets[j + 1]
            pos = lo + np.searchsorted(targets[lo:hi], i)
            if pos >= hi or targets[pos] != i:
                raise InputError(f"edge ({i},{j}) present without ({j},{i})")
            partner[a] = pos
        super().__init__(offsets, targets, partner)
        self.name = name

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> "Graph":
        adj: list[list[int]] = [[] for _ in range(n)]
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise InputError(f"edge ({a},{b}) out of range for n={n}")
            adj[a].append(b)
            adj[b].append(a)
        return cls(n, adj, name=name)

    def undirected_edges(self) -> list[tuple[int, int]]:
        src = self.sources
        keep = src < self.targets
        return list(zip(src[keep].tolist(), self.targets[keep].tolist()))

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.n)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.targets, other.targets)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.targets.tobytes()))

    def __repr__(self) -> str:
        label = f"{self.name!r}, " if self.name else ""
        return f"Graph({label}n={self.n}, m={self.m})"


def degree_query(g: ArcGraph, ledger: QueryLedger | None, i: int) -> int:
    d = g.degree(i)
    if ledger is not None:
        ledger.degree_queries += 1
    return d


def neighbor_query(g: ArcGraph, ledger: QueryLedger | None, i: int, k: int) -> int:
    j = g.neighbor(i, k)
    if ledger is not None:
        ledger.neighbor_queries += 1
    return j


# -- families ----------------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise InputError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle{n}")


def complete(n: int) -> Graph:
    if n < 2:
        raise InputError("complete graph needs n >= 2")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"complete{n}")


def path(n: int) -> Graph:
    if n < 2:
        raise InputError("path needs n >= 2")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"path{n}")


def star(n: int) -> Graph:
    if n < 2:
        raise InputError("star needs n >= 2")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)], name=f"star{n}")


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, name="petersen")


def random_regular(n: int, d: int, seed: int, connected: bool = True) -> Graph:
    """Uniform random d-regular graph; resamples deterministically until connected."""
    import networkx as nx

    if d < 1 or d >= n or (n * d) % 2:
        raise InputError(f"no {d}-regular graph on {n} nodes")
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        h = nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
        if not connected or nx.is_connected(h):
            return Graph.from_edges(n, h.edges(), name=f"rr{d}_{n}_s{seed}")
    raise InputError(f"could not sample a connected {d}-regular graph on {n} nodes")


def disjoint_union(*graphs: Graph) -> Graph:
    if not graphs:
        raise InputError("disjoint_union needs at least one graph")
    adj: list[list[int]] = []
    base = 0
    for h in graphs:
        adj.extend([[j + base for j in nb] for nb in h.adjacency()])
        base += h.n
    return Graph(base, adj, name="+".join(h.name for h in graphs))


def build_family(kind: str, *params, **kwargs) -> Graph:
    builders = {
        "cycle": cycle,
        "complete": complete,
        "path": path,
        "star": star,
        "petersen": petersen,
        "random_regular": random_regular,
        "disjoint_union": disjoint_union,
    }
    if kind not in builders:
        raise InputError(f"unknown graph family {kind!r}; choose from {sorted(builders)}")
    try:
        return builders[kind](*params, **kwargs)
    except TypeError as exc:
        raise InputError(f"bad parameters for {kind}: {exc}") from exc


# -- edge-list text format ----------------------------------------------------


def load_edge_list(text: str) -> Graph:
    lines = [(no, ln.split()) for no, ln in enumerate(text.splitlines(), start=1) if ln.strip()]
    if not lines:
        raise ParseError("empty input", 1)
    no, head = lines[0]
    try:
        n, u = (int(x) for x in head)
    except ValueError:
        raise ParseError("header must be 'n u'", no) from None
    if n < 0 or u < 0:
        raise ParseError("negative counts in header", no)
    if len(lines) - 1 != u:
        raise ParseError(f"expected {u} edge lines, found {len(lines) - 1}", no)
    seen: set[tuple[int, int]] = set()
    edges = []
    for no, parts in lines[1:]:
        try:
            a, b = (int(x) for x in parts)
        except ValueError:
            raise ParseError("edge line must be 'a b'", no) from None
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"node id out of range in edge ({a},{b})", no)
        if a == b:
            raise ParseError(f"self-loop at node {a}", no)
        key = (min(a, b), max(a, b))
        if key in seen:
            raise ParseError(f"duplicate edge {key}", no)
        seen.add(key)
        edges.append(key)
    return Graph.from_edges(n, edges)


def save_edge_list(g: Graph) -> str:
    edges = g.undirected_edges()
    body = "".join(f"{a} {b}\n" for a, b in sorted(edges))
    return f"{g.n} {len(edges)}\n" + body
