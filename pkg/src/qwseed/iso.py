"""Isomorphism testing through the orbit graph of an input graph under S_n.

The orbit graph G^(g) has one vertex per distinct relabeling sigma(g) and, for
every vertex h and every ordered pair (i, j) in [n] x [n], an edge from h to
sigma_ij(h), where sigma_ij swaps labels i and j (sigma_ii is the identity).
Vertices are stored by adjacency-bit encoding, so only the orbit is ever
materialized, never S_n itself.

The walk lives on the node+coin space (h, i, j). This is exactly an arc space
in which every vertex has n^2 outgoing arcs, one per coin, and the reverse of
arc (h, c) is (sigma_c(h), c). Diagonal coins and transpositions fixing h become
self-loop arcs that are their own reverse, so the ordinary walk, seed search,
QRAM store and sampler apply unchanged.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from qwseed.constants import DEFAULT, Constants
from qwseed.edge_space import EdgeState, make_pi
from qwseed.errors import CapacityError, InputError
from qwseed.graph import ArcGraph, Graph, QueryLedger
from qwseed.sampler import SampleResult, SamplerConfig, seeded_sample, walk_for
from qwseed.spectral import analyze
from qwseed.stconn import (
    CONNECTED,
    UNDECIDED,
    SwapTestRecord,
    _child_seeds,
    swap_test_from_overlap,
    swap_test_repetitions,
)
from qwseed.walk import apply_walk

ISOMORPHIC = "isomorphic"
NON_ISOMORPHIC = "non-isomorphic"


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


@dataclass(frozen=True)
class LabeledGraph:
    """Adjacency matrix packed as an upper-triangular bitstring (row-major pairs a < b)."""

    n_small: int
    bits: int

    def __post_init__(self):
        if self.n_small < 1:
            raise InputError("graph needs at least one node")
        if self.bits < 0 or self.bits >> len(_pairs(self.n_small)):
            raise InputError("adjacency bits out of range")

    @classmethod
    def from_matrix(cls, A) -> "LabeledGraph":
        A = np.asarray(A)
        n = A.shape[0]
        if A.shape != (n, n) or not np.array_equal(A, A.T) or np.any(np.diag(A)):
            raise InputError("adjacency matrix must be square, symmetric, zero-diagonal")
        bits = 0
        for k, (a, b) in enumerate(_pairs(n)):
            if A[a, b]:
                bits |= 1 << k
        return cls(n, bits)

    @classmethod
    def from_graph(cls, g: Graph) -> "LabeledGraph":
        return cls.from_edges(g.n, g.undirected_edges())

    @classmethod
    def from_edges(cls, n: int, edges) -> "LabeledGraph":
        A = np.zeros((n, n), dtype=np.int8)
        for a, b in edges:
            if a == b:
                raise InputError("self-loops are not allowed")
            A[a, b] = A[b, a] = 1
        return cls.from_matrix(A)

    def matrix(self) -> np.ndarray:
        A = np.zeros((self.n_small, self.n_small), dtype=np.int8)
        for k, (a, b) in enumerate(_pairs(self.n_small)):
            if self.bits >> k & 1:
                A[a, b] = A[b, a] = 1
        return A

    def permuted(self, perm) -> "LabeledGraph":
        """Relabel node v as perm[v]."""
        A = self.matrix()
        P = np.asarray(perm)
        B = np.zeros_like(A)
        B[np.ix_(P, P)] = A
        return LabeledGraph.from_matrix(B)


def _pair_permutations(n: int) -> np.ndarray:
    """perm[c, k]: the pair position that bit k moves to under coin c = i*n + j."""
    pairs = _pairs(n)
    where = {p: k for k, p in enumerate(pairs)}
    out = np.empty((n * n, len(pairs)), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            swap = {i: j, j: i}
            for k, (a, b) in enumerate(pairs):
                a2, b2 = swap.get(a, a), swap.get(b, b)
                out[i * n + j, k] = where[(min(a2, b2), max(a2, b2))]
    return out


def _act(codes: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Apply every coin's relabeling to every code; result shape (len(codes), n^2)."""
    P = perms.shape[1]
    if P == 0:
        return np.zeros((len(codes), perms.shape[0]), dtype=np.int64)
    weights = np.int64(1) << np.arange(P, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(P, dtype=np.int64)[None, :]) & 1
    # new code = sum_k bit_k << perm[c, k]
    return (bits[:, None, :] * weights[perms][None, :, :]).sum(axis=2)


class PermutationGraph(ArcGraph):
    """Orbit graph of ``base`` with coin space [n] x [n]; vertex 0 is ``base`` itself."""

    def __init__(self, base: LabeledGraph, codes: np.ndarray, moves: np.ndarray):
        n = base.n_small
        V = len(codes)
        coins = n * n
        targets = moves.reshape(-1)
        coin = np.tile(np.arange(coins, dtype=np.int64), V)
        partner = targets * coins + coin
        super().__init__(np.arange(0, V * coins + 1, coins, dtype=np.int64), targets, partner)
        self.base = base
        self.n_small = n
        self.codes = codes
        self._order = np.argsort(codes)

    @property
    def coin_dim(self) -> int:
        return self.n_small**2

    def index_of(self, code: int) -> int:
        pos = int(np.searchsorted(self.codes, code, sorter=self._order))
        if pos < len(self.codes) and self.codes[self._order[pos]] == code:
            return int(self._order[pos])
        raise KeyError(code)

    def __contains__(self, code: int) -> bool:
        try:
            self.index_of(code)
        except KeyError:
            return False
        return True

    def act(self, v: int, i: int, j: int) -> int:
        """Vertex index of sigma_ij applied to vertex v."""
        return int(self.targets[v * self.coin_dim + i * self.n_small + j])

    def vertex(self, v: int) -> LabeledGraph:
        return LabeledGraph(self.n_small, int(self.codes[v]))

    def __repr__(self) -> str:
        return f"PermutationGraph(n_small={self.n_small}, |V|={self.n})"


def build_permutation_graph(g: LabeledGraph, cap: int = 5040) -> PermutationGraph:
    """Close {g} under all transpositions by breadth-first search, level by level."""
    n = g.n_small
    perms = _pair_permutations(n)
    codes = [g.bits]
    seen = {g.bits: 0}
    frontier = np.array([g.bits], dtype=np.int64)
    while len(frontier):
        images = np.unique(_act(frontier, perms))
        fresh = [int(c) for c in images if int(c) not in seen]
        for c in fresh:
            seen[c] = len(codes)
            codes.append(c)
            if len(codes) > cap:
                raise CapacityError(f"orbit exceeds cap {cap} (reached {len(codes)} vertices)")
        frontier = np.array(fresh, dtype=np.int64)
    codes_arr = np.array(codes, dtype=np.int64)
    images = _act(codes_arr, perms)
    lookup = np.argsort(codes_arr)
    pos = np.searchsorted(codes_arr, images, sorter=lookup)
    moves = lookup[pos]
    return PermutationGraph(g, codes_arr, moves)


@lru_cache(maxsize=64)
def _cached_pg(g: LabeledGraph, cap: int) -> PermutationGraph:
    return build_permutation_graph(g, cap)


def coin_walk_step(pg: PermutationGraph, state: EdgeState, ledger: QueryLedger | None) -> EdgeState:
    """Reflect each vertex's coin block about its mean, then shift."""
    return apply_walk(walk_for(pg), state, ledger)


def permutation_graph_gap(pg: PermutationGraph, constants: Constants = DEFAULT) -> float:
    """Spectral gap of the lazy random-transposition chain on the orbit."""
    if pg.n == 1:
        return 1.0
    if pg.n > constants.dense_cap:
        raise CapacityError(f"orbit of size {pg.n} exceeds the dense cap {constants.dense_cap}")
    return analyze(pg).spectral_gap


def gap_lower_bound(n: int, constants: Constants = DEFAULT) -> float:
    return constants.iso_gap_c / (n * math.log(n))


def uniform_orbit_state(pg: PermutationGraph) -> EdgeState:
    """(1/sqrt|V|) sum_h |h> (x) (1/n) sum_ij |i, j>."""
    return make_pi(pg)


# -- brute-force references ---------------------------------------------------------


def automorphism_count(g: LabeledGraph) -> int:
    A = g.matrix()
    count = 0
    for perm in itertools.permutations(range(g.n_small)):
        P = np.asarray(perm)
        if np.array_equal(A[np.ix_(P, P)], A):
            count += 1
    return count


def orbit_size_bruteforce(g: LabeledGraph) -> int:
    return len({g.permuted(p).bits for p in itertools.permutations(range(g.n_small))})


def isomorphism_classes(n: int) -> list[LabeledGraph]:
    """One representative (minimum code) per isomorphism class of n-node graphs."""
    perms = list(itertools.permutations(range(n)))
    seen: set[int] = set()
    reps = []
    for bits in range(1 << len(_pairs(n))):
        if bits in seen:
            continue
        g = LabeledGraph(n, bits)
        orbit = {g.permuted(p).bits for p in perms}
        seen |= orbit
        reps.append(g)
    return reps


# -- sampling and decision ----------------------------------------------------------


@dataclass
class IsoSample:
    state: EdgeState | None
    fidelity: float
    graph: PermutationGraph
    gamma: float
    result: SampleResult

    @property
    def orbit_size(self) -> int:
        return self.graph.n


def superpose_isomorphisms(
    g: LabeledGraph,
    gamma: float | None,
    epsilon: float,
    cfg: SamplerConfig | None = None,
    ledger: QueryLedger | None = None,
    cap: int = 5040,
) -> IsoSample:
    """Seeded sampler on the orbit graph, started from g itself (vertex 0).

    ``gamma=None`` uses the exact gap of the orbit chain.
    """
    pg = _cached_pg(g, cap)
    constants = cfg.constants if cfg is not None else DEFAULT
    gap = gamma if gamma is not None else permutation_graph_gap(pg, constants)
    base = cfg if cfg is not None else SamplerConfig(gamma=gap, epsilon=epsilon)
    run_cfg = replace(base, gamma=min(1.0, gap), epsilon=epsilon)
    res = seeded_sample(pg, 0, run_cfg, ledger)
    return IsoSample(res.output, res.fidelity_with_pi, pg, run_cfg.gamma, res)


def aligned_overlap(a: IsoSample, b: IsoSample) -> complex:
    """<a|b> with basis states matched by (adjacency code, i, j)."""
    if a.graph.n_small != b.graph.n_small:
        return 0.0
    coins = a.graph.coin_dim
    common, ia, ib = np.intersect1d(a.graph.codes, b.graph.codes, return_indices=True)
    if not len(common):
        return 0.0
    blocks_a = a.state.amps.reshape(-1, coins)[ia]
    blocks_b = b.state.amps.reshape(-1, coins)[ib]
    return complex(np.vdot(blocks_a, blocks_b))


@dataclass
class IsoDecision:
    decision: str
    record: SwapTestRecord | None
    samples: tuple[IsoSample, IsoSample] | None
    ledger: QueryLedger


def _degree_sequence(g: LabeledGraph) -> list[int]:
    return sorted(g.matrix().sum(axis=1).tolist())


def decide_isomorphic(
    g1: LabeledGraph,
    g2: LabeledGraph,
    gamma: float | None,
    epsilon: float,
    cfg: SamplerConfig | None = None,
    ledger: QueryLedger | None = None,
    degree_shortcut: bool = False,
    cap: int = 5040,
) -> IsoDecision:
    """Superpose the orbit of each graph and SWAP-test the two states.

    ``gamma=None`` takes the smaller exact orbit-chain gap of the two inputs.
    Different node counts are decided immediately; the degree-sequence shortcut
    is off by default so that the quantum path is what gets exercised.
    """
    ledger = ledger if ledger is not None else QueryLedger()
    before = ledger.snapshot()
    if g1.n_small != g2.n_small:
        return IsoDecision(NON_ISOMORPHIC, None, None, ledger.diff(before))
    if degree_shortcut and _degree_sequence(g1) != _degree_sequence(g2):
        return IsoDecision(NON_ISOMORPHIC, None, None, ledger.diff(before))
    constants = cfg.constants if cfg is not None else DEFAULT
    if gamma is None:
        gamma = min(
            permutation_graph_gap(_cached_pg(g1, cap), constants),
            permutation_graph_gap(_cached_pg(g2, cap), constants),
        )
    base = cfg if cfg is not None else SamplerConfig(gamma=min(1.0, gamma), epsilon=epsilon)
    s1, s2, s_swap = _child_seeds(base.rng_seed, 3)
    eps_prime = constants.st_eps_prime
    a = superpose_isomorphisms(g1, gamma, eps_prime, replace(base, rng_seed=s1), ledger, cap)
    b = superpose_isomorphisms(g2, gamma, eps_prime, replace(base, rng_seed=s2), ledger, cap)
    if a.state is None or b.state is None:
        return IsoDecision(UNDECIDED, None, (a, b), ledger.diff(before))
    r = swap_test_repetitions(epsilon, constants)
    ledger.rng_draws += 1
    record = swap_test_from_overlap(aligned_overlap(a, b), r, np.random.default_rng(s_swap), constants.st_threshold)
    decision = ISOMORPHIC if record.decision == CONNECTED else NON_ISOMORPHIC
    return IsoDecision(decision, record, (a, b), ledger.diff(before))
