"""Quantum samples of the stationary edge state.

Two routines:

* ``folklore_sample`` starts from the uniform state over the arcs of a node
  set, flags its phase-0 part with amplified phase estimation on the walk, and
  amplifies that flagged part by exponential-search amplitude amplification.
* ``seeded_sample`` runs a doubling loop M = 1, 2, 4, ...: grow a classical
  seed by breadth-first edge search, load it into the QRAM store, and run the
  folklore routine from it under a step budget that grows like
  M^(1/3) gamma^(-1/3) log(1/eps).

Amplified phase estimation is k sequential phase-estimation rounds on the walk
with t-bit registers; the "good" subspace is the one where every register reads
0, so its projection of an input x is P0^k x with P0 = 2^-t sum_a W^a.

* circuit mode simulates each round on the doubled register space (or streams
  the zero row when ``stream_pe`` is set and the register would be too big);
* oracle mode projects onto the exact phase-0 eigenspace of W.

Both charge the same ledger cost, k (2^t - 1) walk steps per invocation of U.
Amplitude amplification acts on the two-dimensional span of the good and bad
parts of U|S>|0>, so only the good amplitude ``a`` is needed to simulate it
exactly: after j Grover iterations the success probability is
sin^2((2j + 1) arcsin a) and on success the output is the normalized good part.
"""

from __future__ import annotations

import math
import time
import warnings
import weakref
from dataclasses import dataclass, field, replace

import numpy as np

from qwseed.constants import DEFAULT, Constants
from qwseed.edge_space import EdgeState, fidelity, make_seed_state
from qwseed.errors import CapacityError, InputError
from qwseed.graph import ArcGraph, Graph, QueryLedger, degree_query, neighbor_query
from qwseed.qram import QramStore, charge_access, qram_build, qram_prepare
from qwseed.seed import bfs_edge_search, seed_arcs, seed_state_size_schedule
from qwseed.spectral import analyze, component_of, components
from qwseed.walk import WalkOperator

MODES = ("circuit", "oracle")


@dataclass(frozen=True)
class SamplerConfig:
    gamma: float
    epsilon: float
    k: int | None = None
    mode: str = "oracle"
    rng_seed: int = 0
    degree_bound: int | None = None
    max_doublings: int | None = None
    stream_pe: bool = False
    constants: Constants = DEFAULT

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise InputError("gamma must lie in (0, 1]")
        if not 0 < self.epsilon < 1:
            raise InputError("epsilon must lie in (0, 1)")
        if self.k is not None and self.k < 1:
            raise InputError("k must be >= 1")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}")

    @property
    def repetitions(self) -> int:
        return self.k if self.k is not None else self.constants.pe_repetitions(self.epsilon)

    @property
    def pe_bits(self) -> int:
        return self.constants.pe_bits(self.gamma)

    @property
    def doubling_cap(self) -> int:
        return self.max_doublings if self.max_doublings is not None else self.constants.max_doublings

    def u_cost(self) -> int:
        """Walk steps charged per invocation of U or U^dagger."""
        return self.repetitions * (2**self.pe_bits - 1)


@dataclass
class SampleResult:
    output: EdgeState | None
    fidelity_with_pi: float
    ledger: QueryLedger
    doublings_used: int
    terminated_at_M: int | None
    finished: bool = True
    u_invocations: int = 0
    seed_total_degree: int = 0
    classical_query_equivalent: int | None = None
    wall_time_ms: float = 0.0
    notes: list[str] = field(default_factory=list)

    def to_json(self, graph: str, cfg: SamplerConfig) -> dict:
        return {
            "graph": graph,
            "mode": cfg.mode,
            "gamma": cfg.gamma,
            "epsilon": cfg.epsilon,
            "seed": cfg.rng_seed,
            "fidelity": self.fidelity_with_pi,
            "qw_steps": self.ledger.qw_steps,
            "degree_queries": self.ledger.degree_queries,
            "neighbor_queries": self.ledger.neighbor_queries,
            "qram_reflections": self.ledger.qram_reflections,
            "terminated_at_M": self.terminated_at_M,
            "wall_time_ms": self.wall_time_ms,
        }


# -- per-graph caches -----------------------------------------------------------

_walks: "weakref.WeakKeyDictionary[ArcGraph, dict]" = weakref.WeakKeyDictionary()


def walk_for(g: ArcGraph, constants: Constants = DEFAULT) -> WalkOperator:
    per = _walks.setdefault(g, {})
    if constants not in per:
        per[constants] = WalkOperator(g, constants)
    return per[constants]


@dataclass(frozen=True)
class ComponentInfo:
    nodes: np.ndarray
    spectral_gap: float
    is_bipartite: bool


_components: "weakref.WeakKeyDictionary[ArcGraph, dict]" = weakref.WeakKeyDictionary()


def _labels(g: ArcGraph) -> np.ndarray:
    cache = _components.setdefault(g, {})
    if "labels" not in cache:
        cache["labels"] = components(g)
    return cache["labels"]


def component_nodes(g: ArcGraph, i: int) -> np.ndarray:
    labels = _labels(g)
    return np.flatnonzero(labels == labels[i])


def component_info(g: ArcGraph, i: int) -> ComponentInfo:
    """Oracle view of i's component: node set, spectral gap, bipartiteness."""
    cache = _components.setdefault(g, {})
    c = int(_labels(g)[i])
    if c not in cache:
        nodes = component_nodes(g, i)
        if len(nodes) == g.n:
            rep = analyze(g)
        elif isinstance(g, Graph):
            rep = analyze(component_of(g, i).subgraph)
        else:
            raise InputError("component analysis of a disconnected non-simple graph")
        cache[c] = ComponentInfo(nodes, rep.spectral_gap, rep.is_bipartite)
    return cache[c]


def target_state(g: ArcGraph, i: int) -> EdgeState:
    return make_seed_state(g, component_nodes(g, i))


def _oracle_checks(g: ArcGraph, i: int, cfg: SamplerConfig, notes: list[str]) -> None:
    info = component_info(g, i)
    if info.is_bipartite:
        raise InputError(f"component of node {i} is bipartite (spectral gap 0); sampling refused")
    if cfg.gamma > info.spectral_gap * (1 + 1e-9):
        msg = f"gamma={cfg.gamma:.6g} exceeds the component gap {info.spectral_gap:.6g}; guarantees void"
        warnings.warn(msg, stacklevel=3)
        notes.append(msg)


# -- amplified phase estimation ---------------------------------------------------


@dataclass(frozen=True)
class PhaseSplit:
    """U|x>|0> split by the all-zero flag: good part in the arc space, bad part by norm."""

    flagged: np.ndarray
    input_norm: float = 1.0

    @property
    def success_amplitude(self) -> float:
        return float(np.linalg.norm(self.flagged))

    @property
    def rest_norm(self) -> float:
        return math.sqrt(max(0.0, self.input_norm**2 - self.success_amplitude**2))


def phase_estimation_zero_row(w: WalkOperator, x: np.ndarray, t: int, materialize: bool = True) -> np.ndarray:
    """Ancilla-0 amplitude after one phase-estimation round with a t-bit register.

    With ``materialize`` the whole (2^t, m) register is built: row a holds
    W^a x / sqrt(2^t) after the controlled powers, then the inverse QFT runs along
    the register axis. Otherwise only the zero row, 2^-t sum_a W^a x, is
    accumulated, which is the same vector in O(m) memory.
    """
    N = 2**t
    if materialize:
        reg = np.empty((N, len(x)), dtype=complex)
        reg[0] = x
        for a in range(1, N):
            reg[a] = w.apply(reg[a - 1])
        reg /= math.sqrt(N)
        out = np.fft.fft(reg, axis=0) / math.sqrt(N)
        return out[0]
    acc = x.astype(complex)
    cur = acc.copy()
    for _ in range(1, N):
        cur = w.apply(cur)
        acc += cur
    return acc / N


def amplified_phase_estimation(
    w: WalkOperator, state: EdgeState, cfg: SamplerConfig, ledger: QueryLedger | None
) -> PhaseSplit:
    x = state.amps.astype(complex)
    if ledger is not None:
        ledger.qw_steps += cfg.u_cost()
    if cfg.mode == "oracle":
        return PhaseSplit(w.project_phase_zero(x), float(np.linalg.norm(x)))
    t = cfg.pe_bits
    materialize = w.dim * 2**t <= cfg.constants.circuit_cap
    if not materialize and not cfg.stream_pe:
        raise CapacityError(
            f"phase-estimation register needs {w.dim * 2**t} amplitudes "
            f"(cap {cfg.constants.circuit_cap}); use oracle mode or stream_pe"
        )
    y = x
    for _ in range(cfg.repetitions):
        y = phase_estimation_zero_row(w, y, t, materialize)
    return PhaseSplit(y, float(np.linalg.norm(x)))


class AmplifiedPE:
    """U as a reusable gate: computed once, charged per invocation."""

    def __init__(self, w: WalkOperator, state: EdgeState, cfg: SamplerConfig):
        self.walk = w
        self.state = state
        self.cfg = cfg
        self.cost = cfg.u_cost()
        self._split: PhaseSplit | None = None
        self.invocations = 0

    def invoke(self, ledger: QueryLedger | None) -> PhaseSplit:
        self.invocations += 1
        if self._split is None:
            self._split = amplified_phase_estimation(self.walk, self.state, self.cfg, ledger)
        elif ledger is not None:
            ledger.qw_steps += self.cost
        return self._split


@dataclass
class AmplifyResult:
    output: EdgeState | None
    invocations: int
    trials: int
    exhausted: bool
    steps_spent: int
    # exponential-search parameter when the run stopped
    final_lambda: float = 1.0


def amplitude_amplify(
    U: AmplifiedPE,
    store: QramStore | None,
    cfg: SamplerConfig,
    ledger: QueryLedger | None,
    rng: np.random.Generator,
    budget: int | None = None,
    lam: float = 1.0,
) -> AmplifyResult:
    """Exponential-search amplitude amplification toward the flagged part of U|S>|0>.

    ``budget`` caps the walk steps; a trial that would not fit is not started
    and the result comes back ``exhausted``. The good amplitude is read from the
    simulation to compute outcome probabilities only, never to steer the search.
    """
    ledger_ = ledger if ledger is not None else QueryLedger()
    spent = 0
    trials = 0
    invocations = 0
    theta: float | None = None
    split: PhaseSplit | None = None
    while trials < cfg.constants.aa_max_trials:
        j = int(rng.integers(math.ceil(lam - 1e-12)))
        ledger_.rng_draws += 1
        calls = 1 + 2 * j
        if budget is not None and spent + calls * U.cost > budget:
            return AmplifyResult(None, invocations, trials, True, spent, lam)
        trials += 1
        if store is not None:
            qram_prepare(store, ledger_)
        for _ in range(calls):
            split = U.invoke(ledger_)
        for _ in range(j):
            if store is not None:
                charge_access(store, ledger_)
            ledger_.classical_ops += 1  # reflection about the all-zero flag
        invocations += calls
        spent += calls * U.cost
        if theta is None:
            theta = math.asin(min(1.0, split.success_amplitude / split.input_norm))
        p = math.sin((2 * j + 1) * theta) ** 2
        ledger_.rng_draws += 1
        if rng.random() < p:
            out = EdgeState(U.state.space, split.flagged / split.success_amplitude)
            return AmplifyResult(out, invocations, trials, False, spent, lam)
        lam *= cfg.constants.aa_growth
    return AmplifyResult(None, invocations, trials, True, spent, lam)


# -- samplers -------------------------------------------------------------------


def _as_nodes(start) -> list[int]:
    if isinstance(start, (int, np.integer)):
        return [int(start)]
    nodes = sorted(set(int(v) for v in start))
    if not nodes:
        raise InputError("start set is empty")
    return nodes


def _fidelity(g: ArcGraph, i: int, out: EdgeState | None) -> float:
    if out is None:
        return 0.0
    return fidelity(target_state(g, i), out)


def _resolve_mode(w: WalkOperator, cfg: SamplerConfig, notes: list[str]) -> SamplerConfig:
    if cfg.mode == "circuit" and not cfg.stream_pe and w.dim * 2**cfg.pe_bits > cfg.constants.circuit_cap:
        msg = (
            f"circuit register {w.dim}*2^{cfg.pe_bits} exceeds cap "
            f"{cfg.constants.circuit_cap}; falling back to oracle mode"
        )
        warnings.warn(msg, stacklevel=3)
        notes.append(msg)
        return replace(cfg, mode="oracle")
    return cfg


def folklore_sample(
    g: ArcGraph,
    start,
    cfg: SamplerConfig,
    ledger: QueryLedger | None = None,
    walk: WalkOperator | None = None,
) -> SampleResult:
    tic = time.perf_counter()
    ledger = ledger if ledger is not None else QueryLedger()
    before = ledger.snapshot()
    nodes = _as_nodes(start)
    for v in nodes:
        g._check_node(v)
    notes: list[str] = []
    w = walk or walk_for(g, cfg.constants)
    cfg = _resolve_mode(w, cfg, notes)
    if cfg.mode == "oracle":
        _oracle_checks(g, nodes[0], cfg, notes)
    # learn E(S) through the query interface
    for v in nodes:
        for k in range(1, degree_query(g, ledger, v) + 1):
            neighbor_query(g, ledger, v, k)
    arcs = g.arcs_of(nodes)
    store = qram_build(g, arcs, ledger, cfg.constants)
    U = AmplifiedPE(w, EdgeState(g, store._state.copy()), cfg)
    rng = np.random.default_rng(cfg.rng_seed)
    res = amplitude_amplify(U, store, cfg, ledger, rng)
    used = ledger.diff(before)
    return SampleResult(
        output=res.output,
        fidelity_with_pi=_fidelity(g, nodes[0], res.output),
        ledger=used,
        doublings_used=0,
        terminated_at_M=None,
        finished=not res.exhausted,
        u_invocations=res.invocations,
        seed_total_degree=len(arcs),
        wall_time_ms=(time.perf_counter() - tic) * 1e3,
        notes=notes,
    )


def folklore_step_bound(m: int, seed_degree: int, cfg: SamplerConfig) -> float:
    """Reporting bound on folklore walk steps: c * sqrt(m / d(S)) invocations of U."""
    return cfg.constants.folklore_c * math.sqrt(m / seed_degree) * cfg.u_cost()


def _closed_component(g: ArcGraph, seed, ledger: QueryLedger | None) -> np.ndarray | None:
    """Endpoints of the found edges if those edges are all edges at those endpoints.

    One degree query per endpoint. A closed edge set is a whole component.
    """
    if not seed.edges:
        return None
    pairs = np.asarray(seed.edges, dtype=np.int64)
    ends = np.unique(pairs)
    if ledger is not None:
        ledger.degree_queries += len(ends)
    # a self-loop is a single arc
    found_arcs = int(np.where(pairs[:, 0] == pairs[:, 1], 1, 2).sum())
    if int(g.degrees[ends].sum()) != found_arcs:
        return None
    return ends


def doubling_budget(M: int, target_degree: int, cfg: SamplerConfig) -> int:
    """Walk-step budget for round M.

    budget_c * sqrt(M / d_target) invocations' worth of walk steps, each
    invocation costing k (2^t - 1). With d_target ~ M^(1/3) gamma^(-1/3) and
    2^t ~ gamma^(-1/2) this is Theta(M^(1/3) gamma^(-1/3) log(1/eps)). Early
    rounds whose budget is below one invocation run no quantum steps at all.
    """
    return math.floor(cfg.constants.budget_c * math.sqrt(M / target_degree) * cfg.u_cost())


def _seeded(
    g: ArcGraph,
    i: int,
    cfg: SamplerConfig,
    ledger: QueryLedger | None,
    walk: WalkOperator | None,
    degree_bound: int | None,
) -> SampleResult:
    tic = time.perf_counter()
    ledger = ledger if ledger is not None else QueryLedger()
    before = ledger.snapshot()
    g._check_node(i)
    notes: list[str] = []
    w = walk or walk_for(g, cfg.constants)
    cfg = _resolve_mode(w, cfg, notes)
    checked = False
    rng = np.random.default_rng(cfg.rng_seed)
    invocations = 0
    seed_degree = 0
    lam = 1.0
    for r in range(cfg.doubling_cap):
        M = 2**r
        target = seed_state_size_schedule(M, cfg.gamma, degree_bound, cfg.constants)
        seed = bfs_edge_search(g, ledger, i, target)
        arcs = seed_arcs(g, seed, ledger)
        seed_degree = len(arcs)
        closed = seed.nodes if seed.exhausted else _closed_component(g, seed, ledger)
        if closed is not None:
            # the seed spans the whole component: its uniform arc state is pi
            store = qram_build(g, arcs if seed.exhausted else g.arcs_of(closed), ledger, cfg.constants)
            return SampleResult(
                output=(out := qram_prepare(store, ledger)),
                fidelity_with_pi=_fidelity(g, i, out),
                ledger=ledger.diff(before),
                doublings_used=r + 1,
                terminated_at_M=M,
                finished=True,
                u_invocations=invocations,
                seed_total_degree=seed_degree,
                wall_time_ms=(time.perf_counter() - tic) * 1e3,
                notes=notes,
            )
        store = qram_build(g, arcs, ledger, cfg.constants)
        if cfg.mode == "oracle" and not checked:
            _oracle_checks(g, i, cfg, notes)
            checked = True
        U = AmplifiedPE(w, EdgeState(g, store._state.copy()), cfg)
        res = amplitude_amplify(U, store, cfg, ledger, rng, budget=doubling_budget(M, target, cfg), lam=lam)
        if cfg.constants.aa_carry_lambda:
            lam = res.final_lambda
        invocations += res.invocations
        if not res.exhausted:
            return SampleResult(
                output=res.output,
                fidelity_with_pi=_fidelity(g, i, res.output),
                ledger=ledger.diff(before),
                doublings_used=r + 1,
                terminated_at_M=M,
                finished=True,
                u_invocations=invocations,
                seed_total_degree=seed_degree,
                wall_time_ms=(time.perf_counter() - tic) * 1e3,
                notes=notes,
            )
    notes.append(f"no termination within {cfg.doubling_cap} doublings")
    return SampleResult(
        output=None,
        fidelity_with_pi=0.0,
        ledger=ledger.diff(before),
        doublings_used=cfg.doubling_cap,
        terminated_at_M=None,
        finished=False,
        u_invocations=invocations,
        seed_total_degree=seed_degree,
        wall_time_ms=(time.perf_counter() - tic) * 1e3,
        notes=notes,
    )


def seeded_sample(
    g: ArcGraph,
    i: int,
    cfg: SamplerConfig,
    ledger: QueryLedger | None = None,
    walk: WalkOperator | None = None,
) -> SampleResult:
    return _seeded(g, i, cfg, ledger, walk, None)


def seeded_sample_with_degree_bound(
    g: ArcGraph,
    i: int,
    cfg: SamplerConfig,
    ledger: QueryLedger | None = None,
    walk: WalkOperator | None = None,
) -> SampleResult:
    D = cfg.degree_bound
    if D is None:
        raise InputError("degree_bound must be set")
    if D < g.max_degree:
        raise InputError(f"degree bound {D} is below the maximum degree {g.max_degree}")
    res = _seeded(g, i, cfg, ledger, walk, D)
    L = res.ledger
    res.classical_query_equivalent = L.qw_steps * math.ceil(math.sqrt(D)) + L.degree_queries + L.neighbor_queries
    return res
