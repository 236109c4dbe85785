"""st-connectivity: compare quantum samples from s and t with a SWAP test.

Samples from the two endpoints are (close to) the uniform arc states of their
components. These are equal when s and t are connected and have disjoint
support otherwise, so the SWAP test statistic separates the two cases.

The classical baseline launches many short random walks from each endpoint
and checks whether the sets of walk endpoints meet (birthday paradox).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from qwseed.constants import DEFAULT, Constants
from qwseed.edge_space import EdgeState, inner_product
from qwseed.errors import InputError
from qwseed.graph import ArcGraph, QueryLedger
from qwseed.sampler import SampleResult, SamplerConfig, seeded_sample

CONNECTED = "connected"
DISCONNECTED = "disconnected"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class SwapTestRecord:
    repetitions: int
    ones_observed: int
    decision: str
    # oracle value, logged for validation and never used to decide
    true_inner_product: float | None = None

    def __post_init__(self):
        if not 0 <= self.ones_observed <= self.repetitions:
            raise ValueError("ones_observed must lie in [0, repetitions]")

    @property
    def ones_fraction(self) -> float:
        return self.ones_observed / self.repetitions


def swap_test_probability(overlap: float) -> float:
    """P(outcome 1) for states with |<a|b>| = overlap."""
    return 0.5 * (1.0 - min(1.0, abs(overlap)) ** 2)


def swap_test_repetitions(epsilon: float, constants: Constants = DEFAULT) -> int:
    return math.ceil(constants.st_reps_c * math.log(1.0 / epsilon))


def swap_test_from_overlap(
    overlap: complex, r: int, rng: np.random.Generator, threshold: float = DEFAULT.st_threshold
) -> SwapTestRecord:
    if r < 1:
        raise InputError("SWAP test needs at least one repetition")
    p = swap_test_probability(abs(overlap))
    ones = int(rng.binomial(r, p))
    decision = CONNECTED if ones / r < threshold else DISCONNECTED
    return SwapTestRecord(r, ones, decision, float(abs(overlap)))


def swap_test_sample(
    a: EdgeState,
    b: EdgeState,
    r: int,
    rng: np.random.Generator,
    threshold: float = DEFAULT.st_threshold,
) -> SwapTestRecord:
    """r independent SWAP tests on fresh copies of a and b."""
    return swap_test_from_overlap(inner_product(a, b), r, rng, threshold)


def _child_seeds(seed: int, count: int) -> list[int]:
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1)[0]) for c in ss.spawn(count)]


@dataclass
class StResult:
    decision: str
    record: SwapTestRecord | None
    sample_s: SampleResult
    sample_t: SampleResult
    ledger: QueryLedger
    notes: list[str] = field(default_factory=list)

    def to_json(self, graph: str, cfg: SamplerConfig) -> dict:
        out = self.sample_s.to_json(graph, cfg)
        out.update(self.ledger.as_dict())
        out["fidelity"] = min(self.sample_s.fidelity_with_pi, self.sample_t.fidelity_with_pi)
        out["decision"] = self.decision
        if self.record is not None:
            out["swap_repetitions"] = self.record.repetitions
            out["swap_ones"] = self.record.ones_observed
            out["true_inner_product"] = self.record.true_inner_product
        out["wall_time_ms"] = self.sample_s.wall_time_ms + self.sample_t.wall_time_ms
        return out


def decide_st(
    g: ArcGraph,
    s: int,
    t: int,
    gamma: float,
    epsilon: float,
    cfg: SamplerConfig | None = None,
    ledger: QueryLedger | None = None,
) -> StResult:
    """Decide whether s and t share a component, erring with probability <= epsilon.

    Both samples are drawn with closeness st_eps_prime; the SWAP test is repeated
    ceil(st_reps_c ln(1/epsilon)) times and the pair is declared connected when
    fewer than a st_threshold fraction of outcomes are 1.
    """
    g._check_node(s)
    g._check_node(t)
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")
    base = cfg if cfg is not None else SamplerConfig(gamma=gamma, epsilon=epsilon)
    c = base.constants
    ledger = ledger if ledger is not None else QueryLedger()
    before = ledger.snapshot()
    seed_s, seed_t, seed_swap = _child_seeds(base.rng_seed, 3)
    inner = replace(base, gamma=gamma, epsilon=c.st_eps_prime, k=None)
    res_s = seeded_sample(g, s, replace(inner, rng_seed=seed_s), ledger)
    res_t = seeded_sample(g, t, replace(inner, rng_seed=seed_t), ledger)
    notes = res_s.notes + res_t.notes
    if res_s.output is None or res_t.output is None:
        notes.append("a sampler run did not finish; no decision")
        return StResult(UNDECIDED, None, res_s, res_t, ledger.diff(before), notes)
    r = swap_test_repetitions(epsilon, c)
    rng = np.random.default_rng(seed_swap)
    ledger.rng_draws += 1
    record = swap_test_sample(res_s.output, res_t.output, r, rng, c.st_threshold)
    return StResult(record.decision, record, res_s, res_t, ledger.diff(before), notes)


# -- classical baseline -------------------------------------------------------------


@dataclass(frozen=True)
class BirthdayResult:
    decision: str
    rounds: int
    rounds_connected: int
    walks: int
    walk_length: int


def birthday_parameters(n: int, gamma: float, epsilon: float, constants: Constants = DEFAULT) -> tuple[int, int, int]:
    """(walks per endpoint, walk length, rounds); rounds is odd so the vote has no ties."""
    walks = max(1, math.ceil(constants.birthday_walks_c * math.sqrt(n) * math.log(max(n, 2))))
    length = max(1, math.ceil(constants.birthday_len_c / gamma))
    rounds = max(1, math.ceil(constants.birthday_rounds_c * math.log(1.0 / epsilon)))
    return walks, length, rounds | 1


def _walk_endpoints(
    g: ArcGraph, start: int, walks: int, length: int, rng: np.random.Generator, ledger: QueryLedger
) -> np.ndarray:
    pos = np.full(walks, start, dtype=np.int64)
    offsets = g.offsets
    degrees = g.degrees
    for _ in range(length):
        deg = degrees[pos]
        pos = g.targets[offsets[pos] + rng.integers(0, deg)]
        ledger.degree_queries += walks
        ledger.neighbor_queries += walks
        ledger.rng_draws += walks
    return pos


def classical_birthday_st(
    g: ArcGraph,
    s: int,
    t: int,
    gamma: float,
    ledger: QueryLedger | None,
    rng: np.random.Generator,
    epsilon: float = 0.05,
    constants: Constants = DEFAULT,
) -> BirthdayResult:
    """Birthday-paradox test: connected iff the walk endpoint sets from s and t meet.

    Each round runs the walks from both endpoints; the start nodes themselves are
    included in the sample sets. Rounds vote by majority.
    """
    g._check_node(s)
    g._check_node(t)
    if not 0 < gamma <= 1:
        raise InputError("gamma must lie in (0, 1]")
    ledger = ledger if ledger is not None else QueryLedger()
    walks, length, rounds = birthday_parameters(g.n, gamma, epsilon, constants)
    hits = 0
    for _ in range(rounds):
        a = np.append(_walk_endpoints(g, s, walks, length, rng, ledger), s)
        b = np.append(_walk_endpoints(g, t, walks, length, rng, ledger), t)
        ledger.classical_ops += len(a) + len(b)
        if np.intersect1d(a, b).size:
            hits += 1
    decision = CONNECTED if 2 * hits > rounds else DISCONNECTED
    return BirthdayResult(decision, rounds, hits, walks, length)
