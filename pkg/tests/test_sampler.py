import math
import warnings

import numpy as np
import pytest
import scipy.linalg

from qwseed import graph as G
from qwseed.constants import DEFAULT
from qwseed.edge_space import EdgeState, fidelity, make_pi, make_seed_state
from qwseed.errors import CapacityError, InputError
from qwseed.graph import QueryLedger
from qwseed.qram import qram_build
from qwseed.sampler import (
    AmplifiedPE,
    SamplerConfig,
    amplified_phase_estimation,
    amplitude_amplify,
    doubling_budget,
    folklore_sample,
    folklore_step_bound,
    phase_estimation_zero_row,
    seeded_sample,
    seeded_sample_with_degree_bound,
    walk_for,
)
from qwseed.spectral import analyze

from conftest import nonbipartite_family


def gap(g):
    return analyze(g).spectral_gap


# -- config ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [dict(gamma=0), dict(gamma=1.5), dict(epsilon=0), dict(epsilon=1), dict(k=0), dict(mode="fast")],
)
def test_config_validation(kwargs):
    base = dict(gamma=0.5, epsilon=0.1)
    base.update(kwargs)
    with pytest.raises(InputError):
        SamplerConfig(**base)


def test_config_derived_sizes():
    cfg = SamplerConfig(gamma=0.5, epsilon=0.01)
    assert cfg.pe_bits == math.ceil(math.log2(math.pi / 1.0)) + DEFAULT.pe_extra_bits
    assert cfg.repetitions == math.ceil(math.log2(100))
    assert cfg.u_cost() == cfg.repetitions * (2**cfg.pe_bits - 1)
    assert SamplerConfig(gamma=0.5, epsilon=0.01, k=2).repetitions == 2


# -- amplified phase estimation -----------------------------------------------------


@pytest.mark.parametrize("mode", ["oracle", "circuit"])
def test_pe_on_pi(mode):
    g = G.complete(4)
    cfg = SamplerConfig(gamma=0.5, epsilon=0.01, mode=mode)
    led = QueryLedger()
    split = amplified_phase_estimation(walk_for(g), make_pi(g), cfg, led)
    assert np.allclose(split.flagged, make_pi(g).amps)
    assert split.rest_norm <= 2.0**-cfg.repetitions
    assert led.qw_steps == cfg.u_cost()


@pytest.mark.parametrize("g", nonbipartite_family()[:5], ids=repr)
def test_circuit_leakage_on_orthogonal_input(g):
    # component of a seed state orthogonal to pi: lives on eigenvectors with phase >= Delta
    cfg = SamplerConfig(gamma=gap(g), epsilon=0.05, mode="circuit")
    s = make_seed_state(g, [0]).amps
    pi = make_pi(g).amps
    x = s - np.vdot(pi, s) * pi
    x = EdgeState(g, x / np.linalg.norm(x))
    split = amplified_phase_estimation(walk_for(g), x, cfg, None)
    assert split.success_amplitude <= 2.0**-cfg.repetitions
    oracle = amplified_phase_estimation(walk_for(g), x, SamplerConfig(gamma=gap(g), epsilon=0.05), None)
    assert oracle.success_amplitude < 1e-12


@pytest.mark.parametrize("mode", ["oracle", "circuit"])
def test_pe_k4_seed(mode):
    g = G.complete(4)
    cfg = SamplerConfig(gamma=0.5, epsilon=0.01, mode=mode)
    split = amplified_phase_estimation(walk_for(g), make_seed_state(g, [0]), cfg, None)
    assert abs(split.success_amplitude - 0.5) <= 2.0**-cfg.repetitions


def test_streamed_zero_row_equals_materialized(rng):
    g = G.petersen()
    w = walk_for(g)
    x = rng.normal(size=g.m) + 1j * rng.normal(size=g.m)
    for t in (1, 3, 5):
        assert np.allclose(phase_estimation_zero_row(w, x, t, True), phase_estimation_zero_row(w, x, t, False))


def test_circuit_cap():
    g = G.random_regular(64, 3, 5)
    small = DEFAULT.__class__(circuit_cap=2**8)
    cfg = SamplerConfig(gamma=0.05, epsilon=0.1, mode="circuit", constants=small)
    with pytest.raises(CapacityError):
        amplified_phase_estimation(walk_for(g, small), make_pi(g), cfg, None)
    streamed = SamplerConfig(gamma=0.05, epsilon=0.1, mode="circuit", constants=small, stream_pe=True)
    split = amplified_phase_estimation(walk_for(g, small), make_pi(g), streamed, None)
    assert np.allclose(split.flagged, make_pi(g).amps)
    # the samplers fall back to oracle mode with a notice
    with pytest.warns(UserWarning, match="falling back"):
        res = seeded_sample(g, 0, cfg)
    assert any("falling back" in note for note in res.notes)
    assert res.fidelity_with_pi >= 0.9


# -- literal check of the two-dimensional reduction ------------------------------------


def _literal_unitary(w, t):
    """Phase estimation on (register x arc space): H on the register, controlled W^a, inverse QFT."""
    m, N = w.dim, 2**t
    W = w.matrix()
    powers = [np.eye(m)]
    for _ in range(1, N):
        powers.append(W @ powers[-1])
    CW = scipy.linalg.block_diag(*powers)
    H = scipy.linalg.hadamard(N) / math.sqrt(N)
    F = np.fft.fft(np.eye(N)) / math.sqrt(N)  # inverse QFT up to convention: row 0 is the all-ones row
    return np.kron(F, np.eye(m)) @ CW @ np.kron(H, np.eye(m))


def test_literal_grover_matches_reduction():
    g = G.complete(4)
    w = walk_for(g)
    cfg = SamplerConfig(gamma=0.5, epsilon=0.5, mode="circuit", k=1)
    t = cfg.pe_bits
    U = _literal_unitary(w, t)
    m, N = g.m, 2**t
    start = np.zeros(N * m, dtype=complex)
    start[:m] = make_seed_state(g, [0]).amps  # register |0>, arcs |S>
    good = np.zeros(N * m)
    good[:m] = 1.0  # register reads 0
    psi0 = U @ start
    split = amplified_phase_estimation(w, make_seed_state(g, [0]), cfg, None)
    theta = math.asin(split.success_amplitude)
    # literal amplitude amplification: Q = -U S_0 U^dag S_good
    S_good = np.diag(1 - 2 * good)
    S_0 = np.eye(N * m) - 2 * np.outer(start, start.conj())
    Q = -U @ S_0 @ U.conj().T @ S_good
    state = psi0
    for j in range(4):
        p = float(np.linalg.norm(good * state) ** 2)
        assert p == pytest.approx(math.sin((2 * j + 1) * theta) ** 2, abs=1e-10)
        good_part = (good * state)[:m]
        assert abs(np.vdot(good_part / np.linalg.norm(good_part), split.flagged / split.success_amplitude)) == pytest.approx(1.0, abs=1e-10)
        state = Q @ state


# -- amplitude amplification ---------------------------------------------------------


def _aa_setup(g, nodes, **cfg_kwargs):
    cfg = SamplerConfig(**cfg_kwargs)
    store = qram_build(g, g.arcs_of(nodes), None)
    U = AmplifiedPE(walk_for(g), EdgeState(g, make_seed_state(g, nodes).amps), cfg)
    return cfg, store, U


def test_aa_already_pi():
    g = G.complete(4)
    cfg, store, U = _aa_setup(g, range(4), gamma=0.5, epsilon=0.01)
    res = amplitude_amplify(U, store, cfg, None, np.random.default_rng(0))
    assert res.invocations == 1
    assert fidelity(res.output, make_pi(g)) == pytest.approx(1.0)


def test_aa_expected_invocations_k4():
    g = G.complete(4)
    counts = []
    for seed in range(100):
        cfg, store, U = _aa_setup(g, [0], gamma=0.5, epsilon=0.01)
        counts.append(amplitude_amplify(U, store, cfg, None, np.random.default_rng(seed)).invocations)
    assert np.mean(counts) <= DEFAULT.aa_c / 0.5


def test_aa_budget_zero():
    g = G.complete(4)
    cfg, store, U = _aa_setup(g, [0], gamma=0.5, epsilon=0.01)
    led = QueryLedger()
    res = amplitude_amplify(U, store, cfg, led, np.random.default_rng(0), budget=0)
    assert res.exhausted and res.output is None and res.invocations == 0
    assert led.qw_steps == 0


def test_aa_charges_ledger():
    g = G.petersen()
    cfg, store, U = _aa_setup(g, [0], gamma=gap(g), epsilon=0.1)
    led = QueryLedger()
    res = amplitude_amplify(U, store, cfg, led, np.random.default_rng(3))
    assert led.qw_steps == res.invocations * cfg.u_cost()
    # one preparation per trial plus one reflection per Grover iteration
    iterations = (res.invocations - res.trials) // 2
    assert led.qram_reflections == res.trials + iterations


# -- folklore -----------------------------------------------------------------------


def test_folklore_whole_graph():
    g = G.petersen()
    res = folklore_sample(g, range(g.n), SamplerConfig(gamma=gap(g), epsilon=0.1))
    assert res.fidelity_with_pi == pytest.approx(1.0)
    assert res.u_invocations == 1


def test_folklore_k4():
    g = G.complete(4)
    for seed in range(20):
        res = folklore_sample(g, 0, SamplerConfig(gamma=0.5, epsilon=0.01, rng_seed=seed))
        assert res.fidelity_with_pi >= 0.99


def test_folklore_cycle5_within_bound():
    g = G.cycle(5)
    cfg = lambda s: SamplerConfig(gamma=gap(g), epsilon=0.1, rng_seed=s)
    runs = [folklore_sample(g, 0, cfg(s)) for s in range(50)]
    assert all(r.fidelity_with_pi >= 0.9 for r in runs)
    assert np.median([r.ledger.qw_steps for r in runs]) <= folklore_step_bound(g.m, 2, cfg(0))


def test_gamma_above_gap_warns():
    g = G.cycle(5)
    with pytest.warns(UserWarning, match="exceeds the component gap"):
        res = folklore_sample(g, 0, SamplerConfig(gamma=0.5, epsilon=0.1))
    assert res.notes


# -- seeded --------------------------------------------------------------------------


def test_single_edge():
    g = G.path(2)
    for mode in ("oracle", "circuit"):
        res = seeded_sample(g, 0, SamplerConfig(gamma=1.0, epsilon=0.1, mode=mode))
        assert np.allclose(res.output.amps, [2**-0.5, 2**-0.5])
        assert res.doublings_used == 1 and res.terminated_at_M == 1


def test_k4_seeded_fidelity_and_termination():
    g = G.complete(4)
    bound = 2 ** (math.ceil(math.log2(g.m)) + DEFAULT.doubling_slack)
    Ms = []
    for seed in range(100):
        res = seeded_sample(g, 0, SamplerConfig(gamma=0.5, epsilon=0.01, rng_seed=seed))
        assert res.fidelity_with_pi >= 0.99
        Ms.append(res.terminated_at_M)
    assert max(Ms) <= bound
    assert np.median(Ms) <= 2 ** math.ceil(math.log2(g.m))


def test_component_restriction():
    g = G.disjoint_union(G.cycle(5), G.cycle(5))
    res = seeded_sample(g, 0, SamplerConfig(gamma=gap(G.cycle(5)), epsilon=0.01, rng_seed=2))
    amps = res.output.amps
    assert np.allclose(amps[10:], 0)
    assert np.allclose(np.abs(amps[:10]), 10**-0.5, atol=1e-6)
    assert res.fidelity_with_pi >= 0.99


def test_bipartite_refused_in_oracle_mode():
    with pytest.raises(InputError, match="bipartite"):
        seeded_sample(G.cycle(6), 0, SamplerConfig(gamma=0.1, epsilon=0.1))
    with pytest.raises(InputError, match="bipartite"):
        folklore_sample(G.path(3), 0, SamplerConfig(gamma=0.1, epsilon=0.1))


def test_bipartite_circuit_mode_exhausts():
    # the phase-0 part of a bipartite seed state is still pi, but the budget
    # only grows slowly; with a tiny doubling cap the run reports failure
    res = seeded_sample(G.cycle(64), 0, SamplerConfig(gamma=0.001, epsilon=0.1, mode="circuit", max_doublings=2))
    assert not res.finished and res.output is None
    assert res.notes and res.ledger.qw_steps >= 0


def test_determinism():
    g = G.petersen()
    cfg = SamplerConfig(gamma=gap(g), epsilon=0.1, rng_seed=17)
    a, b = seeded_sample(g, 3, cfg), seeded_sample(g, 3, cfg)
    assert a.ledger == b.ledger
    assert np.array_equal(a.output.amps, b.output.amps)


def test_budget_shape():
    cfg = SamplerConfig(gamma=0.25, epsilon=0.1)
    assert doubling_budget(64, 4, cfg) == math.floor(DEFAULT.budget_c * 4 * cfg.u_cost())
    assert doubling_budget(1, 1000, cfg) < cfg.u_cost()


@pytest.mark.parametrize("g", [G.complete(5), G.cycle(9), G.petersen()], ids=repr)
def test_circuit_oracle_agree(g):
    for seed in range(5):
        o = seeded_sample(g, 0, SamplerConfig(gamma=gap(g), epsilon=0.05, rng_seed=seed))
        c = seeded_sample(g, 0, SamplerConfig(gamma=gap(g), epsilon=0.05, rng_seed=seed, mode="circuit"))
        assert fidelity(o.output, c.output) >= 1 - 2 * 0.05
        assert c.fidelity_with_pi >= 1 - 0.05


def test_json_record_keys():
    g = G.cycle(5)
    cfg = SamplerConfig(gamma=gap(g), epsilon=0.1)
    rec = seeded_sample(g, 0, cfg).to_json("C5", cfg)
    assert set(rec) == {
        "graph", "mode", "gamma", "epsilon", "seed", "fidelity", "qw_steps", "degree_queries",
        "neighbor_queries", "qram_reflections", "terminated_at_M", "wall_time_ms",
    }  # fmt: skip


# -- degree-bound schedule ----------------------------------------------------------------


def test_degree_bound_k4():
    g = G.complete(4)
    for seed in range(10):
        res = seeded_sample_with_degree_bound(g, 0, SamplerConfig(gamma=0.5, epsilon=0.05, degree_bound=3, rng_seed=seed))
        assert res.fidelity_with_pi >= 0.95
        L = res.ledger
        assert res.classical_query_equivalent == L.qw_steps * 2 + L.degree_queries + L.neighbor_queries


def test_degree_bound_errors():
    with pytest.raises(InputError):
        seeded_sample_with_degree_bound(G.complete(4), 0, SamplerConfig(gamma=0.5, epsilon=0.1, degree_bound=1))
    with pytest.raises(InputError):
        seeded_sample_with_degree_bound(G.complete(4), 0, SamplerConfig(gamma=0.5, epsilon=0.1))


def test_degree_bound_cycle_scaling():
    sizes = (31, 63, 127, 255)
    med = []
    for n in sizes:
        g = G.cycle(n)
        vals = [
            seeded_sample_with_degree_bound(g, 0, SamplerConfig(gamma=gap(g), epsilon=0.1, degree_bound=2, rng_seed=s)).classical_query_equivalent
            for s in range(30)
        ]
        med.append(np.median(vals))
    slope = np.polyfit(np.log(sizes), np.log(med), 1)[0]
    # ~ n up to log factors
    assert 0.8 <= slope <= 1.4
