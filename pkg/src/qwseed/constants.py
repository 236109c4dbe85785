"""Single table of numerical tolerances and big-O constants.

Every hidden constant in a cost bound or schedule lives here so that tests
and experiments can reference it by name. Values are frozen; experiments and
tests never inline their own. Override from JSON with ``load_constants``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from qwseed.errors import InputError


@dataclass(frozen=True)
class Constants:
    # tolerances
    eig_tol: float = 1e-9
    norm_tol: float = 1e-9
    # eigenvalues of (W + W^T)/2 closer than this are treated as one cluster
    cluster_tol: float = 1e-8
    overlap_tol: float = 1e-6

    # size caps
    dense_cap: int = 2**14
    circuit_cap: int = 2**18

    # seed schedule: d(S) target = seed_c * M^(1/3) * gamma^(-1/3)
    seed_c: float = 1.0
    # gamma exponent of the degree-bound schedule (printed as 1/2)
    degree_bound_gamma_exp: float = 0.5

    # phase estimation: t = ceil(log2(pi / sqrt(2 gamma))) + pe_extra_bits
    pe_extra_bits: int = 2
    # k = max(1, ceil(k_mult * log2(1/eps)))
    k_mult: float = 1.0

    # amplitude amplification (exponential search)
    aa_growth: float = 1.33
    aa_max_trials: int = 100_000
    # expected U invocations <= aa_c / overlap
    aa_c: float = 12.0
    # resume the exponential search across doubling rounds instead of restarting
    aa_carry_lambda: bool = True

    # per-doubling budget, in units of U invocations: budget_c * sqrt(M / d_target)
    budget_c: float = 2.0
    max_doublings: int = 64
    # terminated_at_M <= 2^(ceil(log2 m) + doubling_slack), measured on K_4
    doubling_slack: int = 4
    # folklore reporting bound: folklore_c * sqrt(m / d(S)) U invocations
    folklore_c: float = 12.0

    # qram polylog exponent: each operation costs ceil(log2 m)^qram_log_power
    qram_log_power: int = 2

    # breadth-first edge search: (degree + neighbor queries) / M <= bfs_query_c
    bfs_query_c: float = 6.0

    # st-connectivity
    st_eps_prime: float = 0.1
    st_threshold: float = 1.0 / 3.0
    st_reps_c: float = 48.0
    birthday_walks_c: float = 1.0
    birthday_len_c: float = 1.0
    birthday_rounds_c: float = 1.0

    # permutation graph gap: delta >= iso_gap_c / (n ln n)
    iso_gap_c: float = 1.0

    # Delta^2 / delta band on cycle(5)
    phase_gap_ratio_lo: float = 1.0
    phase_gap_ratio_hi: float = 10.0

    def pe_bits(self, gamma: float) -> int:
        return max(1, math.ceil(math.log2(math.pi / math.sqrt(2.0 * gamma)))) + self.pe_extra_bits

    def pe_repetitions(self, epsilon: float) -> int:
        return max(1, math.ceil(self.k_mult * math.log2(1.0 / epsilon) - 1e-12))

    def qram_unit(self, m: int) -> int:
        return max(1, math.ceil(math.log2(max(m, 2)))) ** self.qram_log_power

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT = Constants()


def load_constants(path: str | Path | None = None, **overrides) -> Constants:
    values: dict = {}
    if path is not None:
        try:
            values.update(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read constants table {path}: {exc}") from exc
    values.update(overrides)
    known = {f.name for f in dataclasses.fields(Constants)}
    unknown = set(values) - known
    if unknown:
        raise InputError(f"unknown constants: {sorted(unknown)}")
    return Constants(**values)
