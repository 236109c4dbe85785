"""Campaign harness: run algorithms over graph families and fit log-log exponents.

A plan names a family (kind + increasing sizes), the algorithms and the rng
seeds. ``run_plan`` produces one row per (graph, algorithm, seed) holding the
full cost ledger; rows are deterministic given the plan, and wall-clock time
is deliberately left out of them so that reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy.stats

from qwseed.constants import DEFAULT, Constants
from qwseed.errors import CapacityError, InputError
from qwseed.graph import ArcGraph, QueryLedger, build_family, path
from qwseed.iso import LabeledGraph, build_permutation_graph, permutation_graph_gap
from qwseed.sampler import SamplerConfig, component_info, folklore_sample, seeded_sample
from qwseed.stconn import classical_birthday_st, decide_st

SCHEMA_VERSION = 1
ALGORITHMS = ("seeded", "folklore", "stconn", "classical_birthday")
GAMMA_POLICIES = ("true", "family-min")

FIELDS = (
    "family", "size", "n", "m", "algorithm", "seed", "gamma", "epsilon", "mode", "status",
    "fidelity", "decision", "qw_steps", "degree_queries", "neighbor_queries",
    "qram_reflections", "qram_build_items", "classical_ops", "rng_draws",
    "u_invocations", "terminated_at_M", "seed_total_degree", "error",
)  # fmt: skip

# theoretical exponents of cost vs the family's natural size metric
THEORY = {
    "random_regular": ("m", {"folklore": 0.5, "seeded": 1.0 / 3.0}),
    "cycle": ("n", {"folklore": 1.5, "seeded": 1.0}),
    "orbit": ("m", {"folklore": 0.5, "seeded": 1.0 / 3.0}),
}

ROW_LABELS = {
    "folklore": "folklore QW sampling O(m^{1/2} delta^{-1/2})",
    "seeded": "this work O~(m^{1/3} delta^{-1/3})",
}


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    sizes: tuple[int, ...]
    degree: int = 3
    graph_seed: int = 7

    def __post_init__(self):
        if not self.sizes:
            raise InputError("size list is empty")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise InputError("sizes must be strictly increasing")


@dataclass(frozen=True)
class ExperimentPlan:
    family: FamilySpec
    seeds: tuple[int, ...]
    algorithms: tuple[str, ...]
    # "true": each graph's own gap; "family-min": smallest gap in the family; or a number
    gamma: str | float = "true"
    epsilon: float = 0.1
    mode: str = "oracle"
    stream_pe: bool = False
    start: int = 0
    constants: Constants = DEFAULT
    workers: int = 1

    def __post_init__(self):
        if not self.algorithms:
            raise InputError("algorithm list is empty")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad:
            raise InputError(f"unknown algorithms {sorted(bad)}; choose from {ALGORITHMS}")
        if not self.seeds:
            raise InputError("seed list is empty")
        if isinstance(self.gamma, str) and self.gamma not in GAMMA_POLICIES:
            raise InputError(f"gamma must be a number or one of {GAMMA_POLICIES}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["constants"] = self.constants.to_dict()
        return out


def family_member(spec: FamilySpec, size: int) -> ArcGraph:
    if spec.kind == "orbit":
        return build_permutation_graph(LabeledGraph.from_graph(path(size)))
    if spec.kind == "random_regular":
        return build_family("random_regular", size, spec.degree, spec.graph_seed)
    return build_family(spec.kind, size)


def member_gap(g: ArcGraph, start: int, constants: Constants = DEFAULT) -> float:
    if hasattr(g, "codes"):
        return permutation_graph_gap(g, constants)
    return component_info(g, start).spectral_gap


def _blank_row(plan: ExperimentPlan, size: int, g: ArcGraph, alg: str, seed: int, gamma: float) -> dict:
    row = {k: "" for k in FIELDS}
    row.update(
        family=plan.family.kind, size=size, n=g.n, m=g.m, algorithm=alg, seed=seed,
        gamma=gamma, epsilon=plan.epsilon, mode=plan.mode,
    )  # fmt: skip
    return row


def _fill_ledger(row: dict, ledger: QueryLedger) -> None:
    row.update(ledger.as_dict())


def _run_one(plan: ExperimentPlan, size: int, g: ArcGraph, alg: str, seed: int, gamma: float) -> dict:
    row = _blank_row(plan, size, g, alg, seed, gamma)
    cfg = SamplerConfig(
        gamma=gamma, epsilon=plan.epsilon, mode=plan.mode, rng_seed=seed,
        stream_pe=plan.stream_pe, constants=plan.constants,
    )  # fmt: skip
    target = g.n // 2
    try:
        if alg in ("seeded", "folklore"):
            fn = seeded_sample if alg == "seeded" else folklore_sample
            res = fn(g, plan.start, cfg)
            _fill_ledger(row, res.ledger)
            row.update(
                status="ok" if res.finished else "unfinished",
                fidelity=res.fidelity_with_pi,
                u_invocations=res.u_invocations,
                terminated_at_M="" if res.terminated_at_M is None else res.terminated_at_M,
                seed_total_degree=res.seed_total_degree,
            )
        elif alg == "stconn":
            res = decide_st(g, plan.start, target, gamma, plan.epsilon, cfg)
            _fill_ledger(row, res.ledger)
            row.update(
                status="ok" if res.record is not None else "unfinished",
                decision=res.decision,
                fidelity=min(res.sample_s.fidelity_with_pi, res.sample_t.fidelity_with_pi),
            )
        else:
            ledger = QueryLedger()
            res = classical_birthday_st(
                g, plan.start, target, gamma, ledger, np.random.default_rng(seed), plan.epsilon, plan.constants
            )
            _fill_ledger(row, ledger)
            row.update(status="ok", decision=res.decision)
    except CapacityError as exc:
        row.update(status="capacity_error", error=str(exc))
    except InputError as exc:
        row.update(status="input_error", error=str(exc))
    return row


def _failed_rows(plan: ExperimentPlan, size: int, exc: Exception) -> list[dict]:
    status = "capacity_error" if isinstance(exc, CapacityError) else "input_error"
    rows = []
    for alg in plan.algorithms:
        for seed in plan.seeds:
            row = {k: "" for k in FIELDS}
            row.update(
                family=plan.family.kind, size=size, algorithm=alg, seed=seed, epsilon=plan.epsilon,
                mode=plan.mode, status=status, error=str(exc),
            )  # fmt: skip
            rows.append(row)
    return rows


def _run_size(plan: ExperimentPlan, size: int, gamma_override: float | None) -> list[dict]:
    try:
        g = family_member(plan.family, size)
        gamma = gamma_override if gamma_override is not None else member_gap(g, plan.start, plan.constants)
    except (CapacityError, InputError) as exc:
        return _failed_rows(plan, size, exc)
    gamma = min(1.0, gamma)
    return [_run_one(plan, size, g, alg, seed, gamma) for alg in plan.algorithms for seed in plan.seeds]


def _family_gamma(plan: ExperimentPlan) -> float | None:
    if isinstance(plan.gamma, (int, float)):
        return float(plan.gamma)
    if plan.gamma == "family-min":
        gaps = []
        for s in plan.family.sizes:
            try:
                gaps.append(member_gap(family_member(plan.family, s), plan.start, plan.constants))
            except (CapacityError, InputError):
                continue  # the member's own rows record the error
        if not gaps:
            raise InputError("no family member admits a gap computation")
        return min(gaps)
    return None


def run_plan(plan: ExperimentPlan) -> list[dict]:
    """Execute the plan; seeds are fixed before dispatch so the pool cannot reorder results."""
    gamma = _family_gamma(plan)
    sizes = plan.family.sizes
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            chunks = list(pool.map(_run_size, [plan] * len(sizes), sizes, [gamma] * len(sizes)))
    else:
        chunks = [_run_size(plan, s, gamma) for s in sizes]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# qwseed campaign schema v{SCHEMA_VERSION}\n")
    writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def rows_to_json(rows: list[dict], plan: ExperimentPlan | None = None) -> str:
    doc = {"schema": SCHEMA_VERSION, "fields": list(FIELDS), "rows": rows}
    if plan is not None:
        doc["plan"] = plan.to_dict()
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def write_rows(rows: list[dict], out: str | Path, fmt: str = "csv", plan: ExperimentPlan | None = None) -> None:
    if fmt not in ("csv", "json"):
        raise InputError("format must be csv or json")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows, plan)
    Path(out).write_text(text)


# -- scaling fits -----------------------------------------------------------------


@dataclass(frozen=True)
class ScalingFit:
    algorithm: str
    cost_metric: str
    size_metric: str
    slope: float
    intercept: float
    r2: float
    points: tuple[tuple[float, float], ...] = field(default=())
    degenerate: bool = False


def default_cost_metric(algorithm: str) -> str:
    return "neighbor_queries" if algorithm == "classical_birthday" else "qw_steps"


def fit_scaling(
    table: list[dict],
    cost_metric: str | None = None,
    size_metric: str = "m",
    algorithms: tuple[str, ...] | None = None,
) -> dict[str, ScalingFit]:
    """Least-squares line through log(median cost) vs log(size), one per algorithm.

    Only rows with status "ok" count. Each algorithm needs at least four sizes.
    """
    algs = algorithms or tuple(dict.fromkeys(r["algorithm"] for r in table))
    fits = {}
    for alg in algs:
        metric = cost_metric or default_cost_metric(alg)
        per_size: dict[float, list[float]] = {}
        for r in table:
            if r["algorithm"] != alg or r.get("status", "ok") != "ok":
                continue
            per_size.setdefault(float(r[size_metric]), []).append(float(r[metric]))
        if len(per_size) < 4:
            raise InputError(f"{alg}: need at least 4 sizes to fit, got {len(per_size)}")
        xs = np.array(sorted(per_size))
        ys = np.array([np.median(per_size[x]) for x in xs])
        if np.any(ys <= 0):
            raise InputError(f"{alg}: nonpositive median {metric}; cannot fit on log axes")
        points = tuple(zip(xs.tolist(), ys.tolist()))
        if np.all(ys == ys[0]):
            fits[alg] = ScalingFit(alg, metric, size_metric, 0.0, math.log(ys[0]), 1.0, points, True)
            continue
        lr = scipy.stats.linregress(np.log(xs), np.log(ys))
        fits[alg] = ScalingFit(alg, metric, size_metric, float(lr.slope), float(lr.intercept), float(lr.rvalue**2), points)
    return fits


def emit_comparison_table(fits: dict[str, ScalingFit], family: str = "random_regular") -> str:
    """Measured vs theoretical exponents for the two sampling rows."""
    size_metric, theory = THEORY.get(family, ("m", {"folklore": 0.5, "seeded": 1.0 / 3.0}))
    header = f"{'algorithm':<48} {'theory':>8} {'measured':>9} {'R^2':>6}"
    lines = [f"cost exponent vs {size_metric} on the {family} family", header, "-" * len(header)]
    notices = []
    for alg in ("folklore", "seeded"):
        if alg not in fits:
            notices.append(f"notice: no {alg} fit; row omitted")
            continue
        f = fits[alg]
        flag = " (degenerate)" if f.degenerate else ""
        lines.append(f"{ROW_LABELS[alg]:<48} {theory[alg]:>8.3f} {f.slope:>9.3f} {f.r2:>6.3f}{flag}")
    return "\n".join(lines + notices) + "\n"
