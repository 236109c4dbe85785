"""Binary-tree state-preparation store over a list of arcs.

Leaves hold the stored arcs (weight 1 each, padded with weight-0 leaves to a
power of two); each internal node holds the sum of its children. Preparing the
state descends the tree, assigning amplitude sqrt(child / parent) per branch.
Amplitudes are materialized directly; the tree exists so build and access
costs can be metered honestly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qwseed.constants import DEFAULT, Constants
from qwseed.edge_space import EdgeState, arc_index
from qwseed.errors import InputError
from qwseed.graph import ArcGraph, QueryLedger
from qwseed.seed import SeedSet


@dataclass(frozen=True, eq=False)
class QramStore:
    space: ArcGraph
    arcs: np.ndarray
    levels: tuple[np.ndarray, ...]  # levels[0] = leaves, levels[-1] = root
    unit_cost: int
    _state: np.ndarray

    @property
    def size(self) -> int:
        return len(self.arcs)


@dataclass(frozen=True)
class Unprepared:
    """U^dagger applied to a state: amplitude on |0> plus the orthogonal remainder."""

    zero_amplitude: complex
    remainder: np.ndarray


def _leaf_amplitudes(levels: tuple[np.ndarray, ...]) -> np.ndarray:
    amp = np.ones(1)
    for depth in range(len(levels) - 1, 0, -1):
        parent = levels[depth]
        child = levels[depth - 1]
        ratio = np.divide(child, np.repeat(parent, 2), out=np.zeros(len(child)), where=np.repeat(parent, 2) > 0)
        amp = np.repeat(amp, 2) * np.sqrt(ratio)
    return amp


def qram_build(
    space: ArcGraph,
    arcs,
    ledger: QueryLedger | None,
    constants: Constants = DEFAULT,
) -> QramStore:
    """Store ``arcs`` (a SeedSet, arc indices or (i, j) pairs) in a counting tree."""
    if isinstance(arcs, SeedSet):
        arcs = arcs.arc_ids
    arcs = list(arcs)
    if not arcs:
        raise InputError("cannot build a QRAM store over an empty seed")
    if isinstance(arcs[0], tuple):
        arcs = [arc_index(space, i, j) for i, j in arcs]
    idx = np.asarray(arcs, dtype=np.int64)
    if len(np.unique(idx)) != len(idx):
        raise InputError("duplicate arcs in QRAM input")
    width = 1 << max(0, int(np.ceil(np.log2(len(idx)))))
    leaves = np.zeros(width)
    leaves[: len(idx)] = 1.0
    levels = [leaves]
    while len(levels[-1]) > 1:
        levels.append(levels[-1].reshape(-1, 2).sum(axis=1))
    amps = _leaf_amplitudes(tuple(levels))[: len(idx)]
    state = np.zeros(space.m, dtype=complex)
    state[idx] = amps
    unit = constants.qram_unit(space.m)
    if ledger is not None:
        ledger.qram_build_items += len(idx) * unit
    return QramStore(space, idx, tuple(levels), unit, state)


def charge_access(store: QramStore, ledger: QueryLedger | None) -> None:
    if ledger is not None:
        ledger.qram_reflections += 1
        ledger.classical_ops += store.unit_cost


def qram_prepare(store: QramStore, ledger: QueryLedger | None) -> EdgeState:
    charge_access(store, ledger)
    return EdgeState(store.space, store._state.copy())


def qram_unprepare(store: QramStore, state: EdgeState, ledger: QueryLedger | None) -> Unprepared:
    charge_access(store, ledger)
    c = complex(np.vdot(store._state, state.amps))
    return Unprepared(c, state.amps - c * store._state)


def qram_reflect(store: QramStore, state: EdgeState, ledger: QueryLedger | None) -> EdgeState:
    """(2|S><S| - I)|state>, computed as U (2|0><0| - I) U^dagger."""
    charge_access(store, ledger)
    c = complex(np.vdot(store._state, state.amps))
    rem = state.amps - c * store._state
    return EdgeState(store.space, c * store._state - rem)
