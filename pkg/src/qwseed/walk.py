"""Szegedy walk W = S R on the arc space.

R reflects each node's block of outgoing-arc amplitudes about its mean (the
projector onto the uniform state psi_i); S swaps every arc with its reverse.
The operator can be applied matrix-free or diagonalized densely.

Dense diagonalization goes through the real symmetric part H = (W + W^T)/2:
W is real orthogonal, hence normal, so H shares its eigenvectors and has
eigenvalues cos(theta). Each eigenvalue cluster of H is a W-invariant subspace
that is diagonalized separately. This is much cheaper than a complex Schur
form of W and exact up to the cluster tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from qwseed.constants import DEFAULT, Constants
from qwseed.edge_space import EdgeState
from qwseed.errors import CapacityError
from qwseed.graph import ArcGraph, QueryLedger
from qwseed.spectral import components


@dataclass(frozen=True)
class WalkSpectrum:
    phases: np.ndarray  # eigenphases in (-pi, pi]
    vectors: np.ndarray  # columns: orthonormal eigenvectors
    phase_gap: float  # min |theta| != 0 over eigenvectors overlapping span{psi_i}
    raw_gap: float  # min |theta| != 0 over all eigenvectors
    span_overlap: np.ndarray  # norm of each eigenvector's projection onto span{psi_i}


class WalkOperator:
    def __init__(self, g: ArcGraph, constants: Constants = DEFAULT):
        if g.m == 0:
            raise ValueError("walk needs at least one arc")
        self.graph = g
        self.constants = constants
        self._offsets = g.offsets[:-1]
        self._deg = g.degrees.astype(float)
        self._src = g.sources
        self._partner = g.partner

    @property
    def dim(self) -> int:
        return self.graph.m

    # -- matrix-free action ---------------------------------------------------

    def reflect(self, x: np.ndarray) -> np.ndarray:
        """2 sum_i |psi_i><psi_i| - I, applied blockwise."""
        block_sum = np.add.reduceat(x, self._offsets)
        mean = block_sum / self._deg
        return 2.0 * mean[self._src] - x

    def swap(self, x: np.ndarray) -> np.ndarray:
        return x[self._partner]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.swap(self.reflect(x))

    def apply_adjoint(self, x: np.ndarray) -> np.ndarray:
        return self.reflect(self.swap(x))

    # -- dense forms ------------------------------------------------------------

    def _check_dense(self) -> None:
        if self.dim > self.constants.dense_cap:
            raise CapacityError(
                f"arc space of dimension {self.dim} exceeds the dense cap "
                f"{self.constants.dense_cap}; use the matrix-free (circuit) mode"
            )

    def matrix(self) -> np.ndarray:
        self._check_dense()
        m = self.dim
        R = -np.eye(m)
        for i in range(self.graph.n):
            lo, hi = self.graph.offsets[i], self.graph.offsets[i + 1]
            R[lo:hi, lo:hi] += 2.0 / (hi - lo)
        # (S R)[a, :] = R[partner[a], :]
        return R[self._partner]

    def psi_basis(self) -> np.ndarray:
        """m x n matrix whose orthonormal columns are the |psi_i>."""
        B = np.zeros((self.dim, self.graph.n))
        B[np.arange(self.dim), self._src] = 1.0 / np.sqrt(self._deg[self._src])
        return B

    @cached_property
    def phase_zero_basis(self) -> np.ndarray:
        """Orthonormal real basis of the eigenvalue-1 eigenspace of W."""
        self._check_dense()
        W = self.matrix()
        H = 0.5 * (W + W.T)
        lo = 1.0 - self.constants.cluster_tol
        _, vecs = scipy.linalg.eigh(H, subset_by_value=(lo, np.inf))
        return vecs

    @cached_property
    def _component_arcs(self) -> tuple[np.ndarray, np.ndarray]:
        labels = components(self.graph)[self._src]
        return labels, np.bincount(labels)

    def psi_coefficients(self, x: np.ndarray) -> np.ndarray:
        """<psi_i|x> for every node i."""
        return np.add.reduceat(x, self._offsets) / np.sqrt(self._deg)

    def project_phase_zero(self, x: np.ndarray) -> np.ndarray:
        """Projection onto the eigenvalue-1 eigenspace of W.

        W is a product of two reflections, about A = span{psi_i} and about the
        symmetric subspace B, so its 1-eigenspace is (A & B) + (A^perp & B^perp).
        For x in A the second part contributes nothing and A & B is spanned by
        the per-component uniform arc states, which gives an exact O(m) formula.
        Inputs outside A go through the dense eigenbasis.
        """
        c = self.psi_coefficients(x)
        in_span = c[self._src] / np.sqrt(self._deg[self._src])
        scale = max(1.0, float(np.linalg.norm(x)))
        if np.linalg.norm(x - in_span) <= self.constants.eig_tol * scale:
            labels, sizes = self._component_arcs
            overlap = np.bincount(labels, weights=x.real, minlength=len(sizes)).astype(complex)
            if np.iscomplexobj(x):
                overlap += 1j * np.bincount(labels, weights=x.imag, minlength=len(sizes))
            return (overlap / sizes)[labels]
        return self.project_phase_zero_dense(x)

    def project_phase_zero_dense(self, x: np.ndarray) -> np.ndarray:
        Q = self.phase_zero_basis
        return Q @ (Q.T @ x)

    @cached_property
    def spectrum(self) -> WalkSpectrum:
        self._check_dense()
        tol = self.constants.cluster_tol
        W = self.matrix()
        H = 0.5 * (W + W.T)
        cvals, cvecs = np.linalg.eigh(H)
        m = self.dim
        phases = np.empty(m)
        vectors = np.empty((m, m), dtype=complex)
        start = 0
        while start < m:
            stop = start + 1
            while stop < m and cvals[stop] - cvals[stop - 1] <= tol:
                stop += 1
            Q = cvecs[:, start:stop]
            c = float(np.clip(cvals[start:stop].mean(), -1.0, 1.0))
            if c >= 1.0 - tol:
                phases[start:stop] = 0.0
                vectors[:, start:stop] = Q
            elif c <= -1.0 + tol:
                phases[start:stop] = np.pi
                vectors[:, start:stop] = Q
            else:
                # W restricted to the cluster is normal with eigenvalues c +- i sqrt(1-c^2)
                small = Q.T @ W @ Q
                T, Z = scipy.linalg.schur(small.astype(complex), output="complex")
                phases[start:stop] = np.angle(np.diag(T))
                vectors[:, start:stop] = Q @ Z
            start = stop
        overlap = np.linalg.norm(self.psi_basis().T @ vectors, axis=0)
        nonzero = np.abs(phases) > self.constants.eig_tol
        relevant = nonzero & (overlap > self.constants.overlap_tol)
        phase_gap = float(np.abs(phases[relevant]).min()) if relevant.any() else np.pi
        raw_gap = float(np.abs(phases[nonzero]).min()) if nonzero.any() else np.pi
        return WalkSpectrum(phases, vectors, phase_gap, raw_gap, overlap)


def apply_walk(w: WalkOperator, state: EdgeState, ledger: QueryLedger | None) -> EdgeState:
    out = w.apply(state.amps.astype(complex))
    if ledger is not None:
        ledger.qw_steps += 1
    return EdgeState(state.space, out)


def apply_walk_adjoint(w: WalkOperator, state: EdgeState, ledger: QueryLedger | None) -> EdgeState:
    out = w.apply_adjoint(state.amps.astype(complex))
    if ledger is not None:
        ledger.qw_steps += 1
    return EdgeState(state.space, out)


def eigendecompose(w: WalkOperator) -> WalkSpectrum:
    return w.spectrum


def decompose_in_walk_basis(w: WalkOperator, state: EdgeState) -> list[tuple[float, float]]:
    """(eigenphase, norm of the projection onto that eigenspace), one entry per distinct phase.

    Eigenspaces are often degenerate, so per-vector coefficients would depend on
    an arbitrary basis choice; norms per eigenspace do not.
    """
    spec = w.spectrum
    weights = np.abs(spec.vectors.conj().T @ state.amps) ** 2
    order = np.argsort(spec.phases, kind="stable")
    phases = spec.phases[order]
    weights = weights[order]
    breaks = np.flatnonzero(np.diff(phases) > w.constants.cluster_tol) + 1
    out = []
    for ph, wt in zip(np.split(phases, breaks), np.split(weights, breaks)):
        out.append((float(ph.mean()), float(np.sqrt(wt.sum()))))
    return out


def phase_zero_weight(w: WalkOperator, state: EdgeState) -> float:
    """Norm of the state's component in the phase-0 eigenspace."""
    return float(np.linalg.norm(w.phase_zero_basis.T @ state.amps))
