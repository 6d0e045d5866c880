"""Entanglement and state-comparison measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import MechPairState
from .fockcore import StateVector, inner

CLIP_TOL = 1e-9
PROJECT_LEAKAGE_MAX = 0.5

_SYY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        rho = np.asarray(self.entries, dtype=complex)
        n = int(np.prod(dims))
        if rho.shape != (n, n):
            raise ValueError(f"entries of shape {rho.shape} do not match dims {dims}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValueError(f"density matrix trace is {np.trace(rho).real}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -CLIP_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def from_ket(cls, psi: StateVector | np.ndarray, dims=None) -> DensityMatrix:
        if isinstance(psi, StateVector):
            dims = dims or psi.dims
            psi = psi.amplitudes
        psi = np.asarray(psi, dtype=complex)
        return cls(tuple(dims or (psi.size,)), np.outer(psi, psi.conj()))


def _clip_eigs(vals: np.ndarray) -> np.ndarray:
    if vals.min() < -CLIP_TOL:
        raise ValueError(f"unphysical eigenvalue {vals.min():.3e}")
    return np.clip(vals, 0.0, None)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the subsystems listed in ``keep`` (kept in their original order)."""
    keep = sorted(set(keep))
    n = len(rho.dims)
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid subsystem selection {keep} for {n} subsystems")
    traced = [k for k in range(n) if k not in keep]
    t = rho.entries.reshape(rho.dims + rho.dims)
    # contract each traced pair, highest index first so positions stay valid
    for k in sorted(traced, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    d = int(np.prod([rho.dims[k] for k in keep]))
    red = t.reshape(d, d)
    return DensityMatrix(tuple(rho.dims[k] for k in keep), 0.5 * (red + red.conj().T))


def concurrence_pure(st: MechPairState) -> float:
    """``2|c00 c11 - c01 c10|`` with no ``|11>`` weight."""
    return 2 * abs(st.c01 * st.c10)


def concurrence_mixed(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    if rho.dims != (2, 2):
        raise ValueError(f"Wootters concurrence needs dims (2, 2), got {rho.dims}")
    # The square roots of the eigenvalues of rho (syy rho* syy) are the singular
    # values of W^T syy W for rho = W W^dag; the SVD avoids sqrt of rounding noise
    # when rho is rank deficient.
    p, v = np.linalg.eigh(rho.entries)
    w = v * np.sqrt(_clip_eigs(p))
    lam = np.linalg.svd(w.T @ _SYY @ w, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def partial_transpose(rho: DensityMatrix, sub) -> np.ndarray:
    """Transpose the listed subsystems."""
    n = len(rho.dims)
    t = rho.entries.reshape(rho.dims + rho.dims)
    perm = list(range(2 * n))
    for k in sub:
        perm[k], perm[k + n] = perm[k + n], perm[k]
    d = rho.entries.shape[0]
    return t.transpose(perm).reshape(d, d)


def log_negativity(rho: DensityMatrix, split=(0,)) -> float:
    """``log2`` of the trace norm of the partial transpose over subsystems ``split``."""
    split = sorted(set(split))
    if not split or any(k < 0 or k >= len(rho.dims) for k in split):
        raise ValueError(f"invalid bipartition {split} for dims {rho.dims}")
    pt = partial_transpose(rho, split)
    trace_norm = np.sum(np.abs(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))))
    return float(max(0.0, math.log2(trace_norm)))


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    return abs(inner(a, b)) ** 2


def qubit_project(mech: StateVector) -> tuple[MechPairState, float]:
    """Renormalised amplitudes on ``{|00>, |01>, |10>}`` plus the discarded weight."""
    if len(mech.dims) != 2:
        raise ValueError(f"expected a two-mode mechanical state, got dims {mech.dims}")
    amps = mech.tensor()
    c = np.array([amps[0, 0], amps[0, 1], amps[1, 0]])
    captured = float(np.sum(np.abs(c) ** 2))
    leakage = max(0.0, mech.norm() ** 2 - captured)
    if leakage >= PROJECT_LEAKAGE_MAX:
        raise ValueError(f"projection onto the three-component span discards {leakage:.3f}")
    return MechPairState.normalized(*c), leakage
