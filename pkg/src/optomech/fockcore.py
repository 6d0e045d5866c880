"""Truncated Fock-space linear algebra.

Operators are plain dense ``complex128`` numpy arrays.  States carry their
tensor-product dimensions so that post-selection and partial traces know how
to reshape them.

Basis layout of the single-photon subspace (used everywhere)::

    index = c * n_b**2 + n1 * n_b + n2

with ``c = 0`` for the photon in cavity 1, ``c = 1`` for the photon in
cavity 2, and ``n1``/``n2`` the phonon numbers of the two mirrors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-9
NORM_TOL = 1e-10


@dataclass(frozen=True)
class HilbertSpec:
    """Single photon (two cavities) x two mechanical modes, each cut at ``n_b``."""

    n_b: int = 12

    def __post_init__(self):
        if int(self.n_b) != self.n_b or self.n_b < 2:
            raise ValueError(f"n_b must be an integer >= 2, got {self.n_b}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (2, self.n_b, self.n_b)

    @property
    def dim(self) -> int:
        return 2 * self.n_b**2

    def index(self, c: int, n1: int, n2: int) -> int:
        return c * self.n_b**2 + n1 * self.n_b + n2

    def interior(self, margin: int = 2) -> np.ndarray:
        """Boolean mask of basis states with ``n1 + n2 < n_b - margin``.

        Restricting by total phonon number keeps whole shells of the
        beam-splitter transformation inside the box, so checks on this
        block are unaffected by the truncation edge.
        """
        n1, n2 = np.meshgrid(np.arange(self.n_b), np.arange(self.n_b), indexing="ij")
        mech = (n1 + n2 < self.n_b - margin).ravel()
        return np.concatenate([mech, mech])

    def basis(self, c: int = 0, n1: int = 0, n2: int = 0) -> StateVector:
        amps = np.zeros(self.dim, dtype=complex)
        amps[self.index(c, n1, n2)] = 1.0
        return StateVector(amps, self.dims)


@dataclass(frozen=True)
class StateVector:
    """Ket over a tensor-product basis (slowest index first)."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = tuple(self.dims) or (amps.size,)
        if int(np.prod(dims)) != amps.size:
            raise ValueError(f"dims {dims} do not match {amps.size} amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``dims``."""
        return self.amplitudes.reshape(self.dims)

    def with_amplitudes(self, amps: np.ndarray) -> StateVector:
        return StateVector(amps, self.dims)


def annihilation(n_b: int) -> np.ndarray:
    """Lowering operator ``b`` on levels ``0 .. n_b-1``."""
    if n_b < 2:
        raise ValueError(f"n_b must be >= 2, got {n_b}")
    return np.diag(np.sqrt(np.arange(1, n_b)), k=1).astype(complex)


def number(n_b: int) -> np.ndarray:
    return np.diag(np.arange(n_b)).astype(complex)


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor is the slowest index."""
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def displacement(alpha: complex, n_b: int) -> np.ndarray:
    """``exp(alpha b^dag - alpha^* b)`` exponentiated inside the truncated space.

    The result is exactly unitary on the box; its low-lying columns agree
    with the ideal coherent states as long as ``|alpha|**2 << n_b``.
    """
    b = annihilation(n_b)
    gen = alpha * b.conj().T - np.conj(alpha) * b
    return scipy.linalg.expm(gen)


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def is_hermitian(h: np.ndarray, tol: float = 1e-12) -> bool:
    return hermiticity_error(h) <= tol


class Propagator:
    """Cached eigendecomposition of a Hermitian matrix for repeated ``exp(-iht)``."""

    def __init__(self, h: np.ndarray, tol: float = HERMITIAN_TOL):
        h = np.asarray(h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
        err = hermiticity_error(h)
        if err > tol:
            raise ValueError(f"Hamiltonian is not Hermitian (max |H - H^dag| = {err:.3e})")
        # symmetrise so eigh sees exactly what we checked
        self.h = 0.5 * (h + h.conj().T)
        self.energies, self.vectors = np.linalg.eigh(self.h)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        coeffs = self.vectors.conj().T @ psi
        return self.vectors @ (np.exp(-1j * self.energies * t) * coeffs)

    def unitary(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T


def expm_apply(h: np.ndarray, t: float, psi: StateVector) -> StateVector:
    """Return ``exp(-i h t) psi`` via eigendecomposition of ``h``."""
    if np.shape(h)[0] != psi.dim:
        raise ValueError(f"operator dimension {np.shape(h)[0]} != state dimension {psi.dim}")
    return psi.with_amplitudes(Propagator(h).apply(t, psi.amplitudes))


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, antilinear in ``a``."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Largest entry magnitude of ``ab - ba``."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a @ b - b @ a)))


def project(op: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Restrict an operator to the rows and columns selected by ``mask``."""
    return op[np.ix_(mask, mask)]
