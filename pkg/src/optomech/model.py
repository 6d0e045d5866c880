"""Two-cavity optomechanical Hamiltonians in the one-photon subspace.

The photon location is a two-level system ``c`` (``c=0``: photon in cavity 1,
``c=1``: photon in cavity 2).  In that subspace

    a1^dag a1 -> |0><0|,   a2^dag a2 -> |1><1|,   a1^dag a2 -> |0><1|.

Transformation conventions, derived from the generators exactly as written
(``theta = pi/4``)::

    V1 b1 V1^dag = (b1 - b2)/sqrt2      V1 b2 V1^dag = (b1 + b2)/sqrt2
    V2 |c=0> = (|0> - |1>)/sqrt2        V2 |c=1> = (|0> + |1>)/sqrt2
    V3 b1 V3^dag = b1 - g/omega_m

In the rotating-wave Hamiltonian, ``c=1`` is the upper level (+omega_m/2)
and the coupling is ``g(|0><1| b2^dag + |1><0| b2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fockcore import HilbertSpec, annihilation, number, tensor

RWA_DETUNING_TOL = 1e-9

_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_LOWER_TO_0 = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


@dataclass(frozen=True)
class ModelParams:
    """Frequencies of the two-cavity system (angular units, hbar = 1).

    ``gamma_c`` and ``gamma_m`` only feed :func:`check_regime`; the
    dynamics is closed.
    """

    omega_m: float
    g0: float
    xi: float | None = None
    omega_c: float = 0.0
    gamma_c: float | None = None
    gamma_m: float | None = None

    def __post_init__(self):
        if self.xi is None:
            object.__setattr__(self, "xi", self.omega_m / 2)
        if not self.omega_m > 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        if self.g0 < 0:
            raise ValueError(f"g0 must be non-negative, got {self.g0}")
        if self.xi < 0:
            raise ValueError(f"xi must be non-negative, got {self.xi}")
        if self.omega_c < 0:
            raise ValueError(f"omega_c must be non-negative, got {self.omega_c}")
        for name in ("gamma_c", "gamma_m"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be non-negative, got {val}")

    @classmethod
    def from_ratio(
        cls,
        ratio: float,
        g_mag: float = 1.0,
        xi_over_omega_m: float = 0.5,
        omega_c: float = 0.0,
        **decay,
    ) -> ModelParams:
        """Parameters with ``omega_m = ratio * g_mag``; the default unit ``g_mag = 1`` makes t equal tau."""
        omega_m = ratio * g_mag
        return cls(
            omega_m=omega_m,
            g0=math.sqrt(2) * g_mag,
            xi=xi_over_omega_m * omega_m,
            omega_c=omega_c,
            **decay,
        )

    @property
    def g_signed(self) -> float:
        return -self.g0 / math.sqrt(2)

    @property
    def g_mag(self) -> float:
        return self.g0 / math.sqrt(2)

    @property
    def ratio(self) -> float:
        """``omega_m / g_mag``."""
        return self.omega_m / self.g_mag if self.g0 > 0 else math.inf

    @property
    def on_resonance(self) -> bool:
        return abs(self.omega_m - 2 * self.xi) <= RWA_DETUNING_TOL * self.omega_m

    def time(self, tau: float) -> float:
        """Physical time for the scaled time ``tau = g_mag * t``."""
        return tau / self.g_mag

    def tau(self, t: float) -> float:
        return self.g_mag * t


def _mech_ops(n_b: int):
    b = annihilation(n_b)
    eye = np.eye(n_b, dtype=complex)
    x = b + b.conj().T
    return b, eye, x, number(n_b)


def build_hs(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    """Lab-frame Hamiltonian restricted to one photon."""
    _, eye, x, n = _mech_ops(s.n_b)
    i2 = np.eye(2, dtype=complex)
    h = p.omega_c * np.eye(s.dim, dtype=complex)
    h += p.omega_m * (tensor(i2, n, eye) + tensor(i2, eye, n))
    h -= p.g0 * (tensor(_P0, x, eye) + tensor(_P1, eye, x))
    h -= p.xi * tensor(_SIGMA_X, eye, eye)
    return h


def build_h1(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    """Hamiltonian after the mirror beam-splitter ``V1``; mode b1 sees the total photon number."""
    _, eye, x, n = _mech_ops(s.n_b)
    i2 = np.eye(2, dtype=complex)
    g = p.g_signed
    h = p.omega_c * np.eye(s.dim, dtype=complex)
    h += p.omega_m * (tensor(i2, n, eye) + tensor(i2, eye, n))
    h += g * tensor(i2, x, eye)
    h += g * tensor(_P1 - _P0, eye, x)
    h -= p.xi * tensor(_SIGMA_X, eye, eye)
    return h


def build_hi(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    """Displaced-oscillator part acting on b1 only."""
    _, eye, x, n = _mech_ops(s.n_b)
    i2 = np.eye(2, dtype=complex)
    h_b1 = p.omega_c * eye + p.omega_m * n + p.g_signed * x
    return tensor(i2, h_b1, eye)


def build_hii_exact(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    """Quantum-Rabi part on the photon location and b2, counter-rotating terms kept."""
    _, eye, x, n = _mech_ops(s.n_b)
    h_q = p.xi * (_P1 - _P0)
    h = tensor(h_q, eye, eye)
    h += p.omega_m * tensor(np.eye(2), eye, n)
    h += p.g_signed * tensor(_SIGMA_X, eye, x)
    return h


def build_hii_rwa(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    """Jaynes-Cummings form of the photon-location/b2 part.

    The detuning is pinned to ``omega_m / 2`` whatever ``xi`` is, so off
    resonance this is not an approximation of :func:`build_hii_exact`.
    """
    if not p.on_resonance:
        warnings.warn(
            f"rotating-wave form assumes omega_m = 2 xi (omega_m={p.omega_m}, xi={p.xi})",
            stacklevel=2,
        )
    b, eye, _, n = _mech_ops(s.n_b)
    bd = b.conj().T
    h = tensor(0.5 * p.omega_m * (_P1 - _P0), eye, eye)
    h += p.omega_m * tensor(np.eye(2), eye, n)
    h += p.g_signed * (tensor(_LOWER_TO_0, eye, bd) + tensor(_LOWER_TO_0.T, eye, b))
    return h


def build_h3(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    """Diagonal form of the b1 part: ``omega_m n1 + omega_c - g^2/omega_m``."""
    eye = np.eye(s.n_b, dtype=complex)
    h_b1 = number(s.n_b) * p.omega_m + (p.omega_c - p.g_signed**2 / p.omega_m) * eye
    return tensor(np.eye(2), h_b1, eye)


def jc_excitation(s: HilbertSpec) -> np.ndarray:
    """Conserved quantity of the rotating-wave form: upper-level population plus b2 phonons."""
    eye = np.eye(s.n_b, dtype=complex)
    return tensor(_P1, eye, eye) + tensor(np.eye(2), eye, number(s.n_b))


def photon_number(s: HilbertSpec) -> np.ndarray:
    """``a1^dag a1 + a2^dag a2``, the identity on this subspace."""
    return np.eye(s.dim, dtype=complex)


def build_v1(s: HilbertSpec) -> np.ndarray:
    b, eye, _, _ = _mech_ops(s.n_b)
    bd = b.conj().T
    gen = tensor(bd, b) - tensor(b, bd)
    return tensor(np.eye(2), scipy.linalg.expm(0.25 * math.pi * gen))


def build_v2(s: HilbertSpec) -> np.ndarray:
    gen = _LOWER_TO_0 - _LOWER_TO_0.T  # a1^dag a2 - a2^dag a1
    rot = scipy.linalg.expm(0.25 * math.pi * gen)
    return tensor(rot, np.eye(s.n_b**2))


def build_v3(p: ModelParams, s: HilbertSpec) -> np.ndarray:
    b, eye, _, _ = _mech_ops(s.n_b)
    disp = scipy.linalg.expm((p.g_signed / p.omega_m) * (b.conj().T - b))
    return tensor(np.eye(2), disp, eye)


@dataclass(frozen=True)
class RegimeReport:
    """Operating-regime ratios and flags; a flag is ``None`` when it needs an absent decay rate."""

    g_over_gamma_c: float | None
    omega_m_over_gamma_c: float | None
    omega_m_over_g: float
    detuning: float  # |omega_m - 2 xi| / omega_m
    single_photon_strong_coupling: bool | None
    deep_resolved_sideband: bool | None
    rwa_valid: bool


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else math.inf


def check_regime(
    p: ModelParams,
    strong_factor: float = 10.0,
    sideband_factor: float = 10.0,
    rwa_factor: float = 10.0,
    detuning_tol: float = RWA_DETUNING_TOL,
) -> RegimeReport:
    """Evaluate the "much greater than" conditions at a fixed factor (one decade by default)."""
    omega_m_over_g = _ratio(p.omega_m, p.g_mag)
    detuning = abs(p.omega_m - 2 * p.xi) / p.omega_m
    rwa_valid = omega_m_over_g >= rwa_factor and detuning <= detuning_tol
    if p.gamma_c is None:
        g_gc = om_gc = strong = sideband = None
    else:
        g_gc = _ratio(p.g_mag, p.gamma_c)
        om_gc = _ratio(p.omega_m, p.gamma_c)
        strong = g_gc >= strong_factor
        sideband = om_gc >= sideband_factor
    return RegimeReport(
        g_over_gamma_c=g_gc,
        omega_m_over_gamma_c=om_gc,
        omega_m_over_g=omega_m_over_g,
        detuning=detuning,
        single_photon_strong_coupling=strong,
        deep_resolved_sideband=sideband,
        rwa_valid=rwa_valid,
    )
