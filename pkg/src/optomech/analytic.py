"""Closed-form single-photon dynamics and post-selected mirror states.

Starting from one photon in cavity 1 and both mirrors in the ground state,
the evolved state is a common local displacement ``D(beta/sqrt2)`` on each
mirror applied to a core with six amplitudes: for each photon location, a
``|00>`` component and an antisymmetric one-phonon component
``|01> - |10>``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .fockcore import HilbertSpec, StateVector, displacement
from .model import ModelParams

UNDEFINED_PROB = 1e-12
LEAKAGE_TOL = 1e-10

MECH_KETS = ("00", "01", "10")


class Outcome(enum.IntEnum):
    """Which cavity the photon is detected in; the value is the basis block ``c``."""

    CAVITY1 = 0
    CAVITY2 = 1


@dataclass(frozen=True)
class MechPairState:
    """Two-mirror pure state supported on ``{|00>, |01>, |10>}``."""

    c00: complex
    c01: complex
    c10: complex

    def __post_init__(self):
        norm = abs(self.c00) ** 2 + abs(self.c01) ** 2 + abs(self.c10) ** 2
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"MechPairState must be normalised, got norm^2 = {norm}")

    @classmethod
    def normalized(cls, c00: complex, c01: complex, c10: complex) -> MechPairState:
        nrm = math.sqrt(abs(c00) ** 2 + abs(c01) ** 2 + abs(c10) ** 2)
        return cls(c00 / nrm, c01 / nrm, c10 / nrm)

    def as_array(self) -> np.ndarray:
        return np.array([self.c00, self.c01, self.c10], dtype=complex)

    def two_qubit(self) -> np.ndarray:
        """Amplitudes over ``|00>, |01>, |10>, |11>``."""
        return np.array([self.c00, self.c01, self.c10, 0.0], dtype=complex)

    def distance(self, other: MechPairState) -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))


@dataclass(frozen=True)
class AnalyticState:
    """Closed-form evolved state.

    ``amp[c, k]`` is the amplitude of cavity block ``c`` and mechanical ket
    ``MECH_KETS[k]`` before the displacement and without the global phase
    ``exp(-i theta)``.
    """

    t: float
    beta: complex
    theta: float
    amp: np.ndarray


@dataclass(frozen=True)
class PostSelection:
    outcome: Outcome
    prob: float
    state: MechPairState | None  # None when prob < UNDEFINED_PROB
    displacement: complex

    @property
    def defined(self) -> bool:
        return self.state is not None


def beta_of(p: ModelParams, t: float) -> complex:
    """Mirror displacement ``-(g/omega_m)(1 - exp(-i omega_m t))`` with the signed coupling."""
    return -(p.g_signed / p.omega_m) * (1 - cmath.exp(-1j * p.omega_m * t))


def theta_of(p: ModelParams, t: float) -> float:
    om = p.omega_m
    return (p.omega_c + om / 2) * t + (p.g_signed**2 / om) * (math.sin(om * t) / om - t)


def core_amplitudes(g: float, omega_m: float, t: float) -> np.ndarray:
    """The 2x3 core amplitude table for an explicit (signed) coupling ``g``."""
    rot = cmath.exp(1j * omega_m * t)
    cos_gt = math.cos(g * t)
    one_ph = (1j / math.sqrt(2)) * math.sin(g * t)
    return 0.5 * np.array(
        [
            [rot + cos_gt, one_ph, -one_ph],
            [rot - cos_gt, one_ph, -one_ph],
        ],
        dtype=complex,
    )


def evolve_analytic(p: ModelParams, t: float) -> AnalyticState:
    if not p.on_resonance:
        raise ValueError(
            f"closed form requires xi = omega_m/2 (omega_m={p.omega_m}, xi={p.xi})"
        )
    return AnalyticState(
        t=t,
        beta=beta_of(p, t),
        theta=theta_of(p, t),
        amp=core_amplitudes(p.g_signed, p.omega_m, t),
    )


def prob_closed(p: ModelParams, t: float, outcome: Outcome) -> float:
    sign = 1.0 if outcome == Outcome.CAVITY1 else -1.0
    return 0.5 * (1 + sign * math.cos(p.g_signed * t) * math.cos(p.omega_m * t))


def postselect_analytic(st: AnalyticState, outcome: Outcome) -> PostSelection:
    outcome = Outcome(outcome)
    row = st.amp[outcome.value]
    prob = float(np.sum(np.abs(row) ** 2))
    disp = st.beta / math.sqrt(2)
    if prob < UNDEFINED_PROB:
        return PostSelection(outcome, prob, None, disp)
    return PostSelection(outcome, prob, MechPairState.normalized(*row), disp)


def concurrence_closed(p: ModelParams, t: float, outcome: Outcome) -> float | None:
    """Concurrence of the post-selected mirror state, ``None`` where the outcome has zero probability."""
    prob = prob_closed(p, t, outcome)
    if prob < UNDEFINED_PROB:
        return None
    return math.sin(p.g_signed * t) ** 2 / (4 * prob)


def average_concurrence(p: ModelParams, t: float) -> float:
    """``P1 C1 + P2 C2``; the undefined branches carry zero weight."""
    total = 0.0
    for outcome in Outcome:
        c = concurrence_closed(p, t, outcome)
        if c is not None:
            total += prob_closed(p, t, outcome) * c
    return total


def coherent_tail(alpha: complex, n_b: int, shift: int = 1) -> float:
    """Poisson weight a displaced ``|shift>``-level state puts at or above level ``n_b - 1 - shift``."""
    return float(scipy.stats.poisson.sf(n_b - 2 - shift, abs(alpha) ** 2))


def to_full_ket(st: AnalyticState, s: HilbertSpec) -> StateVector:
    """Materialise the closed-form state in the truncated basis, global phase included."""
    alpha = st.beta / math.sqrt(2)
    tail = coherent_tail(alpha, s.n_b)
    if tail >= LEAKAGE_TOL:
        raise ValueError(
            f"n_b={s.n_b} too small for displacement |alpha|={abs(alpha):.3g} (tail mass {tail:.2e})"
        )
    d = displacement(alpha, s.n_b)
    core = np.zeros((2, s.n_b, s.n_b), dtype=complex)
    core[:, 0, 0] = st.amp[:, 0]
    core[:, 0, 1] = st.amp[:, 1]
    core[:, 1, 0] = st.amp[:, 2]
    full = np.einsum("ij,kl,cjl->cik", d, d, core) * cmath.exp(-1j * st.theta)
    return StateVector(full.ravel(), s.dims)
