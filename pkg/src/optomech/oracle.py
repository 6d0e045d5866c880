"""Brute-force propagation and cross-validation of the closed form.

Three propagators are compared:

* ``exact``: diagonalise the lab-frame Hamiltonian directly;
* ``chain`` with ``exact_hii``: apply the transformation chain
  ``V1^dag V2^dag V3^dag exp(-i H3 t) V3 exp(-i H_II t) V2 V1`` with the full
  Rabi-type ``H_II`` (an identity, so it must agree with ``exact``);
* ``chain`` with ``rwa_hii``: same chain with the Jaynes-Cummings ``H_II``
  (must agree with the closed form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
import scipy.optimize

from . import model
from .analytic import (
    UNDEFINED_PROB,
    MechPairState,
    Outcome,
    beta_of,
    concurrence_closed,
    evolve_analytic,
    prob_closed,
    to_full_ket,
)
from .entanglement import concurrence_pure, fidelity_pure, qubit_project
from .fockcore import HilbertSpec, Propagator, StateVector, displacement
from .model import ModelParams

ChainMode = Literal["exact_hii", "rwa_hii"]

DEFAULT_RATIOS = (10.0, 15.0, 30.0)
DEFAULT_TAU_MAX = 3 * math.pi
DEFAULT_STEPS = 400


@dataclass(frozen=True)
class ComparisonReport:
    ratio: float
    tau: float
    fidelity_exact_vs_chain_exact: float
    fidelity_exact_vs_analytic: float
    fidelity_chain_rwa_vs_analytic: float
    prob_delta: float  # exact propagator vs closed form
    concurrence_delta: float  # exact propagator vs closed form, NaN if no outcome is defined
    leakage: float
    norm_error: float  # largest |1 - ||psi||| over the propagated states

    @property
    def infidelity(self) -> float:
        """Rotating-wave error: ``1 - F(exact, analytic)``."""
        return 1.0 - self.fidelity_exact_vs_analytic


class Oracle:
    """Numerical propagators for one parameter set, with cached decompositions."""

    def __init__(self, p: ModelParams, s: HilbertSpec | None = None):
        self.p = p
        self.s = s or HilbertSpec()
        s = self.s
        self.psi0 = s.basis(0, 0, 0).amplitudes
        self._exact = Propagator(model.build_hs(p, s))
        self._hii_exact = Propagator(model.build_hii_exact(p, s))
        self._hii_rwa = Propagator(model.build_hii_rwa(p, s)) if p.on_resonance else None
        self._h3_diag = np.real(np.diag(model.build_h3(p, s)))
        v1 = model.build_v1(s)
        v2 = model.build_v2(s)
        self._v3 = model.build_v3(p, s)
        self._v21_psi0 = v2 @ (v1 @ self.psi0)
        self._back = v1.conj().T @ v2.conj().T @ self._v3.conj().T

    def propagate_exact(self, t: float) -> StateVector:
        return StateVector(self._exact.apply(t, self.psi0), self.s.dims)

    def propagate_chain(self, t: float, mode: ChainMode = "exact_hii") -> StateVector:
        if mode == "exact_hii":
            hii = self._hii_exact
        elif mode == "rwa_hii":
            if self._hii_rwa is None:
                raise ValueError("rotating-wave chain requires xi = omega_m/2")
            hii = self._hii_rwa
        else:
            raise ValueError(f"unknown chain mode {mode!r}")
        psi = hii.apply(t, self._v21_psi0)
        psi = self._v3 @ psi
        psi = np.exp(-1j * self._h3_diag * t) * psi
        return StateVector(self._back @ psi, self.s.dims)

    def analytic_ket(self, t: float) -> StateVector:
        return to_full_ket(evolve_analytic(self.p, t), self.s)

    def average_concurrence(self, t: float) -> float:
        """``P1 C1 + P2 C2`` from the exact propagator.

        Branches that are impossible, or whose conditional state has mostly
        left the three-component span, carry no weight.
        """
        psi = self.propagate_exact(t)
        beta = beta_of(self.p, t)
        total = 0.0
        for outcome in Outcome:
            mech, prob = postselect_numeric(psi, outcome)
            if mech is None:
                continue
            try:
                pair, _ = undisplace_and_project(mech, beta)
            except ValueError:
                continue
            total += prob * concurrence_pure(pair)
        return total

    def compare(self, t: float) -> ComparisonReport:
        p = self.p
        exact = self.propagate_exact(t)
        chain_exact = self.propagate_chain(t, "exact_hii")
        chain_rwa = self.propagate_chain(t, "rwa_hii")
        ana = self.analytic_ket(t)
        beta = beta_of(p, t)

        prob_delta = 0.0
        c_delta = math.nan
        leakage = 0.0
        for outcome in Outcome:
            mech, prob = postselect_numeric(exact, outcome)
            prob_delta = max(prob_delta, abs(prob - prob_closed(p, t, outcome)))
            c_ref = concurrence_closed(p, t, outcome)
            if mech is None or c_ref is None:
                continue
            try:
                pair, leak = undisplace_and_project(mech, beta)
            except ValueError:
                # conditional state dominated by rotating-wave error
                continue
            leakage = max(leakage, leak)
            delta = abs(concurrence_pure(pair) - c_ref)
            c_delta = delta if math.isnan(c_delta) else max(c_delta, delta)

        norm_error = max(abs(1 - v.norm()) for v in (exact, chain_exact, chain_rwa, ana))
        return ComparisonReport(
            ratio=p.ratio,
            tau=p.tau(t),
            fidelity_exact_vs_chain_exact=fidelity_pure(exact, chain_exact),
            fidelity_exact_vs_analytic=fidelity_pure(exact, ana),
            fidelity_chain_rwa_vs_analytic=fidelity_pure(chain_rwa, ana),
            prob_delta=prob_delta,
            concurrence_delta=c_delta,
            leakage=leakage,
            norm_error=norm_error,
        )


def propagate_exact(p: ModelParams, s: HilbertSpec, t: float) -> StateVector:
    return Oracle(p, s).propagate_exact(t)


def propagate_chain(p: ModelParams, s: HilbertSpec, t: float, mode: ChainMode = "exact_hii") -> StateVector:
    return Oracle(p, s).propagate_chain(t, mode)


def postselect_numeric(psi: StateVector, outcome: Outcome) -> tuple[StateVector | None, float]:
    """Project onto one cavity block; the mirror ket is ``None`` for a (near) impossible outcome."""
    block = psi.tensor()[Outcome(outcome).value]
    prob = float(np.sum(np.abs(block) ** 2))
    if prob < UNDEFINED_PROB:
        return None, prob
    return StateVector(block.ravel() / math.sqrt(prob), block.shape), prob


def undisplace_and_project(mech: StateVector, beta: complex) -> tuple[MechPairState, float]:
    """Undo the local displacements ``D(beta/sqrt2)`` on both mirrors, then project."""
    n1, n2 = mech.dims
    alpha = -beta / math.sqrt(2)
    d1 = displacement(alpha, n1)
    d2 = d1 if n2 == n1 else displacement(alpha, n2)
    amps = d1 @ mech.tensor() @ d2.T
    return qubit_project(StateVector(amps.ravel(), mech.dims))


def compare(p: ModelParams, s: HilbertSpec, t: float) -> ComparisonReport:
    return Oracle(p, s).compare(t)


def tau_grid(tau_max: float = DEFAULT_TAU_MAX, steps: int = DEFAULT_STEPS) -> np.ndarray:
    return np.linspace(0.0, tau_max, steps)


def rwa_scan(
    ratios: Iterable[float] = DEFAULT_RATIOS,
    taus: Iterable[float] | None = None,
    n_b: int = 12,
    omega_c: float = 0.0,
) -> list[ComparisonReport]:
    """Compare all propagators on a ``(ratio, tau)`` grid, with ``g_mag = 1``."""
    taus = tau_grid() if taus is None else np.asarray(list(taus), dtype=float)
    s = HilbertSpec(n_b)
    rows = []
    for ratio in ratios:
        if ratio < 2:
            raise ValueError(f"ratio omega_m/g must be >= 2, got {ratio}")
        orc = Oracle(ModelParams.from_ratio(ratio, omega_c=omega_c), s)
        rows.extend(orc.compare(orc.p.time(tau)) for tau in taus)
    return rows


def max_infidelity(rows: Iterable[ComparisonReport]) -> dict[float, float]:
    """Worst rotating-wave infidelity per ratio."""
    out: dict[float, float] = {}
    for r in rows:
        out[r.ratio] = max(out.get(r.ratio, 0.0), r.infidelity)
    return out


@dataclass(frozen=True)
class ScanRow:
    ratio: float
    c_ave_max: float
    tau_at_max: float
    infidelity: float | None  # None off resonance, where there is no closed form


def scan_ratio(
    ratio: float,
    taus: Iterable[float] | None = None,
    n_b: int = 12,
    xi_over_omega_m: float = 0.5,
    omega_c: float = 0.0,
) -> ScanRow:
    """Largest numerically achieved average concurrence for one ``omega_m/g``.

    The grid maximum is polished with a bounded scalar search between its
    neighbours so the result is not limited by the grid spacing.
    """
    if ratio < 2:
        raise ValueError(f"ratio omega_m/g must be >= 2, got {ratio}")
    taus = tau_grid() if taus is None else np.asarray(list(taus), dtype=float)
    p = ModelParams.from_ratio(ratio, xi_over_omega_m=xi_over_omega_m, omega_c=omega_c)
    orc = Oracle(p, HilbertSpec(n_b))

    def c_ave(tau: float) -> float:
        return orc.average_concurrence(p.time(tau))

    values = [c_ave(tau) for tau in taus]
    k = int(np.argmax(values))
    tau_best, c_best = float(taus[k]), values[k]
    if len(taus) > 1:
        lo, hi = taus[max(k - 1, 0)], taus[min(k + 1, len(taus) - 1)]
        res = scipy.optimize.minimize_scalar(
            lambda x: -c_ave(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
        )
        if -res.fun > c_best:
            tau_best, c_best = float(res.x), float(-res.fun)

    infidelity = None
    if p.on_resonance:
        t = p.time(tau_best)
        infidelity = 1.0 - fidelity_pure(orc.propagate_exact(t), orc.analytic_ket(t))
    return ScanRow(ratio, c_best, tau_best, infidelity)
