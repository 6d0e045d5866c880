import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech.analytic import (
    MechPairState,
    Outcome,
    average_concurrence,
    beta_of,
    concurrence_closed,
    core_amplitudes,
    evolve_analytic,
    postselect_analytic,
    prob_closed,
    theta_of,
    to_full_ket,
)
from optomech.fockcore import HilbertSpec, displacement
from optomech.model import ModelParams

P15 = ModelParams.from_ratio(15)
HALF_PI = math.pi / 2

ratios = st.sampled_from([10.0, 15.0, 30.0, 100.0])
taus = st.floats(0.0, 4 * math.pi)


class TestBeta:
    def test_zero_time(self):
        assert beta_of(P15, 0.0) == 0

    def test_half_mechanical_period(self):
        t = math.pi / P15.omega_m
        assert beta_of(P15, t) == pytest.approx(-2 * P15.g_signed / P15.omega_m, abs=1e-15)

    @settings(max_examples=100)
    @given(ratios, taus)
    def test_bounded(self, ratio, tau):
        p = ModelParams.from_ratio(ratio)
        assert abs(beta_of(p, p.time(tau))) <= 2 * p.g_mag / p.omega_m + 1e-15

    def test_formula_at_first_maximum(self):
        # omega_m t = 7.5 pi, so exp(-i omega_m t) = i and beta = -(g/omega_m)(1 - i)
        beta = beta_of(P15, HALF_PI)
        assert beta == pytest.approx(-(P15.g_signed / 15) * (1 - 1j), abs=1e-15)
        assert abs(beta) == pytest.approx(math.sqrt(2) / 15)


class TestTheta:
    def test_zero_time(self):
        assert theta_of(P15, 0.0) == 0

    def test_uncoupled(self):
        p = ModelParams(omega_m=4.0, g0=0.0, omega_c=1.5)
        assert theta_of(p, 0.8) == pytest.approx((1.5 + 2.0) * 0.8)

    def test_initial_rate(self):
        p = ModelParams.from_ratio(15, omega_c=3.0)
        h = 1e-5
        rate = (theta_of(p, h) - theta_of(p, -h)) / (2 * h)
        assert rate == pytest.approx(3.0 + 7.5, rel=1e-8)


def eq11_state(g, omega_m, t):
    """Post-selected mirror state for cavity 1, written out independently."""
    n1 = 1 / math.sqrt(2 + 2 * math.cos(g * t) * math.cos(omega_m * t))
    c00 = n1 * (cmath.exp(1j * omega_m * t) + math.cos(g * t))
    c01 = n1 * (1j / math.sqrt(2)) * math.sin(g * t)
    return c00, c01, -c01


class TestEvolve:
    def test_initial_state(self):
        st0 = evolve_analytic(P15, 0.0)
        expected = np.zeros((2, 3))
        expected[0, 0] = 1
        np.testing.assert_allclose(st0.amp, expected, atol=1e-15)
        assert st0.beta == 0 and st0.theta == 0

    def test_first_maximum_matches_printed_state(self):
        # the printed state takes g > 0
        amp = core_amplitudes(P15.g_mag, P15.omega_m, HALF_PI)
        for c in (0, 1):
            pair = MechPairState.normalized(*amp[c])
            assert pair.c00 == pytest.approx(-1j / math.sqrt(2), abs=1e-14)
            assert pair.c01 == pytest.approx(0.5j, abs=1e-14)
            assert pair.c10 == pytest.approx(-0.5j, abs=1e-14)

    def test_first_maximum_signed_coupling(self):
        # with g = -g0/sqrt2 the one-phonon part flips sign: a local unitary, same entanglement
        st1 = evolve_analytic(P15, HALF_PI)
        for c in (0, 1):
            pair = MechPairState.normalized(*st1.amp[c])
            assert pair.c00 == pytest.approx(-1j / math.sqrt(2), abs=1e-14)
            assert pair.c01 == pytest.approx(-0.5j, abs=1e-14)
            assert pair.c10 == pytest.approx(0.5j, abs=1e-14)

    def test_norm_random(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = ModelParams.from_ratio(rng.uniform(2, 200), g_mag=rng.uniform(0.1, 3), omega_c=rng.uniform(0, 5))
            st1 = evolve_analytic(p, rng.uniform(0, 50))
            assert np.sum(np.abs(st1.amp) ** 2) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=100)
    @given(ratios, taus)
    def test_antisymmetric_one_phonon(self, ratio, tau):
        p = ModelParams.from_ratio(ratio)
        amp = evolve_analytic(p, p.time(tau)).amp
        np.testing.assert_array_equal(amp[:, 1], -amp[:, 2])

    def test_rejects_off_resonance(self):
        with pytest.raises(ValueError, match="xi"):
            evolve_analytic(ModelParams(omega_m=1.0, g0=0.1, xi=0.4), 1.0)


class TestPostSelection:
    def test_initial(self):
        st0 = evolve_analytic(P15, 0.0)
        sel1 = postselect_analytic(st0, Outcome.CAVITY1)
        sel2 = postselect_analytic(st0, Outcome.CAVITY2)
        assert sel1.prob == 1 and sel1.state.c00 == 1
        assert sel2.prob == 0 and sel2.state is None and not sel2.defined

    def test_first_maximum(self):
        st1 = evolve_analytic(P15, HALF_PI)
        for outcome in Outcome:
            assert postselect_analytic(st1, outcome).prob == pytest.approx(0.5, abs=1e-15)

    @settings(max_examples=200)
    @given(ratios, taus)
    def test_probabilities(self, ratio, tau):
        p = ModelParams.from_ratio(ratio)
        t = p.time(tau)
        st1 = evolve_analytic(p, t)
        sels = [postselect_analytic(st1, o) for o in Outcome]
        assert sels[0].prob + sels[1].prob == pytest.approx(1.0, abs=1e-12)
        for sel in sels:
            assert sel.prob == pytest.approx(prob_closed(p, t, sel.outcome), abs=1e-12)
            assert sel.displacement == st1.beta / math.sqrt(2)

    @settings(max_examples=100)
    @given(ratios, taus)
    def test_state_matches_written_out_form(self, ratio, tau):
        p = ModelParams.from_ratio(ratio)
        t = p.time(tau)
        sel = postselect_analytic(evolve_analytic(p, t), Outcome.CAVITY1)
        if sel.prob < 1e-8:
            return
        ref = eq11_state(p.g_signed, p.omega_m, t)
        np.testing.assert_allclose(sel.state.as_array(), ref, atol=1e-10)

    def test_branches_coincide_at_maxima(self):
        for n in range(4):
            t = (n + 0.5) * math.pi
            st1 = evolve_analytic(P15, t)
            a, b = (postselect_analytic(st1, o).state for o in Outcome)
            assert a.distance(b) < 1e-12


class TestConcurrence:
    def test_first_maximum(self):
        for outcome in Outcome:
            assert concurrence_closed(P15, HALF_PI, outcome) == pytest.approx(0.5, abs=1e-15)

    def test_initial(self):
        assert concurrence_closed(P15, 0.0, Outcome.CAVITY1) == 0
        assert concurrence_closed(P15, 0.0, Outcome.CAVITY2) is None

    def test_quarter_period(self):
        t = math.pi / 4
        c00, c01, c10 = eq11_state(P15.g_signed, P15.omega_m, t)
        wootters = 2 * abs(c01 * c10)
        assert wootters == pytest.approx(1 / 6, abs=1e-14)
        assert concurrence_closed(P15, t, Outcome.CAVITY1) == pytest.approx(wootters, abs=1e-14)

    @settings(max_examples=200)
    @given(ratios, taus)
    def test_weighted_identity(self, ratio, tau):
        p = ModelParams.from_ratio(ratio)
        t = p.time(tau)
        quarter = math.sin(tau) ** 2 / 4
        for o in Outcome:
            c = concurrence_closed(p, t, o)
            if c is not None:
                weighted = prob_closed(p, t, o) * c
                assert weighted == pytest.approx(quarter, abs=1e-12)
                assert weighted <= 0.25 + 1e-15
        assert average_concurrence(p, t) == pytest.approx(2 * quarter, abs=1e-12)

    def test_envelope_touches_quarter(self):
        for n in range(3):
            t = (n + 0.5) * math.pi
            for o in Outcome:
                assert prob_closed(P15, t, o) * concurrence_closed(P15, t, o) == pytest.approx(0.25, abs=1e-15)

    def test_average_zero_at_start(self):
        assert average_concurrence(P15, 0.0) == 0

    def test_average_maximum(self):
        assert average_concurrence(P15, HALF_PI) == pytest.approx(0.5, abs=1e-15)


class TestFullKet:
    S = HilbertSpec(12)

    def test_initial(self):
        psi = to_full_ket(evolve_analytic(P15, 0.0), self.S)
        expected = np.zeros(self.S.dim)
        expected[0] = 1
        np.testing.assert_allclose(psi.amplitudes, expected, atol=1e-15)

    def test_norm_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            p = ModelParams.from_ratio(rng.uniform(10, 100), omega_c=rng.uniform(0, 3))
            psi = to_full_ket(evolve_analytic(p, rng.uniform(0, 20)), self.S)
            assert abs(psi.norm() - 1) < 1e-10

    def test_round_trip(self):
        s = self.S
        for tau in (0.3, HALF_PI, 2.0, 5.1):
            st1 = evolve_analytic(P15, tau)
            psi = to_full_ket(st1, s).tensor() * cmath.exp(1j * st1.theta)
            d = displacement(-st1.beta / math.sqrt(2), s.n_b)
            core = np.einsum("ij,kl,cjl->cik", d, d, psi)
            expected = np.zeros_like(core)
            expected[:, 0, 0] = st1.amp[:, 0]
            expected[:, 0, 1] = st1.amp[:, 1]
            expected[:, 1, 0] = st1.amp[:, 2]
            assert np.max(np.abs(core - expected)) < 1e-10

    def test_global_phase_included(self):
        p = ModelParams.from_ratio(15, omega_c=2.0)
        st1 = evolve_analytic(p, 0.0)
        st1 = type(st1)(t=0.0, beta=0j, theta=1.0, amp=st1.amp)
        psi = to_full_ket(st1, self.S)
        assert psi.amplitudes[0] == pytest.approx(cmath.exp(-1j))

    def test_rejects_small_cutoff(self):
        st1 = evolve_analytic(ModelParams.from_ratio(3), math.pi / 3)
        with pytest.raises(ValueError, match="too small"):
            to_full_ket(st1, HilbertSpec(4))
