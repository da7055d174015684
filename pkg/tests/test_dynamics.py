import cmath
import math

import numpy as np
import pytest

from photon_absorber.coupling import (CouplingSchedule, CouplingKind,
                                      absorber_coupling, generator_coupling,
                                      truncated_coupling)
from photon_absorber.dynamics import (integrate_amplitudes, integrate_moments,
                                      residual_check, zero_dynamics_solve)
from photon_absorber.wavepacket import make_exponential, make_gaussian

PAPER_C = 7.2e7
PAPER_T1 = 10.0 / PAPER_C


class ZeroSchedule(CouplingSchedule):
    """gamma identically 0: absorber decoupled from the field."""

    def __call__(self, t):
        return 0.0 + 0.0j


def make_zero_schedule(w):
    return ZeroSchedule(kind=CouplingKind.TRUNCATED_ABSORBER, wavepacket=w,
                        phi0=0.0, T=1.0)


class TestAmplitudesExactGamma:
    @pytest.mark.parametrize("w,t_end", [
        (make_exponential(1.0), 10.0),
        (make_gaussian(5.0, 0.8), 10.0),
    ])
    def test_closed_form_solution(self, w, t_end):
        phi0 = 0.9
        lam = generator_coupling(w)
        gam = absorber_coupling(w, phi0=phi0)
        traj = integrate_amplitudes(lam, gam, t_end=t_end)
        psi2 = traj.column("psi2")
        psi3 = traj.column("psi3")
        expect2 = np.array([math.sqrt(w.tail_energy(t)) for t in traj.times])
        expect3 = cmath.exp(-1j * phi0) * np.array(
            [math.sqrt(w.head_energy(t)) for t in traj.times])
        assert np.max(np.abs(psi2 - expect2)) < 1e-7
        assert np.max(np.abs(psi3 - expect3)) < 1e-7
        # p_out stays 0: photon never reaches the output
        assert np.max(traj.column("p_out")) < 1e-7

    def test_residuals(self):
        w = make_exponential(1.0)
        traj = integrate_amplitudes(generator_coupling(w), absorber_coupling(w),
                                    t_end=10.0)
        rep = residual_check(traj)
        assert rep.conservation_residual < 1e-8
        assert rep.zero_output_residual < 1e-7

    def test_near_complete_absorption(self):
        w = make_exponential(1.0)
        traj = integrate_amplitudes(generator_coupling(w), absorber_coupling(w),
                                    t_end=10.0)
        assert traj.column("n2")[-1] >= 1.0 - 2e-4


class TestAmplitudesDecoupled:
    def test_photon_goes_to_output(self):
        w = make_exponential(1.0)
        lam = generator_coupling(w)
        gam = make_zero_schedule(w)
        traj = integrate_amplitudes(lam, gam, t_end=8.0)
        assert np.max(traj.column("n2")) < 1e-12
        heads = np.array([w.head_energy(t) for t in traj.times])
        assert abs(traj.column("p_out")[-1] - heads[-1]) < 1e-9
        assert np.max(np.abs(traj.column("p_out") - heads)) < 1e-8


class TestAmplitudesTruncated:
    def test_paper_value_largest_truncation(self):
        w = make_exponential(PAPER_C)
        lam = generator_coupling(w)
        gam = truncated_coupling(w, T=0.1 * PAPER_T1)
        traj = integrate_amplitudes(lam, gam, t_end=PAPER_T1)
        assert traj.column("n2")[-1] == pytest.approx(0.6037, abs=0.002)

    def test_conservation(self):
        w = make_exponential(PAPER_C)
        lam = generator_coupling(w)
        for frac in (0.001, 0.01, 0.1):
            gam = truncated_coupling(w, T=frac * PAPER_T1)
            traj = integrate_amplitudes(lam, gam, t_end=PAPER_T1)
            assert residual_check(traj).conservation_residual < 1e-8


class TestMoments:
    def test_initial_conditions(self):
        w = make_exponential(1.0)
        mom = integrate_moments(generator_coupling(w),
                                truncated_coupling(w, T=0.1), t_end=10.0)
        assert mom.column("n2")[0] == 0.0
        assert mom.column("cross")[0] == 0.0
        assert mom.column("n1sz")[0] == -1.0
        assert mom.column("n1n2")[0] == 0.0

    def test_n1n2_stays_zero(self):
        w = make_exponential(1.0)
        mom = integrate_moments(generator_coupling(w),
                                truncated_coupling(w, T=0.1), t_end=10.0,
                                full_system=True)
        assert np.max(np.abs(mom.column("n1n2"))) < 1e-12

    def test_paper_value_middle_truncation(self):
        w = make_exponential(PAPER_C)
        mom = integrate_moments(generator_coupling(w),
                                truncated_coupling(w, T=0.01 * PAPER_T1),
                                t_end=PAPER_T1)
        assert mom.column("n2")[-1] == pytest.approx(0.9575, abs=0.002)

    def test_fast_path_matches_full_system(self):
        w = make_exponential(1.0)
        lam = generator_coupling(w)
        gam = truncated_coupling(w, T=0.05)
        fast = integrate_moments(lam, gam, t_end=10.0)
        full = integrate_moments(lam, gam, t_end=10.0, full_system=True)
        assert np.max(np.abs(fast.column("n2") - full.column("n2"))) < 1e-8
        assert np.max(np.abs(fast.column("n1sz") - full.column("n1sz"))) < 1e-8

    def test_n1sz_closed_form(self):
        w = make_exponential(1.0)
        mom = integrate_moments(generator_coupling(w),
                                truncated_coupling(w, T=0.05), t_end=10.0,
                                full_system=True)
        tails = np.array([w.tail_energy(t) for t in mom.times])
        assert np.max(np.abs(mom.column("n1sz") + tails)) < 1e-8

    def test_range_invariants(self):
        w = make_exponential(PAPER_C)
        mom = integrate_moments(generator_coupling(w),
                                truncated_coupling(w, T=0.01 * PAPER_T1),
                                t_end=PAPER_T1)
        n2 = mom.column("n2")
        assert np.all(n2 >= -1e-12) and np.all(n2 <= 1.0 + 1e-9)
        assert np.all(np.abs(mom.column("cross")) <= 1.0 + 1e-9)
        n1sz = mom.column("n1sz")
        assert np.all(n1sz >= -1.0 - 1e-9) and np.all(n1sz <= 1.0 + 1e-9)


class TestFormulationEquivalence:
    @pytest.mark.parametrize("frac", [0.001, 0.01, 0.1])
    def test_moments_match_amplitudes(self, frac):
        w = make_exponential(PAPER_C)
        lam = generator_coupling(w)
        gam = truncated_coupling(w, T=frac * PAPER_T1)
        amp = integrate_amplitudes(lam, gam, t_end=PAPER_T1)
        mom = integrate_moments(lam, gam, t_end=PAPER_T1)
        assert np.max(np.abs(mom.column("n2") - amp.column("n2"))) < 1e-7
        cross_pure = np.conj(amp.column("psi2")) * amp.column("psi3")
        assert np.max(np.abs(mom.column("cross") - cross_pure)) < 1e-7


class TestPhaseInvariance:
    def test_observables_bitwise_equal(self):
        w = make_exponential(1.0)
        lam = generator_coupling(w)
        base = None
        for phi0 in (0.0, 1.0, math.pi):
            gam = truncated_coupling(w, phi0=phi0, T=0.05)
            traj = integrate_amplitudes(lam, gam, t_end=10.0)
            obs = np.round(np.concatenate([traj.column("n2"),
                                           traj.column("p_out")]) / 1e-12) * 1e-12
            if base is None:
                base = obs
            else:
                assert np.array_equal(obs, base)


class TestTruncationOrdering:
    def test_monotone_capture_and_T_ordering(self):
        w = make_exponential(PAPER_C)
        lam = generator_coupling(w)
        curves = []
        for frac in (0.001, 0.01, 0.1):
            gam = truncated_coupling(w, T=frac * PAPER_T1)
            mom = integrate_moments(lam, gam, t_end=PAPER_T1)
            n2 = mom.column("n2")
            assert np.all(np.diff(n2) >= -1e-9)
            curves.append(n2)
        # wider truncation -> lower excitation probability at every time
        assert np.all(curves[0] >= curves[1] - 1e-9)
        assert np.all(curves[1] >= curves[2] - 1e-9)


class TestZeroDynamics:
    def test_normalization_and_initial_condition(self):
        w = make_gaussian(5.0, 0.8)
        grid = np.linspace(0.0, 9.0, 300)
        traj = zero_dynamics_solve(w, 0.4, grid)
        alpha = traj.column("alpha")
        beta = traj.column("beta")
        norms = np.abs(alpha) ** 2 + np.abs(beta) ** 2
        assert np.max(np.abs(norms - 1.0)) < 1e-9
        assert alpha[0] == 1.0
        assert beta[0] == 0.0

    def test_recovered_gamma_matches_schedule(self):
        for w in (make_exponential(1.0), make_gaussian(5.0, 0.8)):
            gam = absorber_coupling(w, phi0=0.4)
            grid = np.linspace(w.time_at_head(1e-6), 0.9 * w.t_max, 200)
            traj = zero_dynamics_solve(w, 0.4, grid)
            rec = traj.column("gamma_recovered")
            for i, t in enumerate(grid):
                g = gam(t)
                if abs(g) == 0.0:
                    continue
                assert abs(rec[i] - g) / abs(g) < 1e-12


class TestErrors:
    def test_empty_interval(self):
        w = make_exponential(1.0)
        with pytest.raises(ValueError):
            integrate_amplitudes(generator_coupling(w), absorber_coupling(w),
                                 t_end=0.0)

    def test_missing_columns_in_residual_check(self):
        w = make_exponential(1.0)
        mom = integrate_moments(generator_coupling(w),
                                truncated_coupling(w, T=0.1), t_end=5.0)
        with pytest.raises(KeyError):
            residual_check(mom)
