import math

import numpy as np
import pytest

from conftest import TINY_G
from cascopt import observables
from cascopt.effective import (
    EffectiveParams,
    cascaded_coupling,
    effective_rates,
    evolve_effective_covariance,
    optical_susceptibility,
    reduced_drift_diffusion,
    steady_effective_covariance,
    thermal_reduced_covariance,
)
from cascopt.errors import WeakCouplingWarning
from cascopt.linearized import CovarianceState, evolve_covariance
from cascopt.meanfield import MeanFieldState, steady_meanfield


def test_susceptibility_resonance():
    assert optical_susceptibility(0.7, 2.0, 0.7) == pytest.approx(1.0, rel=1e-14)
    # |chi| <= 2/kappa with equality only on resonance
    grid = np.linspace(-5, 5, 101)
    mags = np.abs(optical_susceptibility(grid, 2.0, 0.7))
    assert np.all(mags <= 1.0 + 1e-12)


def test_susceptibility_decays():
    assert abs(optical_susceptibility(1e9, 1.34, 1.0)) < 1e-8
    assert abs(optical_susceptibility(-1e9, 1.34, 1.0)) < 1e-8


def test_susceptibility_regression_value():
    # kappa = 1.34, Delta = 1, omega = 1 (units of Omega_1)
    val = optical_susceptibility(1.0, 1.34, 1.0)
    assert val == pytest.approx(2.0 / 1.34, rel=1e-12)
    assert val.imag == 0.0


def test_coupling_vanishes_without_either_field(mp_ref):
    s = MeanFieldState(0.0, 0.0, 0.0, 0j, 0.0, 0.0, 1.0 + 1.0j)
    assert cascaded_coupling(1.0, mp_ref, s) == 0
    s = MeanFieldState(0.0, 0.0, 0.0, 2.0 - 1.0j, 0.0, 0.0, 0j)
    assert cascaded_coupling(1.0, mp_ref, s) == 0


def test_no_damping_at_zero_detuning(mp_ref):
    # chi(Omega) - chi*(-Omega) vanishes identically at Delta_j = 0
    mp = mp_ref.replace(delta=0.0)
    a = 0.3 / mp.g1
    s = MeanFieldState(0.0, 0.0, 0.0, complex(a), 0.0, 0.0, complex(a))
    ep = effective_rates(mp, s)
    assert ep.gamma_eff_1 == pytest.approx(0.0, abs=1e-14)
    assert ep.omega_shift_1 == pytest.approx(0.0, abs=1e-14)


def test_reference_rates_regression(mp_ref, s_ref):
    ep = effective_rates(mp_ref, s_ref)
    assert ep.gamma_eff_1 > 0
    assert ep.gamma_eff_1 > 1e3 * mp_ref.gamma1        # optical cooling dominates
    # frozen regression values for the reference working point
    assert ep.gamma_eff_1 == pytest.approx(0.0483196, rel=1e-4)
    assert ep.gamma_eff_2 == pytest.approx(0.0021961, rel=1e-4)
    assert abs(ep.coupling) == pytest.approx(0.193215, rel=1e-4)


def test_weak_coupling_warning(mp_ref):
    a = 1.5 * mp_ref.kappa / mp_ref.g1
    s = MeanFieldState(0.0, 0.0, 0.0, complex(a), 0.0, 0.0, 0j)
    with pytest.warns(WeakCouplingWarning):
        effective_rates(mp_ref, s)


def test_phase_invariance_of_coupling_magnitude(mp_ref, s_ref):
    base = abs(cascaded_coupling(1.0, mp_ref, s_ref))
    phase = np.exp(1j * 1.234)
    rotated = MeanFieldState(0.0, s_ref.Q1, s_ref.P1, s_ref.A1 * phase,
                             s_ref.Q2, s_ref.P2, s_ref.A2 * phase)
    assert abs(cascaded_coupling(1.0, mp_ref, rotated)) == pytest.approx(base, rel=1e-12)


def test_decoupled_mode_relaxes_to_thermal(mp_ref):
    mp = mp_ref.replace(gamma1=0.05, gamma2=0.05, nbar1=4.0, nbar2=9.0)
    ep = EffectiveParams(gamma_eff_1=0.0, gamma_eff_2=0.0,
                         omega_shift_1=0.0, omega_shift_2=0.0,
                         coupling=0j, G1=0j, G2=0j, delta1=1.0, delta2=1.0)
    out = evolve_effective_covariance(0.5 * np.eye(4), ep, mp, [0.0, 500.0])
    n = out.occupations()[:, -1]
    assert n[0] == pytest.approx(4.0, rel=1e-5)
    assert n[1] == pytest.approx(9.0, rel=1e-5)


def test_cooled_occupation_rate_equation(mp_ref):
    # steady occupation of a damped cooled mode: (gamma nbar - Gamma)/() ~ gamma nbar/(gamma + 2 Gamma)
    mp = mp_ref.replace(gamma1=1e-4, nbar1=1e5)
    ep = EffectiveParams(gamma_eff_1=0.02, gamma_eff_2=0.0,
                         omega_shift_1=0.0, omega_shift_2=0.0,
                         coupling=0j, G1=0j, G2=0j, delta1=1.0, delta2=1.0)
    C = steady_effective_covariance(ep, mp)
    n1 = 0.5 * (C[0, 0] + C[1, 1] - 1.0)
    predicted = mp.gamma1 * mp.nbar1 / (mp.gamma1 + 2 * ep.gamma_eff_1)
    assert n1 == pytest.approx(predicted, rel=2e-3)


def test_mode1_marginal_independent_of_coupling(mp_ref, s_ref):
    ep = effective_rates(mp_ref, s_ref)
    ep_nolink = EffectiveParams(
        gamma_eff_1=ep.gamma_eff_1, gamma_eff_2=ep.gamma_eff_2,
        omega_shift_1=ep.omega_shift_1, omega_shift_2=ep.omega_shift_2,
        coupling=0j, G1=ep.G1, G2=ep.G2, delta1=ep.delta1, delta2=ep.delta2)
    t_eval = np.linspace(0.0, 300.0, 7)
    a = evolve_effective_covariance(thermal_reduced_covariance(mp_ref), ep, mp_ref, t_eval)
    b = evolve_effective_covariance(thermal_reduced_covariance(mp_ref), ep_nolink,
                                    mp_ref, t_eval)
    assert np.allclose(a.occupations()[0], b.occupations()[0], rtol=1e-9)


def test_lab_frame_rotation_preserves_occupation(mp_ref, s_ref):
    ep = effective_rates(mp_ref, s_ref)
    out = evolve_effective_covariance(thermal_reduced_covariance(mp_ref), ep, mp_ref,
                                      np.linspace(0.0, 30.0, 4))
    for i in range(len(out.t)):
        lab = out.lab_frame(i)
        rot = out.covariances[i]
        assert np.trace(lab) == pytest.approx(np.trace(rot), rel=1e-12)


@pytest.mark.parametrize("ratio", [0.2, 0.1, 0.05])
def test_reduced_model_tracks_full_model(mp_ref, ratio):
    from conftest import scaled_power_params
    from cascopt.params import nondimensionalize, reference_physical_params

    p = scaled_power_params(reference_physical_params(), ratio)
    mp = nondimensionalize(p)
    s = steady_meanfield(mp)
    ep = effective_rates(mp, s)
    horizon = 4.0 / (2 * ep.gamma_eff_1 + mp.gamma1)
    t_eval = np.linspace(0.0, horizon, 25)
    red = evolve_effective_covariance(thermal_reduced_covariance(mp), ep, mp, t_eval)
    full = evolve_covariance(CovarianceState.thermal(mp), s, mp, t_eval)
    n_red = red.occupations()[0]
    n_full = np.array([observables.effective_occupation(C, 1)
                       for C in full.covariances])
    rel = np.max(np.abs(n_red - n_full) / n_full)
    bound = {0.2: 0.35, 0.1: 0.10, 0.05: 0.10}[ratio]
    assert rel < bound


def test_optical_noise_flag_adds_backaction(mp_ref, s_ref):
    ep = effective_rates(mp_ref, s_ref)
    _, n_plain = reduced_drift_diffusion(ep, mp_ref, include_optical_noise=False)
    _, n_noisy = reduced_drift_diffusion(ep, mp_ref, include_optical_noise=True)
    assert np.all(np.diag(n_noisy) >= np.diag(n_plain))
    assert np.any(np.diag(n_noisy) > np.diag(n_plain))
