"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest
from scipy.linalg import expm

from cascopt import linearized, meanfield
from cascopt.params import nondimensionalize, reference_physical_params

# effectively-zero single-photon coupling for decoupled-limit cases
TINY_G = 1e-18


@pytest.fixture(scope="session")
def mp_ref():
    return nondimensionalize(reference_physical_params())


@pytest.fixture(scope="session")
def s_ref(mp_ref):
    return meanfield.steady_meanfield(mp_ref)


@pytest.fixture(scope="session")
def dd_ref(mp_ref, s_ref):
    return linearized.build_drift_diffusion(s_ref, mp_ref)


@pytest.fixture(scope="session")
def css_ref(dd_ref):
    return linearized.steady_covariance(dd_ref)


def random_two_mode_state(rng, nu_max=4.0, strength=0.6):
    """Random physical 4x4 covariance: random symplectic on a thermal diagonal."""
    nus = 0.5 + rng.uniform(0.0, nu_max - 0.5, size=2)
    thermal = np.diag([nus[0], nus[0], nus[1], nus[1]])
    omega = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    H = rng.normal(scale=strength, size=(4, 4))
    H = 0.5 * (H + H.T)
    S = expm(omega @ H)          # symplectic by construction
    return S @ thermal @ S.T


def full_linear_response_psd(dd, omega_grid, rows, mechanical_only=True):
    """Direct frequency-domain solve of the fluctuation equations.

    Returns the PSD of the sum of the requested state components, driven by
    the mechanical baths (all noise sources when ``mechanical_only`` is
    False). Independent of the closed-form susceptibility route.
    """
    N = dd.N.copy()
    if mechanical_only:
        mask = np.zeros_like(N)
        mask[1, 1] = mask[5, 5] = 1.0
        N = N * mask
    u = np.zeros(8)
    u[list(rows)] = 1.0
    eye = np.eye(8)
    out = np.empty(len(omega_grid))
    for k, w in enumerate(np.asarray(omega_grid, dtype=float)):
        M = np.linalg.inv(-1j * w * eye - dd.S)
        out[k] = (u @ (M @ N @ M.conj().T) @ u).real
    return out


def scaled_power_params(base, target_g_over_kappa, **overrides):
    """Physical parameters whose steady |G1|/kappa hits the requested ratio."""
    probe = base.replace(power1=1e-6, **overrides)
    mp = nondimensionalize(probe)
    s = meanfield.steady_meanfield(mp)
    ratio = abs(s.coupling(mp, 1)) / mp.kappa
    return probe.replace(power1=1e-6 * (target_g_over_kappa / ratio) ** 2)
