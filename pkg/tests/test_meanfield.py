import numpy as np
import pytest

from conftest import TINY_G
from cascopt import meanfield
from cascopt.errors import NoConvergenceError
from cascopt.meanfield import (
    MeanFieldState,
    cubic_discriminant,
    cubic_residual,
    integrate_meanfield,
    meanfield_jacobian,
    meanfield_rhs,
    multistability_branches,
    photon_cubic_coefficients,
    steady_meanfield,
)
from cascopt.params import nondimensionalize, reference_physical_params


def decoupled(mp):
    return mp.replace(g1=TINY_G, g2=TINY_G)


def test_rhs_linear_cavity_steady_state(mp_ref):
    mp = decoupled(mp_ref)
    a1 = mp.E1 / (0.5 * mp.kappa + 1j * mp.delta)
    s = MeanFieldState(0.0, 0.0, 0.0, a1, 0.0, 0.0, 0j)
    d = meanfield_rhs(s, mp)
    assert abs(complex(d.A1)) < 1e-12 * abs(a1)


def test_rhs_second_cavity_pure_decay(mp_ref):
    s = MeanFieldState(0.0, 0.0, 0.0, 0j, 0.0, 0.0, 1.0 + 0.5j)
    mp = mp_ref.replace(E1=0.0)
    d = meanfield_rhs(s, mp)
    expected = -(0.5 * mp.kappa + 1j * s.detuning(mp, 2)) * s.A2
    assert d.A2 == pytest.approx(expected, rel=1e-12)
    assert d.A1 == 0


def test_fixed_point_residual(mp_ref, s_ref):
    res = np.linalg.norm(meanfield_rhs(s_ref, mp_ref).to_vector())
    assert res < 1e-10 * max(1.0, mp_ref.E1)


def test_integrate_zero_drive_stays_zero(mp_ref):
    mp = mp_ref.replace(E1=0.0)
    traj = integrate_meanfield(MeanFieldState.zero(), mp, 50.0,
                               t_eval=np.linspace(0, 50, 11))
    assert np.max(np.abs(traj.y)) == 0.0


def test_integrate_self_convergence(mp_ref):
    t_end = 40.0
    coarse = integrate_meanfield(MeanFieldState.zero(), mp_ref, t_end,
                                 tol=(1e-8, 1e-10), t_eval=[t_end])
    fine = integrate_meanfield(MeanFieldState.zero(), mp_ref, t_end,
                               tol=(5e-9, 5e-11), t_eval=[t_end])
    dev = np.linalg.norm(coarse.y[:, -1] - fine.y[:, -1])
    assert dev < 1e-8 * np.linalg.norm(fine.y[:, -1])


def test_integrate_monotone_approach_to_fixed_point(mp_ref, s_ref):
    # |A1(t)| relaxes onto the fixed-point value once the switch-on transient
    # has passed (a few cavity lifetimes)
    t_eval = np.linspace(150.0, 500.0, 30)
    traj = integrate_meanfield(MeanFieldState.zero(), mp_ref, 500.0, t_eval=t_eval)
    dev = np.abs(np.abs(traj.y[2] + 1j * traj.y[3]) - abs(s_ref.A1))
    assert np.all(np.diff(dev) < 1e-12 + 0.05 * dev[:-1])
    assert dev[-1] < dev[0]


def test_steady_decoupled_closed_form(mp_ref):
    mp = decoupled(mp_ref)
    s = steady_meanfield(mp)
    a1 = mp.E1 / (0.5 * mp.kappa + 1j * mp.delta)
    a2 = -mp.kappa * a1 / (0.5 * mp.kappa + 1j * mp.delta)
    assert s.A1 == pytest.approx(a1, rel=1e-10)
    assert s.A2 == pytest.approx(a2, rel=1e-10)
    assert abs(s.Q1) < 1e-6 and abs(s.P1) < 1e-12


def test_steady_zero_drive(mp_ref):
    s = steady_meanfield(mp_ref.replace(E1=0.0))
    assert np.linalg.norm(s.to_vector()) < 1e-12


def test_steady_matches_long_integration(mp_ref, s_ref):
    # slowest mean-field relaxation is the driven mirror-2 envelope (~4e2 tau)
    horizon = 8000.0
    traj = integrate_meanfield(MeanFieldState.zero(), mp_ref, horizon,
                               tol=(1e-12, 1e-13), t_eval=[horizon])
    terminal = traj.y[:, -1]
    dev = np.linalg.norm(terminal - s_ref.to_vector())
    assert dev < 1e-8 * np.linalg.norm(terminal)


def test_unidirectionality_of_first_subsystem(mp_ref):
    t_eval = np.linspace(0.0, 60.0, 13)
    base = integrate_meanfield(MeanFieldState.zero(), mp_ref, 60.0, t_eval=t_eval)
    kicked = integrate_meanfield(
        MeanFieldState(0.0, 0.0, 0.0, 0j, 3.0, -2.0, 1.5 - 0.5j),
        mp_ref, 60.0, t_eval=t_eval)
    dev = np.max(np.abs(base.y[:4] - kicked.y[:4]))
    assert dev < 1e-7 * max(1.0, np.max(np.abs(base.y[:4])))


def test_bidirectional_symmetric_swap(mp_ref):
    mp = mp_ref.replace(topology="bidirectional", E2=mp_ref.E1)
    t_eval = np.linspace(0.0, 60.0, 13)
    traj = integrate_meanfield(MeanFieldState.zero(), mp, 60.0, t_eval=t_eval)
    assert np.max(np.abs(traj.y[:4] - traj.y[4:])) < 1e-8 * np.max(np.abs(traj.y))


def test_jacobian_matches_finite_differences(mp_ref):
    rng = np.random.default_rng(3)
    y0 = rng.normal(size=8) * np.array([1e3, 1e3, 1e4, 1e4, 1e3, 1e3, 1e4, 1e4])
    s = MeanFieldState.from_vector(0.0, y0)
    J = meanfield_jacobian(s, mp_ref)
    eps = 1e-4
    for j in range(8):
        dy = np.zeros(8)
        dy[j] = eps * max(1.0, abs(y0[j]))
        up = meanfield_rhs(MeanFieldState.from_vector(0.0, y0 + dy), mp_ref).to_vector()
        dn = meanfield_rhs(MeanFieldState.from_vector(0.0, y0 - dy), mp_ref).to_vector()
        col = (up - dn) / (2 * dy[j])
        assert np.allclose(J[:, j], col, rtol=1e-5, atol=1e-6 * np.max(np.abs(col) + 1))


def test_newton_reports_no_convergence(mp_ref):
    seed = MeanFieldState(0.0, 1e3, 1e3, 1e4 + 1e4j, 1e3, 1e3, 1e4 - 1e4j)
    with pytest.raises(NoConvergenceError):
        steady_meanfield(mp_ref, seed=seed, max_newton=0)


# --- multistability ----------------------------------------------------------

def test_cubic_degenerates_to_linear(mp_ref):
    mp = decoupled(mp_ref)
    branches = multistability_branches(mp)
    assert len(branches.cavity1) == 1
    expected = mp.E1**2 / (mp.delta**2 + 0.5 * mp.kappa**2)
    assert branches.cavity1[0].N == pytest.approx(expected, rel=1e-9)


def test_zero_drive_single_zero_branch(mp_ref):
    branches = multistability_branches(mp_ref.replace(E1=0.0))
    assert len(branches.cavity1) == 1
    assert branches.cavity1[0].N == pytest.approx(0.0, abs=1e-12)
    assert all(b.N == pytest.approx(0.0, abs=1e-12) for b in branches.cavity2)


def test_branch_positions_follow_photon_numbers(mp_ref):
    branches = multistability_branches(mp_ref)
    for b in branches.cavity1:
        assert b.Q == pytest.approx(mp_ref.g1 * b.N / mp_ref.omega1, rel=1e-12)


def test_sweep_root_count_follows_discriminant(mp_ref):
    deltas = np.linspace(-3.0, 3.0, 121)
    counts = []
    for d in deltas:
        mpd = mp_ref.replace(delta=float(d))
        coeffs = photon_cubic_coefficients(mpd, 1, mpd.E1**2)
        branches = multistability_branches(mpd)
        n = len(branches.cavity1)
        counts.append(n)
        assert n == (3 if cubic_discriminant(*coeffs) > 0 else 1)
        for b in branches.cavity1:
            assert abs(cubic_residual(coeffs, b.N)) < 1e-10 * max(1.0, mpd.E1**2)
    counts = np.array(counts)
    # S-shaped response: the sweep passes through a three-root window
    assert counts.max() == 3 and counts.min() == 1
    changes = np.flatnonzero(np.diff(counts) != 0)
    assert len(changes) == 2


def test_middle_branch_flagged_unstable(mp_ref):
    mpd = mp_ref.replace(delta=0.4)
    branches = multistability_branches(mpd)
    assert len(branches.cavity1) == 3
    labels = [b.stability for b in branches.cavity1]
    assert labels == ["stable", "unstable", "stable"]
    assert branches.cavity1[1].jacobian_unstable


def test_kappa_convention_switch(mp_ref):
    half = photon_cubic_coefficients(mp_ref, 1, mp_ref.E1**2, "half")
    quarter = photon_cubic_coefficients(mp_ref, 1, mp_ref.E1**2, "quarter")
    assert half[2] - quarter[2] == pytest.approx(0.25 * mp_ref.kappa**2, rel=1e-12)
