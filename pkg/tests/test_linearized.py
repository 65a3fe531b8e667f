import numpy as np
import pytest

from conftest import TINY_G, random_two_mode_state
from cascopt import symplectic
from cascopt.errors import NonHurwitzError, PhysicalityWarning
from cascopt.linearized import (
    CovarianceState,
    DriftDiffusion,
    build_drift_diffusion,
    evolve_covariance,
    lyapunov_residual,
    steady_covariance,
)
from cascopt.meanfield import MeanFieldState, integrate_meanfield, steady_meanfield


def test_decoupled_drift_block_diagonalizes(mp_ref):
    mp = mp_ref.replace(g1=TINY_G, g2=TINY_G)
    s = steady_meanfield(mp)
    S = build_drift_diffusion(s, mp).S
    for lo in (0, 4):
        mirror = slice(lo, lo + 2)
        cavity = slice(lo + 2, lo + 4)
        assert np.max(np.abs(S[mirror, cavity])) < 1e-12
        assert np.max(np.abs(S[cavity, mirror])) < 1e-12


def test_unidirectional_upper_right_block_zero(dd_ref):
    assert np.max(np.abs(dd_ref.S[0:4, 4:8])) == 0.0


def test_reference_drift_is_hurwitz(dd_ref):
    eigs = np.linalg.eigvals(dd_ref.S)
    assert np.max(eigs.real) < 0.0
    assert dd_ref.hurwitz()


def test_bidirectional_blocks(mp_ref):
    mp = mp_ref.replace(topology="bidirectional", E2=mp_ref.E1)
    s = steady_meanfield(mp)
    dd = build_drift_diffusion(s, mp)
    # full linewidth on the cavity diagonal, symmetric exchange, doubled noise
    assert dd.S[2, 2] == pytest.approx(-mp.kappa)
    assert dd.S[2, 6] == pytest.approx(-mp.kappa)
    assert dd.S[6, 2] == pytest.approx(-mp.kappa)
    assert dd.N[2, 2] == pytest.approx(2 * mp.kappa)
    assert dd.N[2, 6] == pytest.approx(2 * mp.kappa)


def test_diffusion_structure(dd_ref, mp_ref):
    N = dd_ref.N
    assert N[1, 1] == pytest.approx(mp_ref.gamma1 * (2 * mp_ref.nbar1 + 1))
    assert N[5, 5] == pytest.approx(mp_ref.gamma2 * (2 * mp_ref.nbar2 + 1))
    for i in (2, 3, 6, 7):
        assert N[i, i] == pytest.approx(mp_ref.kappa)
    assert N[2, 6] == pytest.approx(mp_ref.kappa)
    assert np.allclose(N, N.T)
    assert np.min(np.linalg.eigvalsh(N)) > -1e-12


def test_evolve_frozen_generator_is_constant(mp_ref):
    dd = DriftDiffusion(S=np.zeros((8, 8)), N=np.zeros((8, 8)))
    C0 = CovarianceState.thermal(mp_ref)
    out = evolve_covariance(C0, dd, mp_ref, np.linspace(0, 10, 5))
    for C in out.covariances:
        assert np.allclose(C, C0.C, atol=1e-12)


def test_evolve_decoupled_mirror_reaches_bath_occupation(mp_ref):
    # keep the run short: raise the mechanical damping, drop the coupling
    mp = mp_ref.replace(g1=TINY_G, g2=TINY_G, gamma1=0.05, gamma2=0.05,
                        nbar1=7.0, nbar2=3.0)
    s = steady_meanfield(mp)
    C0 = CovarianceState(0.0, np.diag([0.5] * 8))
    out = evolve_covariance(C0, s, mp, [0.0, 400.0])
    C = out.covariances[-1]
    # closed-form 2x2 Lyapunov solution: C_qq = C_pp = nbar + 1/2, C_qp = 0
    assert C[0, 0] == pytest.approx(7.5, rel=1e-4)
    assert C[1, 1] == pytest.approx(7.5, rel=1e-4)
    assert C[4, 4] == pytest.approx(3.5, rel=1e-4)
    assert abs(C[0, 1]) < 1e-3


def test_evolve_cooling_then_plateau(mp_ref, s_ref, css_ref):
    t_eval = np.linspace(0.0, 500.0, 26)
    out = evolve_covariance(CovarianceState.thermal(mp_ref), s_ref, mp_ref, t_eval)
    n1 = np.array([0.5 * (C[0, 0] + C[1, 1] - 1.0) for C in out.covariances])
    assert n1[0] == pytest.approx(mp_ref.nbar1, rel=1e-12)
    assert np.all(np.diff(n1) < 0)          # cooling
    # long-time limit agrees with the algebraic steady state
    late = evolve_covariance(CovarianceState.thermal(mp_ref), s_ref, mp_ref,
                             [0.0, 6000.0], tol=(1e-10, 1e-10))
    n_late = 0.5 * (late.covariances[-1][0, 0] + late.covariances[-1][1, 1] - 1.0)
    n_ss = 0.5 * (css_ref.C[0, 0] + css_ref.C[1, 1] - 1.0)
    assert n_late == pytest.approx(n_ss, rel=1e-6)


def test_steady_scalar_lyapunov_identity(mp_ref):
    gamma, nbar = 0.17, 2.4
    S = -0.5 * gamma * np.eye(8)
    N = gamma * (2 * nbar + 1) * np.eye(8)
    css = steady_covariance(DriftDiffusion(S=S, N=N))
    assert np.allclose(css.C, (2 * nbar + 1) * np.eye(8), rtol=1e-12)


def test_steady_zero_noise_gives_zero(dd_ref):
    css = steady_covariance(DriftDiffusion(S=dd_ref.S, N=np.zeros((8, 8))))
    assert np.max(np.abs(css.C)) < 1e-12


def test_steady_residual_and_agreement_with_evolution(mp_ref, s_ref, dd_ref, css_ref):
    assert lyapunov_residual(dd_ref, css_ref.C) < 1e-10 * np.linalg.norm(dd_ref.N)
    out = evolve_covariance(CovarianceState.thermal(mp_ref), s_ref, mp_ref,
                            [0.0, 7000.0], tol=(1e-12, 1e-12))
    dev = np.linalg.norm(out.covariances[-1] - css_ref.C)
    assert dev < 1e-8 * np.linalg.norm(css_ref.C)


def test_steady_rejects_non_hurwitz():
    S = np.eye(8)
    with pytest.raises(NonHurwitzError) as err:
        steady_covariance(DriftDiffusion(S=S, N=np.eye(8)))
    assert len(err.value.eigenvalues) == 8


def test_covariance_symmetry_and_physicality(mp_ref, s_ref):
    t_eval = np.linspace(0.0, 200.0, 21)
    out = evolve_covariance(CovarianceState.thermal(mp_ref), s_ref, mp_ref, t_eval)
    for C in out.covariances:
        assert np.array_equal(C, C.T)
        assert symplectic.min_symplectic_eigenvalue(C) >= 0.5 - 1e-6


def test_physicality_warning_on_unphysical_start(mp_ref, s_ref):
    C0 = CovarianceState(0.0, np.diag([0.1] * 8))   # below the vacuum floor
    with pytest.warns(PhysicalityWarning):
        evolve_covariance(C0, s_ref, mp_ref, [0.0, 1.0])


def test_mirror1_block_independent_of_second_subsystem(mp_ref, s_ref):
    t_eval = np.linspace(0.0, 150.0, 16)
    tol = (1e-10, 1e-10)
    base = evolve_covariance(CovarianceState.thermal(mp_ref), s_ref, mp_ref,
                             t_eval, tol=tol)
    mp2 = mp_ref.replace(omega2=1.31, gamma2=5e-5)
    s2 = steady_meanfield(mp2)
    other = evolve_covariance(CovarianceState.thermal(mp2), s2, mp2, t_eval, tol=tol)
    for Ca, Cb in zip(base.covariances, other.covariances):
        scale = np.max(np.abs(Ca[:4, :4]))
        assert np.max(np.abs(Ca[:4, :4] - Cb[:4, :4])) < 1e-6 * scale


def test_bidirectional_symmetric_swap_invariance(mp_ref):
    mp = mp_ref.replace(topology="bidirectional", E2=mp_ref.E1)
    s = steady_meanfield(mp)
    t_eval = np.linspace(0.0, 120.0, 9)
    out = evolve_covariance(CovarianceState.thermal(mp), s, mp, t_eval)
    perm = [4, 5, 6, 7, 0, 1, 2, 3]
    for C in out.covariances:
        swapped = C[np.ix_(perm, perm)]
        assert np.max(np.abs(C - swapped)) < 1e-8 * max(1.0, np.max(np.abs(C)))


def test_symplectic_eigenvalues_against_generic_solver():
    rng = np.random.default_rng(11)
    C = random_two_mode_state(rng)
    direct = symplectic.symplectic_eigenvalues(C)
    omega = symplectic.symplectic_form(2)
    generic = np.sort(np.abs(np.linalg.eigvals(1j * omega @ C)))[::2]
    assert np.allclose(direct, generic, rtol=1e-10)
