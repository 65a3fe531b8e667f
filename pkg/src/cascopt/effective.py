"""Adiabatically eliminated two-mirror model.

With the cavities removed, each mirror keeps an optically induced damping
and spring shift, and the guide leaves a one-way coupling from mirror 1 to
mirror 2. The reduced covariance lives in co-rotating quadratures
(Qt_j, Pt_j) of the slowly varying mode operators; occupations are frame
independent, lab-frame quadratures follow by a rotation at the bare
mechanical frequency.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_continuous_lyapunov

from .errors import NonHurwitzError, StepSizeUnderflowError, WeakCouplingWarning
from .meanfield import MeanFieldState
from .params import ModelParams


def optical_susceptibility(omega, kappa: float, delta_j: float):
    """Cavity response 1/(kappa/2 - i(omega - Delta_j)); peaks at omega = Delta_j."""
    omega = np.asarray(omega, dtype=float)
    out = 1.0 / (0.5 * kappa - 1j * (omega - delta_j))
    return complex(out) if np.ndim(out) == 0 else out


def cascaded_coupling(omega, mp: ModelParams, s: MeanFieldState):
    """Guide-mediated coupling Lambda(omega) from mirror 1 onto mirror 2.

    Lambda = G2 G1* chi1*(-w) chi2*(-w) - G2* G1 chi1(w) chi2(w), with the
    susceptibilities taken at the position-shifted detunings of ``s``. Its
    phase is gauge; only |Lambda| enters occupations and spectra.
    """
    d1 = s.detuning(mp, 1)
    d2 = s.detuning(mp, 2)
    G1 = s.coupling(mp, 1)
    G2 = s.coupling(mp, 2)
    omega = np.asarray(omega, dtype=float)
    c1 = optical_susceptibility(omega, mp.kappa, d1)
    c2 = optical_susceptibility(omega, mp.kappa, d2)
    c1m = optical_susceptibility(-omega, mp.kappa, d1)
    c2m = optical_susceptibility(-omega, mp.kappa, d2)
    out = G2 * np.conj(G1) * np.conj(c1m) * np.conj(c2m) - np.conj(G2) * G1 * c1 * c2
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class EffectiveParams:
    """Optically induced rates of the reduced two-mirror model."""

    gamma_eff_1: float       # induced damping of mirror 1
    gamma_eff_2: float
    omega_shift_1: float     # optical spring shift (co-rotating frame rate)
    omega_shift_2: float
    coupling: complex        # Lambda evaluated at Omega_1
    G1: complex
    G2: complex
    delta1: float
    delta2: float

    @property
    def omega_eff_1(self) -> float:
        return 1.0 + self.omega_shift_1

    def omega_eff(self, mp: ModelParams, mirror: int) -> float:
        base = mp.omega1 if mirror == 1 else mp.omega2
        shift = self.omega_shift_1 if mirror == 1 else self.omega_shift_2
        return base + shift


def effective_rates(mp: ModelParams, s: MeanFieldState) -> EffectiveParams:
    """Damping/spring shift per mirror plus the cascaded coupling at Omega_1.

    Both follow from |G_j|^2 (chi(Omega_j) - chi*(-Omega_j)) / 2: real part is
    the induced decay, imaginary part the frequency pull. Warns when the
    working point leaves the weak-coupling window |G_j| <= kappa.
    """
    G1 = s.coupling(mp, 1)
    G2 = s.coupling(mp, 2)
    if max(abs(G1), abs(G2)) > mp.kappa:
        warnings.warn(
            "field-enhanced coupling exceeds the cavity linewidth; "
            "adiabatic elimination is unreliable here",
            WeakCouplingWarning,
        )
    d1 = s.detuning(mp, 1)
    d2 = s.detuning(mp, 2)

    def rate(G, delta, omega_m):
        chi_p = optical_susceptibility(omega_m, mp.kappa, delta)
        chi_m = optical_susceptibility(-omega_m, mp.kappa, delta)
        z = abs(G) ** 2 * (chi_p - np.conj(chi_m)) / 2.0
        return z.real, z.imag

    g_eff_1, shift_1 = rate(G1, d1, mp.omega1)
    g_eff_2, shift_2 = rate(G2, d2, mp.omega2)
    lam = cascaded_coupling(mp.omega1, mp, s)
    return EffectiveParams(
        gamma_eff_1=g_eff_1, gamma_eff_2=g_eff_2,
        omega_shift_1=shift_1, omega_shift_2=shift_2,
        coupling=lam, G1=G1, G2=G2, delta1=d1, delta2=d2,
    )


def _sideband_rates(mp: ModelParams, G: complex, delta: float, omega_m: float):
    """Photon scattering rates into the cooling/heating sidebands."""
    a_minus = abs(G) ** 2 * 0.5 * mp.kappa * abs(
        optical_susceptibility(omega_m, mp.kappa, delta)) ** 2
    a_plus = abs(G) ** 2 * 0.5 * mp.kappa * abs(
        optical_susceptibility(-omega_m, mp.kappa, delta)) ** 2
    return a_minus, a_plus


def reduced_drift_diffusion(ep: EffectiveParams, mp: ModelParams,
                            include_optical_noise: bool = False):
    """Reduced 4x4 drift/diffusion in co-rotating quadratures.

    Per mode: decay Gamma_eff + gamma/2 and rotation at the spring shift;
    the one-way block carries -(kappa/2) Lambda(Omega_1). Thermal diffusion
    is gamma(2 nbar + 1)/2 per quadrature so that an uncoupled undriven mode
    relaxes exactly to its bath occupation. Optical vacuum noise is dropped
    by default (negligible against room-temperature thermal noise); the flag
    restores the sideband-scattering diffusion for sensitivity studies.
    """
    g1 = ep.gamma_eff_1 + 0.5 * mp.gamma1
    g2 = ep.gamma_eff_2 + 0.5 * mp.gamma2
    w1 = ep.omega_shift_1
    w2 = ep.omega_shift_2
    L = 0.5 * mp.kappa * ep.coupling

    S = np.zeros((4, 4))
    S[0:2, 0:2] = [[-g1, w1], [-w1, -g1]]
    S[2:4, 2:4] = [[-g2, w2], [-w2, -g2]]
    S[2:4, 0:2] = [[-L.real, L.imag], [-L.imag, -L.real]]

    N = np.diag([
        0.5 * mp.gamma1 * (2.0 * mp.nbar1 + 1.0),
        0.5 * mp.gamma1 * (2.0 * mp.nbar1 + 1.0),
        0.5 * mp.gamma2 * (2.0 * mp.nbar2 + 1.0),
        0.5 * mp.gamma2 * (2.0 * mp.nbar2 + 1.0),
    ])
    if include_optical_noise:
        am1, ap1 = _sideband_rates(mp, ep.G1, ep.delta1, mp.omega1)
        am2, ap2 = _sideband_rates(mp, ep.G2, ep.delta2, mp.omega2)
        N[0, 0] = N[1, 1] = N[0, 0] + 0.5 * (am1 + ap1)
        N[2, 2] = N[3, 3] = N[2, 2] + 0.5 * (am2 + ap2)
    return S, N


@dataclass(frozen=True)
class EffectiveCovarianceTrajectory:
    """Reduced covariance samples in the co-rotating quadrature basis."""

    t: np.ndarray
    covariances: tuple
    params: ModelParams

    def occupations(self) -> np.ndarray:
        """Mode occupations, shape (2, len(t)); frame independent."""
        out = np.empty((2, len(self.t)))
        for i, C in enumerate(self.covariances):
            out[0, i] = 0.5 * (C[0, 0] + C[1, 1] - 1.0)
            out[1, i] = 0.5 * (C[2, 2] + C[3, 3] - 1.0)
        return out

    def lab_frame(self, i: int) -> np.ndarray:
        """Covariance of the lab quadratures (dq1, dp1, dq2, dp2) at sample i."""
        t = self.t[i]
        R = np.zeros((4, 4))
        for j, omega in enumerate((self.params.omega1, self.params.omega2)):
            ct, st = math.cos(omega * t), math.sin(omega * t)
            R[2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = [[ct, st], [-st, ct]]
        return R @ self.covariances[i] @ R.T


def evolve_effective_covariance(
    C0: np.ndarray,
    ep: EffectiveParams,
    mp: ModelParams,
    t_eval,
    include_optical_noise: bool = False,
    tol=(1e-8, 1e-8),
) -> EffectiveCovarianceTrajectory:
    """Integrate the reduced Lyapunov equation from the 4x4 state ``C0``."""
    S, N = reduced_drift_diffusion(ep, mp, include_optical_noise)
    C0 = np.asarray(C0, dtype=float)
    if C0.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance, got {C0.shape}")
    iu = np.triu_indices(4)

    def unpack(v):
        C = np.zeros((4, 4))
        C[iu] = v
        return C + np.triu(C, 1).T

    def rhs(t, v):
        C = unpack(v)
        M = S @ C
        return (M + M.T + N)[iu]

    t_eval = np.asarray(t_eval, dtype=float)
    rtol, atol = tol
    scale = max(1.0, float(np.max(np.abs(C0))))
    res = solve_ivp(rhs, (float(t_eval[0]), float(t_eval[-1])), C0[iu],
                    method="DOP853", rtol=rtol, atol=atol * scale, t_eval=t_eval)
    if res.status == -1:
        raise StepSizeUnderflowError(res.t[-1] if len(res.t) else t_eval[0], res.message)
    covs = tuple(unpack(res.y[:, i]) for i in range(res.y.shape[1]))
    return EffectiveCovarianceTrajectory(t=res.t, covariances=covs, params=mp)


def steady_effective_covariance(ep: EffectiveParams, mp: ModelParams,
                                include_optical_noise: bool = False) -> np.ndarray:
    """Algebraic steady state of the reduced model (co-rotating basis)."""
    S, N = reduced_drift_diffusion(ep, mp, include_optical_noise)
    eigs = np.linalg.eigvals(S)
    bad = eigs[eigs.real >= 0.0]
    if len(bad):
        raise NonHurwitzError(bad)
    C = solve_continuous_lyapunov(S, -N)
    return 0.5 * (C + C.T)


def thermal_reduced_covariance(mp: ModelParams) -> np.ndarray:
    """Bath-occupation initial condition for the reduced model."""
    return np.diag([mp.nbar1 + 0.5, mp.nbar1 + 0.5, mp.nbar2 + 0.5, mp.nbar2 + 0.5])
