"""Linearized fluctuation dynamics: drift/diffusion matrices and the 8x8
covariance evolution.

Quadrature ordering is (q1, p1, x1, y1, q2, p2, x2, y2) with
x = (a + a*)/sqrt(2), y = -i(a - a*)/sqrt(2); vacuum variance is 1/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import solve_continuous_lyapunov

from . import symplectic
from .errors import NonHurwitzError, PhysicalityWarning, StepSizeUnderflowError
from .meanfield import MeanFieldState, MeanFieldTrajectory
from .params import ModelParams

ORDERING = ("q1", "p1", "x1", "y1", "q2", "p2", "x2", "y2")

_TRIU = np.triu_indices(8)


@dataclass(frozen=True)
class CovarianceState:
    """Symmetric 8x8 quadrature covariance at one instant."""

    t: float
    C: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.shape != (8, 8):
            raise ValueError(f"expected an 8x8 covariance, got {C.shape}")
        object.__setattr__(self, "C", 0.5 * (C + C.T))

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic.symplectic_eigenvalues(self.C)

    def is_physical(self, tol: float = symplectic.PHYSICALITY_TOL) -> bool:
        return symplectic.is_physical(self.C, tol)

    @classmethod
    def thermal(cls, mp: ModelParams, t: float = 0.0) -> "CovarianceState":
        """Mirrors at their bath occupations, cavities in vacuum."""
        diag = [mp.nbar1 + 0.5, mp.nbar1 + 0.5, 0.5, 0.5,
                mp.nbar2 + 0.5, mp.nbar2 + 0.5, 0.5, 0.5]
        return cls(t, np.diag(diag))


@dataclass(frozen=True)
class DriftDiffusion:
    """Drift S and diffusion N of the quadrature Langevin model."""

    S: np.ndarray
    N: np.ndarray
    topology: str = "unidirectional"

    def hurwitz(self) -> bool:
        return bool(np.max(np.linalg.eigvals(self.S).real) < 0.0)


def _single_system_drift(omega, gamma, kappa_diag, delta_j, G: complex) -> np.ndarray:
    """4x4 drift of one optomechanical subsystem.

    The optomechanical legs carry sqrt(2)*G: those are the quadrature-basis
    coefficients of the couplings (G* da + G da') and i G dq, which is what
    keeps the covariance model consistent with the frequency-domain response
    (and hence with the effective-rate and spectrum formulas).
    """
    gr = math.sqrt(2.0) * G.real
    gi = math.sqrt(2.0) * G.imag
    return np.array([
        [0.0, omega, 0.0, 0.0],
        [-omega, -gamma, gr, gi],
        [-gi, 0.0, -kappa_diag, delta_j],
        [gr, 0.0, -delta_j, -kappa_diag],
    ])


def build_drift_diffusion(s: MeanFieldState, mp: ModelParams) -> DriftDiffusion:
    """Assemble S and N around the mean-field working point ``s``.

    Unidirectional: block lower-triangular S (zero upper-right block) with
    cavity linewidth kappa/2 on the diagonal and -kappa feed-forward; the
    diffusion carries kappa on the cavity diagonal of both local blocks and
    of the symmetric cross block (common vacuum input). Bidirectional: full
    linewidth kappa, symmetric -kappa exchange, and 2*kappa diffusion
    entries.
    """
    d1 = s.detuning(mp, 1)
    d2 = s.detuning(mp, 2)
    G1 = s.coupling(mp, 1)
    G2 = s.coupling(mp, 2)

    uni = mp.unidirectional
    kappa_diag = 0.5 * mp.kappa if uni else mp.kappa
    n_opt = mp.kappa if uni else 2.0 * mp.kappa

    S = np.zeros((8, 8))
    S[0:4, 0:4] = _single_system_drift(mp.omega1, mp.gamma1, kappa_diag, d1, G1)
    S[4:8, 4:8] = _single_system_drift(mp.omega2, mp.gamma2, kappa_diag, d2, G2)
    S[6, 2] = S[7, 3] = -mp.kappa
    if not uni:
        S[2, 6] = S[3, 7] = -mp.kappa

    N = np.zeros((8, 8))
    N[1, 1] = mp.gamma1 * (2.0 * mp.nbar1 + 1.0)
    N[5, 5] = mp.gamma2 * (2.0 * mp.nbar2 + 1.0)
    for i in (2, 3, 6, 7):
        N[i, i] = n_opt
    N[2, 6] = N[6, 2] = n_opt
    N[3, 7] = N[7, 3] = n_opt
    return DriftDiffusion(S=S, N=N, topology=mp.topology)


def _pack(C: np.ndarray) -> np.ndarray:
    return C[_TRIU]


def _unpack(v: np.ndarray) -> np.ndarray:
    C = np.zeros((8, 8))
    C[_TRIU] = v
    return C + np.triu(C, 1).T


@dataclass(frozen=True)
class CovarianceTrajectory:
    """Covariance samples along a run; exactly symmetric by construction."""

    t: np.ndarray
    covariances: tuple
    params: ModelParams

    def state(self, i: int) -> CovarianceState:
        return CovarianceState(self.t[i], self.covariances[i])

    def states(self):
        return [self.state(i) for i in range(len(self.t))]

    def terminal(self) -> CovarianceState:
        return self.state(len(self.t) - 1)


def evolve_covariance(
    C0: CovarianceState,
    traj: MeanFieldTrajectory | MeanFieldState | DriftDiffusion,
    mp: ModelParams,
    t_eval,
    tol=(1e-8, 1e-8),
    physicality_check: bool = True,
) -> CovarianceTrajectory:
    """Integrate dC/dt = S(t) C + C S(t)^T + N along a mean-field trajectory.

    ``traj`` may be a dense mean-field trajectory (time-dependent working
    point), a single fixed point (frozen S), or an explicit DriftDiffusion.
    Symmetry of C is exact at all times: the integrator advances only the
    upper triangle. Emits a PhysicalityWarning when a sampled state dips
    below the vacuum floor by more than 1e-6.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.ndim != 1 or len(t_eval) == 0:
        raise ValueError("t_eval must be a nonempty 1-d array of sample times")

    if isinstance(traj, (MeanFieldState, DriftDiffusion)):
        dd = traj if isinstance(traj, DriftDiffusion) else build_drift_diffusion(traj, mp)
        S_const, N = dd.S, dd.N

        def rhs(t, v):
            C = _unpack(v)
            M = S_const @ C
            return _pack(M + M.T + N)
    else:
        N = build_drift_diffusion(traj.state(0), mp).N

        def rhs(t, v):
            C = _unpack(v)
            S = build_drift_diffusion(
                MeanFieldState.from_vector(t, traj.vector_at(t)), mp
            ).S
            M = S @ C
            return _pack(M + M.T + N)

    rtol, atol = tol
    scale = max(1.0, float(np.max(np.abs(C0.C))))
    res = solve_ivp(
        rhs, (C0.t, float(t_eval[-1])), _pack(C0.C), method="DOP853",
        rtol=rtol, atol=atol * scale, t_eval=t_eval,
    )
    if res.status == -1:
        raise StepSizeUnderflowError(res.t[-1] if len(res.t) else C0.t, res.message)

    covs = tuple(_unpack(res.y[:, i]) for i in range(res.y.shape[1]))
    if physicality_check:
        worst = min(symplectic.min_symplectic_eigenvalue(C) for C in covs)
        if worst < 0.5 - 1e-6:
            warnings.warn(
                f"covariance left the physical cone (min symplectic eigenvalue {worst:.6g})",
                PhysicalityWarning,
            )
    return CovarianceTrajectory(t=res.t, covariances=covs, params=mp)


def steady_covariance(dd: DriftDiffusion) -> CovarianceState:
    """Algebraic steady state of S C + C S^T + N = 0 (dense direct solve).

    Requires S Hurwitz; raises NonHurwitzError otherwise, listing the
    offending eigenvalues.
    """
    eigs = np.linalg.eigvals(dd.S)
    bad = eigs[eigs.real >= 0.0]
    if len(bad):
        raise NonHurwitzError(bad)
    C = solve_continuous_lyapunov(dd.S, -dd.N)
    return CovarianceState(math.inf, 0.5 * (C + C.T))


def lyapunov_residual(dd: DriftDiffusion, C: np.ndarray) -> float:
    """Frobenius norm of S C + C S^T + N."""
    return float(np.linalg.norm(dd.S @ C + C @ dd.S.T + dd.N))
