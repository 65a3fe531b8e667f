"""Correlation measures for two-mode Gaussian states.

All formulas use the vacuum-1/2 convention and natural logarithms (nats).
The closed-form discord is cross-checked by ``discord_by_measurement``,
an explicit minimization over pure single-mode Gaussian measurements.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import symplectic
from .errors import NonPhysicalStateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwoModeGaussian:
    """4x4 covariance split into local blocks A, B and cross block D."""

    A: np.ndarray
    B: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "D"):
            M = np.asarray(getattr(self, name), dtype=float)
            if M.shape != (2, 2):
                raise ValueError(f"block {name} must be 2x2, got {M.shape}")
            object.__setattr__(self, name, M)

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.D], [self.D.T, self.B]])

    @classmethod
    def from_matrix(cls, C: np.ndarray) -> "TwoModeGaussian":
        C = np.asarray(C, dtype=float)
        if C.shape != (4, 4):
            raise ValueError(f"expected 4x4, got {C.shape}")
        C = 0.5 * (C + C.T)
        return cls(A=C[:2, :2], B=C[2:, 2:], D=C[:2, 2:])

    def swapped(self) -> "TwoModeGaussian":
        return TwoModeGaussian(A=self.B.copy(), B=self.A.copy(), D=self.D.T.copy())

    def is_physical(self, tol: float = symplectic.PHYSICALITY_TOL) -> bool:
        return symplectic.is_physical(self.matrix, tol)


def extract_mirror_pair(C8) -> TwoModeGaussian:
    """Mirror-mirror marginal (q1, p1, q2, p2) of an 8x8 covariance."""
    C = np.asarray(getattr(C8, "C", C8), dtype=float)
    idx = np.ix_([0, 1, 4, 5], [0, 1, 4, 5])
    return TwoModeGaussian.from_matrix(C[idx])


class SymplecticInvariants(NamedTuple):
    I1: float
    I2: float
    I3: float
    I4: float
    d_plus: float
    d_minus: float


def symplectic_invariants(g: TwoModeGaussian) -> SymplecticInvariants:
    """Local determinant invariants and symplectic eigenvalues.

    d+- = sqrt((I_delta +- sqrt(I_delta^2 - 4 I4))/2) with
    I_delta = I1 + I2 + 2 I3.
    """
    I1 = float(np.linalg.det(g.A))
    I2 = float(np.linalg.det(g.B))
    I3 = float(np.linalg.det(g.D))
    I4 = float(np.linalg.det(g.matrix))
    i_delta = I1 + I2 + 2.0 * I3
    disc = i_delta**2 - 4.0 * I4
    if disc < -1e-12 * max(1.0, i_delta**2):
        raise NonPhysicalStateError(
            f"I_delta^2 - 4 I4 = {disc:.3g} < 0; not a valid two-mode covariance"
        )
    root = math.sqrt(max(disc, 0.0))
    d_plus = math.sqrt(max((i_delta + root) / 2.0, 0.0))
    d_minus = math.sqrt(max((i_delta - root) / 2.0, 0.0))
    return SymplecticInvariants(I1, I2, I3, I4, d_plus, d_minus)


def entropy_f(x: float) -> float:
    """Thermal-mode entropy (x + 1/2)ln(x + 1/2) - (x - 1/2)ln(x - 1/2), nats.

    Continuous continuation f(1/2) = 0; arguments slightly below 1/2 (from
    round-off on pure states) clamp to the boundary.
    """
    if x <= 0.5:
        return 0.0
    return (x + 0.5) * math.log(x + 0.5) - (x - 0.5) * math.log(x - 0.5)


def mutual_information(g: TwoModeGaussian) -> float:
    """I(A:B) = f(sqrt(I1)) + f(sqrt(I2)) - f(d+) - f(d-)."""
    inv = symplectic_invariants(g)
    val = (entropy_f(math.sqrt(inv.I1)) + entropy_f(math.sqrt(inv.I2))
           - entropy_f(inv.d_plus) - entropy_f(inv.d_minus))
    return max(val, 0.0)


_I3_FLOOR = 1e-12

# below this value the float64 cancellation noise of the invariant chain can
# dominate (thermal covariances amplify eps by ~nbar^2); switch to mpmath
_PRECISION_ESCALATION = 1e-6


def _w_parameter(inv: SymplecticInvariants) -> float:
    """Minimal conditional determinant over Gaussian measurements on mode B.

    Piecewise closed form; the low-|I3| regime (which includes product
    states) always takes the second branch, where the first branch's
    denominator degenerates.
    """
    I1, I2, I3, I4 = inv.I1, inv.I2, inv.I3, inv.I4
    use_first = False
    if abs(I3) >= _I3_FLOOR:
        lhs = 4.0 * (I1 * I2 - I4) ** 2
        rhs = (I1 + 4.0 * I4) * (1.0 + 4.0 * I2) * I3**2
        use_first = lhs <= rhs
    if use_first:
        inner = 4.0 * I3**2 + (4.0 * I2 - 1.0) * (4.0 * I4 - I1)
        num = 2.0 * abs(I3) + math.sqrt(max(inner, 0.0))
        return (num / (4.0 * I2 - 1.0)) ** 2
    term = I1 * I2 + I4 - I3**2
    inner = term**2 - 4.0 * I1 * I2 * I4
    return (term - math.sqrt(max(inner, 0.0))) / (2.0 * I2)


def _discord_mp(C4: np.ndarray) -> float:
    """Discord (measurement on the second listed mode) at 50-digit precision.

    Same formula as the float path; used when the result is small enough for
    double-precision cancellation in the invariants to matter.
    """
    import mpmath as mp

    with mp.workdps(50):
        M = mp.matrix([[mp.mpf(float(C4[i, j])) for j in range(4)] for i in range(4)])
        half = mp.mpf("0.5")

        def det2(B):
            return B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]

        def f(x):
            if x <= half:
                return mp.mpf(0)
            return (x + half) * mp.log(x + half) - (x - half) * mp.log(x - half)

        I1 = det2(M[0:2, 0:2])
        I2 = det2(M[2:4, 2:4])
        I3 = det2(M[0:2, 2:4])
        I4 = mp.det(M)
        i_delta = I1 + I2 + 2 * I3
        root = mp.sqrt(max(i_delta**2 - 4 * I4, mp.mpf(0)))
        d_plus = mp.sqrt((i_delta + root) / 2)
        d_minus = mp.sqrt(max((i_delta - root) / 2, mp.mpf(0)))
        use_first = (abs(I3) >= _I3_FLOOR
                     and 4 * (I1 * I2 - I4) ** 2
                     <= (I1 + 4 * I4) * (1 + 4 * I2) * I3**2)
        if use_first:
            inner = 4 * I3**2 + (4 * I2 - 1) * (4 * I4 - I1)
            w = ((2 * abs(I3) + mp.sqrt(max(inner, mp.mpf(0)))) / (4 * I2 - 1)) ** 2
        else:
            term = I1 * I2 + I4 - I3**2
            inner = term**2 - 4 * I1 * I2 * I4
            w = (term - mp.sqrt(max(inner, mp.mpf(0)))) / (2 * I2)
        val = f(mp.sqrt(I2)) - f(d_plus) - f(d_minus) + f(mp.sqrt(max(w, mp.mpf(0))))
        return max(float(val), 0.0)


def gaussian_discord(g: TwoModeGaussian, direction: str = "A_given_B") -> float:
    """Quantum discord of a two-mode Gaussian state, in nats.

    D(A|B) = f(sqrt(I2)) - f(d+) - f(d-) + f(sqrt(W)) with W the optimal
    post-measurement determinant of the unmeasured mode; the other direction
    swaps the roles of the two local blocks. Results in the
    cancellation-dominated regime (hot, weakly correlated states) are
    recomputed at extended precision; negative round-off clamps to zero.
    """
    if direction == "B_given_A":
        g = g.swapped()
    elif direction != "A_given_B":
        raise ValueError("direction must be 'A_given_B' or 'B_given_A'")
    inv = symplectic_invariants(g)
    w = _w_parameter(inv)
    val = (entropy_f(math.sqrt(inv.I2)) - entropy_f(inv.d_plus)
           - entropy_f(inv.d_minus) + entropy_f(math.sqrt(max(w, 0.0))))
    if val < _PRECISION_ESCALATION:
        if val < -1e-6:
            logger.warning("discord clamp: closed form returned %.3g < 0", val)
        return _discord_mp(g.matrix)
    return max(val, 0.0)


def _conditional_det(g: TwoModeGaussian, theta: float, log_lam: float) -> float:
    """det of A after a pure Gaussian measurement (theta, lambda) on B."""
    lam = math.exp(log_lam)
    ct, st = math.cos(theta), math.sin(theta)
    R = np.array([[ct, -st], [st, ct]])
    sigma_m = 0.5 * R @ np.diag([lam, 1.0 / lam]) @ R.T
    M = g.B + sigma_m
    # 2x2 solve in closed form keeps the oracle self-contained
    det_m = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    inv_m = np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det_m
    Ac = g.A - g.D @ inv_m @ g.D.T
    return float(Ac[0, 0] * Ac[1, 1] - Ac[0, 1] * Ac[1, 0])


def discord_by_measurement(g: TwoModeGaussian, direction: str = "A_given_B",
                           n_starts: int = 12, seed: int = 42) -> float:
    """Discord from explicit minimization over pure Gaussian measurements.

    Independent of the closed form: scans rotated squeezed-vacuum
    measurement covariances on the measured mode with a seeded multi-start
    simplex search. Serves as the arbiter for the piecewise W formula.
    """
    if direction == "B_given_A":
        g = g.swapped()
    elif direction != "A_given_B":
        raise ValueError("direction must be 'A_given_B' or 'B_given_A'")
    inv = symplectic_invariants(g)
    rng = np.random.default_rng(seed)
    best = math.inf
    starts = [(0.0, 0.0), (math.pi / 4, 1.0), (math.pi / 4, -1.0)]
    starts += [(rng.uniform(0.0, math.pi), rng.uniform(-4.0, 4.0))
               for _ in range(max(0, n_starts - len(starts)))]
    for theta0, loglam0 in starts:
        res = minimize(
            lambda x: _conditional_det(g, x[0], x[1]),
            x0=np.array([theta0, loglam0]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
        )
        best = min(best, float(res.fun))
    val = (entropy_f(math.sqrt(inv.I2)) - entropy_f(inv.d_plus)
           - entropy_f(inv.d_minus) + entropy_f(math.sqrt(max(best, 0.0))))
    return max(val, 0.0)
