"""Thermodynamic observables derived from covariance data.

Temperatures are reported in kelvin, which is the one place the SI time
scale stored in ModelParams re-enters.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar as _hbar
from scipy.constants import k as _k_B

from .errors import NegativeOccupationWarning, NoConvergenceError, NonHurwitzError
from .gaussinfo import extract_mirror_pair, mutual_information
from .linearized import build_drift_diffusion, steady_covariance
from .meanfield import steady_meanfield
from .params import ModelParams

_MIRROR_SLOTS = {1: (0, 1), 2: (4, 5)}


def effective_occupation(C, mirror: int) -> float:
    """Occupation (C_qq + C_pp - 1)/2 of one mirror from an 8x8 covariance."""
    M = np.asarray(getattr(C, "C", C), dtype=float)
    i, j = _MIRROR_SLOTS[mirror]
    n = 0.5 * (M[i, i] + M[j, j] - 1.0)
    if n < -1e-9:
        warnings.warn(
            f"mirror {mirror} occupation {n:.3g} < 0; covariance is not physical",
            NegativeOccupationWarning,
        )
    return n


def effective_temperature(n_eff: float, omega_si: float) -> float:
    """Temperature [K] whose Bose occupation at ``omega_si`` [rad/s] is ``n_eff``.

    Inverse of the thermal-occupation law, hbar*omega / (kB ln(1 + 1/n));
    n_eff = 0 maps to 0 K by continuity.
    """
    if n_eff <= 0.0:
        return 0.0
    return _hbar * omega_si / (_k_B * math.log1p(1.0 / n_eff))


def mean_energy(n_eff: float, omega_si: float, offset: str = "plus") -> float:
    """Mirror mean energy hbar*omega*(n +- 1/2) [J].

    ``offset='plus'`` is the standard zero-point convention; ``'minus'``
    reproduces the alternative sign some sources print.
    """
    half = 0.5 if offset == "plus" else -0.5
    if offset not in ("plus", "minus"):
        raise ValueError("offset must be 'plus' or 'minus'")
    return _hbar * omega_si * (n_eff + half)


@dataclass(frozen=True)
class TemperatureTrace:
    """Occupation and temperature of both mirrors along a covariance run."""

    t: np.ndarray            # sample times, units of 1/Omega_1
    n_eff: np.ndarray        # shape (2, len(t))
    T_eff: np.ndarray        # [K], shape (2, len(t))


def temperature_trace(cov_traj, mp: ModelParams) -> TemperatureTrace:
    """Reduce a covariance trajectory to occupations and temperatures."""
    n = np.empty((2, len(cov_traj.t)))
    T = np.empty_like(n)
    for k, C in enumerate(cov_traj.covariances):
        for m in (1, 2):
            n[m - 1, k] = effective_occupation(C, m)
            T[m - 1, k] = effective_temperature(n[m - 1, k], mp.omega_rad_s(m))
    return TemperatureTrace(t=np.asarray(cov_traj.t), n_eff=n, T_eff=T)


def thermalization_time(t, values, rel_tol: float = 0.01,
                        terminal_window: float = 0.1) -> float:
    """First sampled time after which the signal stays within ``rel_tol``.

    The asymptote is the mean over the trailing ``terminal_window`` fraction
    of samples; the trace must itself be settled there (every trailing
    sample within the band), otherwise NoConvergenceError is raised.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1 or len(t) < 2:
        raise ValueError("need matching 1-d time/value arrays with >= 2 samples")
    n_tail = max(2, int(math.ceil(terminal_window * len(t))))
    v_inf = float(np.mean(v[-n_tail:]))
    if v_inf == 0.0:
        raise NoConvergenceError("terminal value is zero; relative band undefined")
    dev = np.abs(v - v_inf) / abs(v_inf)
    if np.max(dev[-n_tail:]) >= rel_tol:
        raise NoConvergenceError(
            f"terminal window still varies by {np.max(dev[-n_tail:]):.3g} "
            f"(> {rel_tol:g}); trace has not settled"
        )
    inside = dev < rel_tol
    # smallest index from which every later sample stays inside the band
    idx = len(t) - 1
    while idx > 0 and inside[idx - 1]:
        idx -= 1
    return float(t[idx])


@dataclass(frozen=True)
class GradientPoint:
    delta: float
    T1: float | None
    T2: float | None
    gradient: float | None   # T2 - T1 [K]
    mutual_info: float | None
    stable: bool


def steady_gradient(mp: ModelParams, deltas) -> list:
    """Steady temperature gradient and mutual information over a detuning grid.

    Per grid point: mean-field fixed point, algebraic steady covariance,
    then T2 - T1 and the mirror-pair mutual information. Points where the
    drift is not Hurwitz (or the mean field refuses to settle) are marked
    unstable and carry no values. The mean-field solve is continued from the
    previous grid point for speed.
    """
    points = []
    seed = None
    for delta in np.asarray(deltas, dtype=float):
        mpd = mp.replace(delta=float(delta))
        try:
            s = steady_meanfield(mpd, seed=seed)
            seed = s
            dd = build_drift_diffusion(s, mpd)
            css = steady_covariance(dd)
        except (NonHurwitzError, NoConvergenceError):
            seed = None
            points.append(GradientPoint(float(delta), None, None, None, None, False))
            continue
        n1 = effective_occupation(css, 1)
        n2 = effective_occupation(css, 2)
        T1 = effective_temperature(n1, mpd.omega_rad_s(1))
        T2 = effective_temperature(n2, mpd.omega_rad_s(2))
        mi = mutual_information(extract_mirror_pair(css))
        points.append(GradientPoint(float(delta), T1, T2, T2 - T1, mi, True))
    return points
