"""Self-induced oscillation analysis: cavity response to prescribed mirror
limit cycles and radiation-pressure/friction power-balance maps.

With mirrors locked to Q_j(t) = Qbar_j + alpha_j cos(Omega_j t), the cavity
amplitudes are exact sideband series with Bessel-function weights. The ratio
of the cycle-averaged radiation-pressure power to the friction loss marks
sustainable limit cycles where it crosses one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv
from skimage import measure as _measure

from .effective import effective_rates, optical_susceptibility
from .errors import NoConvergenceError, TruncationWarning
from .meanfield import MeanFieldState
from .params import ModelParams

_TAIL_BOUND = 1e-13
_N_MAX_CAP = 60
_FREQ_TOL = 1e-6


def _auto_n_max(*args) -> int:
    """Smallest order whose Bessel tail bound (x/2)^n / n! is negligible."""
    x = max(abs(a) for a in args)
    n, bound = 1, 0.5 * x
    while bound > _TAIL_BOUND and n < _N_MAX_CAP:
        n += 1
        bound *= 0.5 * x / n
    return max(n, 3)


def _tail_ok(x: float, n_max: int) -> bool:
    bound = 1.0
    for n in range(1, n_max + 1):
        bound *= 0.5 * abs(x) / n
    return bound < 1e-12


@dataclass(frozen=True)
class BesselAmplitudes:
    """Sideband coefficient tables of both cavities for one working point.

    ``a1[n]`` multiplies exp(i n Omega_1 t) (index offset n_max); ``a2`` is
    the triple-index table over (n, m, l) with the same offset per axis.
    ``harmonics2``/``coeffs2`` hold the same content collapsed onto distinct
    oscillation frequencies, which is what reconstruction and averaging use.
    """

    n_max: int
    z1: float                # g1 alpha1 / Omega_1
    z2: float
    a1: np.ndarray
    a2: np.ndarray
    harmonics2: np.ndarray   # distinct frequencies of cavity 2
    coeffs2: np.ndarray      # summed coefficient per frequency
    qbar: tuple
    alpha: tuple
    truncation_ok: bool = True


def bessel_amplitudes(mp: ModelParams, qbar, alpha, n_max: int | None = None,
                      delta: float | None = None) -> BesselAmplitudes:
    """Sideband amplitudes of both cavities for locked mirror motion.

    The first cavity's comb is J_n(-z1) chi_a1(-n Omega_1) E1; the second
    cavity is driven through the guide, so each of its components carries the
    first cavity's susceptibility chi_a1(-n Omega_1) as well as its own at
    the combined sideband frequency. Detunings inside the susceptibilities
    are taken at the static displacements ``qbar``. Warns when ``n_max`` is
    too small for the requested oscillation amplitudes.
    """
    q1, q2 = qbar
    a1_amp, a2_amp = alpha
    dlt = mp.delta if delta is None else float(delta)
    d1 = dlt - mp.g1 * q1
    d2 = dlt - mp.g2 * q2
    z1 = mp.g1 * a1_amp / mp.omega1
    z2 = mp.g2 * a2_amp / mp.omega2
    if n_max is None:
        n_max = _auto_n_max(z1, z2)
    ok = _tail_ok(z1, n_max) and _tail_ok(z2, n_max)
    if not ok:
        warnings.warn(
            f"Bessel tail bound not met at n_max={n_max} for arguments "
            f"({z1:.3g}, {z2:.3g})", TruncationWarning,
        )

    n = np.arange(-n_max, n_max + 1)
    a1 = jv(n, -z1) * optical_susceptibility(-n * mp.omega1, mp.kappa, d1) * mp.E1

    jn_m = jv(n, -z1)          # J_n(-z1)
    jm = jv(n, -z2)            # J_m(-z2)
    jl = jv(n, z1)             # J_l(+z1)
    chi1_n = optical_susceptibility(-n * mp.omega1, mp.kappa, d1)
    # a2[n, m, l] = -kappa J_n(-z1) J_m(-z2) J_l(z1) chi1(-n W1) chi2(-(n+l)W1 - m W2) E1
    npl = n[:, None, None] + n[None, None, :]          # n + l
    freq = npl * mp.omega1 + n[None, :, None] * mp.omega2
    chi2 = optical_susceptibility(-freq.ravel(), mp.kappa, d2).reshape(freq.shape)
    a2 = (-mp.kappa * mp.E1
          * (jn_m * chi1_n)[:, None, None]
          * jm[None, :, None]
          * jl[None, None, :]
          * chi2)

    # collapse onto distinct frequencies (exact secular grouping)
    f_flat = freq.ravel()
    c_flat = a2.ravel()
    order = np.argsort(f_flat, kind="stable")
    f_sorted = f_flat[order]
    c_sorted = c_flat[order]
    group = np.concatenate(([0], np.cumsum(np.diff(f_sorted) > _FREQ_TOL)))
    n_groups = group[-1] + 1
    harmonics = np.zeros(n_groups)
    coeffs = np.zeros(n_groups, dtype=complex)
    np.add.at(harmonics, group, f_sorted)
    counts = np.bincount(group)
    harmonics /= counts
    np.add.at(coeffs, group, c_sorted)

    return BesselAmplitudes(
        n_max=n_max, z1=z1, z2=z2, a1=a1, a2=a2,
        harmonics2=harmonics, coeffs2=coeffs,
        qbar=(q1, q2), alpha=(a1_amp, a2_amp), truncation_ok=ok,
    )


def reconstruct_cavity_fields(amps: BesselAmplitudes, mp: ModelParams, t):
    """Time-domain cavity amplitudes A_1(t), A_2(t) from the sideband tables."""
    t = np.asarray(t, dtype=float)
    n = np.arange(-amps.n_max, amps.n_max + 1)
    phase1 = np.exp(1j * amps.z1 * np.sin(mp.omega1 * t))
    comb1 = np.exp(1j * np.outer(t, n) * mp.omega1) @ amps.a1
    a1 = phase1 * comb1
    phase2 = np.exp(1j * amps.z2 * np.sin(mp.omega2 * t))
    comb2 = np.exp(1j * np.outer(t, amps.harmonics2)) @ amps.coeffs2
    a2 = phase2 * comb2
    return a1, a2


def _mean_square(amps: BesselAmplitudes, cavity: int) -> float:
    """Cycle average of |A_j|^2 (diagonal sideband power)."""
    if cavity == 1:
        return float(np.sum(np.abs(amps.a1) ** 2))
    return float(np.sum(np.abs(amps.coeffs2) ** 2))


def _beat_from_list(freqs: np.ndarray, coeffs: np.ndarray, omega_beat: float) -> complex:
    """Sum of b_k b_{k'}^* over pairs whose frequencies differ by omega_beat."""
    total = 0.0 + 0.0j
    for k in range(len(freqs)):
        target = freqs[k] - omega_beat
        j = np.searchsorted(freqs, target - _FREQ_TOL)
        while j < len(freqs) and freqs[j] <= target + _FREQ_TOL:
            total += coeffs[k] * np.conj(coeffs[j])
            j += 1
    return total


def _solve_qbar(mp: ModelParams, alpha, delta, n_max):
    """Static displacements from the zero-frequency force balance.

    Damped fixed-point iteration of Qbar_j = g_j <|A_j|^2> / Omega_j; the
    first mirror decouples and is solved first.
    """
    q = [0.0, 0.0]
    for mirror in (0, 1):
        value = 0.0
        for _ in range(200):
            amps = bessel_amplitudes(mp, (q[0], q[1]), alpha, n_max=n_max, delta=delta)
            g = mp.g1 if mirror == 0 else mp.g2
            omega = mp.omega1 if mirror == 0 else mp.omega2
            target = g * _mean_square(amps, mirror + 1) / omega
            if abs(target - value) <= 1e-10 * max(1.0, abs(value)):
                value = target
                break
            value = 0.5 * value + 0.5 * target
            q[mirror] = value
        else:
            raise NoConvergenceError(
                f"static displacement of mirror {mirror + 1} did not settle"
            )
        q[mirror] = value
    return tuple(q)


def power_balance(mp: ModelParams, alpha, delta: float, qbar=None,
                  n_max: int | None = None):
    """Cycle-averaged P_rad/P_fric for both mirrors at one (alpha, Delta) point.

    ``alpha = (alpha1, alpha2)`` are the assumed oscillation amplitudes. The
    static displacements are solved self-consistently unless given. A mirror
    with zero amplitude gets the linear-response limit -2 Gamma_eff /
    (gamma Omega) instead of the ill-defined 0/0 ratio.
    """
    alpha = (float(alpha[0]), float(alpha[1]))
    if qbar is None:
        qbar = _solve_qbar(mp, alpha, delta, n_max)
    amps = bessel_amplitudes(mp, qbar, alpha, n_max=n_max, delta=delta)

    ratios = []
    for mirror in (1, 2):
        a_m = alpha[mirror - 1]
        omega = mp.omega1 if mirror == 1 else mp.omega2
        gamma = mp.gamma_of(mirror)
        g = mp.g1 if mirror == 1 else mp.g2
        if a_m == 0.0:
            ratios.append(_linear_response_ratio(mp, amps, mirror, delta))
            continue
        if mirror == 1:
            z = complex(np.sum(amps.a1[1:] * np.conj(amps.a1[:-1])))
        else:
            z = _beat_from_list(amps.harmonics2, amps.coeffs2, omega)
        p_rad = g * a_m * omega * z.imag
        p_fric = gamma * a_m**2 * omega**2 / 2.0
        ratios.append(p_rad / p_fric)
    return tuple(ratios)


def _linear_response_ratio(mp: ModelParams, amps: BesselAmplitudes, mirror: int,
                           delta: float) -> float:
    """alpha -> 0 limit of the power ratio: -2 Gamma_eff / (gamma Omega)."""
    mpd = mp.replace(delta=float(delta))
    i0 = amps.n_max
    state = MeanFieldState(0.0, amps.qbar[0], 0.0, complex(amps.a1[i0]),
                           amps.qbar[1], 0.0,
                           complex(amps.coeffs2[np.argmin(np.abs(amps.harmonics2))]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ep = effective_rates(mpd, state)
    if mirror == 1:
        return -2.0 * ep.gamma_eff_1 / (mp.gamma1 * mp.omega1)
    return -2.0 * ep.gamma_eff_2 / (mp.gamma2 * mp.omega2)


@dataclass(frozen=True)
class StabilityMap:
    """Power-balance ratios over an (alpha, Delta) grid with unit contours."""

    alpha: np.ndarray
    delta: np.ndarray
    ratio1: np.ndarray       # shape (len(alpha), len(delta))
    ratio2: np.ndarray
    contours1: list = field(default_factory=list)
    contours2: list = field(default_factory=list)
    truncation_flags: np.ndarray | None = None

    def as_rows(self):
        for i, a in enumerate(self.alpha):
            for j, d in enumerate(self.delta):
                yield a, d, self.ratio1[i, j], self.ratio2[i, j]


def _grid_contours(alpha, delta, ratio, level=1.0):
    finite = np.nan_to_num(ratio, nan=-1e30)
    if not (finite.min() < level < finite.max()):
        return []
    lines = _measure.find_contours(finite, level)
    da = alpha[1] - alpha[0] if len(alpha) > 1 else 1.0
    dd = delta[1] - delta[0] if len(delta) > 1 else 1.0
    out = []
    for line in lines:
        pts = np.column_stack([alpha[0] + line[:, 0] * da, delta[0] + line[:, 1] * dd])
        out.append(pts)
    return out


def _map_column(mp, alpha_grid, d, n_max):
    col1 = np.empty(len(alpha_grid))
    col2 = np.empty(len(alpha_grid))
    flags = np.zeros(len(alpha_grid), dtype=bool)
    for i, a in enumerate(alpha_grid):
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", TruncationWarning)
                v1, _ = power_balance(mp, (a, 0.0), d, n_max=n_max)
                _, v2 = power_balance(mp, (0.0, a), d, n_max=n_max)
                flags[i] = any(
                    issubclass(w.category, TruncationWarning) for w in caught)
        except NoConvergenceError:
            v1 = v2 = math.nan
            flags[i] = True
        col1[i] = v1
        col2[i] = v2
    return col1, col2, flags


def stability_map(mp: ModelParams, alpha_grid, delta_grid,
                  n_max: int | None = None, threads: int = 1) -> StabilityMap:
    """Evaluate both power-balance ratios on the product grid.

    Mirror 1's ratio assumes mirror 1 oscillating (mirror 2 at rest);
    mirror 2's ratio the reverse, with mirror 1's static response still
    feeding the guide. Cells where the static balance fails carry NaN.
    Unit-ratio contours are extracted by marching squares. Detuning columns
    are independent; ``threads`` > 1 distributes them over a worker pool
    (results are stitched by index, so the output is thread-count
    independent).
    """
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    delta_grid = np.asarray(delta_grid, dtype=float)
    if len(alpha_grid) == 0 or len(delta_grid) == 0:
        raise ValueError("grids must be nonempty")
    r1 = np.empty((len(alpha_grid), len(delta_grid)))
    r2 = np.empty_like(r1)
    flags = np.zeros_like(r1, dtype=bool)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(
                lambda d: _map_column(mp, alpha_grid, d, n_max), delta_grid))
    else:
        columns = [_map_column(mp, alpha_grid, d, n_max) for d in delta_grid]
    for j, (col1, col2, col_flags) in enumerate(columns):
        r1[:, j] = col1
        r2[:, j] = col2
        flags[:, j] = col_flags
    return StabilityMap(
        alpha=alpha_grid, delta=delta_grid, ratio1=r1, ratio2=r2,
        contours1=_grid_contours(alpha_grid, delta_grid, r1),
        contours2=_grid_contours(alpha_grid, delta_grid, r2),
        truncation_flags=flags,
    )
