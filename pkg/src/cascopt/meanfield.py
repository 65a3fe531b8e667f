"""Classical mean-field dynamics of the two driven cavities and their mirrors.

State layout used throughout: the real 8-vector
(Q1, P1, Re A1, Im A1, Q2, P2, Re A2, Im A2), matching the CSV export order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NoConvergenceError, StepSizeUnderflowError
from .params import ModelParams

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class MeanFieldState:
    """Classical trajectory point: mirror quadrature means and cavity amplitudes."""

    t: float
    Q1: float
    P1: float
    A1: complex
    Q2: float
    P2: float
    A2: complex

    def to_vector(self) -> np.ndarray:
        return np.array(
            [self.Q1, self.P1, self.A1.real, self.A1.imag,
             self.Q2, self.P2, self.A2.real, self.A2.imag]
        )

    @classmethod
    def from_vector(cls, t: float, y) -> "MeanFieldState":
        return cls(
            t=float(t),
            Q1=float(y[0]), P1=float(y[1]), A1=complex(y[2], y[3]),
            Q2=float(y[4]), P2=float(y[5]), A2=complex(y[6], y[7]),
        )

    @classmethod
    def zero(cls, t: float = 0.0) -> "MeanFieldState":
        return cls(t, 0.0, 0.0, 0j, 0.0, 0.0, 0j)

    def detuning(self, mp: ModelParams, mirror: int) -> float:
        """Position-shifted cavity detuning Delta - g_j Q_j."""
        q = self.Q1 if mirror == 1 else self.Q2
        g = mp.g1 if mirror == 1 else mp.g2
        return mp.delta - g * q

    def coupling(self, mp: ModelParams, mirror: int) -> complex:
        """Field-enhanced coupling g_j A_j."""
        return mp.g1 * self.A1 if mirror == 1 else mp.g2 * self.A2


def _rhs(t, y, mp: ModelParams):
    q1, p1, x1, v1, q2, p2, x2, v2 = y
    a1 = complex(x1, v1)
    a2 = complex(x2, v2)
    d1 = mp.delta - mp.g1 * q1
    d2 = mp.delta - mp.g2 * q2
    if mp.unidirectional:
        # first cavity sees only its own drive; second is slaved to the first
        da1 = -(0.5 * mp.kappa + 1j * d1) * a1 + mp.E1
        da2 = -(0.5 * mp.kappa + 1j * d2) * a2 - mp.kappa * a1
    else:
        # two-way guide: full width kappa per cavity plus symmetric exchange
        da1 = -(mp.kappa + 1j * d1) * a1 - mp.kappa * a2 + mp.E1
        da2 = -(mp.kappa + 1j * d2) * a2 - mp.kappa * a1 + mp.E2
    na1 = x1 * x1 + v1 * v1
    na2 = x2 * x2 + v2 * v2
    return np.array([
        mp.omega1 * p1,
        -mp.omega1 * q1 - mp.gamma1 * p1 + mp.g1 * na1,
        da1.real, da1.imag,
        mp.omega2 * p2,
        -mp.omega2 * q2 - mp.gamma2 * p2 + mp.g2 * na2,
        da2.real, da2.imag,
    ])


def meanfield_rhs(s: MeanFieldState, mp: ModelParams) -> MeanFieldState:
    """Time derivative of the mean-field equations at state ``s``."""
    return MeanFieldState.from_vector(s.t, _rhs(s.t, s.to_vector(), mp))


def meanfield_jacobian(s: MeanFieldState, mp: ModelParams) -> np.ndarray:
    """8x8 Jacobian of the mean-field flow in the real state layout."""
    y = s.to_vector()
    q1, _, x1, v1, q2, _, x2, v2 = y
    d1 = mp.delta - mp.g1 * q1
    d2 = mp.delta - mp.g2 * q2
    hk = 0.5 * mp.kappa if mp.unidirectional else mp.kappa
    J = np.zeros((8, 8))
    for j, (q_i, p_i, x_i, v_i) in enumerate(((0, 1, 2, 3), (4, 5, 6, 7))):
        omega = mp.omega1 if j == 0 else mp.omega2
        gamma = mp.gamma1 if j == 0 else mp.gamma2
        g = mp.g1 if j == 0 else mp.g2
        d = d1 if j == 0 else d2
        x, v = (x1, v1) if j == 0 else (x2, v2)
        J[q_i, p_i] = omega
        J[p_i, q_i] = -omega
        J[p_i, p_i] = -gamma
        J[p_i, x_i] = 2.0 * g * x
        J[p_i, v_i] = 2.0 * g * v
        # cavity amplitude: d(a)/dt = -(hk + i d) a + ..., with d depending on q
        J[x_i, x_i] = -hk
        J[x_i, v_i] = d
        J[v_i, x_i] = -d
        J[v_i, v_i] = -hk
        J[x_i, q_i] = -g * v   # d/dq of +d*v term via d = delta - g q
        J[v_i, q_i] = g * x
    # guide-mediated exchange
    J[6, 2] += -mp.kappa
    J[7, 3] += -mp.kappa
    if not mp.unidirectional:
        J[2, 6] += -mp.kappa
        J[3, 7] += -mp.kappa
    return J


@dataclass(frozen=True)
class MeanFieldTrajectory:
    """Dense mean-field solution plus the samples that were requested."""

    t: np.ndarray
    y: np.ndarray             # shape (8, len(t))
    params: ModelParams
    _sol: object = field(repr=False, default=None)

    def state(self, i: int) -> MeanFieldState:
        return MeanFieldState.from_vector(self.t[i], self.y[:, i])

    def states(self):
        return [self.state(i) for i in range(len(self.t))]

    def terminal(self) -> MeanFieldState:
        return self.state(len(self.t) - 1)

    def at(self, t: float) -> MeanFieldState:
        """Dense-output evaluation anywhere inside the integration span."""
        return MeanFieldState.from_vector(t, self._sol(t))

    def vector_at(self, t: float) -> np.ndarray:
        return self._sol(t)


def integrate_meanfield(
    s0: MeanFieldState,
    mp: ModelParams,
    t_end: float,
    tol=(DEFAULT_RTOL, DEFAULT_ATOL),
    t_eval=None,
    events=None,
) -> MeanFieldTrajectory:
    """Adaptive embedded-pair integration with dense output.

    ``tol`` is the (rtol, atol) pair. Raises StepSizeUnderflowError when the
    controller collapses, which flags blow-up/self-oscillating regimes.
    """
    rtol, atol = tol
    if t_end <= s0.t:
        raise ValueError("t_end must exceed the initial time")
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    res = solve_ivp(
        _rhs, (s0.t, t_end), s0.to_vector(), args=(mp,), method="DOP853",
        rtol=rtol, atol=atol, dense_output=True, t_eval=t_eval, events=events,
    )
    if res.status == -1:
        raise StepSizeUnderflowError(res.t[-1] if len(res.t) else s0.t, res.message)
    return MeanFieldTrajectory(t=res.t, y=res.y, params=mp, _sol=res.sol)


def _convergence_event(mp: ModelParams, threshold: float):
    scale = max(1.0, abs(mp.E1), abs(mp.E2))

    def event(t, y, *_):
        return float(np.linalg.norm(_rhs(t, y, mp))) - threshold * scale

    event.terminal = True
    event.direction = -1
    return event


def _integrate_to_rest(mp: ModelParams, horizon: float, threshold: float) -> np.ndarray:
    """March the flow from the zero state until the residual norm settles.

    Chunked so that a slowly damped system does not accumulate an unbounded
    step history; gives up (returning the terminal state) at ``horizon``.
    """
    event = _convergence_event(mp, threshold)
    y = MeanFieldState.zero().to_vector()
    t = 0.0
    chunk = min(horizon, 2.0e4)
    while t < horizon and event(t, y) > 0:
        t_next = min(t + chunk, horizon)
        res = solve_ivp(_rhs, (t, t_next), y, args=(mp,), method="DOP853",
                        rtol=1e-10, atol=1e-12, events=[event])
        if res.status == -1:
            raise StepSizeUnderflowError(res.t[-1], res.message)
        y = res.y[:, -1]
        t = res.t[-1]
        if res.status == 1:  # residual dropped below threshold
            break
    return y


def _algebraic_seed(mp: ModelParams) -> np.ndarray:
    """Fixed-point estimate from the static photon-number balance.

    Iterates the closed cavity/position relations; adequate as a Newton seed
    whenever the stationary equations have a single branch.
    """
    q1 = q2 = 0.0
    a1 = a2 = 0j
    for _ in range(200):
        d1 = mp.delta - mp.g1 * q1
        d2 = mp.delta - mp.g2 * q2
        if mp.unidirectional:
            a1 = mp.E1 / (0.5 * mp.kappa + 1j * d1)
            a2 = -mp.kappa * a1 / (0.5 * mp.kappa + 1j * d2)
        else:
            h1 = mp.kappa + 1j * d1
            h2 = mp.kappa + 1j * d2
            det = h1 * h2 - mp.kappa**2
            a1 = (h2 * mp.E1 - mp.kappa * mp.E2) / det
            a2 = (h1 * mp.E2 - mp.kappa * mp.E1) / det
        q1n = mp.g1 * abs(a1) ** 2 / mp.omega1
        q2n = mp.g2 * abs(a2) ** 2 / mp.omega2
        if abs(q1n - q1) + abs(q2n - q2) <= 1e-12 * max(1.0, abs(q1), abs(q2)):
            q1, q2 = q1n, q2n
            break
        q1 = 0.5 * (q1 + q1n)
        q2 = 0.5 * (q2 + q2n)
    return MeanFieldState(0.0, q1, 0.0, a1, q2, 0.0, a2).to_vector()


def _single_branch(mp: ModelParams) -> bool:
    """True when both stationary photon cubics have a unique real root."""
    c1 = photon_cubic_coefficients(mp, 1, mp.E1**2, "quarter")
    if cubic_discriminant(*c1) > 0.0:
        return False
    n1 = _real_nonneg_roots(c1, mp.E1**2)
    drive2 = mp.kappa**2 * (n1[0] if n1 else 0.0)
    c2 = photon_cubic_coefficients(mp, 2, drive2, "quarter")
    return cubic_discriminant(*c2) <= 0.0


def steady_meanfield(
    mp: ModelParams,
    seed: MeanFieldState | None = None,
    residual_tol: float = 1e-12,
    max_newton: int = 60,
) -> MeanFieldState:
    """Fixed point of the mean-field flow by damped Newton iteration.

    When the stationary equations are single-branched (cubic discriminants
    negative) the Newton seed comes from the closed static balance; in
    multistable regimes it is the terminal state of a switch-on integration
    (horizon 20/gamma with early exit once the flow settles), which keeps
    the iteration inside the basin the physical switch-on reaches. The
    residual norm of the returned state is below
    ``residual_tol * max(1, E1, E2)``.
    """
    if seed is None:
        if mp.unidirectional and _single_branch(mp):
            y = _algebraic_seed(mp)
        else:
            horizon = 20.0 / min(mp.gamma1, mp.gamma2)
            y = _integrate_to_rest(mp, horizon, threshold=1e-9)
    else:
        y = seed.to_vector()

    scale = max(1.0, abs(mp.E1), abs(mp.E2))
    s = MeanFieldState.from_vector(0.0, y)
    r = _rhs(0.0, y, mp)
    rnorm = np.linalg.norm(r)
    for _ in range(max_newton):
        if rnorm < residual_tol * scale:
            return MeanFieldState.from_vector(0.0, y)
        J = meanfield_jacobian(s, mp)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular mean-field Jacobian: {exc}") from exc
        lam = 1.0
        while lam > 1e-8:
            y_new = y + lam * step
            r_new = _rhs(0.0, y_new, mp)
            if np.linalg.norm(r_new) < rnorm:
                break
            lam *= 0.5
        else:
            raise NoConvergenceError(
                "damped Newton stalled; likely an unstable or oscillatory regime"
            )
        y, r, rnorm = y_new, r_new, np.linalg.norm(r_new)
        s = MeanFieldState.from_vector(0.0, y)
    if rnorm < residual_tol * scale:
        return MeanFieldState.from_vector(0.0, y)
    raise NoConvergenceError(
        f"no fixed point after {max_newton} Newton iterations (residual {rnorm:.3g})"
    )


# --- multistable photon-number branches -------------------------------------

@dataclass(frozen=True)
class Branch:
    """One steady photon-number solution of a cavity's cubic."""

    cavity: int
    N: float
    Q: float
    stability: str            # middle-root rule: 'stable' | 'unstable'
    jacobian_unstable: bool   # linearization cross-check
    parent: int | None = None  # index of the upstream branch (cavity 2 only)

    def as_dict(self):
        return {
            "cavity": self.cavity,
            "N": self.N,
            "Q": self.Q,
            "stability": self.stability,
            "jacobian_unstable": self.jacobian_unstable,
            "parent": self.parent,
        }


@dataclass(frozen=True)
class BranchSet:
    cavity1: tuple
    cavity2: tuple

    def as_records(self):
        return [b.as_dict() for b in self.cavity1 + self.cavity2]


def photon_cubic_coefficients(mp: ModelParams, cavity: int, drive_sq: float,
                              kappa_convention: str = "half") -> tuple:
    """Coefficients (a, b, c, d) of a N^3 + b N^2 + c N + d for one cavity.

    ``drive_sq`` is E1^2 for the first cavity and kappa^2 N1 for the second.
    ``kappa_convention`` selects the kappa^2/2 linewidth term ('half', as
    published) or the kappa^2/4 variant consistent with the |kappa/2 + i
    Delta|^2 expansion ('quarter').
    """
    omega = mp.omega1 if cavity == 1 else mp.omega2
    g = mp.g1 if cavity == 1 else mp.g2
    if kappa_convention == "half":
        kterm = 0.5 * mp.kappa**2
    elif kappa_convention == "quarter":
        kterm = 0.25 * mp.kappa**2
    else:
        raise ValueError("kappa_convention must be 'half' or 'quarter'")
    return (g**4 / omega**2, -2.0 * mp.delta * g**2 / omega,
            mp.delta**2 + kterm, -drive_sq)


def cubic_discriminant(a: float, b: float, c: float, d: float) -> float:
    """Discriminant of a x^3 + b x^2 + c x + d; > 0 means three distinct real roots."""
    return (18.0 * a * b * c * d - 4.0 * b**3 * d + b**2 * c**2
            - 4.0 * a * c**3 - 27.0 * a**2 * d**2)


def _real_nonneg_roots(coeffs, scale):
    roots = np.roots(coeffs)
    tol = 1e-9 * max(1.0, scale)
    out = sorted(float(r.real) for r in roots if abs(r.imag) < tol and r.real >= -tol)
    return [max(r, 0.0) for r in out]


def _branch_state(mp: ModelParams, n1, q1, n2=None, q2=None) -> MeanFieldState:
    """Reconstruct cavity amplitudes for a branch; phases from the linear relations."""
    d1 = mp.delta - mp.g1 * q1
    a1_lin = mp.E1 / (0.5 * mp.kappa + 1j * d1)
    a1 = a1_lin * (math.sqrt(n1) / abs(a1_lin)) if abs(a1_lin) > 0 else 0j
    if n2 is None:
        return MeanFieldState(0.0, q1, 0.0, a1, 0.0, 0.0, 0j)
    d2 = mp.delta - mp.g2 * q2
    a2_lin = -mp.kappa * a1 / (0.5 * mp.kappa + 1j * d2)
    a2 = a2_lin * (math.sqrt(n2) / abs(a2_lin)) if abs(a2_lin) > 0 else 0j
    return MeanFieldState(0.0, q1, 0.0, a1, q2, 0.0, a2)


def _jacobian_unstable(mp: ModelParams, state: MeanFieldState, block: slice) -> bool:
    J = meanfield_jacobian(state, mp)
    eigs = np.linalg.eigvals(J[block, block])
    return bool(np.max(eigs.real) > 0.0)


def multistability_branches(mp: ModelParams, kappa_convention: str = "half") -> BranchSet:
    """Real nonnegative roots of both photon-number cubics with stability labels.

    The middle root of a three-root cubic is labelled unstable (saddle of the
    static force balance); linearization of the flow at each reconstructed
    branch state gives the independent ``jacobian_unstable`` flag.
    """
    c1 = photon_cubic_coefficients(mp, 1, mp.E1**2, kappa_convention)
    roots1 = _real_nonneg_roots(c1, mp.E1**2)
    branches1 = []
    for i, n1 in enumerate(roots1):
        q1 = mp.g1 * n1 / mp.omega1
        mid = len(roots1) == 3 and i == 1
        state = _branch_state(mp, n1, q1)
        branches1.append(Branch(
            cavity=1, N=n1, Q=q1,
            stability="unstable" if mid else "stable",
            jacobian_unstable=_jacobian_unstable(mp, state, slice(0, 4)),
        ))
    branches2 = []
    for parent, b1 in enumerate(branches1):
        c2 = photon_cubic_coefficients(mp, 2, mp.kappa**2 * b1.N, kappa_convention)
        roots2 = _real_nonneg_roots(c2, mp.kappa**2 * b1.N)
        for i, n2 in enumerate(roots2):
            q2 = mp.g2 * n2 / mp.omega2
            mid = len(roots2) == 3 and i == 1
            state = _branch_state(mp, b1.N, b1.Q, n2, q2)
            branches2.append(Branch(
                cavity=2, N=n2, Q=q2,
                stability="unstable" if mid else "stable",
                jacobian_unstable=_jacobian_unstable(mp, state, slice(4, 8)),
                parent=parent,
            ))
    return BranchSet(cavity1=tuple(branches1), cavity2=tuple(branches2))


def cubic_residual(coeffs, n: float) -> float:
    a, b, c, d = coeffs
    return a * n**3 + b * n**2 + c * n + d
