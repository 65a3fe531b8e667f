"""Exception and warning types shared across the package."""


class CascoptError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(CascoptError):
    """A physical input is out of range. Carries the offending field name."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class TopologyConsistencyError(CascoptError):
    """Parameter set contradicts the declared waveguide topology."""


class ConfigError(CascoptError):
    """Configuration file could not be parsed or contains unknown keys."""


class StepSizeUnderflowError(CascoptError):
    """Adaptive integrator collapsed its step; typically a runaway/self-oscillating regime.

    ``t_fail`` is the integration time at which control was lost.
    """

    def __init__(self, t_fail, message=""):
        self.t_fail = t_fail
        super().__init__(message or f"step size underflow at t={t_fail:g}")


class NoConvergenceError(CascoptError):
    """Iterative solver exhausted its iteration budget."""


class NonHurwitzError(CascoptError):
    """Drift matrix has eigenvalues with nonnegative real part; no steady state.

    ``eigenvalues`` lists the offending eigenvalues.
    """

    def __init__(self, eigenvalues):
        self.eigenvalues = list(eigenvalues)
        eig_str = ", ".join(f"{z:.6g}" for z in self.eigenvalues)
        super().__init__(f"drift matrix is not Hurwitz; offending eigenvalues: {eig_str}")


class NonPhysicalStateError(CascoptError):
    """Covariance matrix violates the uncertainty bound beyond tolerance."""


class SpectrumNegativityError(CascoptError):
    """A power spectrum evaluated below zero; the chosen sign convention is at fault."""


class UnresolvablePeaksError(CascoptError):
    """Output-spectrum peaks overlap too strongly for a two-line fit."""


class WeakCouplingWarning(UserWarning):
    """Effective (adiabatic) description requested outside its validity range."""


class PhysicalityWarning(UserWarning):
    """A symplectic eigenvalue dropped below the vacuum floor during evolution."""


class NegativeOccupationWarning(UserWarning):
    """Computed occupation is negative beyond round-off; covariance suspect."""


class TruncationWarning(UserWarning):
    """Series truncation bound not met at the requested order."""


class MultiPeakWarning(UserWarning):
    """Spectrum window contains more than one local maximum; single-line shape invalid."""
