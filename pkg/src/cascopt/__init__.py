"""Simulator for a pair of optomechanical cavities coupled by a one-way guide.

Mean-field trajectories, covariance (Lyapunov) dynamics, the reduced
two-mirror model, Gaussian correlation measures, effective temperatures,
output spectra, and self-oscillation/multistability diagrams, with a batch
CLI (``cascopt``) that writes CSV/JSON data files.
"""

__version__ = "0.1.0"

from .params import (  # noqa: F401
    ModelParams,
    PhysicalParams,
    nondimensionalize,
    reference_physical_params,
    thermal_occupation,
)
