"""Physical inputs in SI units and their dimensionless model counterparts.

Every other module works in units where the first mechanical frequency is 1
and time is measured in 1/Omega_1. ``nondimensionalize`` is the single place
where SI values enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.constants import c as _c_light
from scipy.constants import hbar as _hbar
from scipy.constants import k as _k_B

from .errors import InvalidParameterError, TopologyConsistencyError

TOPOLOGIES = ("unidirectional", "bidirectional")

_POSITIVE_FIELDS = (
    "mass",
    "omega1",
    "omega2",
    "gamma1",
    "gamma2",
    "temperature",
    "length",
    "kappa",
    "wavelength",
    "power1",
)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory parameter set, all in SI units.

    mass [kg], angular frequencies and rates [rad/s], temperature [K],
    length/wavelength [m], powers [W]. ``detuning`` is laser-cavity detuning
    (cavity minus laser, rad/s) and may take either sign.
    """

    mass: float
    omega1: float
    omega2: float
    gamma1: float
    gamma2: float
    temperature: float
    length: float
    kappa: float
    wavelength: float
    power1: float
    detuning: float
    topology: str = "unidirectional"
    power2: float = 0.0

    def __post_init__(self):
        for name in _POSITIVE_FIELDS:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidParameterError(name, f"must be a finite positive number, got {value!r}")
        if not math.isfinite(self.detuning):
            raise InvalidParameterError("detuning", "must be finite")
        if self.power2 < 0 or not math.isfinite(self.power2):
            raise InvalidParameterError("power2", f"must be >= 0, got {self.power2!r}")
        if self.topology not in TOPOLOGIES:
            raise InvalidParameterError("topology", f"must be one of {TOPOLOGIES}")
        if self.topology == "unidirectional" and self.power2 != 0.0:
            raise TopologyConsistencyError(
                "unidirectional topology admits no second drive; set power2 = 0"
            )

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model parameters; all rates in units of omega1.

    ``omega1 == 1`` by construction. ``tau`` is the mechanical period
    2*pi/Omega_1 in seconds and is kept only to convert results back to SI.
    """

    omega1: float
    omega2: float
    gamma1: float
    gamma2: float
    kappa: float
    delta: float
    g1: float
    g2: float
    E1: float
    E2: float
    nbar1: float
    nbar2: float
    tau: float
    topology: str = "unidirectional"

    def __post_init__(self):
        if abs(self.omega1 - 1.0) > 1e-12:
            raise InvalidParameterError("omega1", "model units require omega1 == 1")
        if self.nbar1 < 0 or self.nbar2 < 0:
            raise InvalidParameterError("nbar", "thermal occupation must be >= 0")
        if self.g1 <= 0 or self.g2 <= 0:
            raise InvalidParameterError("g", "single-photon coupling must be > 0")

    @property
    def unidirectional(self) -> bool:
        return self.topology == "unidirectional"

    def omega_rad_s(self, mirror: int) -> float:
        """Mechanical frequency of mirror 1 or 2 back in rad/s."""
        omega = {1: self.omega1, 2: self.omega2}[mirror]
        return omega * 2.0 * math.pi / self.tau

    def gamma_of(self, mirror: int) -> float:
        return {1: self.gamma1, 2: self.gamma2}[mirror]

    def nbar_of(self, mirror: int) -> float:
        return {1: self.nbar1, 2: self.nbar2}[mirror]

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar*omega/kB*T) - 1).

    ``omega`` in rad/s, ``temperature`` in K; T = 0 maps to 0.
    """
    if omega <= 0:
        raise InvalidParameterError("omega", "frequency must be > 0")
    if temperature < 0:
        raise InvalidParameterError("temperature", "temperature must be >= 0")
    if temperature == 0.0:
        return 0.0
    x = _hbar * omega / (_k_B * temperature)
    return 1.0 / math.expm1(x)


def nondimensionalize(p: PhysicalParams) -> ModelParams:
    """Convert SI inputs to rates in units of omega1.

    The laser frequency follows from the wavelength, the cavity frequency
    from laser plus detuning; single-photon couplings and drive amplitudes
    are formed from those before the common rescaling by omega1.
    """
    omega_laser = 2.0 * math.pi * _c_light / p.wavelength
    omega_cavity = omega_laser + p.detuning

    def coupling(omega_m):
        return (omega_cavity / p.length) * math.sqrt(_hbar / (p.mass * omega_m))

    def drive(power):
        return math.sqrt(2.0 * p.kappa * power / (_hbar * omega_laser))

    scale = p.omega1
    return ModelParams(
        omega1=1.0,
        omega2=p.omega2 / scale,
        gamma1=p.gamma1 / scale,
        gamma2=p.gamma2 / scale,
        kappa=p.kappa / scale,
        delta=p.detuning / scale,
        g1=coupling(p.omega1) / scale,
        g2=coupling(p.omega2) / scale,
        E1=drive(p.power1) / scale,
        E2=drive(p.power2) / scale,
        nbar1=thermal_occupation(p.omega1, p.temperature),
        nbar2=thermal_occupation(p.omega2, p.temperature),
        tau=2.0 * math.pi / p.omega1,
        topology=p.topology,
    )


def reference_physical_params(**overrides) -> PhysicalParams:
    """State-of-the-art parameter set used throughout the docs and tests.

    150 ng oscillators at Omega/2pi = 1 MHz with gamma/2pi = 1 Hz, a 25 mm
    cavity decaying at 1.34e6 rad/s, 1064 nm pump of 2 mW at detuning
    Delta = Omega_1 (cooling point), 300 K baths.
    """
    base = dict(
        mass=150e-12,
        omega1=2.0 * math.pi * 1.0e6,
        omega2=2.0 * math.pi * 1.0e6,
        gamma1=2.0 * math.pi * 1.0,
        gamma2=2.0 * math.pi * 1.0,
        temperature=300.0,
        length=25e-3,
        kappa=1.34e6,
        wavelength=1064e-9,
        power1=2e-3,
        detuning=2.0 * math.pi * 1.0e6,
        topology="unidirectional",
        power2=0.0,
    )
    base.update(overrides)
    return PhysicalParams(**base)
