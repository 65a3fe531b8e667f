import math

import numpy as np
import pytest
from scipy.constants import hbar, k as k_B

from cascopt.errors import InvalidParameterError, TopologyConsistencyError
from cascopt.params import (
    PhysicalParams,
    nondimensionalize,
    reference_physical_params,
    thermal_occupation,
)


def test_reference_set_is_valid():
    mp = nondimensionalize(reference_physical_params())
    assert mp.omega1 == 1.0
    assert mp.omega2 == 1.0
    assert mp.g1 > 0 and mp.E1 > 0
    assert mp.E2 == 0.0
    assert mp.tau == pytest.approx(1e-6, rel=1e-12)
    # kappa read as an angular rate by default
    assert mp.kappa == pytest.approx(1.34e6 / (2 * math.pi * 1e6), rel=1e-12)


def test_zero_power_rejected_naming_field():
    with pytest.raises(InvalidParameterError) as err:
        reference_physical_params(power1=0.0)
    assert err.value.field == "power1"


@pytest.mark.parametrize("field", ["mass", "omega2", "gamma1", "length",
                                   "kappa", "wavelength", "temperature"])
def test_nonpositive_inputs_rejected(field):
    with pytest.raises(InvalidParameterError) as err:
        reference_physical_params(**{field: -1.0})
    assert err.value.field == field


def test_unidirectional_requires_zero_second_drive():
    with pytest.raises(TopologyConsistencyError):
        reference_physical_params(power2=1e-3)


def test_equal_frequencies_map_to_unity():
    p = reference_physical_params(omega2=reference_physical_params().omega1)
    mp = nondimensionalize(p)
    assert mp.omega2 == pytest.approx(1.0, abs=1e-15)


def test_drive_and_coupling_formulas():
    p = reference_physical_params()
    mp = nondimensionalize(p)
    omega_laser = 2 * math.pi * 299792458.0 / p.wavelength
    omega_cavity = omega_laser + p.detuning
    g_expect = omega_cavity / p.length * math.sqrt(hbar / (p.mass * p.omega1))
    e_expect = math.sqrt(2 * p.kappa * p.power1 / (hbar * omega_laser))
    assert mp.g1 == pytest.approx(g_expect / p.omega1, rel=1e-12)
    assert mp.E1 == pytest.approx(e_expect / p.omega1, rel=1e-12)


def test_thermal_occupation_ground_state():
    assert thermal_occupation(2 * math.pi * 1e6, 0.0) == 0.0


def test_thermal_occupation_log2_point():
    # hbar*Omega/kB*T = ln 2 gives exactly one quantum
    omega = 1e7
    T = hbar * omega / (k_B * math.log(2.0))
    assert thermal_occupation(omega, T) == pytest.approx(1.0, rel=1e-12)


def test_thermal_occupation_high_temperature_asymptote():
    # independent oracle: Laurent series 1/x - 1/2 + x/12 of the Bose law
    omega = 2 * math.pi * 1e6
    T = 300.0
    x = hbar * omega / (k_B * T)
    series = 1.0 / x - 0.5 + x / 12.0
    value = thermal_occupation(omega, T)
    assert value == pytest.approx(series, rel=1e-12)
    assert value == pytest.approx(k_B * T / (hbar * omega), rel=1e-6)


def test_thermal_occupation_monotonicity():
    omegas = np.linspace(1e5, 1e8, 25)
    temps = np.linspace(1.0, 600.0, 25)
    occ_T = [thermal_occupation(1e6, t) for t in temps]
    assert np.all(np.diff(occ_T) > 0)
    occ_w = [thermal_occupation(w, 300.0) for w in omegas]
    assert np.all(np.diff(occ_w) < 0)


def test_scale_consistency_of_rates():
    p = reference_physical_params()
    c = 3.7
    scaled = p.replace(omega1=c * p.omega1, omega2=c * p.omega2,
                       gamma1=c * p.gamma1, gamma2=c * p.gamma2,
                       kappa=c * p.kappa, detuning=c * p.detuning)
    a, b = nondimensionalize(p), nondimensionalize(scaled)
    for name in ("omega2", "gamma1", "gamma2", "kappa", "delta"):
        assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-12)
    assert b.tau == pytest.approx(a.tau / c, rel=1e-12)


def test_model_params_back_conversion():
    mp = nondimensionalize(reference_physical_params())
    assert mp.omega_rad_s(1) == pytest.approx(2 * math.pi * 1e6, rel=1e-12)
    assert mp.omega_rad_s(2) == pytest.approx(2 * math.pi * 1e6, rel=1e-12)


def test_ordinary_convention_reading():
    # the alternative caption reading multiplies rate inputs by 2*pi
    p = reference_physical_params(kappa=2 * math.pi * 1.34e6)
    mp = nondimensionalize(p)
    assert mp.kappa == pytest.approx(1.34, rel=1e-12)
