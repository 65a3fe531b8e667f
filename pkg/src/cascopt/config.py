"""Strict key-value configuration files.

Two flat sections: ``[physical]`` holds the SI inputs, ``[run]`` execution
settings. Unknown keys are errors; missing [run] keys fall back to the
defaults below. Frequency-like [physical] values are angular rates (rad/s)
unless ``frequency_convention = ordinary`` asks for them to be read as
ordinary frequencies in Hz and multiplied by 2*pi on load.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .params import PhysicalParams, TOPOLOGIES

_FREQUENCY_KEYS = ("omega1", "omega2", "gamma1", "gamma2", "kappa", "detuning")

_PHYSICAL_KEYS = {
    "mass": float, "omega1": float, "omega2": float,
    "gamma1": float, "gamma2": float, "temperature": float,
    "length": float, "kappa": float, "wavelength": float,
    "power1": float, "power2": float, "detuning": float, "topology": str,
}

_RUN_DEFAULTS = {
    "frequency_convention": "angular",
    "cubic_kappa_convention": "half",
    "spectrum_cascade_sign": "plus",
    "seed": 42,
    "rtol": 1e-9,
    "atol": 1e-12,
    "horizon_tau": 50.0,
    "samples": 400,
    "delta_min": -3.0,
    "delta_max": 3.0,
    "delta_points": 121,
    "omega2_factors": (0.75, 1.0, 1.25),
    "alpha_min": 1e3,
    "alpha_max": 1e5,
    "alpha_points": 20,
    "spectrum_points": 2**14,
    "threads": 1,
}

_CHOICES = {
    "frequency_convention": ("angular", "ordinary"),
    "cubic_kappa_convention": ("half", "quarter"),
    "spectrum_cascade_sign": ("plus", "printed"),
}


@dataclass(frozen=True)
class RunSettings:
    """Execution knobs from the [run] section."""

    frequency_convention: str = "angular"
    cubic_kappa_convention: str = "half"
    spectrum_cascade_sign: str = "plus"
    seed: int = 42
    rtol: float = 1e-9
    atol: float = 1e-12
    horizon_tau: float = 50.0
    samples: int = 400
    delta_min: float = -3.0
    delta_max: float = 3.0
    delta_points: int = 121
    omega2_factors: tuple = (0.75, 1.0, 1.25)
    alpha_min: float = 1e3
    alpha_max: float = 1e5
    alpha_points: int = 20
    spectrum_points: int = 2**14
    threads: int = 1


def _parse_value(section, key, raw, caster):
    try:
        return caster(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc


def load_config(path) -> tuple[PhysicalParams, RunSettings]:
    """Parse a configuration file into physical parameters and run settings."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"cannot read configuration file {path}")

    unknown_sections = set(parser.sections()) - {"physical", "run"}
    if unknown_sections:
        raise ConfigError(f"unknown sections: {sorted(unknown_sections)}")
    if "physical" not in parser:
        raise ConfigError("missing required [physical] section")

    run_raw = dict(parser["run"]) if "run" in parser else {}
    unknown = set(run_raw) - set(_RUN_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown [run] keys: {sorted(unknown)}")
    run_values = {}
    for key, default in _RUN_DEFAULTS.items():
        if key not in run_raw:
            run_values[key] = default
            continue
        raw = run_raw[key]
        if key == "omega2_factors":
            run_values[key] = tuple(
                _parse_value("run", key, piece.strip(), float)
                for piece in raw.split(",") if piece.strip()
            )
        elif isinstance(default, str):
            value = raw.strip()
            if key in _CHOICES and value not in _CHOICES[key]:
                raise ConfigError(f"[run] {key}: must be one of {_CHOICES[key]}")
            run_values[key] = value
        elif isinstance(default, int):
            run_values[key] = _parse_value("run", key, raw, int)
        else:
            run_values[key] = _parse_value("run", key, raw, float)
    settings = RunSettings(**run_values)

    phys_raw = dict(parser["physical"])
    unknown = set(phys_raw) - set(_PHYSICAL_KEYS)
    if unknown:
        raise ConfigError(f"unknown [physical] keys: {sorted(unknown)}")
    missing = set(_PHYSICAL_KEYS) - set(phys_raw) - {"power2", "topology"}
    if missing:
        raise ConfigError(f"missing [physical] keys: {sorted(missing)}")
    values = {}
    for key, caster in _PHYSICAL_KEYS.items():
        if key not in phys_raw:
            continue
        if caster is str:
            value = phys_raw[key].strip()
            if key == "topology" and value not in TOPOLOGIES:
                raise ConfigError(f"[physical] topology: must be one of {TOPOLOGIES}")
            values[key] = value
        else:
            values[key] = _parse_value("physical", key, phys_raw[key], float)
    if settings.frequency_convention == "ordinary":
        for key in _FREQUENCY_KEYS:
            values[key] = values[key] * 2.0 * math.pi
    try:
        physical = PhysicalParams(**values)
    except Exception as exc:
        raise ConfigError(f"invalid [physical] values: {exc}") from exc
    return physical, settings


def reference_config_text() -> str:
    """A complete example configuration (the documented reference case)."""
    return """\
[physical]
mass = 150e-12          # kg
omega1 = 6.283185307179586e6   # rad/s (1 MHz)
omega2 = 6.283185307179586e6
gamma1 = 6.283185307179586     # rad/s (1 Hz)
gamma2 = 6.283185307179586
temperature = 300.0     # K
length = 25e-3          # m
kappa = 1.34e6          # rad/s
wavelength = 1064e-9    # m
power1 = 2e-3           # W
power2 = 0.0
detuning = 6.283185307179586e6 # rad/s, cavity minus laser
topology = unidirectional

[run]
seed = 42
horizon_tau = 50
samples = 400
"""
