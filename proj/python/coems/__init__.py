"""Feedback cooling of an opto-electromechanical resonator.

Thin wrapper over the compiled ``_coems`` extension. Config arguments accept
a dict, a JSON string or a path to a JSON file.
"""

import json
import os

from . import _coems
from ._coems import (
    CalibrationError,
    ConfigError,
    ParseError,
    calibrate,
    cooling_temperature,
    design_curve,
    gradient_force_from_peak,
    inferred_temperature,
    min_temperature,
    optimal_gain,
    phonon_occupancy,
    resonance_from_zero_point,
    thermal_psd,
    welch_psd,
    zero_point_asd,
)

__version__ = "0.1.0"


def _config_text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, os.PathLike) or (
        isinstance(config, str) and not config.lstrip().startswith("{")
    ):
        with open(config, encoding="utf-8") as f:
            return f.read()
    return config


def load_config(config):
    """Validated config with explicit noise floors, as a dict."""
    return json.loads(_coems.resolve_config(_config_text(config)))


def simulate(config):
    """Dict of numpy arrays: time, x, y_IL, y_OL, F_fb."""
    return _coems.simulate(_config_text(config))


def cooling_sweep(config, gains=(), jobs=1):
    return _coems.cooling_sweep(_config_text(config), list(gains), jobs)


def drive_sweep(config, voltages=(), jobs=1):
    return _coems.drive_sweep(_config_text(config), list(voltages), jobs)


def fit_spectrum(frequency_hz, psd, guesses, temperature=300.0, noise_floor=None, band=None):
    """Fit report as a dict; guesses are (mass_kg, resonance_hz, damping_hz)."""
    return json.loads(
        _coems.fit_spectrum(frequency_hz, psd, list(guesses), temperature, noise_floor, band)
    )


def band_temperature(frequency_hz, psd, noise_floor, band, reference_area, t0):
    """(kelvin, area, unphysical) for the floor-subtracted area inside band=(low, high)."""
    return _coems.band_temperature(frequency_hz, psd, noise_floor, band[0], band[1], reference_area, t0)
