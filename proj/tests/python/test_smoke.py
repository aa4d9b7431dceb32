import json
import math
import pathlib

import numpy as np
import pytest

import coems

ROOT = pathlib.Path(__file__).resolve().parents[2]
CONFIGS = sorted((ROOT / "configs").glob("*.json"))


def small_config(**feedback):
    return {
        "environment": {"bath_temperature_k": 300.0},
        "modes": [{"label": "broad", "mass_kg": 1e-12, "resonance_hz": 1e4, "damping_hz": 200.0}],
        "probes": {"in_loop": {"snr": 100.0}, "out_of_loop": {"snr": 100.0}},
        "feedback": {"delay_cycles": 0.25, **feedback},
        "simulation": {"sample_rate_hz": 1e6, "duration_s": 0.05, "seed": 3},
        "analysis": {"segment_length": 16384, "segments": 16},
        "sweep": {"gains": [0, 2]},
    }


def test_closed_forms():
    t_min, g_opt = coems.min_temperature(300.0, 100.0)
    assert t_min == pytest.approx(54.29925, rel=1e-6)
    assert g_opt == pytest.approx(9.04988, rel=1e-6)
    assert coems.optimal_gain(100.0) == pytest.approx(g_opt)
    assert coems.cooling_temperature(300.0, 0.0, 100.0) == pytest.approx(300.0)
    kelvin, unphysical = coems.inferred_temperature("in", 300.0, 16.0, 100.0)
    assert kelvin < 0 and unphysical
    with pytest.raises(ValueError):
        coems.inferred_temperature("sideways", 300.0, 1.0, 100.0)


def test_zero_point_round_trip():
    f = coems.resonance_from_zero_point(33e-9, 6.8e3, 4.6e-20)
    assert coems.zero_point_asd(33e-9, f, 6.8e3) == pytest.approx(4.6e-20, rel=1e-12)


def test_design_curve_arrays():
    d = coems.design_curve(300.0, 100.0, 50.0, 11)
    assert d["gain"].shape == (11,)
    assert d["T_eq1_K"][0] == pytest.approx(300.0)


def test_simulate_and_welch():
    rec = coems.simulate(small_config())
    n = len(rec["x"])
    assert n == 50000
    assert set(rec) == {"time", "x", "y_IL", "y_OL", "F_fb"}
    assert np.all(rec["F_fb"] == 0.0)
    psd = coems.welch_psd(rec["x"], 1e6, 4096)
    f, s = psd["frequency_hz"], psd["psd_m2_per_hz"]
    assert abs(f[np.argmax(s)] - 1e4) < 500.0
    var = 1.380649e-23 * 300.0 / (1e-12 * (2 * math.pi * 1e4) ** 2)
    assert np.sum(s) * (f[1] - f[0]) == pytest.approx(var, rel=0.5)


def test_simulation_is_deterministic():
    a = coems.simulate(small_config(gain=3.0))
    b = coems.simulate(small_config(gain=3.0))
    assert np.array_equal(a["y_IL"], b["y_IL"])
    assert np.any(a["F_fb"] != 0.0)


def test_fit_recovers_a_synthetic_line():
    f = np.arange(9000.0, 11000.0, 5.0)
    s = coems.thermal_psd(1e-12, 1e4, 50.0, 300.0, f) + 1e-24
    fit = coems.fit_spectrum(f, s, [(2e-12, 1e4 + 10, 80.0)], 300.0)
    assert fit["converged"]
    assert fit["modes"][0]["mass_kg"] == pytest.approx(1e-12, rel=1e-4)
    assert fit["modes"][0]["damping_hz"] == pytest.approx(50.0, rel=1e-4)


def test_cooling_sweep_rows():
    rows = coems.cooling_sweep(small_config(), gains=[0.0])
    assert rows[0]["T_outloop_K"] == pytest.approx(300.0)


def test_bad_config_raises():
    cfg = small_config()
    del cfg["modes"]
    with pytest.raises(ValueError):
        coems.simulate(cfg)
    with pytest.raises(ValueError):
        coems.simulate("{ not json")


@pytest.mark.parametrize("path", CONFIGS, ids=[p.name for p in CONFIGS])
def test_shipped_configs_match_the_schema(path):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "schema" / "config.schema.json").read_text())
    jsonschema.validate(json.loads(path.read_text()), schema)
    assert coems.load_config(path)["modes"]
