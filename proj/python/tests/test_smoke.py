import json
import math

import numpy as np
import pytest

import darkprobe as dp


def test_version():
    assert dp.__version__


def test_expm_identity():
    u = dp.expm_hermitian(np.zeros((2, 2), dtype=complex), 1.3)
    assert np.allclose(u, np.eye(2))


def test_spin_observable_matches_brute_force():
    f = dp.SpinFields.from_couplings(1.0, 0.015, 0.08)
    seq = dp.PulseSequence(2.1, 7)
    u0, u1 = dp.sequence_propagators(f.v0(), f.v1(), seq)
    m = u0.conj().T @ u1
    obs = dp.spin_observable(f, seq)
    assert obs.cos_phi == pytest.approx(0.5 * np.trace(m).real, abs=1e-12)


def test_y_settings_give_positive_ry_readout():
    f = dp.fixtures.fig1_nv()
    seq = dp.measurement_settings_y(f)
    assert seq.n_segments == 10
    rho = dp.DensityMatrix(0.5 * (np.eye(2) + 0.4 * np.array([[0, -1j], [1j, 0]])))
    sx, sy = dp.probe_expectations_fullspace(f.v0(), f.v1(), seq, rho)
    assert sy == pytest.approx(0.4, abs=0.002)
    assert abs(sx) <= 0.05


def test_xi_curve_pole_free_maximum():
    p = dp.fixtures.fig2()
    xi = dp.xi_curve(p, math.pi / p.nu, 5)
    assert abs(xi) == pytest.approx(4 * 5 * p.g / p.nu, abs=1e-12)


def test_simulation_equals_chi():
    p = dp.fixtures.fig2()
    state = dp.OscState.parse("coherent:1")
    rho = dp.state_density(state, 40)
    val = dp.simulate_probe_osc(p, dp.PulseSequence(1.0, 3), rho)
    ref = dp.chi_exact(state, dp.xi_curve(p, 1.0, 3))
    assert abs(val - ref) < 1e-6


def test_noise_model_zero_variance():
    f = dp.fixtures.nv_lab()
    seq = dp.PulseSequence(3e-6, 10)
    rho = dp.DensityMatrix(0.5 * (np.eye(2) + 0.4 * np.array([[0, -1j], [1j, 0]])))
    m = dp.NoiseModel()
    m.b0 = 0.0
    m.tb = 1e-3
    m.realizations = 2
    res = dp.noisy_spin_measurement(f, seq, rho, m)
    assert res.sy_mean == pytest.approx(0.4, abs=0.002)
    assert res.sy_stderr == 0.0


def test_run_experiment_manifest(tmp_path):
    opts = dp.RunOptions()
    opts.output_dir = tmp_path / "scan"
    cfg = {"experiment": "spin-scan", "tau_points": 10, "n_list": [10]}
    manifest = json.loads(dp.run_experiment(json.dumps(cfg), opts))
    assert manifest["experiment"] == "spin-scan"
    assert (tmp_path / "scan" / "scan.csv").exists()
    assert (tmp_path / "scan" / "run_manifest.json").exists()


def test_config_error_surfaces_as_exception(tmp_path):
    opts = dp.RunOptions()
    opts.output_dir = tmp_path / "bad"
    with pytest.raises(dp.ConfigError):
        dp.run_experiment(json.dumps({"experiment": "spin-scan", "nope": 1}), opts)


def test_numerical_error_surfaces_as_exception():
    with pytest.raises(dp.NumericalError):
        dp.measurement_settings_y(dp.SpinFields.from_couplings(1.0, 0.1, 0.0))
