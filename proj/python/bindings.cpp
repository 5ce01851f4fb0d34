#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "darkprobe/experiments.hpp"
#include "darkprobe/fixtures.hpp"
#include "darkprobe/linalg.hpp"
#include "darkprobe/noise.hpp"
#include "darkprobe/oscillator.hpp"
#include "darkprobe/spin.hpp"
#include "darkprobe/twospin.hpp"

#include <sstream>

namespace py = pybind11;
using namespace darkprobe;

namespace {

// JSON configs cross the boundary as strings; keeps the module free of a
// python-side JSON dependency mismatch
std::string run_experiment_json(const std::string& config, const RunOptions& opts) {
  return run_experiment(nlohmann::json::parse(config), opts).dump(2);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pulsed probe-based state reconstruction of dark systems";
  m.attr("__version__") = kVersion;

  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<PulseSequence>(m, "PulseSequence")
      .def(py::init<double, int>(), py::arg("tau"), py::arg("n_segments"))
      .def_readonly("tau", &PulseSequence::tau)
      .def_readonly("n_segments", &PulseSequence::n_segments)
      .def_property_readonly("total_time", &PulseSequence::total_time)
      .def("__repr__", [](const PulseSequence& s) {
        std::ostringstream os;
        os << "PulseSequence(tau=" << s.tau << ", n_segments=" << s.n_segments << ")";
        return os.str();
      });

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<Matrix>(), py::arg("matrix"))
      .def_property_readonly("matrix", &DensityMatrix::mat)
      .def_property_readonly("dim", &DensityMatrix::dim);

  // quantum core
  m.def("expm_hermitian", &expm_hermitian, py::arg("h"), py::arg("t"),
        py::arg("herm_tol") = 1e-12, "exp(-i H t) for Hermitian H");
  m.def("sequence_propagators", &sequence_propagators, py::arg("v0"), py::arg("v1"),
        py::arg("seq"));
  m.def("probe_expectations", &probe_expectations, py::arg("u0"), py::arg("u1"), py::arg("rho"));
  m.def("probe_expectations_fullspace", &probe_expectations_fullspace, py::arg("v0"),
        py::arg("v1"), py::arg("seq"), py::arg("rho_dark"));
  m.def("trace_distance",
        py::overload_cast<const Matrix&, const Matrix&>(&trace_distance), py::arg("a"),
        py::arg("b"));
  m.def("partial_trace_probe", &partial_trace_probe, py::arg("rho_full"));

  // spin probe
  py::class_<SpinFields>(m, "SpinFields")
      .def_static("from_couplings", &SpinFields::from_couplings, py::arg("omega0"),
                  py::arg("a_z"), py::arg("a_x"))
      .def_readonly("omega0", &SpinFields::omega0)
      .def_readonly("a_z", &SpinFields::a_z)
      .def_readonly("a_x", &SpinFields::a_x)
      .def_readonly("omega1", &SpinFields::omega1)
      .def_readonly("v_x", &SpinFields::v_x)
      .def_readonly("v_z", &SpinFields::v_z)
      .def("v0", &SpinFields::v0)
      .def("v1", &SpinFields::v1);

  py::class_<SegmentRotation>(m, "SegmentRotation")
      .def_readonly("theta", &SegmentRotation::theta)
      .def_readonly("n0", &SegmentRotation::n0)
      .def_readonly("n1", &SegmentRotation::n1);

  py::class_<AxisAngle>(m, "AxisAngle")
      .def_readonly("angle", &AxisAngle::angle)
      .def_readonly("axis", &AxisAngle::axis)
      .def_readonly("axis_valid", &AxisAngle::axis_valid);

  py::class_<SpinObservable>(m, "SpinObservable")
      .def_readonly("cos_phi", &SpinObservable::cos_phi)
      .def_readonly("weighted_axis", &SpinObservable::weighted_axis);

  m.def("segment_rotation", &segment_rotation, py::arg("fields"), py::arg("tau"));
  m.def("composite_rotation", &composite_rotation, py::arg("theta"), py::arg("n0"),
        py::arg("n1"), py::arg("n_segments"));
  m.def("spin_observable", &spin_observable, py::arg("fields"), py::arg("seq"));
  m.def("spin_observable_no_pulse", &spin_observable_no_pulse, py::arg("fields"),
        py::arg("tau"));
  m.def("measurement_settings_y", &measurement_settings_y, py::arg("fields"),
        py::arg("n_max") = 40);

  py::class_<SearchGrid>(m, "SearchGrid")
      .def(py::init<>())
      .def_readwrite("tau_min", &SearchGrid::tau_min)
      .def_readwrite("tau_max", &SearchGrid::tau_max)
      .def_readwrite("tau_points", &SearchGrid::tau_points)
      .def_readwrite("n_max", &SearchGrid::n_max)
      .def_readwrite("cos_phi_bound", &SearchGrid::cos_phi_bound);

  py::class_<SettingsSearchResult>(m, "SettingsSearchResult")
      .def_readonly("seq", &SettingsSearchResult::seq)
      .def_readonly("observable", &SettingsSearchResult::observable)
      .def_readonly("target_reached", &SettingsSearchResult::target_reached);

  m.def("measurement_settings_x", &measurement_settings_x, py::arg("fields"), py::arg("grid"));
  m.def("measurement_settings_z", &measurement_settings_z, py::arg("fields"), py::arg("grid"));

  py::class_<BlochReconstruction>(m, "BlochReconstruction")
      .def_readonly("r", &BlochReconstruction::r)
      .def_readonly("condition_number", &BlochReconstruction::condition_number)
      .def_readonly("norm_clipped", &BlochReconstruction::norm_clipped);

  m.def("reconstruct_bloch", &reconstruct_bloch, py::arg("settings"), py::arg("fields"),
        py::arg("measured_sy"));

  py::class_<ScanRow>(m, "ScanRow")
      .def_readonly("tau", &ScanRow::tau)
      .def_readonly("n_segments", &ScanRow::n_segments)
      .def_readonly("cos_phi", &ScanRow::cos_phi)
      .def_readonly("w", &ScanRow::w);

  m.def("scan_observable", &scan_observable, py::arg("fields"), py::arg("taus"), py::arg("ns"));

  py::class_<CouplingEstimate>(m, "CouplingEstimate")
      .def_readonly("tau1", &CouplingEstimate::tau1)
      .def_readonly("omega1", &CouplingEstimate::omega1)
      .def_readonly("n_opt", &CouplingEstimate::n_opt)
      .def_readonly("a_x", &CouplingEstimate::a_x)
      .def_readonly("a_z", &CouplingEstimate::a_z);

  m.def("estimate_coupling", &estimate_coupling, py::arg("scan"), py::arg("omega0"));

  // noise
  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init<>())
      .def_readwrite("b0", &NoiseModel::b0)
      .def_readwrite("tb", &NoiseModel::tb)
      .def_readwrite("dt", &NoiseModel::dt)
      .def_readwrite("seed", &NoiseModel::seed)
      .def_readwrite("realizations", &NoiseModel::realizations);

  py::class_<NoisyResult>(m, "NoisyResult")
      .def_readonly("sy_mean", &NoisyResult::sy_mean)
      .def_readonly("sy_stderr", &NoisyResult::sy_stderr)
      .def_readonly("sx_mean", &NoisyResult::sx_mean)
      .def_readonly("sx_stderr", &NoisyResult::sx_stderr)
      .def_readonly("tau_snapped", &NoisyResult::tau_snapped);

  m.def("ou_trajectory", &ou_trajectory, py::arg("model"), py::arg("duration"),
        py::arg("stream") = 0);
  m.def("noisy_spin_measurement", &noisy_spin_measurement, py::arg("fields"), py::arg("seq"),
        py::arg("rho"), py::arg("model"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("noisy_ramsey_measurement", &noisy_ramsey_measurement, py::arg("fields"),
        py::arg("total_time"), py::arg("rho"), py::arg("model"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());

  // oscillator
  py::class_<OscParams>(m, "OscParams")
      .def(py::init<>())
      .def_readwrite("nu", &OscParams::nu)
      .def_readwrite("g", &OscParams::g)
      .def_property_readonly("epsilon", &OscParams::epsilon)
      .def("v0", &OscParams::v0, py::arg("dim"))
      .def("v1", &OscParams::v1, py::arg("dim"));

  py::class_<OscState>(m, "OscState")
      .def_static("fock", &OscState::fock, py::arg("n"))
      .def_static("coherent", &OscState::coherent, py::arg("eta"))
      .def_static("squeezed", &OscState::squeezed, py::arg("lambda_"))
      .def_static("parse", &OscState::parse, py::arg("name"))
      .def_property_readonly("name", &OscState::name);

  m.def("xi_curve", &xi_curve, py::arg("params"), py::arg("tau"), py::arg("n_segments"));
  m.def("xi_no_pulse", &xi_no_pulse, py::arg("params"), py::arg("tau"));
  m.def("laguerre", &laguerre, py::arg("m"), py::arg("k"), py::arg("x"));
  m.def("displacement_element", &displacement_element, py::arg("xi"), py::arg("n"),
        py::arg("m"));
  m.def("displacement_matrix", &displacement_matrix, py::arg("xi"), py::arg("dim"));
  m.def("chi_exact", &chi_exact, py::arg("state"), py::arg("xi"));
  m.def("state_vector", &state_vector, py::arg("state"), py::arg("dim"));
  m.def("state_density", &state_density, py::arg("state"), py::arg("dim"));
  m.def("simulate_probe_osc", &simulate_probe_osc, py::arg("params"), py::arg("seq"),
        py::arg("rho"), py::arg("tail_tol") = 1e-6);

  py::class_<ChiSample>(m, "ChiSample")
      .def_readonly("xi", &ChiSample::xi)
      .def_readonly("chi", &ChiSample::chi)
      .def_readonly("tau", &ChiSample::tau)
      .def_readonly("n_segments", &ChiSample::n_segments)
      .def_readonly("mirrored", &ChiSample::mirrored);

  m.def("sample_characteristic", &sample_characteristic, py::arg("params"), py::arg("n_list"),
        py::arg("tau_grid"), py::arg("state"));

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("extent_cap", &GridSpec::extent_cap)
      .def_readwrite("points", &GridSpec::points)
      .def_readwrite("far_cutoff", &GridSpec::far_cutoff);

  py::class_<ChiGrid>(m, "ChiGrid")
      .def_readonly("extent", &ChiGrid::extent)
      .def_readonly("points", &ChiGrid::points)
      .def_readonly("field", &ChiGrid::field)
      .def_readonly("far_count", &ChiGrid::far_count)
      .def("coord", &ChiGrid::coord, py::arg("i"));

  m.def("interpolate_chi", &interpolate_chi, py::arg("samples"), py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<ReconstructionReport>(m, "ReconstructionReport")
      .def_readonly("rho", &ReconstructionReport::rho)
      .def_readonly("hermiticity_correction", &ReconstructionReport::hermiticity_correction)
      .def_readonly("clipped_negative_mass", &ReconstructionReport::clipped_negative_mass)
      .def_readonly("trace_correction", &ReconstructionReport::trace_correction);

  m.def("reconstruct_density", &reconstruct_density, py::arg("grid"), py::arg("dim"),
        py::arg("neg_mass_limit") = 0.05, py::call_guard<py::gil_scoped_release>());

  // two dark spins
  py::class_<TwoSpinParams>(m, "TwoSpinParams")
      .def(py::init<>())
      .def_readwrite("omega0", &TwoSpinParams::omega0)
      .def_readwrite("inter_ax", &TwoSpinParams::inter_ax)
      .def_readwrite("a_z1", &TwoSpinParams::a_z1)
      .def_readwrite("a_z2", &TwoSpinParams::a_z2)
      .def_readwrite("a_x1", &TwoSpinParams::a_x1)
      .def_readwrite("a_x2", &TwoSpinParams::a_x2)
      .def_property_readonly("big_az", &TwoSpinParams::big_az)
      .def_property_readonly("big_a", &TwoSpinParams::big_a)
      .def_property_readonly("weak_coupling", &TwoSpinParams::weak_coupling)
      .def("v0", &TwoSpinParams::v0)
      .def("v1", &TwoSpinParams::v1);

  py::class_<WitnessResult>(m, "WitnessResult")
      .def_readonly("sy_closed", &WitnessResult::sy_closed)
      .def_readonly("sy_oracle", &WitnessResult::sy_oracle)
      .def_readonly("abs_err", &WitnessResult::abs_err)
      .def_readonly("subspace_pop", &WitnessResult::subspace_pop)
      .def_readonly("low_signal", &WitnessResult::low_signal);

  m.def("pseudo_spin_fields", &pseudo_spin_fields, py::arg("params"));
  m.def("pseudo_weighted_axis", &pseudo_weighted_axis, py::arg("params"), py::arg("seq"));
  m.def("pseudo_cos_phi", &pseudo_cos_phi, py::arg("params"), py::arg("seq"));
  m.def("pseudo_bloch", &pseudo_bloch, py::arg("rho2"));
  m.def("subspace_population", &subspace_population, py::arg("rho2"));
  m.def("witness_measurement", &witness_measurement, py::arg("params"), py::arg("seq"),
        py::arg("rho2"));

  // fixtures
  auto fx = m.def_submodule("fixtures", "named parameter sets");
  fx.def("fig1_nv", &fixtures::fig1_nv);
  fx.def("nv_lab", &fixtures::nv_lab);
  fx.def("yb_trap", &fixtures::yb_trap);
  fx.def("fig2", &fixtures::fig2);
  fx.def("fig2_squeezed", &fixtures::fig2_squeezed);
  fx.def("fig2_coherent", &fixtures::fig2_coherent);
  fx.def("figs3_tb", &fixtures::figs3_tb);
  fx.def("figs3_b0_over_2pi", &fixtures::figs3_b0_over_2pi);

  // experiment runner
  py::class_<RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("output_dir", &RunOptions::output_dir)
      .def_readwrite("seed", &RunOptions::seed)
      .def_readwrite("threads", &RunOptions::threads);

  m.def("run_experiment", &run_experiment_json, py::arg("config_json"),
        py::arg("options") = RunOptions{},
        "run an experiment from a JSON config string; returns the manifest as JSON");
}
