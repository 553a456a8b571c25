// Copyright 2026 The oamsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "oamsim/cli.hpp"
#include "oamsim/experiments.hpp"
#include "oamsim/tomography.hpp"

namespace py = pybind11;
using namespace oamsim;

namespace {

std::vector<double> ideal_rates(const ScanResult& scan) {
  std::vector<double> out;
  for (const auto& r : scan.records) out.push_back(r.ideal_rate);
  return out;
}

std::vector<std::uint64_t> counts(const ScanResult& scan) {
  std::vector<std::uint64_t> out;
  for (const auto& r : scan.records) out.push_back(r.count);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OAM entanglement simulator core";
  m.attr("__version__") = kVersion;

  // numerics
  m.def("laguerre", &laguerre, py::arg("p"), py::arg("alpha"), py::arg("x"));
  m.def("bessel_j", &bessel_j, py::arg("ell"), py::arg("x"));
  m.def("sinc", &sinc);
  m.def("psd_sqrt", &psd_sqrt, py::arg("m"), py::arg("relative_floor") = 0.0);
  m.def("kron", &kron);
  m.def("su_basis", &su_basis, py::arg("d"));
  m.def("hermitian_eigen", [](const ComplexMatrix& a) {
    const HermitianEigen e = hermitian_eigen(a);
    return py::make_tuple(e.values, e.vectors);
  });

  py::class_<PolarGrid>(m, "PolarGrid")
      .def(py::init<double, int, int>(), py::arg("r_max"), py::arg("n_r"), py::arg("n_phi"))
      .def_property_readonly("r_max", &PolarGrid::r_max)
      .def_property_readonly("n_r", &PolarGrid::n_r)
      .def_property_readonly("n_phi", &PolarGrid::n_phi)
      .def("total_weight", &PolarGrid::total_weight)
      .def("integrate", [](const PolarGrid& g, const std::function<Complex(double, double)>& f) {
        return integrate_polar(f, g);
      });
  m.def("default_grid", &default_grid, py::arg("largest_waist"), py::arg("n_r") = 256, py::arg("n_phi") = 256,
        py::arg("r_max_factor") = 6.0);

  // modes
  py::class_<BeamGeometry>(m, "BeamGeometry")
      .def(py::init<double, double, double>(), py::arg("wavelength") = 1.0, py::arg("waist") = 1.0, py::arg("z") = 0.0)
      .def_readonly("waist", &BeamGeometry::waist)
      .def("width", &BeamGeometry::width)
      .def("rayleigh_range", &BeamGeometry::rayleigh_range);
  py::class_<ModeSpec>(m, "ModeSpec")
      .def_static("laguerre_gauss", &ModeSpec::laguerre_gauss, py::arg("ell"), py::arg("p"), py::arg("geometry"))
      .def_static("bessel_gauss", &ModeSpec::bessel_gauss, py::arg("ell"), py::arg("radial_wavenumber"),
                  py::arg("geometry"))
      .def_static("superposition", &ModeSpec::superposition, py::arg("ell"), py::arg("theta"), py::arg("phi"),
                  py::arg("geometry"))
      .def_static("rotated_superposition", &ModeSpec::rotated_superposition, py::arg("ell"), py::arg("rotation"),
                  py::arg("geometry"))
      .def_static("sector", &ModeSpec::sector, py::arg("orientation"), py::arg("width"), py::arg("geometry"))
      .def("with_offset", &ModeSpec::with_offset, py::arg("dx"), py::arg("dy"))
      .def("__call__", [](const ModeSpec& s, double r, double phi) { return mode_amplitude(s, r, phi); })
      .def_readonly("ell", &ModeSpec::ell)
      .def_readonly("p", &ModeSpec::p);
  m.def("mode_overlap", &mode_overlap);
  m.def("sector_coefficients", &sector_coefficients, py::arg("orientation"), py::arg("width"), py::arg("ell_min"),
        py::arg("ell_max"));

  // source
  py::class_<PumpSpec>(m, "PumpSpec")
      .def_static("gaussian", &PumpSpec::gaussian, py::arg("waist"), py::arg("wavelength") = 1.0)
      .def_property_readonly("waist", &PumpSpec::waist);
  py::class_<TwoPhotonState>(m, "TwoPhotonState")
      .def_static("from_coefficients", &TwoPhotonState::from_coefficients)
      .def_static("from_matrix", &TwoPhotonState::from_matrix)
      .def_static("bell", &TwoPhotonState::bell)
      .def_property_readonly("ell_max", &TwoPhotonState::ell_max)
      .def_property_readonly("conserving", &TwoPhotonState::conserving)
      .def("amplitude", &TwoPhotonState::amplitude)
      .def("spectrum", &TwoPhotonState::spectrum)
      .def("matrix", &TwoPhotonState::matrix);
  py::class_<BuildOptions>(m, "BuildOptions")
      .def(py::init<>())
      .def_readwrite("offset_x", &BuildOptions::offset_x)
      .def_readwrite("offset_y", &BuildOptions::offset_y)
      .def_readwrite("full_matrix", &BuildOptions::full_matrix);
  m.def("build_state", &build_state, py::arg("pump"), py::arg("gamma"), py::arg("ell_max"), py::arg("grid"),
        py::arg("options") = BuildOptions{});
  m.def("coincidence_amplitude", &coincidence_amplitude);
  py::class_<CrystalConfig>(m, "CrystalConfig")
      .def(py::init<>())
      .def_readwrite("length", &CrystalConfig::length)
      .def_readwrite("refractive_index", &CrystalConfig::refractive_index)
      .def_readwrite("alpha", &CrystalConfig::alpha)
      .def_readwrite("pump_wavelength", &CrystalConfig::pump_wavelength)
      .def_readwrite("focal_length", &CrystalConfig::focal_length)
      .def("a", &CrystalConfig::a);
  m.def("sinc_ring_profile", &sinc_ring_profile);
  m.def("ring_peak_radius", &ring_peak_radius);
  m.def("etendue_mode_count", &etendue_mode_count);
  py::class_<DetectorConfig>(m, "DetectorConfig")
      .def(py::init<>())
      .def_readwrite("singles_a", &DetectorConfig::singles_a)
      .def_readwrite("singles_b", &DetectorConfig::singles_b)
      .def_readwrite("gate_time", &DetectorConfig::gate_time)
      .def_readwrite("dark_rate", &DetectorConfig::dark_rate)
      .def_readwrite("integration_time", &DetectorConfig::integration_time)
      .def_readwrite("efficiency", &DetectorConfig::efficiency);
  m.def("accidentals", &accidentals);
  m.def("derive_seed", &derive_seed);
  py::class_<CoincidenceRecord>(m, "CoincidenceRecord")
      .def_readonly("setting_id", &CoincidenceRecord::setting_id)
      .def_readonly("ideal_rate", &CoincidenceRecord::ideal_rate)
      .def_readonly("mean", &CoincidenceRecord::mean)
      .def_readonly("count", &CoincidenceRecord::count)
      .def_readonly("accidentals", &CoincidenceRecord::accidentals);
  m.def("sample_counts", &sample_counts);

  // experiments
  py::class_<ScanOptions>(m, "ScanOptions")
      .def(py::init<>())
      .def_readwrite("peak_rate", &ScanOptions::peak_rate)
      .def_readwrite("detector", &ScanOptions::detector)
      .def_readwrite("seed", &ScanOptions::seed);
  py::class_<ScanResult>(m, "ScanResult")
      .def_property_readonly("rows", [](const ScanResult& s) { return s.rows.values; })
      .def_property_readonly("cols", [](const ScanResult& s) { return s.cols.values; })
      .def_property_readonly("shape", [](const ScanResult& s) { return py::make_tuple(s.row_count(), s.col_count()); })
      .def_readonly("records", &ScanResult::records)
      .def("ideal_rates", &ideal_rates)
      .def("counts", &counts)
      .def("to_csv", [](const ScanResult& s) {
        std::ostringstream out;
        write_scan_csv(out, s);
        return out.str();
      });
  py::class_<GaussianFit>(m, "GaussianFit")
      .def_readonly("amplitude", &GaussianFit::amplitude)
      .def_readonly("mean", &GaussianFit::mean)
      .def_readonly("variance", &GaussianFit::variance)
      .def_readonly("residual_norm", &GaussianFit::residual_norm);
  m.def("fit_gaussian", [](const std::vector<double>& x, const std::vector<double>& y) { return fit_gaussian(x, y); });
  py::class_<FringeFit>(m, "FringeFit")
      .def_readonly("frequency", &FringeFit::frequency)
      .def_readonly("period", &FringeFit::period)
      .def_readonly("visibility", &FringeFit::visibility)
      .def_readonly("residual_norm", &FringeFit::residual_norm);
  m.def("fit_fringe", [](const std::vector<double>& x, const std::vector<double>& y) { return fit_fringe(x, y); });
  py::class_<SpiralScan>(m, "SpiralScan")
      .def_readonly("scan", &SpiralScan::scan)
      .def_readonly("ells", &SpiralScan::ells)
      .def_readonly("spectrum", &SpiralScan::spectrum)
      .def_readonly("fit", &SpiralScan::fit)
      .def_readonly("fwhm", &SpiralScan::fwhm)
      .def_readonly("crossing_fwhm", &SpiralScan::crossing_fwhm)
      .def_readonly("crosstalk_ratio", &SpiralScan::crosstalk_ratio);
  m.def("spiral_scan", &spiral_scan, py::arg("state"), py::arg("ell_min"), py::arg("ell_max"),
        py::arg("options") = ScanOptions{});
  m.def(
      "angular_scan",
      [](const TwoPhotonState& s, double width, const std::vector<double>& a, const std::vector<double>& b,
         const ScanOptions& o) { return angular_scan(s, width, a, b, o); },
      py::arg("state"), py::arg("width"), py::arg("orientations_a"), py::arg("orientations_b"),
      py::arg("options") = ScanOptions{});
  py::class_<EprReidResult>(m, "EprReidResult")
      .def_readonly("ell_variance", &EprReidResult::ell_variance)
      .def_readonly("angle_variance", &EprReidResult::angle_variance)
      .def_readonly("product", &EprReidResult::product)
      .def_readonly("violated", &EprReidResult::violated);
  m.def("epr_reid_verdict", &epr_reid_verdict);
  m.def("epr_reid", [](const std::vector<double>& ells, const std::vector<double>& ep, const std::vector<double>& angles,
                       const std::vector<double>& ap) { return epr_reid(ells, ep, angles, ap); });
  py::class_<EprExperiment>(m, "EprExperiment")
      .def_readonly("ells", &EprExperiment::ells)
      .def_readonly("ell_profile", &EprExperiment::ell_profile)
      .def_readonly("angles", &EprExperiment::angles)
      .def_readonly("angle_profile", &EprExperiment::angle_profile)
      .def_readonly("result", &EprExperiment::result);
  m.def("run_epr_experiment", &run_epr_experiment, py::arg("state"), py::arg("width"), py::arg("orientations"),
        py::arg("options") = ScanOptions{});
  py::class_<BellSettings>(m, "BellSettings")
      .def(py::init<>())
      .def_static("canonical", &BellSettings::canonical)
      .def_readwrite("ell", &BellSettings::ell)
      .def_readwrite("theta_a", &BellSettings::theta_a)
      .def_readwrite("theta_a_prime", &BellSettings::theta_a_prime)
      .def_readwrite("theta_b", &BellSettings::theta_b)
      .def_readwrite("theta_b_prime", &BellSettings::theta_b_prime);
  m.def("bell_probability", &bell_probability);
  m.def(
      "bell_curve",
      [](const TwoPhotonState& s, int ell, double ta, const std::vector<double>& tb, const ScanOptions& o) {
        return bell_curve(s, ell, ta, tb, o);
      },
      py::arg("state"), py::arg("ell"), py::arg("theta_a"), py::arg("theta_b"), py::arg("options") = ScanOptions{});
  m.def("bell_counts", &bell_counts, py::arg("state"), py::arg("settings"), py::arg("options") = ScanOptions{});
  py::class_<BellResult>(m, "BellResult")
      .def_readonly("s", &BellResult::s)
      .def_readonly("sigma", &BellResult::sigma)
      .def_readonly("correlations", &BellResult::correlations);
  m.def("bell_parameter", [](const std::array<double, 16>& c, const BellSettings& s) {
    return bell_parameter(std::span<const double, 16>(c), s);
  });
  m.def("bell_parameter",
        py::overload_cast<const std::array<CoincidenceRecord, 16>&, const BellSettings&>(&bell_parameter));

  // tomography
  py::class_<ProjectorState>(m, "ProjectorState")
      .def_readonly("ells", &ProjectorState::ells)
      .def_readonly("coeffs", &ProjectorState::coeffs)
      .def_readonly("label", &ProjectorState::label);
  py::class_<MeasurementSetting>(m, "MeasurementSetting")
      .def_readonly("index", &MeasurementSetting::index)
      .def_readonly("a", &MeasurementSetting::a)
      .def_readonly("b", &MeasurementSetting::b);
  m.def("tomography_states", &tomography_states);
  m.def("tomography_settings", &tomography_settings);
  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<int, ComplexMatrix>(), py::arg("d"), py::arg("matrix"))
      .def_static("normalized", &DensityMatrix::normalized)
      .def_static("pure", &DensityMatrix::pure)
      .def_static("maximally_mixed", &DensityMatrix::maximally_mixed)
      .def_property_readonly("d", &DensityMatrix::d)
      .def_property_readonly("matrix", &DensityMatrix::matrix)
      .def("to_text", [](const DensityMatrix& r) {
        std::ostringstream out;
        write_density_matrix(out, r);
        return out.str();
      })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return read_density_matrix(in);
      });
  m.def("maximally_entangled", &maximally_entangled);
  m.def("anticorrelated_entangled", &anticorrelated_entangled);
  m.def("predicted_counts", &predicted_counts);
  m.def("projector_gram_rank",
        [](const std::vector<MeasurementSetting>& s, int d) { return projector_gram_rank(s, d); });
  m.def("flux_for_mean_count", [](const DensityMatrix& r, const std::vector<MeasurementSetting>& s, double c) {
    return flux_for_mean_count(r, s, c);
  });
  m.def("run_tomography_experiment",
        [](const DensityMatrix& r, const std::vector<MeasurementSetting>& s, double flux, const DetectorConfig& det,
           std::uint64_t seed) { return run_tomography_experiment(r, s, flux, det, seed); });
  m.def("restrict_state", &restrict_state);
  py::enum_<TomographyOptimizer>(m, "TomographyOptimizer")
      .value("LEVENBERG_MARQUARDT", TomographyOptimizer::kLevenbergMarquardt)
      .value("NELDER_MEAD", TomographyOptimizer::kNelderMead);
  py::class_<ReconstructionOptions>(m, "ReconstructionOptions")
      .def(py::init<>())
      .def_readwrite("restarts", &ReconstructionOptions::restarts)
      .def_readwrite("seed", &ReconstructionOptions::seed)
      .def_readwrite("optimizer", &ReconstructionOptions::optimizer)
      .def_readwrite("parallel", &ReconstructionOptions::parallel)
      .def_readwrite("convex_start", &ReconstructionOptions::convex_start);
  py::class_<ReconstructionReport>(m, "ReconstructionReport")
      .def_readonly("rho", &ReconstructionReport::rho)
      .def_readonly("chi2", &ReconstructionReport::chi2)
      .def_readonly("flux", &ReconstructionReport::flux)
      .def_readonly("converged", &ReconstructionReport::converged)
      .def_readonly("iterations", &ReconstructionReport::iterations);
  m.def(
      "reconstruct",
      [](const std::vector<double>& c, const std::vector<MeasurementSetting>& s, int d,
         const ReconstructionOptions& o) {
        py::gil_scoped_release release;
        return reconstruct(c, s, d, o);
      },
      py::arg("counts"), py::arg("settings"), py::arg("d"), py::arg("options") = ReconstructionOptions{});
  m.def("fidelity", py::overload_cast<const DensityMatrix&, const DensityMatrix&>(&fidelity));
  m.def("fidelity", py::overload_cast<const ComplexMatrix&, const ComplexMatrix&>(&fidelity));
  m.def("linear_entropy", py::overload_cast<const DensityMatrix&>(&linear_entropy));
  m.def("linear_entropy", py::overload_cast<const ComplexMatrix&>(&linear_entropy));
  m.def("concurrence", &concurrence);
  m.def("su_expand", &su_expand);
  m.def("su_compose", &su_compose);
  py::class_<ThresholdSpec>(m, "ThresholdSpec")
      .def(py::init([](int d, double p) { return ThresholdSpec{d, p}; }), py::arg("d"), py::arg("p_min"))
      .def_readwrite("d", &ThresholdSpec::d)
      .def_readwrite("p_min", &ThresholdSpec::p_min);
  m.def("threshold_state", &threshold_state);
  m.def("default_threshold_pmin", &default_threshold_pmin);

  // cli
  m.def("scenario_names", &scenario_names);
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"oamsim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
