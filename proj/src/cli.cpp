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

#include "oamsim/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Core>

#include "oamsim/experiments.hpp"
#include "oamsim/modes.hpp"
#include "oamsim/tomography.hpp"

namespace oamsim {

namespace {

namespace fs = std::filesystem;

// Files are assembled in memory and written in one go once the scenario
// finished, so a failed run leaves no partial tables behind.
struct Output {
  std::string name;
  std::string body;
};

class Outputs {
 public:
  std::ostringstream& add(const std::string& name) {
    names_.push_back(name);
    streams_.emplace_back(std::make_unique<std::ostringstream>());
    *streams_.back() << std::setprecision(12);
    return *streams_.back();
  }
  std::vector<Output> take() {
    std::vector<Output> out;
    for (std::size_t k = 0; k < names_.size(); ++k) out.push_back({names_[k], streams_[k]->str()});
    return out;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<std::ostringstream>> streams_;
};

std::string number(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

class PhaseTimer {
 public:
  PhaseTimer(std::ostream& log, std::string scenario) : log_(log), scenario_(std::move(scenario)) {}
  template <typename F>
  auto run(const std::string& phase, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log_ << "timing " << scenario_ << ' ' << phase << ' ' << std::fixed << std::setprecision(3) << seconds << " s\n"
         << std::defaultfloat;
    return result;
  }

 private:
  std::ostream& log_;
  std::string scenario_;
};

TwoPhotonState source_state(const ScenarioConfig& c, double offset_in_waists) {
  const PumpSpec pump = PumpSpec::gaussian(c.source.pump_waist, c.source.pump_wavelength);
  const double signal_waist = c.source.pump_waist / c.source.gamma;
  const PolarGrid grid =
      default_grid(std::max(c.source.pump_waist, signal_waist), c.grid.n_r, c.grid.n_phi, c.grid.r_max_factor);
  BuildOptions options;
  options.offset_x = offset_in_waists * signal_waist;
  options.full_matrix = offset_in_waists != 0.0;
  return build_state(pump, c.source.gamma, c.source.ell_max, grid, options);
}

ScanOptions scan_options(const ScenarioConfig& c, std::uint64_t seed) {
  ScanOptions o;
  o.peak_rate = c.scan.peak_counts / c.detector.integration_s;
  o.detector = c.detector_config();
  o.seed = seed;
  return o;
}

std::vector<double> orientations(int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(-kPi + kTwoPi * k / n);
  return out;
}

void write_fit(std::ostream& out, const std::string& prefix, const GaussianFit& fit) {
  out << prefix << "_amplitude," << fit.amplitude << '\n'
      << prefix << "_mean," << fit.mean << '\n'
      << prefix << "_variance," << fit.variance << '\n'
      << prefix << "_residual," << fit.residual_norm << '\n';
}

std::vector<Output> spiral(const ScenarioConfig& c, PhaseTimer& timer) {
  const TwoPhotonState state = timer.run("build_state", [&] { return source_state(c, c.source.offset); });
  const SpiralScan scan = timer.run("scan", [&] {
    return spiral_scan(state, c.spiral.ell_min, c.spiral.ell_max, scan_options(c, *c.seed));
  });
  Outputs out;
  write_scan_csv(out.add("spiral_matrix.csv"), scan.scan);
  auto& spec = out.add("spiral_spectrum.csv");
  spec << "ell,probability\n";
  for (std::size_t k = 0; k < scan.spectrum.size(); ++k) spec << scan.ells[k] << ',' << scan.spectrum[k] << '\n';
  auto& sum = out.add("spiral_summary.csv");
  sum << "quantity,value\n"
      << "gamma," << c.source.gamma << '\n'
      << "offset_waists," << c.source.offset << '\n'
      << "fwhm_fit," << scan.fwhm << '\n'
      << "fwhm_crossing," << (scan.crossing_fwhm ? number(*scan.crossing_fwhm) : "none") << '\n'
      << "crosstalk_ratio," << scan.crosstalk_ratio << '\n';
  write_fit(sum, "fit", scan.fit);
  return out.take();
}

std::vector<Output> angular(const ScenarioConfig& c, PhaseTimer& timer) {
  const TwoPhotonState state = timer.run("build_state", [&] { return source_state(c, c.source.offset); });
  const std::vector<double> betas = orientations(c.angular.orientations);
  const ScanResult map =
      timer.run("scan", [&] { return angular_scan(state, c.angular.width, betas, betas, scan_options(c, *c.seed)); });
  Outputs out;
  write_scan_csv(out.add("angular_map.csv"), map);
  const std::size_t zero = betas.size() / 2;  // beta_B = 0
  std::vector<double> profile;
  auto& prof = out.add("angular_profile.csv");
  prof << "beta_a,ideal_rate,count\n";
  for (std::size_t r = 0; r < betas.size(); ++r) {
    profile.push_back(static_cast<double>(map.at(r, zero).count));
    prof << betas[r] << ',' << map.at(r, zero).ideal_rate << ',' << map.at(r, zero).count << '\n';
  }
  auto& sum = out.add("angular_summary.csv");
  sum << "quantity,value\n"
      << "width," << c.angular.width << '\n'
      << "discrete_variance," << discrete_variance(betas, profile) << '\n';
  write_fit(sum, "fit", fit_gaussian(betas, profile));
  return out.take();
}

std::vector<Output> epr(const ScenarioConfig& c, PhaseTimer& timer) {
  const TwoPhotonState state = timer.run("build_state", [&] { return source_state(c, c.epr.offset); });
  const EprExperiment run = timer.run(
      "scans", [&] { return run_epr_experiment(state, c.epr.width, c.epr.orientations, scan_options(c, *c.seed)); });
  const EprReidResult& result = run.result;
  const std::vector<double>& ells = run.ells;
  const std::vector<double>& ell_profile = run.ell_profile;
  const std::vector<double>& betas = run.angles;
  const std::vector<double>& angle_profile = run.angle_profile;

  Outputs out;
  auto& lp = out.add("epr_ell_profile.csv");
  lp << "ell_a,count\n";
  for (std::size_t k = 0; k < ells.size(); ++k) lp << ells[k] << ',' << ell_profile[k] << '\n';
  auto& ap = out.add("epr_angle_profile.csv");
  ap << "beta_a,count\n";
  for (std::size_t k = 0; k < betas.size(); ++k) ap << betas[k] << ',' << angle_profile[k] << '\n';
  auto& sum = out.add("epr_summary.csv");
  sum << "quantity,value\n"
      << "offset_waists," << c.epr.offset << '\n'
      << "width," << c.epr.width << '\n'
      << "ell_variance," << result.ell_variance << '\n'
      << "angle_variance," << result.angle_variance << '\n'
      << "product," << result.product << '\n'
      << "bound,0.25\n"
      << "violated," << (result.violated ? "true" : "false") << '\n'
      << "discrete_ell_variance," << result.discrete_ell_variance << '\n'
      << "discrete_angle_variance," << result.discrete_angle_variance << '\n';
  write_fit(sum, "ell_fit", result.ell_fit);
  write_fit(sum, "angle_fit", result.angle_fit);
  return out.take();
}

std::vector<Output> bell(const ScenarioConfig& c, PhaseTimer& timer) {
  const TwoPhotonState state = timer.run("build_state", [&] { return source_state(c, c.source.offset); });
  BellSettings settings = c.bell.angles.value_or(BellSettings::canonical(c.bell.ell));
  settings.ell = c.bell.ell;
  std::vector<double> thetas;
  for (int k = 0; k < c.bell.curve_points; ++k) thetas.push_back(kPi * k / (c.bell.curve_points - 1));
  const ScanResult curve = timer.run(
      "curve", [&] { return bell_curve(state, settings.ell, settings.theta_a, thetas, scan_options(c, *c.seed)); });
  const auto records =
      timer.run("chsh", [&] { return bell_counts(state, settings, scan_options(c, derive_seed(*c.seed, 1))); });
  const BellResult result = bell_parameter(records, settings);

  std::vector<double> ideal;
  std::vector<double> counts;
  for (const CoincidenceRecord& r : curve.records) {
    ideal.push_back(r.ideal_rate);
    counts.push_back(static_cast<double>(r.count));
  }
  const FringeFit ideal_fit = fit_fringe(thetas, ideal);
  const FringeFit count_fit = fit_fringe(thetas, counts);

  Outputs out;
  write_scan_csv(out.add("bell_curve.csv"), curve);
  auto& bc = out.add("bell_counts.csv");
  bc << "term,theta_a,theta_b,ideal_rate,mean,count,accidentals\n";
  const double shift = kPi / (2.0 * settings.ell);
  const double xs[4] = {settings.theta_a, settings.theta_a, settings.theta_a_prime, settings.theta_a_prime};
  const double ys[4] = {settings.theta_b, settings.theta_b_prime, settings.theta_b, settings.theta_b_prime};
  for (int k = 0; k < 16; ++k) {
    const int t = k / 4;
    const int j = k % 4;
    const double ta = xs[t] + ((j == 1 || j == 2) ? shift : 0.0);
    const double tb = ys[t] + ((j == 1 || j == 3) ? shift : 0.0);
    const CoincidenceRecord& r = records[k];
    bc << t << ',' << ta << ',' << tb << ',' << r.ideal_rate << ',' << r.mean << ',' << r.count << ','
       << r.accidentals << '\n';
  }
  auto& sum = out.add("bell_summary.csv");
  sum << "quantity,value\n"
      << "ell," << settings.ell << '\n'
      << "theta_a," << settings.theta_a << '\n'
      << "theta_a_prime," << settings.theta_a_prime << '\n'
      << "theta_b," << settings.theta_b << '\n'
      << "theta_b_prime," << settings.theta_b_prime << '\n';
  for (int t = 0; t < 4; ++t) sum << "E" << t << ',' << result.correlations[t] << '\n';
  sum << "S," << result.s << '\n'
      << "sigma_S," << result.sigma << '\n'
      << "violation_sigmas," << (result.sigma > 0.0 ? (result.s - 2.0) / result.sigma : 0.0) << '\n'
      << "violated," << (result.s > 2.0 ? "true" : "false") << '\n'
      << "fringe_period_ideal," << ideal_fit.period << '\n'
      << "fringe_visibility_ideal," << ideal_fit.visibility << '\n'
      << "fringe_period_counts," << count_fit.period << '\n'
      << "fringe_visibility_counts," << count_fit.visibility << '\n';
  return out.take();
}

std::vector<Output> tomo(const ScenarioConfig& c, PhaseTimer& timer) {
  const std::vector<int> ells = c.tomo_ells();
  const int d = static_cast<int>(ells.size());
  const ComplexVector target_vec = anticorrelated_entangled(ells);
  const DensityMatrix target = DensityMatrix::pure(d, target_vec);
  const DensityMatrix truth = c.tomo.state == "bell"
                                  ? target
                                  : restrict_state(timer.run("build_state", [&] { return source_state(c, c.source.offset); }), ells);
  const std::vector<MeasurementSetting> settings = tomography_settings(ells);
  const double flux = flux_for_mean_count(truth, settings, c.tomo.mean_counts) / c.detector.integration_s;
  const std::vector<CoincidenceRecord> records = timer.run(
      "measure", [&] { return run_tomography_experiment(truth, settings, flux, c.detector_config(), *c.seed); });

  ReconstructionOptions options;
  options.restarts = c.tomo.restarts;
  options.seed = derive_seed(*c.seed, 1);
  options.optimizer =
      c.tomo.optimizer == "nelder-mead" ? TomographyOptimizer::kNelderMead : TomographyOptimizer::kLevenbergMarquardt;
  const ReconstructionReport report = timer.run("reconstruct", [&] {
    return reconstruct(std::span<const CoincidenceRecord>(records), settings, d, options);
  });

  const double f = fidelity(report.rho, target);
  const double p_min = c.pmin(d);
  const double threshold_fidelity = fidelity(threshold_state(ThresholdSpec{d, p_min}), DensityMatrix::pure(d, maximally_entangled(d)));

  Outputs out;
  auto& counts = out.add("tomo_counts.csv");
  counts << "setting,state_a,state_b,ideal_rate,mean,count,accidentals\n";
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const CoincidenceRecord& r = records[k];
    counts << settings[k].index << ',' << settings[k].a.label << ',' << settings[k].b.label << ',' << r.ideal_rate
           << ',' << r.mean << ',' << r.count << ',' << r.accidentals << '\n';
  }
  write_density_matrix(out.add("tomo_rho.csv"), report.rho);
  write_density_matrix(out.add("tomo_true_rho.csv"), truth);
  auto& sum = out.add("tomo_summary.csv");
  std::string basis;
  for (int ell : ells) basis += (basis.empty() ? "" : " ") + std::to_string(ell);
  sum << "quantity,value\n"
      << "d," << d << '\n'
      << "ells," << basis << '\n'
      << "settings," << settings.size() << '\n'
      << "parameters," << report.parameter_count << '\n'
      << "fidelity," << f << '\n'
      << "fidelity_true_state," << fidelity(report.rho, truth) << '\n'
      << "linear_entropy," << linear_entropy(report.rho) << '\n'
      << "concurrence," << (d == 2 ? number(concurrence(report.rho)) : std::string("n/a")) << '\n'
      << "chi2," << report.chi2 << '\n'
      << "flux," << report.flux << '\n'
      << "converged," << (report.converged ? "true" : "false") << '\n'
      << "iterations," << report.iterations << '\n'
      << "best_restart," << report.best_restart << '\n'
      << "p_min," << p_min << '\n'
      << "threshold_fidelity," << threshold_fidelity << '\n'
      << "above_threshold," << (f > threshold_fidelity ? "true" : "false") << '\n';
  return out.take();
}

std::vector<Output> ring(const ScenarioConfig& c, PhaseTimer&) {
  const CrystalConfig crystal = c.crystal_config();
  const double first_null = crystal.focal_length * std::sqrt(std::max(kPi - crystal.alpha, 0.0) / crystal.a());
  const double r_max = c.ring.r_max > 0.0 ? c.ring.r_max : 3.0 * first_null;
  Outputs out;
  auto& prof = out.add("ring_profile.csv");
  prof << "r,intensity\n";
  for (int k = 0; k < c.ring.points; ++k) {
    const double r = r_max * k / (c.ring.points - 1);
    prof << r << ',' << sinc_ring_profile(r, crystal) << '\n';
  }
  auto& sum = out.add("ring_summary.csv");
  sum << "quantity,value\n"
      << "a," << crystal.a() << '\n'
      << "alpha," << crystal.alpha << '\n'
      << "peak_radius," << ring_peak_radius(crystal) << '\n'
      << "first_null_radius," << first_null << '\n';
  return out.take();
}

std::vector<Output> modes(const ScenarioConfig& c, PhaseTimer&) {
  Outputs out;
  auto& sum = out.add("modes_summary.csv");
  sum << "quantity,value\n"
      << "area," << c.modes.area << '\n'
      << "solid_angle," << c.modes.solid_angle << '\n'
      << "wavelength," << c.modes.wavelength << '\n'
      << "mode_count," << etendue_mode_count(c.modes.area, c.modes.solid_angle, c.modes.wavelength) << '\n';
  return out.take();
}

using Scenario = std::function<std::vector<Output>(const ScenarioConfig&, PhaseTimer&)>;

const std::map<std::string, Scenario>& scenarios() {
  static const std::map<std::string, Scenario> table = {
      {"spiral", spiral}, {"angular", angular}, {"epr-reid", epr}, {"bell", bell},
      {"tomo", tomo},     {"ring", ring},       {"modes", modes},
  };
  return table;
}

void write_all(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides, const std::string& out,
                           const std::map<std::string, std::string>& extra) {
  std::map<std::string, std::string> values;
  if (!path.empty()) values = read_key_value_file(path);
  for (const auto& [k, v] : extra) values[k] = v;
  for (const std::string& o : overrides) {
    const auto [k, v] = parse_override(o);
    values[k] = v;
  }
  if (!out.empty()) values["run.output_dir"] = out;
  return ScenarioConfig::from_map(values);
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"spiral", "angular", "epr-reid", "bell", "tomo", "ring", "modes"};
  return names;
}

std::vector<fs::path> run_scenario(const std::string& name, const ScenarioConfig& config, const fs::path& out_dir,
                                   std::ostream& log) {
  const auto it = scenarios().find(name);
  if (it == scenarios().end()) throw std::invalid_argument("unknown scenario '" + name + "'");
  if (const auto problems = config.validate(); !problems.empty()) throw ConfigError(problems);

  PhaseTimer timer(log, name);
  const std::vector<Output> outputs = timer.run("total", [&] { return it->second(config, timer); });

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const std::string header =
      "# oamsim " + name + " config=" + config.hash() + " seed=" + std::to_string(*config.seed) + "\n";
  std::vector<fs::path> written;
  for (const Output& o : outputs) {
    const fs::path path = out_dir / o.name;
    write_all(path, header + o.body);
    written.push_back(path);
  }

  std::ostringstream manifest;
  manifest << header << "tool = oamsim\nversion = " << kVersion << "\neigen = " << EIGEN_WORLD_VERSION << '.'
           << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << "\nscenario = " << name
           << "\nconfig_hash = " << config.hash() << "\nseed = " << *config.seed << "\noutputs =";
  for (const Output& o : outputs) manifest << ' ' << o.name;
  manifest << "\n# effective configuration\n";
  for (const auto& [k, v] : config.echo()) manifest << k << " = " << v << '\n';
  const fs::path manifest_path = out_dir / ("manifest_" + name + ".txt");
  write_all(manifest_path, manifest.str());
  written.push_back(manifest_path);
  return written;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for orbital-angular-momentum photon entanglement experiments", "oamsim"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
  };
  std::map<std::string, Common> common;
  int tomo_d = 0;

  auto add_common = [&](CLI::App* sub, Common& c, bool with_out) {
    sub->add_option("--config,-c", c.config, "Scenario configuration file (key = value lines)");
    sub->add_option("--set,-s", c.overrides, "Override a configuration key, key=value")->allow_extra_args(false);
    if (with_out) sub->add_option("--out,-o", c.out, "Output directory (overrides run.output_dir)");
  };
  for (const std::string& name : scenario_names()) {
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " scenario");
    add_common(sub, common[name], true);
    if (name == "tomo") sub->add_option("--d", tomo_d, "Local dimension (sets tomo.d)");
  }
  CLI::App* validate = app.add_subcommand("validate", "Check a configuration without running anything");
  add_common(validate, common["validate"], false);
  std::string positional;
  validate->add_option("path", positional, "Configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Common& c = common[name];
  if (name == "validate" && c.config.empty()) c.config = positional;

  ScenarioConfig config;
  try {
    std::map<std::string, std::string> extra;
    if (name == "tomo" && tomo_d != 0) extra["tomo.d"] = std::to_string(tomo_d);
    config = load_config(c.config, c.overrides, c.out, extra);
    const std::vector<std::string> problems = config.validate();
    if (name == "validate") {
      for (const std::string& p : problems) out << "error: " << p << '\n';
      return problems.empty() ? kExitOk : kExitConfigError;
    }
    if (!problems.empty()) throw ConfigError(problems);
  } catch (const ConfigError& e) {
    for (const std::string& p : e.problems()) err << "config error: " << p << '\n';
    return kExitConfigError;
  }

  try {
    const auto written = run_scenario(name, config, config.output_dir, err);
    for (const fs::path& p : written) out << p.string() << '\n';
  } catch (const ConfigError& e) {
    for (const std::string& p : e.problems()) err << "config error: " << p << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace oamsim
