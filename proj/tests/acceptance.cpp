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


// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oamsim/cli.hpp"
#include "oamsim/experiments.hpp"
#include "oamsim/tomography.hpp"

using namespace oamsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const PumpSpec kPump = PumpSpec::gaussian(1.0);

TwoPhotonState source(double gamma, int ell_max, double offset_waists = 0.0) {
  BuildOptions options;
  options.offset_x = offset_waists / gamma;  // signal waist = pump waist / gamma
  options.full_matrix = offset_waists != 0.0;
  return build_state(kPump, gamma, ell_max, default_grid(1.0), options);
}

std::array<double, 16> ideal_rates(const std::array<CoincidenceRecord, 16>& records) {
  std::array<double, 16> out{};
  for (int k = 0; k < 16; ++k) out[k] = records[k].ideal_rate;
  return out;
}

Outcome conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  const SpiralScan aligned = spiral_scan(source(2.0, 5), -5, 5, ScanOptions{});
  double peak = 0.0;
  double worst = 0.0;
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b) {
      const double rate = aligned.scan.at(a + 5, b + 5).ideal_rate;
      peak = std::max(peak, rate);
      if (a + b != 0) worst = std::max(worst, rate);
    }
  const double elapsed = seconds_since(t0);
  std::vector<double> ratios;
  for (double offset : {0.0, 0.1, 0.2}) ratios.push_back(spiral_scan(source(2.0, 5, offset), -5, 5, ScanOptions{}).crosstalk_ratio);
  const bool monotonic = ratios[0] < ratios[1] && ratios[1] < ratios[2];
  return {worst <= 1e-10 * peak && elapsed < 30.0 && monotonic,
          fmt("off-diagonal max/peak = %.2e, %.2f s; crosstalk at offset 0, 0.1w, 0.2w = %.2e, %.2e, %.2e", worst / peak,
              elapsed, ratios[0], ratios[1], ratios[2])};
}

Outcome bandwidth() {
  std::vector<double> widths;
  for (double gamma : {0.5, 2.0, 4.0}) widths.push_back(spiral_scan(source(gamma, 10), -10, 10, ScanOptions{}).fwhm);
  return {widths[0] < widths[1] && widths[1] < widths[2],
          fmt("FWHM at gamma 0.5, 2, 4 = %.3f, %.3f, %.3f", widths[0], widths[1], widths[2])};
}

Outcome bell_test() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int ell : {1, 2, 3}) {
    const BellSettings s = BellSettings::canonical(ell);
    const auto rates = ideal_rates(bell_counts(TwoPhotonState::bell(ell), s, ScanOptions{}));
    worst = std::max(worst, std::abs(bell_parameter(std::span<const double, 16>(rates), s).s - 2.0 * std::sqrt(2.0)));
  }
  const TwoPhotonState state = TwoPhotonState::bell(2);
  const BellSettings s = BellSettings::canonical(2);
  int good = 0;
  double min_sigmas = 1e300;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ScanOptions options;
    options.peak_rate = 1e4;
    options.seed = seed;
    const BellResult r = bell_parameter(bell_counts(state, s, options), s);
    const double sigmas = (r.s - 2.0) / r.sigma;
    min_sigmas = std::min(min_sigmas, sigmas);
    good += r.s > 2.0 && sigmas > 20.0;
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-9 && good >= 95 && elapsed < 60.0,
          fmt("noiseless |S - 2 sqrt 2| = %.1e; noisy runs with (S-2)/sigma > 20: %d/100 (min %.1f); %.2f s", worst, good,
              min_sigmas, elapsed)};
}

Outcome bell_fringe() {
  std::vector<double> thetas;
  for (int k = 0; k < 181; ++k) thetas.push_back(kPi * k / 180.0);
  double worst_residual = 0.0;
  double worst_period = 0.0;
  for (int ell : {1, 2, 3}) {
    const TwoPhotonState state = TwoPhotonState::bell(ell);
    std::vector<double> ys;
    for (double tb : thetas) ys.push_back(bell_probability(state, ell, 0.0, tb));
    const FringeFit fit = fit_fringe(thetas, ys);
    double r2 = 0.0;
    double y2 = 0.0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      const double c = std::cos(ell * thetas[k]);
      r2 += (ys[k] - c * c) * (ys[k] - c * c);
      y2 += ys[k] * ys[k];
    }
    worst_residual = std::max({worst_residual, std::sqrt(r2 / y2), fit.residual_norm});
    worst_period = std::max(worst_period, std::abs(fit.period - kPi / ell));
  }
  return {worst_residual < 1e-9 && worst_period < 1e-6,
          fmt("worst residual vs cos^2 = %.1e, worst |period - pi/ell| = %.1e", worst_residual, worst_period)};
}

Outcome epr() {
  const TwoPhotonState state = source(2.0, 20, 0.1);
  int violated = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ScanOptions options;
    options.peak_rate = 1e4;
    options.seed = seed;
    const EprExperiment run = run_epr_experiment(state, kPi / 8.0, 72, options);
    violated += run.result.product < 0.25;
    worst = std::max(worst, run.result.product);
  }
  return {violated >= 99, fmt("product < 0.25 in %d/100 seeds (largest %.4f)", violated, worst)};
}

Outcome tomography() {
  const std::vector<int> ells{1, -1};
  const auto settings = tomography_settings(ells);
  const DensityMatrix bell = DensityMatrix::pure(2, anticorrelated_entangled(ells));
  const double flux = flux_for_mean_count(bell, settings, 1e4);
  std::vector<double> ideal;
  for (const auto& s : settings) ideal.push_back(predicted_counts(bell, s, flux));
  const double f_noiseless = fidelity(reconstruct(ideal, settings, 2).rho, bell);

  const auto t2 = std::chrono::steady_clock::now();
  int good = 0;
  double min_f = 1.0;
  double max_sl = 0.0;
  const DetectorConfig quiet;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto records = run_tomography_experiment(bell, settings, flux, quiet, seed);
    ReconstructionOptions options;
    options.seed = seed;
    const ReconstructionReport r = reconstruct(std::span<const CoincidenceRecord>(records), settings, 2, options);
    const double f = fidelity(r.rho, bell);
    const double sl = linear_entropy(r.rho);
    min_f = std::min(min_f, f);
    max_sl = std::max(max_sl, sl);
    good += f > 0.99 && sl < 0.02;
  }
  const double elapsed2 = seconds_since(t2);

  const std::vector<int> ells3{1, 0, -1};
  const auto settings3 = tomography_settings(ells3);
  const DensityMatrix target3 = DensityMatrix::pure(3, anticorrelated_entangled(ells3));
  const auto t3 = std::chrono::steady_clock::now();
  const auto records3 =
      run_tomography_experiment(target3, settings3, flux_for_mean_count(target3, settings3, 1e4), quiet, 3);
  ReconstructionOptions options3;
  options3.seed = 3;
  const double f3 = fidelity(reconstruct(std::span<const CoincidenceRecord>(records3), settings3, 3, options3).rho, target3);
  const double elapsed3 = seconds_since(t3);

  return {f_noiseless > 1.0 - 1e-6 && good >= 95 && elapsed2 < 120.0 && f3 > 0.95 && elapsed3 < 900.0,
          fmt("d=2 noiseless 1-F = %.1e; noisy F > 0.99 and S_L < 0.02 in %d/100 (min F %.5f, max S_L %.5f), %.1f s; "
              "d=3 F = %.5f, %.1f s",
              1.0 - f_noiseless, good, min_f, max_sl, elapsed2, f3, elapsed3)};
}

Outcome rounded_matrix() {
  // Two-decimal two-qubit reconstruction, real part plus i times the listed
  // imaginary part, ordered |l,l>, |l,-l>, |-l,l>, |-l,-l>.
  const double re[4][4] = {{0.011, -0.001, 0, -0.002}, {-0.001, 0.48, 0.48, 0.036}, {0, 0.48, 0.49, 0.036},
                           {-0.002, 0.036, 0.036, 0.012}};
  const double im[4][4] = {{0, 0.043, 0.048, 0.003}, {-0.043, 0, -0.039, 0.042}, {-0.048, 0.039, 0, 0.048},
                           {-0.003, -0.042, -0.048, 0}};
  ComplexMatrix m(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = Complex(re[r][c], im[r][c]);
  m /= m.trace().real();
  const ComplexMatrix target = DensityMatrix::pure(2, anticorrelated_entangled({1, -1})).matrix();
  const double f = fidelity(m, target);
  const double sl = linear_entropy(m);
  const bool f_ok = std::abs(f - 0.97) <= 0.02;
  const bool sl_ok = std::abs(sl - 0.02) <= 0.02;
  return {f_ok && sl_ok, fmt("fidelity = %.4f (%s, window 0.97 +- 0.02); linear entropy = %.4f (%s, window 0.02 +- 0.02)",
                             f, f_ok ? "in" : "OUT", sl, sl_ok ? "in" : "OUT")};
}

Outcome threshold() {
  double worst = 0.0;
  for (int d = 2; d <= 5; ++d)
    for (double p : {0.0, 0.5, 1.0}) {
      const double f = fidelity(threshold_state({d, p}), DensityMatrix::pure(d, maximally_entangled(d)));
      worst = std::max(worst, std::abs(f - (p + (1.0 - p) / (d * d))));
    }
  return {worst <= 1e-10, fmt("worst |F - (p + (1-p)/d^2)| = %.1e", worst)};
}

Outcome numerics() {
  const BeamGeometry unit(1.0, 1.0);
  const PolarGrid grid = default_grid(1.0);
  double gram = 0.0;
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b) {
      const Complex g = mode_overlap(ModeSpec::laguerre_gauss(a, 0, unit), ModeSpec::laguerre_gauss(b, 0, unit), grid);
      gram = std::max(gram, std::abs(g - Complex(a == b ? 1.0 : 0.0)));
    }
  const double quad =
      std::abs(integrate_polar([](double r, double) { return Complex(std::exp(-2.0 * r * r)); }, PolarGrid(6.0, 256, 256)) -
               Complex(kPi / 2.0));
  double su = 0.0;
  for (int d = 2; d <= 5; ++d) {
    const auto basis = su_basis(d);
    for (std::size_t m = 0; m < basis.size(); ++m)
      for (std::size_t n = 0; n < basis.size(); ++n) {
        const double expected = m != n ? 0.0 : (m == 0 ? d : 2.0);
        su = std::max(su, std::abs((basis[m] * basis[n]).trace() - Complex(expected)));
      }
  }
  double sqrt_err = 0.0;
  for (unsigned seed = 1; seed <= 5; ++seed) {
    ComplexMatrix a = ComplexMatrix::Random(6, 6);
    if (seed > 2) a.col(0).setZero();  // rank deficient
    const ComplexMatrix m = a * a.adjoint();
    const ComplexMatrix r = psd_sqrt(m);
    sqrt_err = std::max(sqrt_err, (r * r - m).norm() / m.norm());
  }
  return {gram <= 1e-6 && quad < 1e-6 && su <= 1e-12 && sqrt_err < 1e-8,
          fmt("LG Gram error %.1e; Gaussian quadrature error %.1e; su_basis orthogonality error %.1e; psd_sqrt error %.1e",
              gram, quad, su, sqrt_err)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "oamsim_acceptance_determinism";
  fs::remove_all(root);
  int files = 0;
  int mismatched = 0;
  for (const std::string& name : scenario_names()) {
    for (const char* run : {"a", "b"}) {
      const std::string out = (root / run).string();
      const char* argv[] = {"oamsim", name.c_str(), "--set", "run.seed=2026", "--out", out.c_str()};
      std::ostringstream sink;
      if (run_cli(6, argv, sink, sink) != kExitOk) return {false, name + " failed: " + sink.str()};
    }
  }
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    mismatched += slurp(entry.path()) != slurp(root / "b" / entry.path().filename());
  }
  fs::remove_all(root);
  return {files > 0 && mismatched == 0,
          fmt("%d files from %zu scenarios, %d differ between two runs", files, scenario_names().size(), mismatched)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 OAM conservation and offset crosstalk", conservation},
      {"2 spiral bandwidth grows with gamma", bandwidth},
      {"3 CHSH violation", bell_test},
      {"4 Bell fringe period and shape", bell_fringe},
      {"5 EPR-Reid product below 1/4", epr},
      {"6 tomography round trip", tomography},
      {"7 metrics of a rounded reconstructed matrix", rounded_matrix},
      {"8 threshold-state fidelity curve", threshold},
      {"9 numerics suite", numerics},
      {"10 CLI determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
