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


#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oamsim/experiments.hpp"

using namespace oamsim;

namespace {

const TwoPhotonState& aligned_state() {
  static const TwoPhotonState s = build_state(PumpSpec::gaussian(1.0), 2.0, 10, default_grid(1.0));
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("spiral_scan of an aligned source is anti-diagonal") {
  const SpiralScan s = spiral_scan(aligned_state(), -5, 5, ScanOptions{});
  CHECK(s.scan.row_count() == 11);
  CHECK(s.scan.col_count() == 11);
  double peak = 0.0;
  for (const auto& r : s.scan.records) peak = std::max(peak, r.ideal_rate);
  CHECK(peak == doctest::Approx(1e4));
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      if (a + b != 0) CHECK(s.scan.at(a + 5, b + 5).ideal_rate <= 1e-10 * peak);
  CHECK(s.crosstalk_ratio < 1e-20);
  double total = 0.0;
  for (double p : s.spectrum) total += p;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("spiral_scan with an offset keeps point symmetry") {
  BuildOptions off;
  off.offset_x = 0.05;
  off.full_matrix = true;
  const TwoPhotonState t = build_state(PumpSpec::gaussian(1.0), 2.0, 6, default_grid(1.0), off);
  const SpiralScan s = spiral_scan(t, -6, 6, ScanOptions{});
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b)
      CHECK(s.scan.at(a + 6, b + 6).ideal_rate ==
            doctest::Approx(s.scan.at(6 - a, 6 - b).ideal_rate).epsilon(1e-8).scale(1e-6));
  CHECK(s.crosstalk_ratio > 1e-3);
}

TEST_CASE("scan csv layout") {
  const SpiralScan s = spiral_scan(aligned_state(), -2, 2, ScanOptions{});
  std::ostringstream out;
  write_scan_csv(out, s.scan);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "ell_a,ell_b,ideal_rate,mean,count,accidentals");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 25);
}

TEST_CASE("angular_scan with a full aperture is flat") {
  const std::vector<double> betas = linspace(-3.0, 3.0, 7);
  const ScanResult map = angular_scan(aligned_state(), kTwoPi, betas, betas, ScanOptions{});
  for (const auto& r : map.records) CHECK(r.ideal_rate == doctest::Approx(1e4).epsilon(1e-10));
  const ScanResult narrow = angular_scan(aligned_state(), kPi / 8.0, betas, betas, ScanOptions{});
  CHECK(narrow.at(3, 3).ideal_rate > 10.0 * narrow.at(3, 0).ideal_rate);
}

TEST_CASE("fit_gaussian") {
  const std::vector<double> xs = linspace(-10.0, 10.0, 41);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * std::exp(-0.5 * (x - 1.2) * (x - 1.2) / 4.0));
  const GaussianFit exact = fit_gaussian(xs, ys);
  CHECK(exact.amplitude == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(exact.mean == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(exact.variance == doctest::Approx(4.0).epsilon(1e-6));

  std::vector<double> sym;
  for (double x : xs) sym.push_back(std::exp(-x * x / 6.0) + 0.1 * std::exp(-x * x / 50.0));
  CHECK(std::abs(fit_gaussian(xs, sym).mean) < 1e-8);

  int within = 0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> noisy;
    for (double x : xs) noisy.push_back(std::poisson_distribution<long>(1e4 * std::exp(-0.5 * x * x / 4.0))(rng));
    within += std::abs(fit_gaussian(xs, noisy).variance / 4.0 - 1.0) < 0.05;
  }
  CHECK(within == 100);

  CHECK_THROWS_AS(fit_gaussian(xs, std::vector<double>(xs.size(), 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(fit_gaussian(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("fit_fringe recovers a cosine") {
  const std::vector<double> xs = linspace(0.0, kPi, 181);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2.0 + 1.5 * std::cos(3.0 * x - 0.4));
  const FringeFit f = fit_fringe(xs, ys);
  CHECK(f.frequency == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f.period == doctest::Approx(kTwoPi / 3.0).epsilon(1e-9));
  CHECK(f.visibility == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(f.residual_norm < 1e-9);
}

TEST_CASE("epr_reid") {
  const EprReidResult paper = epr_reid_verdict(0.128, 0.056);
  CHECK(paper.product == doctest::Approx(0.007).epsilon(0.15));
  CHECK(paper.violated);

  const std::vector<double> ells = linspace(-10.0, 10.0, 21);
  const std::vector<double> angles = linspace(-kPi, kPi, 72);
  std::vector<double> ep;
  std::vector<double> ap;
  for (double l : ells) ep.push_back(std::exp(-0.5 * l * l));
  for (double a : angles) ap.push_back(std::exp(-0.5 * a * a));
  const EprReidResult broad = epr_reid(ells, ep, angles, ap);
  CHECK(broad.ell_variance == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(broad.angle_variance == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(broad.product >= 0.25);
  CHECK_FALSE(broad.violated);
  CHECK(discrete_variance(std::vector<double>{-1.0, 1.0}, std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("bell_probability follows cos^2") {
  for (int ell : {1, 2, 3}) {
    const TwoPhotonState b = TwoPhotonState::bell(ell);
    for (double ta : {0.0, 0.3})
      for (double tb : {0.0, 0.1, 0.7, 1.9}) {
        const double c = std::cos(ell * (ta - tb));
        CHECK(bell_probability(b, ell, ta, tb) == doctest::Approx(c * c).epsilon(1e-12).scale(1e-12));
      }
  }
}

TEST_CASE("bell_parameter at canonical settings") {
  ScanOptions noiseless;
  for (int ell : {1, 2, 3}) {
    const BellSettings s = BellSettings::canonical(ell);
    CHECK(s.theta_a_prime == doctest::Approx(kPi / (4.0 * ell)));
    const auto records = bell_counts(TwoPhotonState::bell(ell), s, noiseless);
    std::array<double, 16> ideal{};
    for (int k = 0; k < 16; ++k) ideal[k] = records[k].ideal_rate;
    const BellResult r = bell_parameter(std::span<const double, 16>(ideal), s);
    CHECK(std::abs(r.s - 2.0 * std::sqrt(2.0)) < 1e-9);
  }
  // Separable single-ell state.
  const TwoPhotonState product = TwoPhotonState::from_coefficients(1, {Complex(0.0), Complex(0.0), Complex(1.0)});
  const auto records = bell_counts(product, BellSettings::canonical(1), noiseless);
  std::array<double, 16> ideal{};
  for (int k = 0; k < 16; ++k) ideal[k] = records[k].ideal_rate;
  CHECK(std::abs(bell_parameter(std::span<const double, 16>(ideal), BellSettings::canonical(1)).s) <= 2.0);
  std::array<double, 16> empty{};
  CHECK_THROWS_AS(bell_parameter(std::span<const double, 16>(empty), BellSettings::canonical(1)), std::domain_error);
}

TEST_CASE("bell_curve of the aligned source") {
  const std::vector<double> thetas = linspace(0.0, kPi, 91);
  const ScanResult c = bell_curve(aligned_state(), 2, 0.0, thetas, ScanOptions{});
  CHECK(c.col_count() == 91);
  std::vector<double> ys;
  for (const auto& r : c.records) ys.push_back(r.ideal_rate);
  const FringeFit f = fit_fringe(thetas, ys);
  CHECK(f.period == doctest::Approx(kPi / 2.0).epsilon(1e-9));
}

TEST_CASE("tomography settings") {
  CHECK(tomography_states({1, -1}).size() == 6);
  CHECK(tomography_settings({1, -1}).size() == 36);
  CHECK(tomography_states({1, 0, -1}).size() == 15);
  CHECK(tomography_settings({1, 0, -1}).size() == 225);
  const auto settings = tomography_settings({1, -1});
  for (std::size_t k = 0; k < settings.size(); ++k) CHECK(settings[k].index == k);
  CHECK_THROWS(tomography_settings({1, 1}));
  CHECK_THROWS(tomography_settings({1}));
}

TEST_CASE("run_tomography_experiment projector algebra") {
  const std::vector<int> ells{1, -1};
  const DensityMatrix bell = DensityMatrix::pure(2, anticorrelated_entangled(ells));
  const auto settings = tomography_settings(ells);
  DetectorConfig det;
  det.singles_a = det.singles_b = 2e4;
  const auto records = run_tomography_experiment(bell, settings, 1e4, det, 5);
  // settings[0] = (|1>, |1>), settings[1] = (|1>, |-1>).
  CHECK(records[0].ideal_rate == doctest::Approx(0.0).scale(1.0));
  CHECK(records[0].mean == doctest::Approx(records[0].accidentals));
  CHECK(records[1].ideal_rate == doctest::Approx(5e3));
  const auto again = run_tomography_experiment(bell, settings, 1e4, det, 5);
  for (std::size_t k = 0; k < records.size(); ++k) CHECK(records[k].count == again[k].count);
  CHECK(flux_for_mean_count(bell, settings, 1e4) > 0.0);
}
