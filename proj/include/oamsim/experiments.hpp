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

#ifndef OAMSIM_EXPERIMENTS_HPP
#define OAMSIM_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oamsim/source.hpp"
#include "oamsim/tomography.hpp"

namespace oamsim {

struct ScanAxis {
  std::string label;
  std::vector<double> values;
};

struct ScanMetadata {
  std::string kind;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  int ell_max = 0;
  double peak_rate = 0.0;
  DetectorConfig detector;
};

/// Coincidence records on a rows x cols grid of settings, row-major; record k
/// was sampled from the stream derive_seed(seed, k).
struct ScanResult {
  ScanAxis rows;
  ScanAxis cols;
  std::vector<CoincidenceRecord> records;
  ScanMetadata metadata;

  std::size_t row_count() const { return rows.values.size(); }
  std::size_t col_count() const { return cols.values.size(); }
  const CoincidenceRecord& at(std::size_t r, std::size_t c) const { return records.at(r * col_count() + c); }
  Eigen::MatrixXd ideal_rates() const;
  Eigen::MatrixXd counts() const;
  /// Throws std::logic_error if the record count does not match the axes.
  void validate() const;
};

/// Header "<rows label>,<cols label>,ideal_rate,mean,count,accidentals", one
/// row per setting.
void write_scan_csv(std::ostream& out, const ScanResult& scan);

struct GaussianFit {
  double amplitude = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double residual_norm = 0.0;  // |y - fit| / |y|
  int iterations = 0;
};

/// Least-squares A exp(-(x - mu)^2 / (2 s^2)). Throws std::invalid_argument
/// for fewer than 4 points, negative or non-finite values, or flat data, and
/// std::runtime_error when the fit does not converge.
GaussianFit fit_gaussian(std::span<const double> xs, std::span<const double> ys);

/// c0 + c1 cos(K x) + c2 sin(K x) with the angular frequency K also fitted.
struct FringeFit {
  double offset = 0.0;
  double cos_coefficient = 0.0;
  double sin_coefficient = 0.0;
  double frequency = 0.0;
  double period = 0.0;      // 2 pi / K
  double visibility = 0.0;  // amplitude / offset
  double residual_norm = 0.0;
};
FringeFit fit_fringe(std::span<const double> xs, std::span<const double> ys);

/// Rate scale and sampling parameters shared by the scans: every ideal rate is
/// peak_rate times the probability relative to the scan's reference value.
struct ScanOptions {
  double peak_rate = 1e4;
  DetectorConfig detector;
  std::uint64_t seed = 0;
};

struct SpiralScan {
  ScanResult scan;
  std::vector<int> ells;
  std::vector<double> spectrum;  // anti-diagonal ideal rates, unit sum
  GaussianFit fit;
  double fwhm = 0.0;                    // 2 sqrt(2 ln 2) s from the fit
  std::optional<double> crossing_fwhm;  // interpolated half-maximum width, if both crossings lie in range
  double crosstalk_ratio = 0.0;         // sum of off-anti-diagonal / anti-diagonal ideal rates
};

/// Coincidences for projectors LG(ell_A) x LG(ell_B), ell in [ell_min, ell_max];
/// rates relative to the largest |A|^2 in the window.
SpiralScan spiral_scan(const TwoPhotonState& state, int ell_min, int ell_max, const ScanOptions& options);

/// Sector projectors of opening `width` at each pair of orientations; the
/// amplitude is sum A(ls, li) conj(c_ls(beta_A)) conj(c_li(beta_B)).
ScanResult angular_scan(const TwoPhotonState& state, double width, std::span<const double> orientations_a,
                        std::span<const double> orientations_b, const ScanOptions& options);

struct EprReidResult {
  GaussianFit ell_fit;
  GaussianFit angle_fit;
  double ell_variance = 0.0;
  double angle_variance = 0.0;
  double product = 0.0;
  bool violated = false;
  double discrete_ell_variance = 0.0;
  double discrete_angle_variance = 0.0;
};

/// Product of the two variances and the verdict product < 1/4.
EprReidResult epr_reid_verdict(double ell_variance, double angle_variance);

/// Gaussian-fit conditional variances of the two profiles (each rescaled to
/// unit sum first).
EprReidResult epr_reid(std::span<const double> ells, std::span<const double> ell_profile,
                       std::span<const double> angles, std::span<const double> angle_profile);

/// Weighted variance of a discrete profile.
double discrete_variance(std::span<const double> xs, std::span<const double> weights);

/// Conditional profiles behind an EPR-Reid test: arm-A OAM counts with
/// ell_B = 0 and arm-A sector counts with beta_B = 0.
struct EprExperiment {
  std::vector<double> ells;
  std::vector<double> ell_profile;
  std::vector<double> angles;  // uniform on [-pi, pi)
  std::vector<double> angle_profile;
  EprReidResult result;
};

/// Measures both profiles over the full state support with `orientations`
/// sector positions of opening `width`. The two scans draw from
/// derive_seed(options.seed, 1) and derive_seed(options.seed, 2).
EprExperiment run_epr_experiment(const TwoPhotonState& state, double width, int orientations,
                                 const ScanOptions& options);

struct BellSettings {
  int ell = 1;
  double theta_a = 0.0;
  double theta_a_prime = 0.0;
  double theta_b = 0.0;
  double theta_b_prime = 0.0;

  /// 0, pi / (4 ell), pi / (8 ell), 3 pi / (8 ell).
  static BellSettings canonical(int ell);
  /// Angles reduced modulo pi / ell.
  BellSettings reduced() const;
  void validate() const;
};

/// Probability of projecting onto the rotated superpositions of +-ell at
/// theta_a, theta_b, relative to the (|ell,-ell> + |-ell,ell>) / sqrt 2 sector
/// weight: equals cos^2(ell (theta_a - theta_b)) for the ideal state.
double bell_probability(const TwoPhotonState& state, int ell, double theta_a, double theta_b);

/// Fringe over theta_B with arm A fixed.
ScanResult bell_curve(const TwoPhotonState& state, int ell, double theta_a, std::span<const double> theta_b,
                      const ScanOptions& options);

/// The 16 records in E-term order E(a,b), E(a,b'), E(a',b), E(a',b'); within
/// each term C(x,y), C(x+s,y+s), C(x+s,y), C(x,y+s) with s = pi / (2 ell).
std::array<CoincidenceRecord, 16> bell_counts(const TwoPhotonState& state, const BellSettings& settings,
                                              const ScanOptions& options);

struct BellResult {
  double s = 0.0;
  double sigma = 0.0;
  std::array<double, 4> correlations{};
  std::array<double, 4> correlation_sigmas{};
};

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b'); sigma from independent Poisson
/// errors. Throws std::domain_error when an E term has no counts.
BellResult bell_parameter(std::span<const double, 16> counts, const BellSettings& settings);
BellResult bell_parameter(const std::array<CoincidenceRecord, 16>& records, const BellSettings& settings);

/// Per-arm states: |ell_i> then (|ell_i> + e^{i theta} |ell_j>) / sqrt 2 for
/// i < j and theta in {0, pi/2, pi, 3 pi/2}.
std::vector<ProjectorState> tomography_states(const std::vector<int>& ells);

/// Cartesian product of the per-arm states; index = i_A * n + i_B.
std::vector<MeasurementSetting> tomography_settings(const std::vector<int>& ells);

/// Flux N for which the ideal counts average `mean_count` over the settings.
double flux_for_mean_count(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                           double mean_count);

/// Records with ideal rate N Tr(rho Pi_k), sampled from derive_seed(seed, k).
std::vector<CoincidenceRecord> run_tomography_experiment(const DensityMatrix& rho,
                                                         std::span<const MeasurementSetting> settings,
                                                         double flux, const DetectorConfig& detector,
                                                         std::uint64_t seed);

/// Normalized pure state in the basis ells x ells built from the joint
/// amplitudes A(ell_A, ell_B).
DensityMatrix restrict_state(const TwoPhotonState& state, const std::vector<int>& ells);

}  // namespace oamsim

#endif  // OAMSIM_EXPERIMENTS_HPP
