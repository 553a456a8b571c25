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

#include "oamsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "oamsim/modes.hpp"
#include "oamsim/optimize.hpp"

namespace oamsim {

namespace {

CoincidenceRecord sample_setting(double rate, const ScanOptions& options, std::size_t index) {
  CoincidenceRecord rec = sample_counts(rate, options.detector, derive_seed(options.seed, index));
  rec.setting_id = index;
  return rec;
}

ScanMetadata metadata_for(const std::string& kind, const TwoPhotonState& state, const ScanOptions& options) {
  ScanMetadata m;
  m.kind = kind;
  m.seed = options.seed;
  m.ell_max = state.ell_max();
  m.peak_rate = options.peak_rate;
  m.detector = options.detector;
  return m;
}

void check_options(const ScanOptions& options) {
  if (!(options.peak_rate >= 0.0) || !std::isfinite(options.peak_rate)) {
    throw std::invalid_argument("scan: peak_rate must be finite and >= 0");
  }
  options.detector.validate();
}

void check_profile(std::span<const double> xs, std::span<const double> ys, const char* what) {
  if (xs.size() != ys.size()) throw std::invalid_argument(std::string(what) + ": xs and ys differ in length");
  if (xs.size() < 4) throw std::invalid_argument(std::string(what) + ": need at least 4 points");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!std::isfinite(xs[k]) || !std::isfinite(ys[k])) {
      throw std::invalid_argument(std::string(what) + ": non-finite data");
    }
  }
}

double min_spacing(std::span<const double> xs) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k] > sorted[k - 1]) best = std::min(best, sorted[k] - sorted[k - 1]);
  return best;
}

ComplexVector sector_vector(double orientation, double width, int ell_max) {
  const SectorCoefficients c = sector_coefficients(orientation, width, -ell_max, ell_max);
  ComplexVector v(2 * ell_max + 1);
  for (int ell = -ell_max; ell <= ell_max; ++ell) v(ell + ell_max) = c.at(ell);
  return v;
}

}  // namespace

Eigen::MatrixXd ScanResult::ideal_rates() const {
  validate();
  Eigen::MatrixXd m(row_count(), col_count());
  for (std::size_t r = 0; r < row_count(); ++r)
    for (std::size_t c = 0; c < col_count(); ++c) m(r, c) = at(r, c).ideal_rate;
  return m;
}

Eigen::MatrixXd ScanResult::counts() const {
  validate();
  Eigen::MatrixXd m(row_count(), col_count());
  for (std::size_t r = 0; r < row_count(); ++r)
    for (std::size_t c = 0; c < col_count(); ++c) m(r, c) = static_cast<double>(at(r, c).count);
  return m;
}

void ScanResult::validate() const {
  if (records.size() != row_count() * col_count()) {
    throw std::logic_error("ScanResult: " + std::to_string(records.size()) + " records for a " +
                           std::to_string(row_count()) + " x " + std::to_string(col_count()) + " grid");
  }
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  scan.validate();
  out << scan.rows.label << ',' << scan.cols.label << ",ideal_rate,mean,count,accidentals\n";
  out << std::setprecision(12);
  for (std::size_t r = 0; r < scan.row_count(); ++r)
    for (std::size_t c = 0; c < scan.col_count(); ++c) {
      const CoincidenceRecord& rec = scan.at(r, c);
      out << scan.rows.values[r] << ',' << scan.cols.values[c] << ',' << rec.ideal_rate << ',' << rec.mean << ','
          << rec.count << ',' << rec.accidentals << '\n';
    }
}

GaussianFit fit_gaussian(std::span<const double> xs, std::span<const double> ys) {
  check_profile(xs, ys, "fit_gaussian");
  const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  if (*lo < 0.0) throw std::invalid_argument("fit_gaussian: negative values");
  if (!(*hi > *lo)) throw std::invalid_argument("fit_gaussian: flat data");

  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  double total = 0.0;
  double mean = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    total += ys[k];
    mean += ys[k] * xs[k];
  }
  mean /= total;
  double var = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) var += ys[k] * (xs[k] - mean) * (xs[k] - mean);
  var /= total;
  const double s0 = std::max(std::sqrt(var), 0.5 * min_spacing(xs));

  double y_norm2 = 0.0;
  for (double y : ys) y_norm2 += y * y;

  // Parameters (A, mu, log s).
  const ResidualFunction residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const double a = p(0);
    const double mu = p(1);
    const double s = std::exp(p(2));
    r.resize(n);
    if (jac) jac->resize(n, 3);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double u = (xs[k] - mu) / s;
      const double g = std::exp(-0.5 * u * u);
      r(k) = a * g - ys[k];
      if (jac) {
        (*jac)(k, 0) = g;
        (*jac)(k, 1) = a * g * u / s;
        (*jac)(k, 2) = a * g * u * u;
      }
    }
  };

  Eigen::VectorXd p0(3);
  p0 << *hi, mean, std::log(s0);
  LevenbergMarquardtOptions lm;
  lm.relative_tolerance = 1e-10;
  lm.absolute_tolerance = 1e-30 * y_norm2;
  lm.max_iterations = 5000;
  const OptimizeResult result = levenberg_marquardt(residuals, p0, lm);
  if (!result.converged || !result.x.allFinite()) {
    throw std::runtime_error("fit_gaussian: no convergence after " + std::to_string(result.iterations) + " iterations");
  }
  GaussianFit fit;
  fit.amplitude = result.x(0);
  fit.mean = result.x(1);
  fit.variance = std::exp(2.0 * result.x(2));
  fit.residual_norm = std::sqrt(2.0 * result.objective / y_norm2);
  fit.iterations = result.iterations;
  if (!(fit.variance > 0.0)) throw std::runtime_error("fit_gaussian: variance collapsed to zero");
  return fit;
}

FringeFit fit_fringe(std::span<const double> xs, std::span<const double> ys) {
  check_profile(xs, ys, "fit_fringe");
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
  const double span = *xhi - *xlo;
  if (!(span > 0.0)) throw std::invalid_argument("fit_fringe: abscissa has zero span");
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) y(k) = ys[k];
  const double y_norm2 = std::max(y.squaredNorm(), std::numeric_limits<double>::min());

  auto linear_fit = [&](double freq, Eigen::Vector3d& coef) {
    Eigen::MatrixXd basis(n, 3);
    for (Eigen::Index k = 0; k < n; ++k) {
      basis(k, 0) = 1.0;
      basis(k, 1) = std::cos(freq * xs[k]);
      basis(k, 2) = std::sin(freq * xs[k]);
    }
    coef = basis.colPivHouseholderQr().solve(y);
    return (basis * coef - y).squaredNorm();
  };

  // Coarse scan up to the Nyquist frequency of the sampling.
  const double resolution = kTwoPi / span;
  const double nyquist = kPi / min_spacing(xs);
  double best_freq = 0.0;
  double best_ssr = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_coef = Eigen::Vector3d::Zero();
  for (double freq = 0.25 * resolution; freq <= nyquist; freq += resolution / 32.0) {
    Eigen::Vector3d coef;
    const double ssr = linear_fit(freq, coef);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_freq = freq;
      best_coef = coef;
    }
  }

  const ResidualFunction residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(n);
    if (jac) jac->resize(n, 4);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double c = std::cos(p(3) * xs[k]);
      const double s = std::sin(p(3) * xs[k]);
      r(k) = p(0) + p(1) * c + p(2) * s - y(k);
      if (jac) {
        (*jac)(k, 0) = 1.0;
        (*jac)(k, 1) = c;
        (*jac)(k, 2) = s;
        (*jac)(k, 3) = xs[k] * (-p(1) * s + p(2) * c);
      }
    }
  };
  Eigen::VectorXd p0(4);
  p0 << best_coef(0), best_coef(1), best_coef(2), best_freq;
  LevenbergMarquardtOptions lm;
  lm.relative_tolerance = 1e-14;
  lm.absolute_tolerance = 1e-32 * y_norm2;
  lm.max_iterations = 5000;
  const OptimizeResult result = levenberg_marquardt(residuals, p0, lm);

  FringeFit fit;
  fit.offset = result.x(0);
  fit.cos_coefficient = result.x(1);
  fit.sin_coefficient = result.x(2);
  fit.frequency = std::abs(result.x(3));
  if (result.x(3) < 0.0) fit.sin_coefficient = -fit.sin_coefficient;
  fit.period = kTwoPi / fit.frequency;
  fit.visibility = std::hypot(fit.cos_coefficient, fit.sin_coefficient) / fit.offset;
  fit.residual_norm = std::sqrt(2.0 * result.objective / y_norm2);
  return fit;
}

SpiralScan spiral_scan(const TwoPhotonState& state, int ell_min, int ell_max, const ScanOptions& options) {
  check_options(options);
  if (ell_min > ell_max) throw std::invalid_argument("spiral_scan: empty OAM range");
  if (!state.in_range(ell_min) || !state.in_range(ell_max)) {
    throw std::out_of_range("spiral_scan: OAM range exceeds the state support +-" +
                            std::to_string(state.ell_max()));
  }
  SpiralScan out;
  for (int ell = ell_min; ell <= ell_max; ++ell) out.ells.push_back(ell);
  const std::size_t n = out.ells.size();

  double reference = 0.0;
  for (int a : out.ells)
    for (int b : out.ells) reference = std::max(reference, std::norm(state.amplitude(a, b)));
  if (!(reference > 0.0)) throw std::domain_error("spiral_scan: state has no weight in the OAM window");

  ScanResult& scan = out.scan;
  scan.rows.label = "ell_a";
  scan.cols.label = "ell_b";
  for (int ell : out.ells) {
    scan.rows.values.push_back(ell);
    scan.cols.values.push_back(ell);
  }
  scan.metadata = metadata_for("spiral", state, options);
  scan.records.reserve(n * n);
  double diagonal = 0.0;
  double off = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double rate = options.peak_rate * std::norm(state.amplitude(out.ells[r], out.ells[c])) / reference;
      scan.records.push_back(sample_setting(rate, options, r * n + c));
      (out.ells[r] + out.ells[c] == 0 ? diagonal : off) += std::norm(state.amplitude(out.ells[r], out.ells[c]));
    }
  out.crosstalk_ratio = diagonal > 0.0 ? off / diagonal : std::numeric_limits<double>::infinity();

  std::vector<double> xs;
  double total = 0.0;
  for (int ell : out.ells) {
    if (-ell < ell_min || -ell > ell_max) continue;
    xs.push_back(ell);
    out.spectrum.push_back(std::norm(state.amplitude(ell, -ell)));
    total += out.spectrum.back();
  }
  if (!(total > 0.0)) throw std::domain_error("spiral_scan: empty spiral spectrum");
  for (double& v : out.spectrum) v /= total;

  out.fit = fit_gaussian(xs, out.spectrum);
  out.fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0) * out.fit.variance);

  const std::size_t peak =
      static_cast<std::size_t>(std::max_element(out.spectrum.begin(), out.spectrum.end()) - out.spectrum.begin());
  const double half = 0.5 * out.spectrum[peak];
  std::optional<double> left;
  std::optional<double> right;
  for (std::size_t k = peak; k-- > 0;) {
    if (out.spectrum[k] < half) {
      const double t = (half - out.spectrum[k]) / (out.spectrum[k + 1] - out.spectrum[k]);
      left = xs[k] + t * (xs[k + 1] - xs[k]);
      break;
    }
  }
  for (std::size_t k = peak + 1; k < out.spectrum.size(); ++k) {
    if (out.spectrum[k] < half) {
      const double t = (out.spectrum[k - 1] - half) / (out.spectrum[k - 1] - out.spectrum[k]);
      right = xs[k - 1] + t * (xs[k] - xs[k - 1]);
      break;
    }
  }
  if (left && right) out.crossing_fwhm = *right - *left;
  return out;
}

ScanResult angular_scan(const TwoPhotonState& state, double width, std::span<const double> orientations_a,
                        std::span<const double> orientations_b, const ScanOptions& options) {
  check_options(options);
  if (!(width > 0.0) || width > kTwoPi) throw std::invalid_argument("angular_scan: width must lie in (0, 2 pi]");
  if (orientations_a.empty() || orientations_b.empty()) throw std::invalid_argument("angular_scan: no orientations");
  const int lm = state.ell_max();
  std::vector<ComplexVector> ca;
  std::vector<ComplexVector> cb;
  for (double beta : orientations_a) ca.push_back(sector_vector(beta, width, lm));
  for (double beta : orientations_b) cb.push_back(sector_vector(beta, width, lm));

  const std::size_t na = ca.size();
  const std::size_t nb = cb.size();
  Eigen::MatrixXd prob(na, nb);
  for (std::size_t r = 0; r < na; ++r) {
    const ComplexVector left = state.matrix().transpose() * ca[r].conjugate();
    for (std::size_t c = 0; c < nb; ++c) prob(r, c) = std::norm(left.dot(cb[c]));  // dot conjugates cb
  }
  const double reference = prob.maxCoeff();
  if (!(reference > 0.0)) throw std::domain_error("angular_scan: all sector amplitudes vanish");

  ScanResult scan;
  scan.rows.label = "beta_a";
  scan.cols.label = "beta_b";
  scan.rows.values.assign(orientations_a.begin(), orientations_a.end());
  scan.cols.values.assign(orientations_b.begin(), orientations_b.end());
  scan.metadata = metadata_for("angular", state, options);
  scan.records.reserve(na * nb);
  for (std::size_t r = 0; r < na; ++r)
    for (std::size_t c = 0; c < nb; ++c)
      scan.records.push_back(sample_setting(options.peak_rate * prob(r, c) / reference, options, r * nb + c));
  return scan;
}

EprReidResult epr_reid_verdict(double ell_variance, double angle_variance) {
  if (!(ell_variance >= 0.0) || !(angle_variance >= 0.0)) {
    throw std::invalid_argument("epr_reid: variances must be >= 0");
  }
  EprReidResult out;
  out.ell_variance = ell_variance;
  out.angle_variance = angle_variance;
  out.product = ell_variance * angle_variance;
  out.violated = out.product < 0.25;
  return out;
}

double discrete_variance(std::span<const double> xs, std::span<const double> weights) {
  if (xs.size() != weights.size() || xs.empty()) throw std::invalid_argument("discrete_variance: bad input");
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (weights[k] < 0.0) throw std::invalid_argument("discrete_variance: negative weight");
    total += weights[k];
    mean += weights[k] * xs[k];
  }
  if (!(total > 0.0)) throw std::invalid_argument("discrete_variance: zero total weight");
  mean /= total;
  double var = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) var += weights[k] * (xs[k] - mean) * (xs[k] - mean);
  return var / total;
}

EprExperiment run_epr_experiment(const TwoPhotonState& state, double width, int orientations,
                                 const ScanOptions& options) {
  if (orientations < 4) throw std::invalid_argument("run_epr_experiment: need at least 4 orientations");
  const int lm = state.ell_max();
  ScanOptions ell_options = options;
  ell_options.seed = derive_seed(options.seed, 1);
  ScanOptions angle_options = options;
  angle_options.seed = derive_seed(options.seed, 2);

  EprExperiment out;
  const SpiralScan ell_scan = spiral_scan(state, -lm, lm, ell_options);
  for (int ell = -lm; ell <= lm; ++ell) {
    out.ells.push_back(ell);
    out.ell_profile.push_back(static_cast<double>(ell_scan.scan.at(ell + lm, lm).count));
  }
  for (int k = 0; k < orientations; ++k) out.angles.push_back(-kPi + kTwoPi * k / orientations);
  const std::vector<double> zero{0.0};
  const ScanResult angle_scan = angular_scan(state, width, out.angles, zero, angle_options);
  for (std::size_t r = 0; r < out.angles.size(); ++r)
    out.angle_profile.push_back(static_cast<double>(angle_scan.at(r, 0).count));
  out.result = epr_reid(out.ells, out.ell_profile, out.angles, out.angle_profile);
  return out;
}

EprReidResult epr_reid(std::span<const double> ells, std::span<const double> ell_profile,
                       std::span<const double> angles, std::span<const double> angle_profile) {
  auto unit_sum = [](std::span<const double> ys) {
    std::vector<double> out(ys.begin(), ys.end());
    double total = 0.0;
    for (double y : out) total += y;
    if (!(total > 0.0)) throw std::invalid_argument("epr_reid: profile has zero sum");
    for (double& y : out) y /= total;
    return out;
  };
  const std::vector<double> lp = unit_sum(ell_profile);
  const std::vector<double> ap = unit_sum(angle_profile);
  const GaussianFit lf = fit_gaussian(ells, lp);
  const GaussianFit af = fit_gaussian(angles, ap);
  EprReidResult out = epr_reid_verdict(lf.variance, af.variance);
  out.ell_fit = lf;
  out.angle_fit = af;
  out.discrete_ell_variance = discrete_variance(ells, lp);
  out.discrete_angle_variance = discrete_variance(angles, ap);
  return out;
}

BellSettings BellSettings::canonical(int ell) {
  if (ell < 1) throw std::invalid_argument("BellSettings: ell must be >= 1");
  const double l = ell;
  return BellSettings{ell, 0.0, kPi / (4.0 * l), kPi / (8.0 * l), 3.0 * kPi / (8.0 * l)};
}

BellSettings BellSettings::reduced() const {
  validate();
  const double period = kPi / ell;
  auto wrap = [period](double t) {
    double r = std::fmod(t, period);
    return r < 0.0 ? r + period : r;
  };
  return BellSettings{ell, wrap(theta_a), wrap(theta_a_prime), wrap(theta_b), wrap(theta_b_prime)};
}

void BellSettings::validate() const {
  if (ell < 1) throw std::invalid_argument("BellSettings: ell must be >= 1");
  for (double t : {theta_a, theta_a_prime, theta_b, theta_b_prime})
    if (!std::isfinite(t)) throw std::invalid_argument("BellSettings: angles must be finite");
}

double bell_probability(const TwoPhotonState& state, int ell, double theta_a, double theta_b) {
  const int m = std::abs(ell);
  if (m == 0 || !state.in_range(m)) throw std::out_of_range("bell_probability: |ell| outside the state support");
  const int ls[2] = {m, -m};
  const Complex ua[2] = {1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), 2.0 * m * theta_a)};
  const Complex ub[2] = {1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), 2.0 * m * theta_b)};
  Complex amp = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) amp += std::conj(ua[i]) * std::conj(ub[j]) * state.amplitude(ls[i], ls[j]);
  const double sector = std::norm(state.amplitude(m, -m)) + std::norm(state.amplitude(-m, m));
  if (!(sector > 0.0)) throw std::domain_error("bell_probability: state has no weight on |ell,-ell>, |-ell,ell>");
  return 2.0 * std::norm(amp) / sector;
}

ScanResult bell_curve(const TwoPhotonState& state, int ell, double theta_a, std::span<const double> theta_b,
                      const ScanOptions& options) {
  check_options(options);
  ScanResult scan;
  scan.rows.label = "theta_a";
  scan.cols.label = "theta_b";
  scan.rows.values = {theta_a};
  scan.cols.values.assign(theta_b.begin(), theta_b.end());
  scan.metadata = metadata_for("bell_curve", state, options);
  for (std::size_t k = 0; k < theta_b.size(); ++k) {
    const double rate = options.peak_rate * bell_probability(state, ell, theta_a, theta_b[k]);
    scan.records.push_back(sample_setting(rate, options, k));
  }
  return scan;
}

std::array<CoincidenceRecord, 16> bell_counts(const TwoPhotonState& state, const BellSettings& settings,
                                              const ScanOptions& options) {
  settings.validate();
  check_options(options);
  const double shift = kPi / (2.0 * settings.ell);
  const std::array<std::pair<double, double>, 4> terms = {{{settings.theta_a, settings.theta_b},
                                                           {settings.theta_a, settings.theta_b_prime},
                                                           {settings.theta_a_prime, settings.theta_b},
                                                           {settings.theta_a_prime, settings.theta_b_prime}}};
  std::array<CoincidenceRecord, 16> out;
  std::size_t k = 0;
  for (const auto& [x, y] : terms) {
    const std::array<std::pair<double, double>, 4> pattern = {
        {{x, y}, {x + shift, y + shift}, {x + shift, y}, {x, y + shift}}};
    for (const auto& [ta, tb] : pattern) {
      out[k] = sample_setting(options.peak_rate * bell_probability(state, settings.ell, ta, tb), options, k);
      ++k;
    }
  }
  return out;
}

BellResult bell_parameter(std::span<const double, 16> counts, const BellSettings& settings) {
  settings.validate();
  BellResult out;
  double var = 0.0;
  for (int t = 0; t < 4; ++t) {
    for (int j = 0; j < 4; ++j)
      if (!(counts[4 * t + j] >= 0.0)) throw std::invalid_argument("bell_parameter: counts must be >= 0");
    const double same = counts[4 * t] + counts[4 * t + 1];
    const double crossed = counts[4 * t + 2] + counts[4 * t + 3];
    const double total = same + crossed;
    if (!(total > 0.0)) {
      throw std::domain_error("bell_parameter: E term " + std::to_string(t) + " has a zero denominator");
    }
    out.correlations[t] = (same - crossed) / total;
    const double v = 4.0 * same * crossed / (total * total * total);
    out.correlation_sigmas[t] = std::sqrt(v);
    var += v;
  }
  const auto& e = out.correlations;
  out.s = e[0] - e[1] + e[2] + e[3];
  out.sigma = std::sqrt(var);
  return out;
}

BellResult bell_parameter(const std::array<CoincidenceRecord, 16>& records, const BellSettings& settings) {
  std::array<double, 16> counts;
  for (std::size_t k = 0; k < 16; ++k) counts[k] = static_cast<double>(records[k].count);
  return bell_parameter(std::span<const double, 16>(counts), settings);
}

std::vector<ProjectorState> tomography_states(const std::vector<int>& ells) {
  const int d = static_cast<int>(ells.size());
  if (d < 2 || d > 5) throw std::invalid_argument("tomography_states: d must lie in [2, 5]");
  if (std::set<int>(ells.begin(), ells.end()).size() != ells.size()) {
    throw std::invalid_argument("tomography_states: duplicate OAM values");
  }
  static const char* kPhaseLabels[4] = {"+", "+i", "-", "-i"};
  std::vector<ProjectorState> states;
  states.reserve(static_cast<std::size_t>(2 * d * d - d));
  for (int i = 0; i < d; ++i) {
    ProjectorState s{ells, ComplexVector::Zero(d), "|" + std::to_string(ells[i]) + ">"};
    s.coeffs(i) = 1.0;
    states.push_back(std::move(s));
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int q = 0; q < 4; ++q) {
        ProjectorState s{ells, ComplexVector::Zero(d),
                         "|" + std::to_string(ells[i]) + ">" + kPhaseLabels[q] + "|" + std::to_string(ells[j]) + ">"};
        s.coeffs(i) = 1.0 / std::sqrt(2.0);
        s.coeffs(j) = std::polar(1.0 / std::sqrt(2.0), 0.5 * kPi * q);
        states.push_back(std::move(s));
      }
  return states;
}

std::vector<MeasurementSetting> tomography_settings(const std::vector<int>& ells) {
  const std::vector<ProjectorState> states = tomography_states(ells);
  std::vector<MeasurementSetting> settings;
  settings.reserve(states.size() * states.size());
  for (const ProjectorState& a : states)
    for (const ProjectorState& b : states) settings.push_back(MeasurementSetting{settings.size(), a, b});
  return settings;
}

double flux_for_mean_count(const DensityMatrix& rho, std::span<const MeasurementSetting> settings,
                           double mean_count) {
  if (settings.empty()) throw std::invalid_argument("flux_for_mean_count: no settings");
  if (!(mean_count >= 0.0)) throw std::invalid_argument("flux_for_mean_count: mean count must be >= 0");
  double total = 0.0;
  for (const MeasurementSetting& s : settings) total += predicted_counts(rho, s, 1.0);
  if (!(total > 0.0)) throw std::domain_error("flux_for_mean_count: state is orthogonal to every setting");
  return mean_count * static_cast<double>(settings.size()) / total;
}

std::vector<CoincidenceRecord> run_tomography_experiment(const DensityMatrix& rho,
                                                         std::span<const MeasurementSetting> settings,
                                                         double flux, const DetectorConfig& detector,
                                                         std::uint64_t seed) {
  if (!(flux >= 0.0)) throw std::invalid_argument("run_tomography_experiment: flux must be >= 0");
  detector.validate();
  std::vector<CoincidenceRecord> records;
  records.reserve(settings.size());
  for (std::size_t k = 0; k < settings.size(); ++k) {
    CoincidenceRecord rec = sample_counts(predicted_counts(rho, settings[k], flux), detector, derive_seed(seed, k));
    rec.setting_id = settings[k].index;
    records.push_back(rec);
  }
  return records;
}

DensityMatrix restrict_state(const TwoPhotonState& state, const std::vector<int>& ells) {
  const int d = static_cast<int>(ells.size());
  if (d < 1) throw std::invalid_argument("restrict_state: empty basis");
  ComplexVector psi(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) psi(i * d + j) = state.amplitude(ells[i], ells[j]);
  if (!(psi.norm() > 0.0)) throw std::domain_error("restrict_state: state has no weight in the basis");
  return DensityMatrix::pure(d, psi);
}

}  // namespace oamsim
