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

#include "oamsim/source.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace oamsim {

CrystalConfig CrystalConfig::degenerate(double pump_wavelength, double length, double refractive_index,
                                        double alpha, double focal_length) {
  CrystalConfig c;
  c.pump_wavelength = pump_wavelength;
  c.signal_wavelength = 2.0 * pump_wavelength;
  c.idler_wavelength = 2.0 * pump_wavelength;
  c.length = length;
  c.refractive_index = refractive_index;
  c.alpha = alpha;
  c.focal_length = focal_length;
  c.validate();
  return c;
}

double CrystalConfig::a() const {
  const double ks = kTwoPi * refractive_index / signal_wavelength;
  const double ki = kTwoPi * refractive_index / idler_wavelength;
  return (ks + ki) * length / (4.0 * refractive_index * refractive_index);
}

void CrystalConfig::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("CrystalConfig: length must be positive");
  if (!(refractive_index > 0.0)) throw std::invalid_argument("CrystalConfig: refractive index must be positive");
  if (!(pump_wavelength > 0.0) || !(signal_wavelength > 0.0) || !(idler_wavelength > 0.0)) {
    throw std::invalid_argument("CrystalConfig: wavelengths must be positive");
  }
  if (!(focal_length > 0.0)) throw std::invalid_argument("CrystalConfig: focal length must be positive");
  if (!std::isfinite(alpha)) throw std::invalid_argument("CrystalConfig: alpha must be finite");
}

PumpSpec PumpSpec::gaussian(double waist, double wavelength) {
  return PumpSpec{ModeSpec::laguerre_gauss(0, 0, BeamGeometry(wavelength, waist))};
}

TwoPhotonState::TwoPhotonState(int ell_max, ComplexMatrix amplitudes, bool conserving)
    : ell_max_(ell_max), amplitudes_(std::move(amplitudes)), conserving_(conserving) {
  const double total = amplitudes_.squaredNorm();
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("TwoPhotonState: probabilities sum to " + std::to_string(total));
  }
}

TwoPhotonState TwoPhotonState::from_coefficients(int ell_max, const std::vector<Complex>& coefficients) {
  if (ell_max < 0) throw std::invalid_argument("TwoPhotonState: ell_max must be >= 0");
  const int n = 2 * ell_max + 1;
  if (static_cast<int>(coefficients.size()) != n) {
    throw std::invalid_argument("TwoPhotonState: expected " + std::to_string(n) + " coefficients");
  }
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, n - 1 - k) = coefficients[k];  // row ell, column -ell
  const double norm = m.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("TwoPhotonState: zero state");
  return TwoPhotonState(ell_max, m / norm, true);
}

TwoPhotonState TwoPhotonState::from_matrix(int ell_max, const ComplexMatrix& amplitudes) {
  const int n = 2 * ell_max + 1;
  if (ell_max < 0 || amplitudes.rows() != n || amplitudes.cols() != n) {
    throw std::invalid_argument("TwoPhotonState: matrix shape does not match ell_max");
  }
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("TwoPhotonState: zero state");
  bool conserving = true;
  for (int r = 0; r < n && conserving; ++r)
    for (int c = 0; c < n; ++c)
      if (c != n - 1 - r && amplitudes(r, c) != 0.0) {
        conserving = false;
        break;
      }
  return TwoPhotonState(ell_max, amplitudes / norm, conserving);
}

TwoPhotonState TwoPhotonState::bell(int ell) {
  const int m = std::abs(ell);
  if (m == 0) throw std::invalid_argument("TwoPhotonState::bell: ell must be non-zero");
  std::vector<Complex> c(2 * m + 1, 0.0);
  c.front() = 1.0;
  c.back() = 1.0;
  return from_coefficients(m, c);
}

Complex TwoPhotonState::amplitude(int ell_s, int ell_i) const {
  if (!in_range(ell_s) || !in_range(ell_i)) return 0.0;
  return amplitudes_(ell_s + ell_max_, ell_i + ell_max_);
}

std::vector<double> TwoPhotonState::spectrum() const {
  std::vector<double> out;
  out.reserve(dimension());
  for (int ell = -ell_max_; ell <= ell_max_; ++ell) out.push_back(std::norm(coefficient(ell)));
  return out;
}

void DetectorConfig::validate() const {
  if (!(singles_a >= 0.0) || !(singles_b >= 0.0)) throw std::invalid_argument("DetectorConfig: negative singles");
  if (!(gate_time > 0.0)) throw std::invalid_argument("DetectorConfig: gate time must be positive");
  if (!(dark_rate >= 0.0)) throw std::invalid_argument("DetectorConfig: negative dark rate");
  if (!(integration_time >= 0.0)) throw std::invalid_argument("DetectorConfig: negative integration time");
  if (!(efficiency > 0.0) || efficiency > 1.0) {
    throw std::invalid_argument("DetectorConfig: efficiency must lie in (0, 1]");
  }
}

Complex coincidence_amplitude(const ModeSpec& signal, const ModeSpec& idler, const PumpSpec& pump,
                              const PolarGrid& grid) {
  Complex overlap = 0.0;
  double norm_s = 0.0;
  double norm_i = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid.r(k);
    const double phi = grid.phi(k);
    const double w = grid.weight(k);
    const Complex s = mode_amplitude(signal, r, phi);
    const Complex i = mode_amplitude(idler, r, phi);
    const Complex p = mode_amplitude(pump.mode, r, phi);
    overlap += std::conj(s) * std::conj(i) * p * w;
    const double pp = std::norm(p);
    norm_s += std::norm(s) * pp * w;
    norm_i += std::norm(i) * pp * w;
  }
  if (!(norm_s > 0.0) || !(norm_i > 0.0)) {
    throw std::domain_error("coincidence_amplitude: zero-norm denominator (degenerate mode choice)");
  }
  return overlap / std::sqrt(std::sqrt(norm_s * norm_i));
}

TwoPhotonState build_state(const PumpSpec& pump, double gamma, int ell_max, const PolarGrid& grid,
                           const BuildOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("build_state: gamma must be positive");
  if (ell_max < 0 || ell_max > kMaxStateEll) {
    throw std::out_of_range("build_state: ell_max must lie in [0, " + std::to_string(kMaxStateEll) + "]");
  }
  const int n = 2 * ell_max + 1;
  const BeamGeometry geometry(pump.mode.geometry.wavelength * 2.0, pump.waist() / gamma);
  const bool offset = options.offset_x != 0.0 || options.offset_y != 0.0;
  const bool full = options.full_matrix || offset;

  const Eigen::Index nodes = static_cast<Eigen::Index>(grid.size());
  const ComplexVector pump_field = sample_mode(pump.mode, grid);
  RealVector weights(nodes);
  for (Eigen::Index k = 0; k < nodes; ++k) weights(k) = grid.weight(static_cast<std::size_t>(k));

  // Columns are LG(0, ell) for ell = -ell_max .. ell_max.
  ComplexMatrix signal(nodes, n);
  ComplexMatrix idler(nodes, n);
  for (int c = 0; c < n; ++c) {
    const int ell = c - ell_max;
    const ModeSpec mode = ModeSpec::laguerre_gauss(ell, 0, geometry);
    idler.col(c) = sample_mode(mode, grid);
    signal.col(c) = offset ? sample_mode(mode.with_offset(options.offset_x, options.offset_y), grid)
                           : ComplexVector(idler.col(c));
  }

  const ComplexVector weighted_pump = weights.cast<Complex>().cwiseProduct(pump_field);
  const RealVector pump_intensity = weights.cwiseProduct(pump_field.cwiseAbs2());
  const RealVector norm_s = signal.cwiseAbs2().transpose() * pump_intensity;
  const RealVector norm_i = idler.cwiseAbs2().transpose() * pump_intensity;

  ComplexMatrix amplitudes = ComplexMatrix::Zero(n, n);
  if (full) {
    amplitudes = signal.adjoint() * (weighted_pump.asDiagonal() * idler.conjugate());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) amplitudes(r, c) /= std::sqrt(std::sqrt(norm_s(r) * norm_i(c)));
  } else {
    for (int r = 0; r < n; ++r) {
      const int c = n - 1 - r;
      const Complex overlap = (signal.col(r).conjugate().cwiseProduct(idler.col(c).conjugate()))
                                  .cwiseProduct(weighted_pump)
                                  .sum();
      amplitudes(r, c) = overlap / std::sqrt(std::sqrt(norm_s(r) * norm_i(c)));
    }
  }
  return TwoPhotonState::from_matrix(ell_max, amplitudes);
}

double sinc_ring_profile(double r, const CrystalConfig& config) {
  if (r < 0.0) throw std::invalid_argument("sinc_ring_profile: r must be >= 0");
  const double s = sinc(config.a() * r * r / (config.focal_length * config.focal_length) + config.alpha);
  return s * s;
}

double ring_peak_radius(const CrystalConfig& config) {
  if (config.alpha >= 0.0) return 0.0;
  return config.focal_length * std::sqrt(-config.alpha / config.a());
}

double etendue_mode_count(double area, double solid_angle, double wavelength) {
  if (!(area > 0.0) || !(solid_angle > 0.0) || !(wavelength > 0.0)) {
    throw std::invalid_argument("etendue_mode_count: arguments must be positive");
  }
  return area * solid_angle / (wavelength * wavelength);
}

double accidentals(const DetectorConfig& det) {
  return (det.singles_a + det.dark_rate) * (det.singles_b + det.dark_rate) * det.gate_time;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CoincidenceRecord sample_counts(double ideal_rate, const DetectorConfig& det, std::uint64_t seed) {
  if (!(ideal_rate >= 0.0)) throw std::invalid_argument("sample_counts: rate must be >= 0");
  CoincidenceRecord rec;
  rec.ideal_rate = ideal_rate;
  rec.accidentals = accidentals(det) * det.integration_time;
  rec.mean = (det.efficiency * det.efficiency * ideal_rate) * det.integration_time + rec.accidentals;
  if (rec.mean > 0.0) {
    std::mt19937_64 rng(seed);
    std::poisson_distribution<std::uint64_t> poisson(rec.mean);
    rec.count = poisson(rng);
  }
  return rec;
}

}  // namespace oamsim
