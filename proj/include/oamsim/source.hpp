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

#ifndef OAMSIM_SOURCE_HPP
#define OAMSIM_SOURCE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "oamsim/modes.hpp"
#include "oamsim/numerics.hpp"

namespace oamsim {

/// Nonlinear crystal and far-field imaging parameters. Any consistent length
/// unit works; the far-field profile only uses dimensionless combinations.
struct CrystalConfig {
  double length = 3e-3;
  double refractive_index = 1.66;
  double alpha = 0.0;  // phase mismatch; negative values open a ring
  double pump_wavelength = 355e-9;
  double signal_wavelength = 710e-9;
  double idler_wavelength = 710e-9;
  double focal_length = 0.2;

  static CrystalConfig degenerate(double pump_wavelength, double length, double refractive_index, double alpha,
                                  double focal_length);

  /// (|k_s| + |k_i|) L / (4 n^2), with in-medium wavenumbers 2 pi n / lambda.
  double a() const;
  void validate() const;
};

struct PumpSpec {
  ModeSpec mode;

  static PumpSpec gaussian(double waist, double wavelength = 1.0);
  double waist() const { return mode.geometry.waist; }
};

/// Joint OAM amplitudes sum over (ell_s, ell_i) of A(ell_s, ell_i) |ell_s>|ell_i>
/// on ell in [-ell_max, ell_max]. A conserving state has support only on
/// ell_i = -ell_s. Normalized to unit probability.
class TwoPhotonState {
 public:
  static TwoPhotonState from_coefficients(int ell_max, const std::vector<Complex>& coefficients);
  static TwoPhotonState from_matrix(int ell_max, const ComplexMatrix& amplitudes);
  /// (|ell,-ell> + |-ell,ell>) / sqrt 2.
  static TwoPhotonState bell(int ell);

  int ell_max() const { return ell_max_; }
  int dimension() const { return 2 * ell_max_ + 1; }
  bool conserving() const { return conserving_; }
  bool in_range(int ell) const { return ell >= -ell_max_ && ell <= ell_max_; }

  Complex amplitude(int ell_s, int ell_i) const;
  /// a_ell = A(ell, -ell).
  Complex coefficient(int ell) const { return amplitude(ell, -ell); }
  /// |a_ell|^2 for ell = -ell_max .. ell_max.
  std::vector<double> spectrum() const;
  const ComplexMatrix& matrix() const { return amplitudes_; }

 private:
  TwoPhotonState(int ell_max, ComplexMatrix amplitudes, bool conserving);
  int ell_max_ = 0;
  ComplexMatrix amplitudes_;
  bool conserving_ = true;
};

struct DetectorConfig {
  double singles_a = 0.0;  // counts / s
  double singles_b = 0.0;
  double gate_time = 12.5e-9;  // s
  double dark_rate = 0.0;      // counts / s, added to each detector's singles
  double integration_time = 1.0;
  double efficiency = 1.0;

  void validate() const;
};

struct CoincidenceRecord {
  std::size_t setting_id = 0;
  double ideal_rate = 0.0;   // counts / s before detection losses
  double mean = 0.0;         // expected counts in the integration window
  std::uint64_t count = 0;   // sampled
  double accidentals = 0.0;  // expected accidental counts in the window
};

/// Normalized overlap: integral conj(s) conj(i) p dA over the fourth roots
/// of integral |s p|^2 dA and integral |i p|^2 dA. Its modulus squared is
/// the relative coincidence rate. Throws std::domain_error on a zero
/// denominator.
Complex coincidence_amplitude(const ModeSpec& signal, const ModeSpec& idler, const PumpSpec& pump,
                              const PolarGrid& grid);

struct BuildOptions {
  // Lateral offset of the arm-A (signal) projector, in the same length unit
  // as the pump waist.
  double offset_x = 0.0;
  double offset_y = 0.0;
  // Record every (ell_s, ell_i) amplitude, not just the anti-diagonal.
  bool full_matrix = false;
};

inline constexpr int kMaxStateEll = 20;

/// SPDC state projected on p = 0 LG modes of waist w_p / gamma.
TwoPhotonState build_state(const PumpSpec& pump, double gamma, int ell_max, const PolarGrid& grid,
                           const BuildOptions& options = {});

/// sinc^2(a r^2 / f^2 + alpha).
double sinc_ring_profile(double r, const CrystalConfig& config);

/// Radius of peak far-field intensity: f sqrt(-alpha / a) for alpha < 0, else 0.
double ring_peak_radius(const CrystalConfig& config);

/// N = A Omega / lambda^2.
double etendue_mode_count(double area, double solid_angle, double wavelength);

/// Accidental coincidence rate S1 S2 dt, with dark counts included in S1, S2.
double accidentals(const DetectorConfig& det);

/// Per-setting stream seed; splitmix64 of (seed, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Poisson draw with mean (efficiency^2 rate + accidentals) * integration.
CoincidenceRecord sample_counts(double ideal_rate, const DetectorConfig& det, std::uint64_t seed);

}  // namespace oamsim

#endif  // OAMSIM_SOURCE_HPP
