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
#include <numeric>

#include "oamsim/source.hpp"

using namespace oamsim;

namespace {

const BeamGeometry kSignal(1.0, 0.5);

}  // namespace

TEST_CASE("coincidence_amplitude selection rule and symmetry") {
  const PumpSpec pump = PumpSpec::gaussian(1.0);
  const PolarGrid grid = default_grid(1.0);
  const Complex forbidden = coincidence_amplitude(ModeSpec::laguerre_gauss(1, 0, kSignal),
                                                  ModeSpec::laguerre_gauss(-2, 0, kSignal), pump, grid);
  CHECK(std::abs(forbidden) < 1e-10);
  const Complex plus = coincidence_amplitude(ModeSpec::laguerre_gauss(3, 0, kSignal),
                                             ModeSpec::laguerre_gauss(-3, 0, kSignal), pump, grid);
  const Complex minus = coincidence_amplitude(ModeSpec::laguerre_gauss(-3, 0, kSignal),
                                              ModeSpec::laguerre_gauss(3, 0, kSignal), pump, grid);
  CHECK(std::abs(plus) > 1e-3);
  CHECK(std::abs(plus) == doctest::Approx(std::abs(minus)).epsilon(1e-12));
}

TEST_CASE("gamma = 1 peaks at ell = 0") {
  const PumpSpec pump = PumpSpec::gaussian(1.0);
  const TwoPhotonState s = build_state(pump, 1.0, 6, default_grid(1.0));
  const std::vector<double> spec = s.spectrum();
  const auto peak = std::max_element(spec.begin(), spec.end()) - spec.begin();
  CHECK(peak == 6);
  for (int k = 0; k < 6; ++k) CHECK(spec[k] < spec[k + 1]);
}

TEST_CASE("build_state invariants") {
  const PumpSpec pump = PumpSpec::gaussian(1.0);
  const TwoPhotonState s = build_state(pump, 2.0, 5, default_grid(1.0));
  CHECK(s.conserving());
  CHECK(s.dimension() == 11);
  const std::vector<double> spec = s.spectrum();
  CHECK(std::accumulate(spec.begin(), spec.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int ell = 1; ell <= 5; ++ell) CHECK(spec[5 + ell] == doctest::Approx(spec[5 - ell]).epsilon(1e-10));
  CHECK(std::abs(s.amplitude(1, 1)) == 0.0);

  BuildOptions off;
  off.offset_x = 0.1;
  off.full_matrix = true;
  const TwoPhotonState t = build_state(pump, 2.0, 5, default_grid(1.0), off);
  CHECK_FALSE(t.conserving());
  CHECK(std::abs(t.amplitude(1, 0)) > 1e-4);
  CHECK_THROWS(build_state(pump, 2.0, kMaxStateEll + 1, default_grid(1.0)));
}

TEST_CASE("TwoPhotonState factories") {
  const TwoPhotonState b = TwoPhotonState::bell(2);
  CHECK(std::abs(b.coefficient(2) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(b.coefficient(-2) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(b.coefficient(0)) == 0.0);
  CHECK_THROWS(TwoPhotonState::from_coefficients(1, {Complex(1.0)}));
}

TEST_CASE("sinc_ring_profile and ring radius") {
  CrystalConfig c;
  CHECK(sinc_ring_profile(0.0, c) == doctest::Approx(1.0));
  const double null = c.focal_length * std::sqrt(kPi / c.a());
  CHECK(sinc_ring_profile(null, c) < 1e-20);
  CHECK(ring_peak_radius(c) == 0.0);
  c.alpha = -2.0;
  const double peak = ring_peak_radius(c);
  CHECK(peak == doctest::Approx(c.focal_length * std::sqrt(2.0 / c.a())));
  CHECK(sinc_ring_profile(peak, c) == doctest::Approx(1.0));
  CHECK(sinc_ring_profile(0.0, c) < 1.0);
  // a = (|k_s| + |k_i|) L / (4 n^2) with degenerate 710 nm photons.
  const CrystalConfig d;
  CHECK(d.a() == doctest::Approx(2.0 * kTwoPi * 1.66 / 710e-9 * 3e-3 / (4.0 * 1.66 * 1.66)));
}

TEST_CASE("etendue_mode_count") {
  CHECK(etendue_mode_count(1e-12, 1.0, 1e-6) == doctest::Approx(1.0));
  CHECK(etendue_mode_count(1e-6, 1e-6, 710e-9) == doctest::Approx(1.98).epsilon(0.005));
  CHECK_THROWS(etendue_mode_count(1.0, 1.0, 0.0));
}

TEST_CASE("accidentals") {
  DetectorConfig det;
  det.singles_a = det.singles_b = 200.0;
  det.gate_time = 12.5e-9;
  CHECK(accidentals(det) == doctest::Approx(5e-4));
  det.gate_time = 0.0;
  CHECK(accidentals(det) == 0.0);
}

TEST_CASE("sample_counts") {
  DetectorConfig det;
  const CoincidenceRecord zero = sample_counts(0.0, det, 1);
  CHECK(zero.count == 0);
  CHECK(zero.mean == 0.0);
  const CoincidenceRecord a = sample_counts(1e4, det, 42);
  const CoincidenceRecord b = sample_counts(1e4, det, 42);
  CHECK(a.count == b.count);
  CHECK(a.mean == b.mean);
  CHECK(std::abs(static_cast<double>(a.count) - 1e4) < 600.0);
  CHECK(derive_seed(7, 1) != derive_seed(7, 2));
  CHECK(derive_seed(7, 1) == derive_seed(7, 1));
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 400; ++k) sum += static_cast<double>(sample_counts(50.0, det, derive_seed(3, k)).count);
  CHECK(sum / 400.0 == doctest::Approx(50.0).epsilon(0.05));
  CHECK_THROWS(sample_counts(-1.0, det, 0));
}
