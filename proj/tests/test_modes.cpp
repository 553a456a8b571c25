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

#include "oamsim/modes.hpp"

using namespace oamsim;

namespace {

const BeamGeometry kUnit(1.0, 1.0);

}  // namespace

TEST_CASE("laguerre_gauss amplitude and norm") {
  const ModeSpec lg2 = ModeSpec::laguerre_gauss(2, 0, kUnit);
  CHECK(std::abs(lg_amplitude(lg2, 0.0, 0.3)) == 0.0);
  const PolarGrid grid = default_grid(1.0);
  const ModeSpec lg03 = ModeSpec::laguerre_gauss(3, 0, kUnit);
  const Complex n = integrate_polar([&](double r, double phi) { return Complex(std::norm(mode_amplitude(lg03, r, phi))); }, grid);
  CHECK(std::abs(n - Complex(1.0)) < 1e-6);
  // Phase winds as e^{i ell phi}.
  const Complex a = lg_amplitude(lg03, 0.8, 0.0);
  const Complex b = lg_amplitude(lg03, 0.8, 0.4);
  CHECK(std::abs(b / a - std::polar(1.0, 1.2)) < 1e-12);
}

TEST_CASE("LG Gram matrix is the identity") {
  const PolarGrid grid = default_grid(1.0);
  for (int p : {0, 1})
    for (int l1 = -5; l1 <= 5; ++l1)
      for (int l2 = -5; l2 <= 5; ++l2) {
        const Complex g = mode_overlap(ModeSpec::laguerre_gauss(l1, p, kUnit), ModeSpec::laguerre_gauss(l2, p, kUnit), grid);
        CHECK(std::abs(g - Complex(l1 == l2 ? 1.0 : 0.0)) < 1e-6);
      }
  const Complex radial = mode_overlap(ModeSpec::laguerre_gauss(1, 0, kUnit), ModeSpec::laguerre_gauss(1, 1, kUnit), grid);
  CHECK(std::abs(radial) < 1e-6);
}

TEST_CASE("bessel_gauss") {
  const ModeSpec bg1 = ModeSpec::bessel_gauss(1, 2.0, kUnit);
  const ModeSpec bg0 = ModeSpec::bessel_gauss(0, 2.0, kUnit);
  CHECK(std::abs(bg_amplitude(bg1, 0.0, 0.0)) == 0.0);
  const Complex centre = bg_amplitude(bg0, 0.0, 0.0);
  for (double r : {0.1, 0.5, 1.0, 2.0}) CHECK(std::abs(bg_amplitude(bg0, r, 0.0)) < std::abs(centre));
  const PolarGrid grid = default_grid(1.0);
  CHECK(std::abs(mode_overlap(bg0, bg1, grid)) < 1e-10);
  CHECK(std::abs(mode_overlap(bg1, bg1, grid) - Complex(1.0)) < 1e-6);
}

TEST_CASE("superposition modes") {
  const ModeSpec pole = ModeSpec::superposition(2, 0.0, 0.0, kUnit);
  const ModeSpec lg = ModeSpec::laguerre_gauss(2, 0, kUnit);
  for (double phi : {0.0, 1.0, 2.5})
    CHECK(std::abs(superposition_amplitude(pole, 0.9, phi) - lg_amplitude(lg, 0.9, phi)) < 1e-12);
  const PolarGrid grid = default_grid(1.0);
  const ModeSpec eq = ModeSpec::superposition(2, kPi / 2.0, 0.0, kUnit);
  CHECK(std::abs(mode_overlap(eq, eq, grid) - Complex(1.0)) < 1e-6);
  CHECK(std::norm(mode_overlap(lg, eq, grid)) == doctest::Approx(0.5).epsilon(1e-6));
  // A rotation by theta of the petal pattern equals a 2 ell theta relative phase.
  const ModeSpec rot = ModeSpec::rotated_superposition(2, 0.3, kUnit);
  CHECK(std::abs(superposition_amplitude(rot, 0.9, 1.1)) ==
        doctest::Approx(std::abs(mode_amplitude(ModeSpec::rotated_superposition(2, 0.0, kUnit), 0.9, 1.1 - 0.3))));
}

TEST_CASE("sector_coefficients") {
  const SectorCoefficients full = sector_coefficients(0.4, kTwoPi, -4, 4);
  for (const auto& [ell, c] : full) CHECK(std::abs(c - Complex(ell == 0 ? 1.0 : 0.0)) < 1e-12);
  const SectorCoefficients s = sector_coefficients(0.3, kPi / 4.0, -3, 3);
  CHECK(std::abs(s.at(0) - Complex(0.125)) < 1e-15);
  CHECK(std::abs(s.at(2) - 0.125 * sinc(kPi / 4.0) * std::polar(1.0, -0.6)) < 1e-15);
  CHECK(std::abs(s.at(-2) - std::conj(s.at(2))) < 1e-15);
}

TEST_CASE("sector amplitude is a wedge") {
  const ModeSpec wedge = ModeSpec::sector(0.5, kPi / 4.0, kUnit);
  CHECK(std::abs(sector_amplitude(wedge, 0.5, 0.5)) > 0.0);
  CHECK(std::abs(sector_amplitude(wedge, 0.5, 0.5 + kPi / 4.0)) == 0.0);
}

TEST_CASE("offset modes break orthogonality") {
  const PolarGrid grid = default_grid(1.0);
  const ModeSpec g0 = ModeSpec::laguerre_gauss(0, 0, kUnit);
  const ModeSpec l1 = ModeSpec::laguerre_gauss(1, 0, kUnit);
  CHECK(std::abs(mode_overlap(g0, l1, grid)) < 1e-10);
  CHECK(std::abs(mode_overlap(g0.with_offset(0.3, 0.0), l1, grid)) > 1e-2);
}

TEST_CASE("mode factories validate") {
  CHECK_THROWS(ModeSpec::laguerre_gauss(0, -1, kUnit));
  CHECK_THROWS(ModeSpec::sector(0.0, 0.0, kUnit));
  CHECK_THROWS(BeamGeometry(1.0, -1.0));
  CHECK(sample_mode(ModeSpec::laguerre_gauss(1, 0, kUnit), PolarGrid(4.0, 8, 12)).size() == 96);
}
