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

#ifndef OAMSIM_MODES_HPP
#define OAMSIM_MODES_HPP

#include <functional>
#include <map>

#include "oamsim/numerics.hpp"

namespace oamsim {

/// Gaussian-beam geometry. Lengths share one unit (the tests use waist units).
struct BeamGeometry {
  double wavelength = 1.0;
  double waist = 1.0;
  double z = 0.0;

  BeamGeometry() = default;
  BeamGeometry(double wavelength, double waist, double z = 0.0);

  double rayleigh_range() const;
  double width() const;  // w(z)
  double gouy_phase() const;
  double wavenumber() const;
};

enum class ModeFamily { kLaguerreGauss, kBesselGauss, kSuperposition, kSector, kCustom };

/// Immutable description of a transverse mode. Build instances with the
/// factory functions; they validate parameters and precompute normalization.
struct ModeSpec {
  ModeFamily family = ModeFamily::kLaguerreGauss;
  int ell = 0;
  int p = 0;
  double radial_wavenumber = 0.0;  // Bessel-Gauss k_r
  double bloch_theta = 0.0;
  double bloch_phi = 0.0;
  double orientation = 0.0;  // sector centre
  double width = kTwoPi;     // sector opening angle
  BeamGeometry geometry;
  double offset_x = 0.0;
  double offset_y = 0.0;
  double norm = 1.0;  // multiplies the raw field
  std::function<Complex(double r, double phi)> custom;

  static ModeSpec laguerre_gauss(int ell, int p, const BeamGeometry& geometry);
  static ModeSpec bessel_gauss(int ell, double radial_wavenumber, const BeamGeometry& geometry);
  /// cos(theta/2) |+ell> + e^{i phi} sin(theta/2) |-ell>, both LG with p = 0.
  static ModeSpec superposition(int ell, double theta, double phi, const BeamGeometry& geometry);
  /// Equatorial superposition of LG(+ell) and LG(-ell) rotated by `rotation`:
  /// relative phase 2 ell rotation, the hologram of a rotated 2|ell|-petal
  /// pattern.
  static ModeSpec rotated_superposition(int ell, double rotation, const BeamGeometry& geometry);
  /// Angular wedge |phi - orientation| < width / 2 on a fundamental Gaussian.
  static ModeSpec sector(double orientation, double width, const BeamGeometry& geometry);
  /// Arbitrary field; the caller is responsible for its normalization.
  static ModeSpec custom_field(std::function<Complex(double r, double phi)> field, const BeamGeometry& geometry);

  ModeSpec with_offset(double dx, double dy) const;
};

Complex lg_amplitude(const ModeSpec& spec, double r, double phi);
Complex bg_amplitude(const ModeSpec& spec, double r, double phi);
Complex superposition_amplitude(const ModeSpec& spec, double r, double phi);
Complex sector_amplitude(const ModeSpec& spec, double r, double phi);

/// Dispatches on the family; applies the lateral offset.
Complex mode_amplitude(const ModeSpec& spec, double r, double phi);

/// Mode values at every grid node, in grid order.
ComplexVector sample_mode(const ModeSpec& spec, const PolarGrid& grid);

/// Fourier coefficients of the wedge indicator: c_ell = (width / 2pi)
/// sinc(ell width / 2) e^{-i ell orientation}.
using SectorCoefficients = std::map<int, Complex>;
SectorCoefficients sector_coefficients(double orientation, double width, int ell_min, int ell_max);

/// <a|b> = integral of conj(u_a) u_b over the grid.
Complex mode_overlap(const ModeSpec& a, const ModeSpec& b, const PolarGrid& grid);

/// Grid sized for the given largest waist: r_max = factor * waist.
PolarGrid default_grid(double largest_waist, int n_r = 256, int n_phi = 256, double r_max_factor = 6.0);

}  // namespace oamsim

#endif  // OAMSIM_MODES_HPP
