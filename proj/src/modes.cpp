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

#include "oamsim/modes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace oamsim {

namespace {

void require_family(const ModeSpec& spec, ModeFamily family, const char* what) {
  if (spec.family != family) throw std::invalid_argument(std::string(what) + ": wrong mode family");
}

Complex scaled_phase(double magnitude, double phase) {
  return magnitude * Complex(std::cos(phase), std::sin(phase));
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a - kPi;
}

// LG_{p,ell} at the mode's own origin (no offset).
Complex lg_centered(int ell, int p, const BeamGeometry& g, double r, double phi) {
  const int m = std::abs(ell);
  const double w = g.width();
  const double x = 2.0 * r * r / (w * w);
  const double lag = laguerre(p, static_cast<double>(m), x);
  double radial = 0.0;
  if (lag != 0.0 && (m == 0 || r > 0.0)) {
    // log of sqrt(2 p! / (pi (p+m)!)) / w * (sqrt2 r / w)^m * exp(-r^2/w^2)
    double log_mag = 0.5 * (std::log(2.0) + std::lgamma(p + 1.0) - std::log(kPi) - std::lgamma(p + m + 1.0)) -
                     std::log(w) - r * r / (w * w);
    if (m > 0) log_mag += m * std::log(std::sqrt(2.0) * r / w);
    radial = std::exp(log_mag) * lag;
  }
  if (radial == 0.0) return 0.0;
  double phase = ell * phi - (2.0 * p + m + 1.0) * g.gouy_phase();
  if (g.z != 0.0) {
    const double zr = g.rayleigh_range();
    phase += g.wavenumber() * r * r * g.z / (2.0 * (g.z * g.z + zr * zr));
  }
  return scaled_phase(radial, phase);
}

Complex dispatch(const ModeSpec& spec, double r, double phi) {
  switch (spec.family) {
    case ModeFamily::kLaguerreGauss:
      return lg_centered(spec.ell, spec.p, spec.geometry, r, phi);
    case ModeFamily::kBesselGauss: {
      const double w0 = spec.geometry.waist;
      const double radial = bessel_j(spec.ell, spec.radial_wavenumber * r) * std::exp(-r * r / (w0 * w0));
      return spec.norm * scaled_phase(radial, spec.ell * phi);
    }
    case ModeFamily::kSuperposition: {
      const Complex plus = lg_centered(spec.ell, 0, spec.geometry, r, phi);
      const Complex minus = lg_centered(-spec.ell, 0, spec.geometry, r, phi);
      return std::cos(0.5 * spec.bloch_theta) * plus +
             scaled_phase(std::sin(0.5 * spec.bloch_theta), spec.bloch_phi) * minus;
    }
    case ModeFamily::kSector: {
      if (std::abs(wrap_angle(phi - spec.orientation)) > 0.5 * spec.width) return 0.0;
      return spec.norm * lg_centered(0, 0, spec.geometry, r, phi);
    }
    case ModeFamily::kCustom:
      return spec.norm * spec.custom(r, phi);
  }
  return 0.0;
}

}  // namespace

BeamGeometry::BeamGeometry(double wavelength_, double waist_, double z_)
    : wavelength(wavelength_), waist(waist_), z(z_) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("BeamGeometry: wavelength must be positive");
  if (!(waist > 0.0)) throw std::invalid_argument("BeamGeometry: waist must be positive");
}

double BeamGeometry::rayleigh_range() const { return kPi * waist * waist / wavelength; }

double BeamGeometry::width() const {
  const double zr = rayleigh_range();
  return waist * std::sqrt(1.0 + (z * z) / (zr * zr));
}

double BeamGeometry::gouy_phase() const { return std::atan(z / rayleigh_range()); }

double BeamGeometry::wavenumber() const { return kTwoPi / wavelength; }

ModeSpec ModeSpec::laguerre_gauss(int ell, int p, const BeamGeometry& geometry) {
  if (p < 0) throw std::invalid_argument("laguerre_gauss: p must be non-negative");
  if (p > kMaxLaguerreOrder) throw std::out_of_range("laguerre_gauss: p too large");
  ModeSpec spec;
  spec.family = ModeFamily::kLaguerreGauss;
  spec.ell = ell;
  spec.p = p;
  spec.geometry = geometry;
  return spec;
}

ModeSpec ModeSpec::bessel_gauss(int ell, double radial_wavenumber, const BeamGeometry& geometry) {
  if (!(radial_wavenumber >= 0.0)) throw std::invalid_argument("bessel_gauss: k_r must be >= 0");
  ModeSpec spec;
  spec.family = ModeFamily::kBesselGauss;
  spec.ell = ell;
  spec.radial_wavenumber = radial_wavenumber;
  spec.geometry = geometry;
  // Numerical norm on a fine radial rule; the azimuthal integral is 2 pi.
  const double w0 = geometry.waist;
  const double r_max = 6.0 * w0;
  const GaussLegendreRule rule = gauss_legendre(512);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = 0.5 * r_max * (rule.nodes[i] + 1.0);
    const double f = bessel_j(ell, radial_wavenumber * r) * std::exp(-r * r / (w0 * w0));
    sum += 0.5 * r_max * rule.weights[i] * r * f * f;
  }
  const double norm2 = kTwoPi * sum;
  if (!(norm2 > 0.0)) throw std::domain_error("bessel_gauss: zero-norm mode");
  spec.norm = 1.0 / std::sqrt(norm2);
  return spec;
}

ModeSpec ModeSpec::superposition(int ell, double theta, double phi, const BeamGeometry& geometry) {
  if (ell == 0) throw std::invalid_argument("superposition: ell must be non-zero");
  ModeSpec spec;
  spec.family = ModeFamily::kSuperposition;
  spec.ell = ell;
  spec.bloch_theta = theta;
  spec.bloch_phi = phi;
  spec.geometry = geometry;
  return spec;
}

ModeSpec ModeSpec::rotated_superposition(int ell, double rotation, const BeamGeometry& geometry) {
  return superposition(ell, 0.5 * kPi, 2.0 * ell * rotation, geometry);
}

ModeSpec ModeSpec::sector(double orientation, double width, const BeamGeometry& geometry) {
  if (!(width > 0.0) || width > kTwoPi + 1e-12) {
    throw std::invalid_argument("sector: width must lie in (0, 2 pi]");
  }
  ModeSpec spec;
  spec.family = ModeFamily::kSector;
  spec.orientation = orientation;
  spec.width = width;
  spec.geometry = geometry;
  spec.norm = std::sqrt(kTwoPi / width);
  return spec;
}

ModeSpec ModeSpec::custom_field(std::function<Complex(double r, double phi)> field, const BeamGeometry& geometry) {
  if (!field) throw std::invalid_argument("custom_field: empty field function");
  ModeSpec spec;
  spec.family = ModeFamily::kCustom;
  spec.custom = std::move(field);
  spec.geometry = geometry;
  return spec;
}

ModeSpec ModeSpec::with_offset(double dx, double dy) const {
  ModeSpec copy = *this;
  copy.offset_x = dx;
  copy.offset_y = dy;
  return copy;
}

Complex mode_amplitude(const ModeSpec& spec, double r, double phi) {
  if (spec.offset_x == 0.0 && spec.offset_y == 0.0) return dispatch(spec, r, phi);
  const double x = r * std::cos(phi) - spec.offset_x;
  const double y = r * std::sin(phi) - spec.offset_y;
  return dispatch(spec, std::hypot(x, y), std::atan2(y, x));
}

Complex lg_amplitude(const ModeSpec& spec, double r, double phi) {
  require_family(spec, ModeFamily::kLaguerreGauss, "lg_amplitude");
  return mode_amplitude(spec, r, phi);
}

Complex bg_amplitude(const ModeSpec& spec, double r, double phi) {
  require_family(spec, ModeFamily::kBesselGauss, "bg_amplitude");
  return mode_amplitude(spec, r, phi);
}

Complex superposition_amplitude(const ModeSpec& spec, double r, double phi) {
  require_family(spec, ModeFamily::kSuperposition, "superposition_amplitude");
  return mode_amplitude(spec, r, phi);
}

Complex sector_amplitude(const ModeSpec& spec, double r, double phi) {
  require_family(spec, ModeFamily::kSector, "sector_amplitude");
  return mode_amplitude(spec, r, phi);
}

ComplexVector sample_mode(const ModeSpec& spec, const PolarGrid& grid) {
  ComplexVector values(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values(static_cast<Eigen::Index>(k)) = mode_amplitude(spec, grid.r(k), grid.phi(k));
  }
  return values;
}

SectorCoefficients sector_coefficients(double orientation, double width, int ell_min, int ell_max) {
  if (!(width > 0.0) || width > kTwoPi + 1e-12) {
    throw std::invalid_argument("sector_coefficients: width must lie in (0, 2 pi]");
  }
  SectorCoefficients out;
  for (int ell = ell_min; ell <= ell_max; ++ell) {
    double magnitude = width / kTwoPi * sinc(0.5 * ell * width);
    // sin(ell pi) is not exactly zero in floating point.
    if (std::abs(width - kTwoPi) <= 1e-12 && ell != 0) magnitude = 0.0;
    out[ell] = scaled_phase(magnitude, -ell * orientation);
  }
  return out;
}

Complex mode_overlap(const ModeSpec& a, const ModeSpec& b, const PolarGrid& grid) {
  Complex sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sum += std::conj(mode_amplitude(a, grid.r(k), grid.phi(k))) * mode_amplitude(b, grid.r(k), grid.phi(k)) *
           grid.weight(k);
  }
  return sum;
}

PolarGrid default_grid(double largest_waist, int n_r, int n_phi, double r_max_factor) {
  return PolarGrid(r_max_factor * largest_waist, n_r, n_phi);
}

}  // namespace oamsim
