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

#ifndef OAMSIM_NUMERICS_HPP
#define OAMSIM_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oamsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr int kMaxLaguerreOrder = 64;
inline constexpr int kMaxBesselOrder = 64;
inline constexpr int kMaxBasisDim = 8;

/// Associated Laguerre polynomial L_p^alpha(x) by the three-term recurrence.
/// Throws std::out_of_range for p > kMaxLaguerreOrder.
double laguerre(int p, double alpha, double x);

/// Bessel function of the first kind J_ell(x) for x >= 0 and integer order.
double bessel_j(int ell, double x);

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

/// Tensor-product quadrature on the disc r <= r_max.
///
/// Radial nodes are Gauss-Legendre on [0, r_max] (with the r dA Jacobian
/// folded into the weights), azimuthal nodes are uniform, phi_j = 2 pi j / n_phi.
/// The trapezoid rule in phi integrates e^{i m phi} exactly for |m| < n_phi.
class PolarGrid {
 public:
  PolarGrid(double r_max, int n_r, int n_phi);

  double r_max() const { return r_max_; }
  int n_r() const { return n_r_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_phi_; }

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& angles() const { return angles_; }

  // Node k is (radius k / n_phi, angle k % n_phi).
  double r(std::size_t k) const { return radii_[k / n_phi_]; }
  double phi(std::size_t k) const { return angles_[k % n_phi_]; }
  double weight(std::size_t k) const { return radial_weights_[k / n_phi_] * angle_weight_; }

  double total_weight() const;

 private:
  double r_max_;
  int n_r_;
  int n_phi_;
  std::vector<double> radii_;
  std::vector<double> angles_;
  std::vector<double> radial_weights_;
  double angle_weight_;
};

using PolarField = std::function<Complex(double r, double phi)>;

/// Sum of f(node) * weight over the grid. Throws std::domain_error on a
/// non-finite integrand value.
Complex integrate_polar(const PolarField& f, const PolarGrid& grid);

struct HermitianEigen {
  RealVector values;     // descending
  ComplexMatrix vectors;  // columns are eigenvectors
};

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

/// Cyclic Jacobi eigendecomposition. Throws std::invalid_argument if the input
/// is not square or not Hermitian to 1e-10 relative to its largest entry.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

/// Principal square root of a positive-semidefinite Hermitian matrix.
/// Eigenvalues below relative_floor * (largest eigenvalue) are treated as
/// zero, as are negative ones above -1e-6; anything lower throws
/// std::domain_error.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double relative_floor = 0.0);

// Round-off floor for eigenvalues of unit-trace states before a square root:
// the root would blow rounding noise of order 1e-16 up to 1e-8.
inline constexpr double kRoundoffEigenvalueFloor = 1e-13;
inline constexpr double kNonPhysicalEigenvalue = -1e-6;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Identity followed by the d^2 - 1 generalized Gell-Mann matrices: the
/// symmetric family (j < k), the antisymmetric family (j < k), then the
/// diagonal family. Tr(t_m t_n) = 2 delta_mn for m, n >= 1. For d = 2 this is
/// (I, sigma_x, sigma_y, sigma_z).
std::vector<ComplexMatrix> su_basis(int d);

}  // namespace oamsim

#endif  // OAMSIM_NUMERICS_HPP
