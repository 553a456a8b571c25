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

#include "oamsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oamsim {

double laguerre(int p, double alpha, double x) {
  if (p < 0 || p > kMaxLaguerreOrder) {
    throw std::out_of_range("laguerre: order p=" + std::to_string(p) + " outside [0, " +
                            std::to_string(kMaxLaguerreOrder) + "]");
  }
  if (alpha < 0.0) throw std::out_of_range("laguerre: alpha must be >= 0");
  double prev = 1.0;
  if (p == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < p; ++k) {
    // (k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double bessel_j(int ell, double x) {
  if (std::abs(ell) > kMaxBesselOrder) {
    throw std::out_of_range("bessel_j: order " + std::to_string(ell) + " outside supported range");
  }
  if (x < 0.0) throw std::domain_error("bessel_j: x must be >= 0");
  const int n = std::abs(ell);
  const double value = std::cyl_bessel_j(static_cast<double>(n), x);
  // J_{-n} = (-1)^n J_n
  return (ell < 0 && (n % 2 == 1)) ? -value : value;
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      // Recompute the derivative at the converged node.
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

PolarGrid::PolarGrid(double r_max, int n_r, int n_phi)
    : r_max_(r_max), n_r_(n_r), n_phi_(n_phi), angle_weight_(0.0) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw std::invalid_argument("PolarGrid: r_max must be positive");
  }
  if (n_r < 1 || n_phi < 1) throw std::invalid_argument("PolarGrid: node counts must be positive");
  const GaussLegendreRule rule = gauss_legendre(n_r);
  radii_.resize(n_r);
  radial_weights_.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    const double r = 0.5 * r_max * (rule.nodes[i] + 1.0);
    radii_[i] = r;
    radial_weights_[i] = 0.5 * r_max * rule.weights[i] * r;
  }
  angles_.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) angles_[j] = kTwoPi * j / n_phi;
  angle_weight_ = kTwoPi / n_phi;
}

double PolarGrid::total_weight() const {
  return std::accumulate(radial_weights_.begin(), radial_weights_.end(), 0.0) * angle_weight_ * n_phi_;
}

Complex integrate_polar(const PolarField& f, const PolarGrid& grid) {
  Complex sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Complex v = f(grid.r(k), grid.phi(k));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::domain_error("integrate_polar: non-finite integrand at r=" + std::to_string(grid.r(k)) +
                              ", phi=" + std::to_string(grid.phi(k)));
    }
    sum += v * grid.weight(k);
  }
  return sum;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigen: matrix is not square");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!is_hermitian(m, 1e-10 * scale)) {
    throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");
  }
  ComplexMatrix a = 0.5 * (m + m.adjoint());
  ComplexMatrix v = ComplexMatrix::Identity(n, n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(s);
  };
  const double frob = std::max(a.norm(), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= 1e-15 * frob) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const Complex phase = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Columns of the rotation: e_p -> c e_p - s conj(phase) e_q, e_q -> s phase e_p + c e_q.
        const Complex jqp = -s * std::conj(phase);
        const Complex jpq = s * phase;
        for (Eigen::Index k = 0; k < n; ++k) {  // A <- A J
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + jqp * akq;
          a(k, q) = jpq * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {  // A <- J^H A
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {  // V <- V J
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp + jqp * vkq;
          v(k, q) = jpq * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() > a(j, j).real(); });
  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, double relative_floor) {
  const HermitianEigen eig = hermitian_eigen(m);
  const double floor = eig.values.size() > 0 ? relative_floor * std::max(eig.values(0), 0.0) : 0.0;
  RealVector roots(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double lambda = eig.values(k);
    if (lambda < kNonPhysicalEigenvalue) {
      throw std::domain_error("psd_sqrt: eigenvalue " + std::to_string(lambda) +
                              " indicates a non-physical matrix");
    }
    roots(k) = lambda > floor ? std::sqrt(lambda) : 0.0;
  }
  ComplexMatrix s = eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (s + s.adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<ComplexMatrix> su_basis(int d) {
  if (d < 2 || d > kMaxBasisDim) {
    throw std::out_of_range("su_basis: dimension " + std::to_string(d) + " outside [2, " +
                            std::to_string(kMaxBasisDim) + "]");
  }
  const Complex i_unit(0.0, 1.0);
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d) * d);
  basis.push_back(ComplexMatrix::Identity(d, d));
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix g = ComplexMatrix::Zero(d, d);
      g(j, k) = 1.0;
      g(k, j) = 1.0;
      basis.push_back(std::move(g));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      ComplexMatrix g = ComplexMatrix::Zero(d, d);
      g(j, k) = -i_unit;
      g(k, j) = i_unit;
      basis.push_back(std::move(g));
    }
  }
  for (int l = 1; l < d; ++l) {
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    const double factor = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) g(j, j) = factor;
    g(l, l) = -l * factor;
    basis.push_back(std::move(g));
  }
  return basis;
}

}  // namespace oamsim
