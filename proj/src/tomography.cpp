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

#include "oamsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "oamsim/optimize.hpp"

namespace oamsim {

namespace {

double max_hermitian_defect(const ComplexMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

void check_physical(const ComplexMatrix& m, double herm_tol, double trace_tol, double eig_tol, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": matrix is not square");
  const double defect = max_hermitian_defect(m);
  if (defect > herm_tol) {
    throw std::invalid_argument(std::string(what) + ": not Hermitian (defect " + std::to_string(defect) + ")");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) {
    throw std::invalid_argument(std::string(what) + ": trace " + std::to_string(tr) + " is not 1");
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  const double lowest = hermitian_eigen(h).values.minCoeff();
  if (lowest < -eig_tol) {
    throw std::invalid_argument(std::string(what) + ": negative eigenvalue " + std::to_string(lowest));
  }
}

// Parameter layout: D real diagonal entries, then (re, im) of T(i, j) for i > j
// in row-major order.
ComplexMatrix unpack_lower(const Eigen::VectorXd& x, int dim) {
  ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) t(i, i) = x(i);
  int k = dim;
  for (int i = 1; i < dim; ++i)
    for (int j = 0; j < i; ++j) {
      t(i, j) = Complex(x(k), x(k + 1));
      k += 2;
    }
  return t;
}

Eigen::VectorXd pack_lower(const ComplexMatrix& t) {
  const int dim = static_cast<int>(t.rows());
  Eigen::VectorXd x(dim * dim);
  for (int i = 0; i < dim; ++i) x(i) = t(i, i).real();
  int k = dim;
  for (int i = 1; i < dim; ++i)
    for (int j = 0; j < i; ++j) {
      x(k) = t(i, j).real();
      x(k + 1) = t(i, j).imag();
      k += 2;
    }
  return x;
}

// Global minimizer of the (convex) chi^2 over N rho >= 0 by accelerated
// projected gradient, in an orthonormal Hermitian coordinate system; then
// factored as T^H T with T lower triangular (reverse Cholesky). A small
// eigenvalue floor keeps T invertible for the polishing step.
ComplexMatrix convex_start_factor(const std::vector<ComplexVector>& vectors, const Eigen::VectorXd& measured,
                                  const Eigen::VectorXd& inv_sigma, int dim) {
  const Eigen::Index m = static_cast<Eigen::Index>(vectors.size());
  const double root2 = std::sqrt(2.0);
  Eigen::MatrixXd design(m, dim * dim);
  for (Eigen::Index k = 0; k < m; ++k) {
    const ComplexVector& v = vectors[static_cast<std::size_t>(k)];
    int q = 0;
    for (int a = 0; a < dim; ++a) design(k, q++) = std::norm(v(a));
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        const Complex z = std::conj(v(a)) * v(b);
        design(k, q++) = root2 * z.real();
        design(k, q++) = -root2 * z.imag();
      }
    design.row(k) *= inv_sigma(k);
  }
  const Eigen::VectorXd target = inv_sigma.cwiseProduct(measured);

  auto to_matrix = [&](const Eigen::VectorXd& x) {
    ComplexMatrix mat(dim, dim);
    int q = 0;
    for (int a = 0; a < dim; ++a) mat(a, a) = x(q++);
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        mat(a, b) = Complex(x(q), x(q + 1)) / root2;
        mat(b, a) = std::conj(mat(a, b));
        q += 2;
      }
    return mat;
  };
  auto to_vector = [&](const ComplexMatrix& mat) {
    Eigen::VectorXd x(dim * dim);
    int q = 0;
    for (int a = 0; a < dim; ++a) x(q++) = mat(a, a).real();
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        x(q++) = root2 * mat(a, b).real();
        x(q++) = root2 * mat(a, b).imag();
      }
    return x;
  };
  auto clip = [&](const ComplexMatrix& mat, double floor_fraction) {
    // Inner-loop projection; Eigen's tridiagonal QR is much faster than the
    // Jacobi sweep at D = 16 and 25.
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (mat + mat.adjoint()));
    RealVector values = eig.eigenvalues();
    const double floor = floor_fraction * std::max(values.maxCoeff(), 0.0);
    for (Eigen::Index k = 0; k < values.size(); ++k) values(k) = std::max(values(k), floor);
    return ComplexMatrix(eig.eigenvectors() * values.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint());
  };

  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd rhs = design.transpose() * target;
  const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
  auto objective = [&](const Eigen::VectorXd& x) { return (design * x - target).squaredNorm(); };

  Eigen::VectorXd x = to_vector(clip(to_matrix(gram.ldlt().solve(rhs)), 0.0));
  Eigen::VectorXd previous = x;
  double f = objective(x);
  double momentum = 1.0;
  for (int it = 0; it < 20000; ++it) {
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const Eigen::VectorXd y = x + ((momentum - 1.0) / next_momentum) * (x - previous);
    const Eigen::VectorXd grad = 2.0 * (gram * y - rhs);
    Eigen::VectorXd candidate = to_vector(clip(to_matrix(y - grad / lipschitz), 0.0));
    const double fc = objective(candidate);
    if (fc > f) {  // adaptive restart of the momentum
      momentum = 1.0;
      previous = x;
      continue;
    }
    previous = x;
    x = std::move(candidate);
    momentum = next_momentum;
    const bool done = f - fc <= 1e-12 * f;
    f = fc;
    if (done) break;
  }

  const ComplexMatrix estimate = clip(to_matrix(x), 1e-8);
  // J M J = L L^H  =>  M = T^H T with T = J L^H J lower triangular.
  const ComplexMatrix flipped = estimate.colwise().reverse().rowwise().reverse();
  const ComplexMatrix l = flipped.llt().matrixL();
  ComplexMatrix t = l.adjoint().colwise().reverse().rowwise().reverse();
  for (int i = 0; i < dim; ++i) t(i, i) = Complex(t(i, i).real(), 0.0);
  return t.triangularView<Eigen::Lower>();
}

void check_projector(const ProjectorState& s, int d, const char* arm) {
  if (s.coeffs.size() != d || static_cast<int>(s.ells.size()) != d) {
    throw std::invalid_argument(std::string("projector ") + arm + " has dimension " +
                                std::to_string(s.coeffs.size()) + ", expected " + std::to_string(d));
  }
  if (std::abs(s.coeffs.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string("projector ") + arm + " is not normalized");
  }
}

}  // namespace

DensityMatrix::DensityMatrix(int d, ComplexMatrix matrix) : d_(d), matrix_(std::move(matrix)) {
  if (d < 1) throw std::invalid_argument("DensityMatrix: d must be positive");
  if (matrix_.rows() != d * d || matrix_.cols() != d * d) {
    throw std::invalid_argument("DensityMatrix: expected a " + std::to_string(d * d) + " x " +
                                std::to_string(d * d) + " matrix");
  }
  check_physical(matrix_, 1e-10, 1e-10, 1e-8, "DensityMatrix");
}

DensityMatrix DensityMatrix::normalized(int d, const ComplexMatrix& matrix) {
  ComplexMatrix h = 0.5 * (matrix + matrix.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0)) throw std::invalid_argument("DensityMatrix::normalized: non-positive trace");
  return DensityMatrix(d, h / tr);
}

DensityMatrix DensityMatrix::pure(int d, const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  const ComplexVector v = psi / norm;
  return DensityMatrix(d, v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  return DensityMatrix(d, ComplexMatrix::Identity(d * d, d * d) / static_cast<double>(d * d));
}

ComplexVector maximally_entangled(int d) {
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return psi;
}

ComplexVector anticorrelated_entangled(const std::vector<int>& ells) {
  const int d = static_cast<int>(ells.size());
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (int i = 0; i < d; ++i) {
    const auto it = std::find(ells.begin(), ells.end(), -ells[i]);
    if (it == ells.end()) {
      throw std::invalid_argument("anticorrelated_entangled: OAM values are not closed under negation");
    }
    psi(i * d + static_cast<int>(it - ells.begin())) = 1.0 / std::sqrt(static_cast<double>(d));
  }
  return psi;
}

ComplexVector setting_vector(const MeasurementSetting& setting) {
  const Eigen::Index da = setting.a.coeffs.size();
  const Eigen::Index db = setting.b.coeffs.size();
  ComplexVector v(da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < db; ++j) v(i * db + j) = setting.a.coeffs(i) * setting.b.coeffs(j);
  return v;
}

double predicted_counts(const DensityMatrix& rho, const MeasurementSetting& setting, double flux) {
  check_projector(setting.a, rho.d(), "A");
  check_projector(setting.b, rho.d(), "B");
  const ComplexVector v = setting_vector(setting);
  const double p = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return flux * std::max(p, 0.0);
}

int projector_gram_rank(std::span<const MeasurementSetting> settings, int d) {
  const int dim = d * d;
  ComplexMatrix frame = ComplexMatrix::Zero(dim * dim, dim * dim);
  for (const MeasurementSetting& s : settings) {
    check_projector(s.a, d, "A");
    check_projector(s.b, d, "B");
    const ComplexVector v = setting_vector(s);
    ComplexVector vec_pi(dim * dim);  // column-stacked |v><v|
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < dim; ++r) vec_pi(c * dim + r) = v(r) * std::conj(v(c));
    frame.selfadjointView<Eigen::Lower>().rankUpdate(vec_pi);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(frame, Eigen::EigenvaluesOnly);
  const RealVector& values = solver.eigenvalues();
  const double top = values.maxCoeff();
  if (!(top > 0.0)) return 0;
  return static_cast<int>((values.array() > 1e-10 * top).count());
}

double chi_squared(const DensityMatrix& rho, double flux, std::span<const double> counts,
                   std::span<const MeasurementSetting> settings) {
  if (counts.size() != settings.size()) throw std::invalid_argument("chi_squared: size mismatch");
  double chi2 = 0.0;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const double diff = counts[k] - predicted_counts(rho, settings[k], flux);
    chi2 += diff * diff / (counts[k] + 1.0);
  }
  return chi2;
}

ReconstructionReport reconstruct(std::span<const double> counts, std::span<const MeasurementSetting> settings,
                                 int d, const ReconstructionOptions& options) {
  if (counts.size() != settings.size()) throw std::invalid_argument("reconstruct: counts/settings size mismatch");
  if (d < 2) throw std::invalid_argument("reconstruct: d must be >= 2");
  for (double c : counts)
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("reconstruct: counts must be >= 0");
  const int dim = d * d;
  if (projector_gram_rank(settings, d) < dim * dim) {
    throw std::invalid_argument("reconstruct: settings are not informationally complete (rank-deficient)");
  }

  const std::size_t m = settings.size();
  std::vector<ComplexVector> vectors(m);
  Eigen::VectorXd measured(static_cast<Eigen::Index>(m));
  Eigen::VectorXd inv_sigma(static_cast<Eigen::Index>(m));
  double scale = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    vectors[k] = setting_vector(settings[k]);
    measured(static_cast<Eigen::Index>(k)) = counts[k];
    inv_sigma(static_cast<Eigen::Index>(k)) = 1.0 / std::sqrt(counts[k] + 1.0);
    scale += counts[k] * counts[k] / (counts[k] + 1.0);
  }

  const int n_params = dim * dim;
  const ResidualFunction residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const ComplexMatrix t = unpack_lower(x, dim);
    r.resize(static_cast<Eigen::Index>(m));
    if (jac) jac->resize(static_cast<Eigen::Index>(m), n_params);
    for (std::size_t k = 0; k < m; ++k) {
      const Eigen::Index row = static_cast<Eigen::Index>(k);
      const ComplexVector& v = vectors[k];
      const ComplexVector w = t.triangularView<Eigen::Lower>() * v;
      r(row) = (measured(row) - w.squaredNorm()) * inv_sigma(row);
      if (!jac) continue;
      const double g = -2.0 * inv_sigma(row);
      for (int i = 0; i < dim; ++i) (*jac)(row, i) = g * (std::conj(w(i)) * v(i)).real();
      int col = dim;
      for (int i = 1; i < dim; ++i)
        for (int j = 0; j < i; ++j) {
          const Complex z = std::conj(w(i)) * v(j);
          (*jac)(row, col) = g * z.real();
          (*jac)(row, col + 1) = -g * z.imag();
          col += 2;
        }
    }
  };

  const double mean_count = measured.mean();
  const double flux0 = std::max(dim * mean_count, 1e-12);
  const double diag0 = std::sqrt(flux0 / dim);
  const int restarts = std::max(1, options.restarts);

  auto run_restart = [&](int restart) {
    std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(restart)));
    std::normal_distribution<double> jitter(0.0, options.jitter * diag0);
    Eigen::VectorXd x0;
    if (restart == 0 && options.convex_start) {
      x0 = pack_lower(convex_start_factor(vectors, measured, inv_sigma, dim));
    } else {
      x0 = pack_lower(ComplexMatrix::Identity(dim, dim) * diag0);
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) += jitter(rng);
    }

    if (options.optimizer == TomographyOptimizer::kNelderMead) {
      NelderMeadOptions nm;
      nm.relative_tolerance = options.relative_tolerance;
      nm.max_iterations = options.max_iterations > 0 ? options.max_iterations : 20000 * n_params;
      nm.initial_step = 0.1 * diag0;
      const ObjectiveFunction objective = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r;
        residuals(x, r, nullptr);
        return r.squaredNorm();
      };
      // The simplex restarts from its best vertex until a full cycle no longer
      // improves chi^2 by the relative tolerance.
      OptimizeResult best = nelder_mead(objective, x0, nm);
      int total = best.iterations;
      for (int cycle = 0; cycle < 20 && total < nm.max_iterations; ++cycle) {
        OptimizeResult next = nelder_mead(objective, best.x, nm);
        total += next.iterations;
        const bool small = best.objective - next.objective <= options.relative_tolerance * best.objective;
        if (next.objective < best.objective) best = next;
        if (small) break;
      }
      best.iterations = total;
      best.converged = total < nm.max_iterations;
      return best;
    }
    LevenbergMarquardtOptions lm;
    lm.relative_tolerance = options.relative_tolerance;
    lm.absolute_tolerance = 1e-24 * (scale + 1.0);
    lm.max_iterations = options.max_iterations > 0 ? options.max_iterations : 5000;
    OptimizeResult result = levenberg_marquardt(residuals, x0, lm);
    result.objective *= 2.0;  // back to |r|^2 = chi^2
    return result;
  };

  std::vector<OptimizeResult> results(static_cast<std::size_t>(restarts));
  if (options.parallel && restarts > 1) {
    std::vector<std::future<OptimizeResult>> futures;
    futures.reserve(results.size());
    for (int k = 0; k < restarts; ++k) futures.push_back(std::async(std::launch::async, run_restart, k));
    for (int k = 0; k < restarts; ++k) results[k] = futures[k].get();
  } else {
    for (int k = 0; k < restarts; ++k) results[k] = run_restart(k);
  }

  int best = 0;
  for (int k = 1; k < restarts; ++k)
    if (results[k].objective < results[best].objective) best = k;

  const ComplexMatrix t = unpack_lower(results[best].x, dim);
  const ComplexMatrix unnormalized = t.adjoint() * t;
  const double flux = unnormalized.trace().real();
  if (!(flux > 0.0)) throw std::runtime_error("reconstruct: optimizer collapsed to the zero matrix");

  ReconstructionReport report;
  report.rho = DensityMatrix::normalized(d, unnormalized);
  report.flux = flux;
  report.chi2 = results[best].objective;
  report.converged = results[best].converged;
  report.parameter_count = n_params;
  report.best_restart = best;
  for (const OptimizeResult& r : results) report.iterations += r.iterations;
  return report;
}

ReconstructionReport reconstruct(std::span<const CoincidenceRecord> records,
                                 std::span<const MeasurementSetting> settings, int d,
                                 const ReconstructionOptions& options) {
  std::vector<double> counts;
  counts.reserve(records.size());
  for (const CoincidenceRecord& r : records) counts.push_back(static_cast<double>(r.count));
  return reconstruct(std::span<const double>(counts), settings, d, options);
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& target) {
  if (rho.rows() != target.rows() || rho.cols() != target.cols()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  const ComplexMatrix s = psd_sqrt(target, kRoundoffEigenvalueFloor);
  ComplexMatrix sandwich = s * rho * s;
  sandwich = 0.5 * (sandwich + sandwich.adjoint());
  const double root_trace = psd_sqrt(sandwich, kRoundoffEigenvalueFloor).trace().real();
  return std::clamp(root_trace * root_trace, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& target) {
  if (rho.d() != target.d()) throw std::invalid_argument("fidelity: dimension mismatch");
  return fidelity(rho.matrix(), target.matrix());
}

double linear_entropy(const ComplexMatrix& rho) {
  const double dim = static_cast<double>(rho.rows());
  if (dim < 2) throw std::invalid_argument("linear_entropy: dimension must be >= 2");
  const double purity = (rho * rho).trace().real();
  return dim / (dim - 1.0) * (1.0 - purity);
}

double linear_entropy(const DensityMatrix& rho) { return linear_entropy(rho.matrix()); }

double concurrence(const DensityMatrix& rho) {
  if (rho.d() != 2) throw std::invalid_argument("concurrence: defined for d = 2 only");
  ComplexMatrix sigma_y(2, 2);
  sigma_y << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  const ComplexMatrix yy = kron(sigma_y, sigma_y);
  const ComplexMatrix flipped = yy * rho.matrix().conjugate() * yy;
  const ComplexMatrix root = psd_sqrt(rho.matrix(), kRoundoffEigenvalueFloor);
  ComplexMatrix m = root * flipped * root;
  m = 0.5 * (m + m.adjoint());
  const RealVector mu = hermitian_eigen(m).values;
  double lambda[4];
  for (int k = 0; k < 4; ++k) lambda[k] = mu(k) > kRoundoffEigenvalueFloor * std::max(mu(0), 0.0) ? std::sqrt(mu(k)) : 0.0;
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

Eigen::MatrixXd su_expand(const DensityMatrix& rho) {
  const int d = rho.d();
  const std::vector<ComplexMatrix> basis = su_basis(d);
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    const double ni = (basis[i] * basis[i]).trace().real();
    for (int j = 0; j < n; ++j) {
      const double nj = (basis[j] * basis[j]).trace().real();
      const Complex t = (rho.matrix() * kron(basis[i], basis[j])).trace();
      b(i, j) = t.real() / (ni * nj);
    }
  }
  return b;
}

ComplexMatrix su_compose(int d, const Eigen::MatrixXd& coefficients) {
  const std::vector<ComplexMatrix> basis = su_basis(d);
  const int n = static_cast<int>(basis.size());
  if (coefficients.rows() != n || coefficients.cols() != n) {
    throw std::invalid_argument("su_compose: coefficient matrix shape mismatch");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(d * d, d * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (coefficients(i, j) != 0.0) rho += coefficients(i, j) * kron(basis[i], basis[j]);
  return rho;
}

void ThresholdSpec::validate() const {
  if (d < 2) throw std::invalid_argument("ThresholdSpec: d must be >= 2");
  if (!(p_min >= 0.0 && p_min <= 1.0)) throw std::invalid_argument("ThresholdSpec: p_min must lie in [0, 1]");
}

DensityMatrix threshold_state(const ThresholdSpec& spec) {
  spec.validate();
  const int dim = spec.d * spec.d;
  const ComplexVector psi = maximally_entangled(spec.d);
  ComplexMatrix rho = spec.p_min * (psi * psi.adjoint()) +
                      (1.0 - spec.p_min) * ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(spec.d, rho);
}

double default_threshold_pmin(int d) {
  // 2 / I_d for the CGLMP expression at the maximally entangled state.
  static constexpr double kTable[] = {0.707106781187, 0.696152422707, 0.690549739488, 0.687156574416,
                                      0.684883751130, 0.683255905411, 0.682032958173};
  if (d < 2 || d > 8) throw std::out_of_range("default_threshold_pmin: d must lie in [2, 8]");
  return kTable[d - 2];
}

void write_density_matrix(std::ostream& out, const DensityMatrix& rho) {
  const int dim = rho.dimension();
  out << "d," << rho.d() << '\n';
  out << std::setprecision(17);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const Complex z = rho.matrix()(r, c);
      out << r << ',' << c << ',' << z.real() << ',' << z.imag() << '\n';
    }
}

DensityMatrix read_density_matrix(std::istream& in) {
  std::string line;
  const auto next = [&] {
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') return true;  // skip "# oamsim ..." header comments
    return false;
  };
  if (!next()) throw std::invalid_argument("read_density_matrix: empty input");
  int d = 0;
  if (line.rfind("d,", 0) != 0) throw std::invalid_argument("read_density_matrix: missing 'd,<d>' header");
  try {
    d = std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw std::invalid_argument("read_density_matrix: bad header '" + line + "'");
  }
  if (d < 1 || d > kMaxBasisDim) throw std::invalid_argument("read_density_matrix: d out of range");
  const int dim = d * d;
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  std::vector<bool> seen(static_cast<std::size_t>(dim * dim), false);
  int rows = 0;
  while (next()) {
    std::istringstream ss(line);
    std::string field[4];
    for (auto& f : field)
      if (!std::getline(ss, f, ',')) throw std::invalid_argument("read_density_matrix: malformed row '" + line + "'");
    int r = 0;
    int c = 0;
    double re = 0.0;
    double im = 0.0;
    try {
      r = std::stoi(field[0]);
      c = std::stoi(field[1]);
      re = std::stod(field[2]);
      im = std::stod(field[3]);
    } catch (const std::exception&) {
      throw std::invalid_argument("read_density_matrix: malformed row '" + line + "'");
    }
    if (r < 0 || r >= dim || c < 0 || c >= dim) throw std::invalid_argument("read_density_matrix: index out of range");
    if (seen[static_cast<std::size_t>(r * dim + c)]) throw std::invalid_argument("read_density_matrix: duplicate entry");
    seen[static_cast<std::size_t>(r * dim + c)] = true;
    m(r, c) = Complex(re, im);
    ++rows;
  }
  if (rows != dim * dim) {
    throw std::invalid_argument("read_density_matrix: expected " + std::to_string(dim * dim) + " rows, got " +
                                std::to_string(rows));
  }
  check_physical(m, 1e-6, 1e-6, 1e-6, "read_density_matrix");
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  HermitianEigen eig = hermitian_eigen(h);
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) eig.values(k) = std::max(eig.values(k), 0.0);
  h = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return DensityMatrix::normalized(d, h);
}

}  // namespace oamsim
