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

#ifndef OAMSIM_TOMOGRAPHY_HPP
#define OAMSIM_TOMOGRAPHY_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "oamsim/numerics.hpp"
#include "oamsim/source.hpp"

namespace oamsim {

/// A normalized single-photon projector state over an ordered list of OAM
/// values: sum_k coeffs[k] |ells[k]>.
struct ProjectorState {
  std::vector<int> ells;
  ComplexVector coeffs;
  std::string label;
};

/// Joint projector |a><a| (x) |b><b| for arms A and B.
struct MeasurementSetting {
  std::size_t index = 0;
  ProjectorState a;
  ProjectorState b;
};

/// Two-qudit density matrix of size d^2 x d^2, ordered |i>_A |j>_B -> i d + j.
/// Hermitian to 1e-10, unit trace to 1e-10, eigenvalues >= -1e-8.
class DensityMatrix {
 public:
  /// Validates the invariants; throws std::invalid_argument on violation.
  DensityMatrix(int d, ComplexMatrix matrix);

  /// Hermitian part divided by its trace; still rejects eigenvalues below -1e-8.
  static DensityMatrix normalized(int d, const ComplexMatrix& matrix);
  static DensityMatrix pure(int d, const ComplexVector& psi);
  static DensityMatrix maximally_mixed(int d);

  int d() const { return d_; }
  int dimension() const { return d_ * d_; }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  int d_;
  ComplexMatrix matrix_;
};

/// sum_i |i, i> / sqrt d.
ComplexVector maximally_entangled(int d);

/// sum_k |ells[k]>_A |-ells[k]>_B / sqrt d; requires ells closed under negation.
ComplexVector anticorrelated_entangled(const std::vector<int>& ells);

/// Joint product vector |a> (x) |b> in the density-matrix ordering.
ComplexVector setting_vector(const MeasurementSetting& setting);

/// N Tr(rho |a><a| (x) |b><b|). Throws std::invalid_argument on a dimension
/// mismatch or unnormalized projector states.
double predicted_counts(const DensityMatrix& rho, const MeasurementSetting& setting, double flux);

/// Rank of the Gram matrix of the joint projectors viewed as vectors.
int projector_gram_rank(std::span<const MeasurementSetting> settings, int d);

enum class TomographyOptimizer { kLevenbergMarquardt, kNelderMead };

struct ReconstructionOptions {
  int restarts = 5;
  std::uint64_t seed = 0;
  double jitter = 1e-2;  // relative to the maximally mixed starting amplitude
  TomographyOptimizer optimizer = TomographyOptimizer::kLevenbergMarquardt;
  double relative_tolerance = 1e-9;
  int max_iterations = 0;  // 0: optimizer default
  bool parallel = true;
  // Restart 0 starts from the convex minimizer of chi^2 over N rho >= 0
  // (projected gradient); the others from the maximally mixed state plus jitter.
  bool convex_start = true;
};

struct ReconstructionReport {
  DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  double chi2 = 0.0;
  int iterations = 0;
  double flux = 0.0;
  bool converged = false;
  int parameter_count = 0;
  int best_restart = 0;
};

/// chi^2 = sum (C_M - C_P)^2 / (C_M + 1) with C_P = Tr(T^H T Pi): the flux is
/// Tr(T^H T) and rho = T^H T / Tr(T^H T), T lower triangular with real
/// diagonal. Throws std::invalid_argument for settings that are not
/// informationally complete.
ReconstructionReport reconstruct(std::span<const double> counts, std::span<const MeasurementSetting> settings,
                                 int d, const ReconstructionOptions& options = {});
ReconstructionReport reconstruct(std::span<const CoincidenceRecord> records,
                                 std::span<const MeasurementSetting> settings, int d,
                                 const ReconstructionOptions& options = {});

/// chi^2 of a candidate state with flux N against measured counts.
double chi_squared(const DensityMatrix& rho, double flux, std::span<const double> counts,
                   std::span<const MeasurementSetting> settings);

/// Uhlmann fidelity [Tr sqrt(sqrt(target) rho sqrt(target))]^2, clamped to [0, 1].
/// The raw-matrix overload accepts rounded, slightly non-physical matrices; it only needs
/// the target and the sandwiched product to be positive semidefinite.
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& target);
double fidelity(const DensityMatrix& rho, const DensityMatrix& target);

/// D/(D-1) (1 - Tr rho^2) with D the matrix dimension.
double linear_entropy(const ComplexMatrix& rho);
double linear_entropy(const DensityMatrix& rho);

/// Wootters concurrence; d must be 2.
double concurrence(const DensityMatrix& rho);

/// rho = sum b(m, n) tau_m (x) tau_n over su_basis(d).
Eigen::MatrixXd su_expand(const DensityMatrix& rho);
ComplexMatrix su_compose(int d, const Eigen::MatrixXd& coefficients);

struct ThresholdSpec {
  int d = 2;
  double p_min = 0.0;

  void validate() const;
};

/// p |psi><psi| + (1 - p) I / d^2 with psi maximally entangled.
DensityMatrix threshold_state(const ThresholdSpec& spec);

/// Default p_min for d = 2..8 from the CGLMP inequality; see
/// config/threshold_pmin.cfg and tools/cglmp_threshold.py.
double default_threshold_pmin(int d);

/// Header line "d,<d>" then D^2 rows "row,col,real,imag".
void write_density_matrix(std::ostream& out, const DensityMatrix& rho);
/// Rejects matrices that violate the invariants by more than 1e-6.
DensityMatrix read_density_matrix(std::istream& in);

}  // namespace oamsim

#endif  // OAMSIM_TOMOGRAPHY_HPP
