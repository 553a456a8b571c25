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

#ifndef OAMSIM_OPTIMIZE_HPP
#define OAMSIM_OPTIMIZE_HPP

#include <functional>

#include <Eigen/Dense>

namespace oamsim {

struct OptimizeResult {
  Eigen::VectorXd x;
  double objective = 0.0;  // 0.5 * |r|^2 for least squares, f(x) for the simplex
  int iterations = 0;
  bool converged = false;
};

// Fills residuals (size m) and, when jacobian is non-null, the m x n Jacobian.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian)>;

struct LevenbergMarquardtOptions {
  int max_iterations = 2000;
  // Stop when an accepted step lowers |r|^2 by less than this fraction.
  double relative_tolerance = 1e-10;
  // Stop when |r|^2 drops below this absolute floor.
  double absolute_tolerance = 0.0;
  double initial_damping = 1e-3;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling. A step is counted as
/// an iteration only when it is accepted.
OptimizeResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd x0,
                                   const LevenbergMarquardtOptions& options = {});

using ObjectiveFunction = std::function<double(const Eigen::VectorXd& x)>;

struct NelderMeadOptions {
  int max_iterations = 100000;
  double relative_tolerance = 1e-9;
  double initial_step = 0.1;
};

/// Adaptive Nelder-Mead simplex (dimension-dependent coefficients).
OptimizeResult nelder_mead(const ObjectiveFunction& f, Eigen::VectorXd x0, const NelderMeadOptions& options = {});

}  // namespace oamsim

#endif  // OAMSIM_OPTIMIZE_HPP
