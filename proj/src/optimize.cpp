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

#include "oamsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oamsim {

OptimizeResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd x0,
                                   const LevenbergMarquardtOptions& options) {
  const Eigen::Index n = x0.size();
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  fn(x0, r, &jac);
  double cost = r.squaredNorm();

  OptimizeResult result;
  result.x = std::move(x0);
  double lambda = options.initial_damping;
  Eigen::VectorXd trial_r;
  int rejected_in_row = 0;

  while (result.iterations < options.max_iterations) {
    if (cost <= options.absolute_tolerance) {
      result.converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-300) {
      result.converged = true;
      break;
    }
    const double diag_floor = std::max(1e-12 * jtj.diagonal().maxCoeff(), 1e-300);

    Eigen::MatrixXd lhs = jtj;
    for (Eigen::Index i = 0; i < n; ++i) lhs(i, i) += lambda * std::max(jtj(i, i), diag_floor);
    const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
    const Eigen::VectorXd candidate = result.x + step;

    fn(candidate, trial_r, nullptr);
    const double trial_cost = trial_r.allFinite() ? trial_r.squaredNorm() : INFINITY;
    if (trial_cost < cost) {
      const double drop = cost - trial_cost;
      result.x = candidate;
      fn(result.x, r, &jac);
      const double previous = cost;
      cost = r.squaredNorm();
      ++result.iterations;
      lambda = std::max(lambda / 3.0, 1e-15);
      rejected_in_row = 0;
      if (drop <= options.relative_tolerance * previous) {
        result.converged = true;
        break;
      }
    } else {
      lambda *= 4.0;
      if (++rejected_in_row > 60 || lambda > 1e30) {
        // No descent direction left at machine precision: a stationary point.
        result.converged = true;
        break;
      }
    }
  }
  result.objective = 0.5 * cost;
  return result;
}

OptimizeResult nelder_mead(const ObjectiveFunction& f, Eigen::VectorXd x0, const NelderMeadOptions& options) {
  const Eigen::Index n = x0.size();
  const double dim = static_cast<double>(n);
  // Gao & Han adaptive coefficients.
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dim;
  const double gamma = 0.75 - 1.0 / (2.0 * dim);
  const double delta = 1.0 - 1.0 / dim;

  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = x0(i) != 0.0 ? options.initial_step * std::abs(x0(i)) : options.initial_step;
    simplex[i + 1](i) += h;
  }
  for (Eigen::Index i = 0; i <= n; ++i) values[i] = f(simplex[i]);

  std::vector<Eigen::Index> order(n + 1);
  OptimizeResult result;
  while (result.iterations < options.max_iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
    const Eigen::Index best = order.front();
    const Eigen::Index worst = order.back();
    const Eigen::Index second = order[n - 1];
    const double spread = values[worst] - values[best];
    if (spread <= options.relative_tolerance * std::abs(values[best]) + 1e-300) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= dim;

    const Eigen::VectorXd reflected = centroid + alpha * (centroid - simplex[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = centroid + beta * (reflected - centroid);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + gamma * (reflected - centroid))
                                               : Eigen::VectorXd(centroid - gamma * (centroid - simplex[worst]));
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + delta * (simplex[i] - simplex[best]);
      values[i] = f(simplex[i]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(it - values.begin())];
  result.objective = *it;
  return result;
}

}  // namespace oamsim
