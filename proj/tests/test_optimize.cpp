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

#include "oamsim/optimize.hpp"

using namespace oamsim;

TEST_CASE("levenberg_marquardt solves Rosenbrock as least squares") {
  const ResidualFunction fn = [](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* j) {
    r.resize(2);
    r << 10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0);
    if (j) {
      j->resize(2, 2);
      *j << -20.0 * x(0), 10.0, -1.0, 0.0;
    }
  };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  LevenbergMarquardtOptions options;
  options.absolute_tolerance = 1e-28;
  const OptimizeResult res = levenberg_marquardt(fn, x0, options);
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.objective < 1e-20);
}

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
  const ObjectiveFunction f = [](const Eigen::VectorXd& x) {
    return (x(0) - 1.0) * (x(0) - 1.0) + 4.0 * (x(1) + 2.0) * (x(1) + 2.0) + (x(2) - 0.5) * (x(2) - 0.5);
  };
  NelderMeadOptions options;
  options.relative_tolerance = 1e-14;
  const OptimizeResult res = nelder_mead(f, Eigen::VectorXd::Zero(3), options);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.x(1) == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(res.x(2) == doctest::Approx(0.5).epsilon(1e-5));
}
