// Copyright 2026 The Funnel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUNNEL_SIMPLEX_LP_HPP_
#define FUNNEL_SIMPLEX_LP_HPP_

#include <Eigen/Dense>

#include "funnel/common.hpp"

namespace funnel {

struct LpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

// Solves min c*x subject to A x = b, x >= 0 with a dense two-phase primal
// simplex using Bland's rule (smallest-index entering and leaving variable),
// which cannot cycle on degenerate bases. Throws LPInfeasible when no
// feasible point exists or on numerical failure; basic solutions have at
// most rank(A) nonzero entries.
LpResult solve_equality_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c);

}  // namespace funnel

#endif  // FUNNEL_SIMPLEX_LP_HPP_
