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

#include "funnel/simplex_lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace funnel {

namespace {

constexpr double kReducedCostTol = 1e-10;
constexpr double kPivotTol = 1e-11;
constexpr double kRatioTieTol = 1e-12;

struct Tableau {
  Eigen::MatrixXd a;       // m x (n + m), original columns then artificials
  Eigen::VectorXd b;       // >= 0
  std::vector<int> basis;  // size m, column indices
  int n = 0;
  int m = 0;
};

// One simplex phase under Bland's rule. `allow_artificial_entering` is only
// true in phase 1. Returns the iteration count.
int run_phase(Tableau& t, const Eigen::VectorXd& cost,
              bool allow_artificial_entering, int max_iterations) {
  const int total = t.n + t.m;
  int iterations = 0;
  Eigen::VectorXd xb;
  while (true) {
    if (++iterations > max_iterations) {
      throw LPInfeasible("simplex iteration limit reached");
    }
    Eigen::MatrixXd basis_mat(t.m, t.m);
    for (int i = 0; i < t.m; ++i) basis_mat.col(i) = t.a.col(t.basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);
    Eigen::MatrixXd binv = lu.inverse();
    if (!binv.allFinite()) {
      throw LPInfeasible("singular basis encountered");
    }
    xb = binv * t.b;

    Eigen::VectorXd cb(t.m);
    for (int i = 0; i < t.m; ++i) cb(i) = cost(t.basis[i]);
    Eigen::VectorXd y = binv.transpose() * cb;

    // Bland: first (smallest-index) column with negative reduced cost.
    int entering = -1;
    std::vector<char> is_basic(total, 0);
    for (int i = 0; i < t.m; ++i) is_basic[t.basis[i]] = 1;
    const int limit = allow_artificial_entering ? total : t.n;
    for (int j = 0; j < limit; ++j) {
      if (is_basic[j]) continue;
      const double reduced = cost(j) - y.dot(t.a.col(j));
      if (reduced < -kReducedCostTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return iterations;

    Eigen::VectorXd dir = binv * t.a.col(entering);
    // Ratio test; among ties pick the smallest basis-variable index (Bland).
    double best_ratio = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (int i = 0; i < t.m; ++i) {
      if (dir(i) > kPivotTol) {
        const double ratio = std::max(xb(i), 0.0) / dir(i);
        if (ratio < best_ratio - kRatioTieTol ||
            (std::abs(ratio - best_ratio) <= kRatioTieTol &&
             (leaving < 0 || t.basis[i] < t.basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    }
    if (leaving < 0) {
      throw LPInfeasible("objective unbounded below (numerical failure)");
    }
    t.basis[leaving] = entering;
  }
}

}  // namespace

LpResult solve_equality_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n) {
    throw DimensionMismatch("LP dimensions disagree");
  }
  if (m == 0) {
    LpResult r;
    r.x = Eigen::VectorXd::Zero(n);
    return r;
  }

  Tableau t;
  t.m = m;
  t.n = n;
  t.a = Eigen::MatrixXd::Zero(m, n + m);
  t.a.leftCols(n) = a;
  t.b = b;
  for (int i = 0; i < m; ++i) {
    if (t.b(i) < 0) {
      t.b(i) = -t.b(i);
      t.a.row(i) = -t.a.row(i);
    }
    t.a(i, n + i) = 1.0;
  }
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) t.basis[i] = n + i;

  const int max_iterations = 100000 + 200 * (n + m);

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  int iters = run_phase(t, phase1_cost, /*allow_artificial_entering=*/true,
                        max_iterations);

  // Recover the basic solution and test phase-1 optimum.
  {
    Eigen::MatrixXd basis_mat(m, m);
    for (int i = 0; i < m; ++i) basis_mat.col(i) = t.a.col(t.basis[i]);
    Eigen::VectorXd xb = basis_mat.partialPivLu().solve(t.b);
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] >= n) infeasibility += std::abs(xb(i));
    }
    if (infeasibility > 1e-9 * std::max(1.0, t.b.lpNorm<1>())) {
      throw LPInfeasible("no feasible point (phase-1 optimum positive)");
    }
    // Drive zero-level artificials out of the basis where a real pivot
    // exists; rows with no real pivot are redundant and the artificial
    // stays basic at level zero (it is barred from re-entering).
    Eigen::MatrixXd binv = basis_mat.inverse();
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < n) continue;
      for (int j = 0; j < n; ++j) {
        bool basic = false;
        for (int k = 0; k < m; ++k) {
          if (t.basis[k] == j) {
            basic = true;
            break;
          }
        }
        if (basic) continue;
        const double pivot = binv.row(i).dot(t.a.col(j));
        if (std::abs(pivot) > 1e-9) {
          t.basis[i] = j;
          basis_mat.col(i) = t.a.col(j);
          binv = basis_mat.inverse();
          break;
        }
      }
    }
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
  phase2_cost.head(n) = c;
  iters += run_phase(t, phase2_cost, /*allow_artificial_entering=*/false,
                     max_iterations);

  Eigen::MatrixXd basis_mat(m, m);
  for (int i = 0; i < m; ++i) basis_mat.col(i) = t.a.col(t.basis[i]);
  Eigen::VectorXd xb = basis_mat.partialPivLu().solve(t.b);

  LpResult result;
  result.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) result.x(t.basis[i]) = std::max(xb(i), 0.0);
  }
  result.objective = c.dot(result.x);
  result.iterations = iters;
  return result;
}

}  // namespace funnel
