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

#ifndef FUNNEL_POLYTOPE_HPP_
#define FUNNEL_POLYTOPE_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "funnel/common.hpp"

namespace funnel {

// H-representation { v : A v <= b, E v = f } in ambient dimension d.
// Either block may be empty (0 rows, d columns).
struct Polytope {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;

  int dim() const {
    return static_cast<int>(A.cols() > 0 ? A.cols() : E.cols());
  }

  static Polytope from_inequalities(Eigen::MatrixXd a_mat, Eigen::VectorXd b_vec);
  static Polytope with_equalities(Eigen::MatrixXd a_mat, Eigen::VectorXd b_vec,
                                  Eigen::MatrixXd e_mat, Eigen::VectorXd f_vec);
  // The probability simplex {v >= 0, sum v = 1} in dimension d.
  static Polytope simplex(int d);
};

struct VertexSet {
  std::vector<Eigen::VectorXd> points;
  double dedupe_tol = kDedupeTol;

  std::size_t size() const { return points.size(); }
};

struct EnumerationOptions {
  double feas_tol = kFeasTol;
  double dedupe_tol = kDedupeTol;
  std::size_t max_vertices = 1'000'000;
  // Radius of the initial enclosing simplex in the projected coordinates.
  // Vertices still touching this artificial frame after all constraints are
  // in signal an unbounded (or larger-than-frame) feasible set.
  double frame_radius = 1e3;
};

// Complete vertex enumeration by the double description method: equalities
// are projected out to an affine basis, inequalities are inserted
// incrementally (most-violated first) into an enclosing simplex, and the
// surviving intersection points are lifted back. Points closer than
// dedupe_tol in L-infinity are merged.
//
// Throws EmptyPolytope, UnboundedPolytope, or BudgetExceeded (when the
// working vertex count passes options.max_vertices).
VertexSet enumerate_vertices(const Polytope& p,
                             const EnumerationOptions& options = {});

// True iff every inequality holds within tol and every equality holds
// within tol componentwise.
bool contains(const Polytope& p, const Eigen::VectorXd& v, double tol = kFeasTol);

}  // namespace funnel

#endif  // FUNNEL_POLYTOPE_HPP_
