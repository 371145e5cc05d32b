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

#include "funnel/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "funnel/simplex_lp.hpp"

namespace funnel {

namespace {

bool eps_unbounded(double eps) {
  return std::isinf(eps) || eps >= kEpsilonUnbounded;
}

// Output relabeling: sort channel rows lexicographically so that equivalent
// protocols serialise identically. Returns the row permutation applied.
std::vector<int> canonical_row_order(const Eigen::MatrixXd& q) {
  std::vector<int> order(q.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int r1, int r2) {
    for (Eigen::Index x = 0; x < q.cols(); ++x) {
      if (q(r1, x) != q(r2, x)) return q(r1, x) < q(r2, x);
    }
    return r1 < r2;
  });
  return order;
}

Eigen::MatrixXd apply_row_order(const Eigen::MatrixXd& q,
                                const std::vector<int>& order) {
  Eigen::MatrixXd out(q.rows(), q.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(i) = q.row(order[i]);
  return out;
}

}  // namespace

Polytope ldp_channel_polytope(const JointDistribution& j, double eps) {
  if (!(eps >= 0.0)) throw Error("epsilon must be >= 0");
  const int a = j.data_size();
  const int c = j.secret_size();
  const int dim = a * a;  // v[x*a + y] = Q(y,x)

  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(a, dim);
  for (int x = 0; x < a; ++x) {
    for (int y = 0; y < a; ++y) eq(x, x * a + y) = 1.0;
  }
  Eigen::VectorXd eq_rhs = Eigen::VectorXd::Ones(a);

  const int leak_rows = eps_unbounded(eps) ? 0 : a * c * (c - 1);
  Eigen::MatrixXd ineq = Eigen::MatrixXd::Zero(dim + leak_rows, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + leak_rows);
  ineq.topLeftCorner(dim, dim) = -Eigen::MatrixXd::Identity(dim, dim);

  if (leak_rows > 0) {
    const double grow = std::exp(eps);
    int row = dim;
    for (int s = 0; s < c; ++s) {
      const Eigen::VectorXd ps = j.data_given_secret(s);
      for (int sp = 0; sp < c; ++sp) {
        if (sp == s) continue;
        const Eigen::VectorXd psp = j.data_given_secret(sp);
        for (int y = 0; y < a; ++y) {
          for (int x = 0; x < a; ++x) {
            ineq(row, x * a + y) = ps(x) - grow * psp(x);
          }
          ++row;
        }
      }
    }
  }
  return Polytope::with_equalities(std::move(ineq), std::move(rhs),
                                   std::move(eq), std::move(eq_rhs));
}

Polytope lip_posterior_polytope(const JointDistribution& j, double eps) {
  if (!(eps >= 0.0)) throw Error("epsilon must be >= 0");
  const int a = j.data_size();
  const int c = j.secret_size();

  const int leak_rows = eps_unbounded(eps) ? 0 : 2 * c;
  Eigen::MatrixXd ineq = Eigen::MatrixXd::Zero(a + leak_rows, a);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a + leak_rows);
  ineq.topLeftCorner(a, a) = -Eigen::MatrixXd::Identity(a, a);

  if (leak_rows > 0) {
    const double grow = std::exp(eps);
    const double shrink = std::exp(-eps);
    const Eigen::VectorXd& p_s = j.secret_marginal();
    for (int s = 0; s < c; ++s) {
      ineq.row(a + 2 * s) = j.posterior().row(s);
      rhs(a + 2 * s) = grow * p_s(s);
      ineq.row(a + 2 * s + 1) = -j.posterior().row(s);
      rhs(a + 2 * s + 1) = -shrink * p_s(s);
    }
  }
  return Polytope::with_equalities(std::move(ineq), std::move(rhs),
                                   Eigen::MatrixXd::Ones(1, a),
                                   Eigen::VectorXd::Ones(1));
}

LdpSolution optimal_ldp(const JointDistribution& j, double eps,
                        const EnumerationOptions& options) {
  const int a = j.data_size();
  const Polytope gamma = ldp_channel_polytope(j, eps);
  const VertexSet vertices = enumerate_vertices(gamma, options);

  double best_utility = -1.0;
  const Eigen::VectorXd* best = nullptr;
  for (const auto& v : vertices.points) {
    Eigen::MatrixXd q(a, a);
    for (int x = 0; x < a; ++x) q.col(x) = v.segment(x * a, a);
    const double utility =
        mutual_information(q * j.data_marginal().asDiagonal());
    // Vertices arrive lexicographically sorted, so keeping the first vertex
    // within tie tolerance of the maximum picks the smallest one.
    if (utility > best_utility + 1e-12) {
      best_utility = utility;
      best = &v;
    }
  }
  if (best == nullptr) throw EmptyPolytope("LDP polytope yielded no vertices");

  Eigen::MatrixXd q(a, a);
  for (int x = 0; x < a; ++x) q.col(x) = best->segment(x * a, a);
  q = apply_row_order(q, canonical_row_order(q));

  LdpSolution out{Channel::from_noisy(std::move(q), 1e-7), 0.0,
                  vertices.size(), Certificate{}};
  out.utility_nats = channel_utility(out.channel, j);
  const PrivacyReport report = ldp_of(out.channel, j);
  out.certificate = Certificate{"ldp", eps, report.value,
                                eps_unbounded(eps) || report.value <= eps + 1e-9};
  return out;
}

LipSolution optimal_lip(const JointDistribution& j, double eps,
                        const EnumerationOptions& options) {
  const int a = j.data_size();
  const Polytope delta = lip_posterior_polytope(j, eps);
  const VertexSet vertices = enumerate_vertices(delta, options);
  const int m = static_cast<int>(vertices.size());

  Eigen::MatrixXd lp_columns(a, m);
  Eigen::VectorXd cost(m);
  for (int i = 0; i < m; ++i) {
    lp_columns.col(i) = vertices.points[i];
    cost(i) = entropy(vertices.points[i]);
  }
  LpResult lp;
  try {
    lp = solve_equality_lp(lp_columns, j.data_marginal(), cost);
  } catch (const LPInfeasible& e) {
    // p_X always lies in the posterior polytope, so this is numerical only.
    throw LPInfeasible(std::string("mixture LP failed unexpectedly: ") +
                       e.what());
  }

  std::vector<int> support;
  for (int i = 0; i < m; ++i) {
    if (lp.x(i) > kLpSupportTol) support.push_back(i);
  }
  if (support.empty()) throw LPInfeasible("LP support is empty");
  const int b = static_cast<int>(support.size());

  Eigen::MatrixXd r(a, b);
  Eigen::VectorXd q_mass(b);
  for (int i = 0; i < b; ++i) {
    Eigen::VectorXd col = vertices.points[support[i]];
    for (int x = 0; x < a; ++x) col(x) = std::max(col(x), 0.0);
    r.col(i) = col / col.sum();
    q_mass(i) = lp.x(support[i]);
  }
  q_mass /= q_mass.sum();

  // Forward direction Q(y,x) = q_y R(x,y) / p_x.
  Eigen::MatrixXd forward(b, a);
  for (int y = 0; y < b; ++y) {
    for (int x = 0; x < a; ++x) {
      forward(y, x) = q_mass(y) * r(x, y) / j.data_marginal()(x);
    }
  }
  const std::vector<int> order = canonical_row_order(forward);
  forward = apply_row_order(forward, order);
  Eigen::MatrixXd r_sorted(a, b);
  Eigen::VectorXd q_sorted(b);
  for (int i = 0; i < b; ++i) {
    r_sorted.col(i) = r.col(order[i]);
    q_sorted(i) = q_mass(order[i]);
  }

  LipSolution out{ReverseChannel{std::move(r_sorted), std::move(q_sorted)},
                  Channel::from_noisy(std::move(forward), 1e-6),
                  j.entropy_data() - lp.objective,
                  lp.objective,
                  vertices.size(),
                  Certificate{}};
  const PrivacyReport report = lip_of(out.channel, j);
  out.certificate = Certificate{"lip", eps, report.value,
                                eps_unbounded(eps) || report.value <= eps + 1e-9};
  return out;
}

}  // namespace funnel
