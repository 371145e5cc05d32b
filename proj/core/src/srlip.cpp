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

#include "funnel/srlip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace funnel {

namespace {

constexpr int kMaxAttributes = 8;

bool eps_unbounded(double eps) {
  return std::isinf(eps) || eps >= kEpsilonUnbounded;
}

// Visits every assignment of the given attributes (an odometer over their
// alphabets), passing the context to the callback.
template <typename F>
void for_each_context(const JointDistribution& j,
                      const std::vector<int>& attrs, F&& visit) {
  std::vector<int> idx(attrs.size(), 0);
  while (true) {
    JointDistribution::Context ctx;
    ctx.reserve(attrs.size());
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      ctx.emplace_back(attrs[i], idx[i]);
    }
    visit(ctx);
    std::size_t pos = 0;
    while (pos < attrs.size()) {
      if (++idx[pos] < j.attribute_size(attrs[pos])) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == attrs.size()) return;
  }
}

std::vector<int> subset_attrs(unsigned mask, const std::vector<int>& pool) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (mask & (1u << i)) out.push_back(pool[i]);
  }
  return out;
}

bool lex_less_rows(const Eigen::MatrixXd& q, int r1, int r2) {
  for (Eigen::Index x = 0; x < q.cols(); ++x) {
    if (q(r1, x) != q(r2, x)) return q(r1, x) < q(r2, x);
  }
  return r1 < r2;
}

Eigen::MatrixXd canonicalise_rows(Eigen::MatrixXd q) {
  std::vector<int> order(q.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int r1, int r2) { return lex_less_rows(q, r1, r2); });
  Eigen::MatrixXd out(q.rows(), q.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(i) = q.row(order[i]);
  return out;
}

}  // namespace

Polytope srlip_attribute_polytope(const JointDistribution& j,
                                  double eps_budget, int attr) {
  if (!(eps_budget >= 0.0)) throw Error("epsilon budget must be >= 0");
  const int m = j.num_attributes();
  if (m > kMaxAttributes) {
    throw AttributeBudgetExceeded(
        "conditioning-subset sweep infeasible beyond 8 attributes (got " +
        std::to_string(m) + ")");
  }
  if (attr < 0 || attr >= m) throw DimensionMismatch("attribute out of range");

  const int aj = j.attribute_size(attr);
  const int c = j.secret_size();
  const int dim = aj * aj;  // v[x*aj + y] = Q(y,x)

  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(aj, dim);
  for (int x = 0; x < aj; ++x) {
    for (int y = 0; y < aj; ++y) eq(x, x * aj + y) = 1.0;
  }

  std::vector<Eigen::VectorXd> rows;
  if (!eps_unbounded(eps_budget)) {
    const double grow = std::exp(eps_budget);
    const double shrink = std::exp(-eps_budget);
    std::vector<int> others;
    for (int o = 0; o < m; ++o) {
      if (o != attr) others.push_back(o);
    }
    const unsigned subsets = 1u << others.size();
    for (unsigned mask = 0; mask < subsets; ++mask) {
      const std::vector<int> chosen = subset_attrs(mask, others);
      for_each_context(j, chosen, [&](const JointDistribution::Context& ctx) {
        if (j.context_mass(ctx) <= 0.0) return;
        const Eigen::VectorXd cond = j.attribute_given_context(attr, ctx);
        for (int s = 0; s < c; ++s) {
          if (j.secret_context_mass(s, ctx) <= 0.0) continue;
          const Eigen::VectorXd cond_s =
              j.attribute_given_secret_context(attr, s, ctx);
          for (int y = 0; y < aj; ++y) {
            Eigen::VectorXd upper = Eigen::VectorXd::Zero(dim);
            Eigen::VectorXd lower = Eigen::VectorXd::Zero(dim);
            for (int x = 0; x < aj; ++x) {
              upper(x * aj + y) = cond_s(x) - grow * cond(x);
              lower(x * aj + y) = shrink * cond(x) - cond_s(x);
            }
            rows.push_back(std::move(upper));
            rows.push_back(std::move(lower));
          }
        }
      });
    }
  }

  Eigen::MatrixXd ineq =
      Eigen::MatrixXd::Zero(dim + static_cast<int>(rows.size()), dim);
  ineq.topLeftCorner(dim, dim) = -Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ineq.row(dim + static_cast<int>(i)) = rows[i].transpose();
  }
  return Polytope::with_equalities(
      std::move(ineq), Eigen::VectorXd::Zero(ineq.rows()), std::move(eq),
      Eigen::VectorXd::Ones(aj));
}

SrlipBundle srlip_protocol(const JointDistribution& j, double eps,
                           std::vector<double> split,
                           const EnumerationOptions& options) {
  if (!(eps >= 0.0)) throw Error("epsilon must be >= 0");
  const int m = j.num_attributes();
  if (split.empty()) {
    split.assign(m, eps / m);
  } else {
    if (static_cast<int>(split.size()) != m) {
      throw DimensionMismatch("budget split arity does not match attributes");
    }
    double total = 0.0;
    for (double e : split) {
      if (!(e >= 0.0)) throw Error("budget split entries must be >= 0");
      total += e;
    }
    if (!eps_unbounded(eps) && std::abs(total - eps) > 1e-9) {
      throw Error("budget split must sum to epsilon");
    }
  }

  std::vector<Channel> channels;
  std::vector<std::size_t> vertex_counts;
  channels.reserve(m);
  for (int attr = 0; attr < m; ++attr) {
    const double budget = eps_unbounded(eps)
                              ? std::numeric_limits<double>::infinity()
                              : split[attr];
    const Polytope poly = srlip_attribute_polytope(j, budget, attr);
    const VertexSet verts = enumerate_vertices(poly, options);
    vertex_counts.push_back(verts.size());

    const int aj = j.attribute_size(attr);
    const Eigen::VectorXd marginal = j.attribute_given_context(attr, {});
    double best_utility = -1.0;
    const Eigen::VectorXd* best = nullptr;
    for (const auto& v : verts.points) {
      Eigen::MatrixXd q(aj, aj);
      for (int x = 0; x < aj; ++x) q.col(x) = v.segment(x * aj, aj);
      const double utility = mutual_information(q * marginal.asDiagonal());
      if (utility > best_utility + 1e-12) {
        best_utility = utility;
        best = &v;
      }
    }
    if (best == nullptr) {
      throw EmptyPolytope("attribute polytope yielded no vertices");
    }
    Eigen::MatrixXd q(aj, aj);
    for (int x = 0; x < aj; ++x) q.col(x) = best->segment(x * aj, aj);
    channels.push_back(Channel::from_noisy(canonicalise_rows(q), 1e-7));
  }

  // Product protocol over the full alphabet; outputs use the same mixed
  // radix packing as inputs.
  const int a = j.data_size();
  Eigen::MatrixXd product(a, a);
  for (int y = 0; y < a; ++y) {
    const std::vector<int> ys = j.unpack(y);
    for (int x = 0; x < a; ++x) {
      const std::vector<int> xs = j.unpack(x);
      double prob = 1.0;
      for (int attr = 0; attr < m; ++attr) {
        prob *= channels[attr](ys[attr], xs[attr]);
      }
      product(y, x) = prob;
    }
  }

  SrlipBundle bundle{std::move(channels),
                     std::move(split),
                     eps,
                     Channel::from_noisy(std::move(product), 1e-6),
                     0.0,
                     std::move(vertex_counts),
                     Certificate{}};
  bundle.utility_nats = channel_utility(bundle.product, j);
  const SrlipCheckResult check = srlip_check(bundle.product, j, eps);
  bundle.certificate = Certificate{"srlip", eps, check.max_abs_log_ratio,
                                   eps_unbounded(eps) || check.pass};
  return bundle;
}

SrlipCheckResult srlip_check(const Channel& q, const JointDistribution& j,
                             double eps, double tol) {
  const int m = j.num_attributes();
  if (m > kMaxAttributes) {
    throw AttributeBudgetExceeded(
        "conditioning-subset sweep infeasible beyond 8 attributes");
  }
  if (q.input_size() != j.data_size()) {
    throw DimensionMismatch("channel input does not match the prior alphabet");
  }
  const int a = j.data_size();
  const int b = q.output_size();
  const int c = j.secret_size();

  SrlipCheckResult result;
  result.max_abs_log_ratio = 0.0;

  std::vector<int> all_attrs(m);
  std::iota(all_attrs.begin(), all_attrs.end(), 0);
  const unsigned subsets = 1u << m;
  for (unsigned mask = 0; mask < subsets; ++mask) {
    const std::vector<int> chosen = subset_attrs(mask, all_attrs);
    for_each_context(j, chosen, [&](const JointDistribution::Context& ctx) {
      const double ctx_mass = j.context_mass(ctx);
      if (ctx_mass <= 0.0) return;

      // P(Y=y | X^J = x^J) over the slice.
      Eigen::VectorXd out_ctx = Eigen::VectorXd::Zero(b);
      std::vector<int> slice;
      for (int x = 0; x < a; ++x) {
        bool match = true;
        const std::vector<int> xs = j.unpack(x);
        for (const auto& [attr, value] : ctx) {
          if (xs[attr] != value) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        slice.push_back(x);
        out_ctx += q.matrix().col(x) * (j.data_marginal()(x) / ctx_mass);
      }

      for (int s = 0; s < c; ++s) {
        const double s_mass = j.secret_context_mass(s, ctx);
        if (s_mass <= 0.0) continue;
        Eigen::VectorXd out_s = Eigen::VectorXd::Zero(b);
        for (int x : slice) {
          out_s += q.matrix().col(x) * (j(s, x) / s_mass);
        }
        for (int y = 0; y < b; ++y) {
          const double num = out_s(y);
          const double den = out_ctx(y);
          if (num <= 0.0 && den <= 0.0) continue;
          double abs_log;
          if (num <= 0.0 || den <= 0.0) {
            abs_log = std::numeric_limits<double>::infinity();
          } else {
            abs_log = std::abs(std::log(num / den));
          }
          if (abs_log > result.max_abs_log_ratio) {
            result.max_abs_log_ratio = abs_log;
            result.witness = SrlipWitness{y, s, ctx};
          }
        }
      }
    });
  }
  result.pass = result.max_abs_log_ratio <= eps + tol;
  return result;
}

}  // namespace funnel
