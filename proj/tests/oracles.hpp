// Test-only oracles, deliberately independent of the library's own
// enumeration, LP, and leakage code paths: plain dense solves and direct
// summation only.

#ifndef FUNNEL_TESTS_ORACLES_HPP_
#define FUNNEL_TESTS_ORACLES_HPP_

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "funnel/joint_distribution.hpp"
#include "funnel/polytope.hpp"

namespace funnel::testing {

// Every d-subset of rows of [A; E] solved as a linear system; solutions that
// satisfy all constraints are vertices. Exponential, for small d only.
inline std::vector<Eigen::VectorXd> brute_force_vertices(const Polytope& p,
                                                         double feas_tol = 1e-9,
                                                         double dedupe_tol = 1e-7) {
  const int d = p.dim();
  const int n_ineq = static_cast<int>(p.A.rows());
  const int n_eq = static_cast<int>(p.E.rows());
  const int n = n_ineq + n_eq;

  Eigen::MatrixXd rows(n, d);
  Eigen::VectorXd rhs(n);
  if (n_ineq > 0) {
    rows.topRows(n_ineq) = p.A;
    rhs.head(n_ineq) = p.b;
  }
  if (n_eq > 0) {
    rows.bottomRows(n_eq) = p.E;
    rhs.tail(n_eq) = p.f;
  }

  std::vector<Eigen::VectorXd> found;
  std::vector<int> pick(d);
  auto feasible = [&](const Eigen::VectorXd& v) {
    if (n_ineq > 0 && ((p.A * v - p.b).array() > feas_tol).any()) return false;
    if (n_eq > 0 && ((p.E * v - p.f).array().abs() > feas_tol).any()) return false;
    return true;
  };
  auto record = [&](const Eigen::VectorXd& v) {
    for (const auto& w : found) {
      if ((w - v).lpNorm<Eigen::Infinity>() <= dedupe_tol) return;
    }
    found.push_back(v);
  };

  // Iterate d-combinations of row indices.
  for (int i = 0; i < d; ++i) pick[i] = i;
  if (n < d) return found;
  while (true) {
    Eigen::MatrixXd sub(d, d);
    Eigen::VectorXd sub_rhs(d);
    for (int i = 0; i < d; ++i) {
      sub.row(i) = rows.row(pick[i]);
      sub_rhs(i) = rhs(pick[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      Eigen::VectorXd v = lu.solve(sub_rhs);
      if (v.allFinite() && feasible(v)) record(v);
    }
    int i = d - 1;
    while (i >= 0 && pick[i] == n - d + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < d; ++k) pick[k] = pick[k - 1] + 1;
  }
  return found;
}

inline bool same_vertex_sets(const std::vector<Eigen::VectorXd>& lhs,
                             const std::vector<Eigen::VectorXd>& rhs,
                             double tol = 1e-6) {
  if (lhs.size() != rhs.size()) return false;
  std::vector<bool> used(rhs.size(), false);
  for (const auto& v : lhs) {
    bool matched = false;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      if (!used[i] && (v - rhs[i]).lpNorm<Eigen::Infinity>() <= tol) {
        used[i] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

// A box cut by random halfspaces that keep the origin feasible; bounded and
// nonempty by construction.
inline Polytope random_bounded_polytope(std::mt19937_64& rng, int d,
                                        int extra_rows) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> offset(0.1, 1.2);
  Eigen::MatrixXd a(2 * d + extra_rows, d);
  Eigen::VectorXd b(2 * d + extra_rows);
  a.topRows(d) = Eigen::MatrixXd::Identity(d, d);
  a.middleRows(d, d) = -Eigen::MatrixXd::Identity(d, d);
  b.head(2 * d).setOnes();
  for (int r = 0; r < extra_rows; ++r) {
    Eigen::VectorXd normal(d);
    do {
      for (int i = 0; i < d; ++i) normal(i) = gauss(rng);
    } while (normal.norm() < 1e-6);
    normal.normalize();
    a.row(2 * d + r) = normal.transpose();
    b(2 * d + r) = offset(rng);
  }
  return Polytope::from_inequalities(std::move(a), std::move(b));
}

// Exhaustive grid search over binary channels Q = [[q00, q01], [1-q00,
// 1-q01]] at the given step: the best I(X;Y) subject to the chosen leakage
// metric staying within eps. Leakage and information are recomputed here
// from first principles.
struct GridOracleResult {
  double best_utility = -1.0;
  double q00 = 0.0;
  double q01 = 0.0;
};

inline GridOracleResult grid_search_binary(const JointDistribution& j,
                                           double eps, bool lip_metric,
                                           double step = 1e-3) {
  const double p0 = j.data_marginal()(0);
  const double p1 = j.data_marginal()(1);
  const int c = j.secret_size();
  std::vector<Eigen::VectorXd> cond(c);
  for (int s = 0; s < c; ++s) cond[s] = j.data_given_secret(s);

  GridOracleResult best;
  const int steps = static_cast<int>(std::lround(1.0 / step));
  for (int i = 0; i <= steps; ++i) {
    const double q00 = static_cast<double>(i) * step;
    for (int k = 0; k <= steps; ++k) {
      const double q01 = static_cast<double>(k) * step;

      // P(Y=0 | S=s) for every secret; y=1 is the complement.
      bool ok = true;
      std::vector<double> y0(c);
      for (int s = 0; s < c; ++s) y0[s] = q00 * cond[s](0) + q01 * cond[s](1);
      const double y0_marg = q00 * p0 + q01 * p1;
      if (lip_metric) {
        for (int s = 0; s < c && ok; ++s) {
          for (int y = 0; y < 2 && ok; ++y) {
            const double num = y == 0 ? y0[s] : 1.0 - y0[s];
            const double den = y == 0 ? y0_marg : 1.0 - y0_marg;
            if (den <= 0.0) continue;  // unreachable output
            if (num <= 0.0 || std::abs(std::log(num / den)) > eps + 1e-12) {
              ok = false;
            }
          }
        }
      } else {
        for (int s = 0; s < c && ok; ++s) {
          for (int sp = 0; sp < c && ok; ++sp) {
            if (sp == s) continue;
            for (int y = 0; y < 2 && ok; ++y) {
              const double num = y == 0 ? y0[s] : 1.0 - y0[s];
              const double den = y == 0 ? y0[sp] : 1.0 - y0[sp];
              if (num <= 0.0 && den <= 0.0) continue;
              if (den <= 0.0 || std::log(num / den) > eps + 1e-12) ok = false;
            }
          }
        }
      }
      if (!ok) continue;

      double info = 0.0;
      const double q[2][2] = {{q00, q01}, {1.0 - q00, 1.0 - q01}};
      const double px[2] = {p0, p1};
      const double py[2] = {y0_marg, 1.0 - y0_marg};
      for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
          const double joint = q[y][x] * px[x];
          if (joint > 0.0) info += joint * std::log(q[y][x] / py[y]);
        }
      }
      if (info > best.best_utility) {
        best.best_utility = info;
        best.q00 = q00;
        best.q01 = q01;
      }
    }
  }
  return best;
}

}  // namespace funnel::testing

#endif  // FUNNEL_TESTS_ORACLES_HPP_
