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

#include "funnel/protocols.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace funnel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Past this point e^alpha - 1 == e^alpha to double precision and the direct
// expressions overflow; the asymptotic forms below are exact to ~e^-700.
constexpr double kAlphaAsymptotic = 700.0;
}  // namespace

namespace detail {

double log1p_scaled(double alpha, double p) {
  if (p <= 0.0) return 0.0;
  if (alpha <= kAlphaAsymptotic) return std::log1p(std::expm1(alpha) * p);
  return alpha + std::log(p);
}

double affine_log_ratio(double alpha, double p, double r, double t) {
  if (std::isinf(alpha)) {
    if (p > 0.0 && r > 0.0) return std::log(p / r);
    if (p <= 0.0 && r <= 0.0) return 0.0;
    return p > 0.0 ? kInf : -kInf;
  }
  if (alpha <= kAlphaAsymptotic) {
    const double e = std::expm1(alpha);
    return std::log((e * p + t) / (e * r + t));
  }
  const double num = p > 0.0 ? alpha + std::log(p) : std::log(t);
  const double den = r > 0.0 ? alpha + std::log(r) : std::log(t);
  return num - den;
}

}  // namespace detail

Channel grr_channel(double alpha, int a) {
  if (a < 1) throw DimensionMismatch("alphabet size must be >= 1");
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
  const double decay = std::exp(-alpha);  // 0 at alpha = +inf
  const double keep = 1.0 / (1.0 + (a - 1) * decay);
  const double off = keep * decay;
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(a, a, off);
  q.diagonal().setConstant(keep);
  return Channel(std::move(q));
}

double grr_lip(double alpha, const JointDistribution& j) {
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
  const Eigen::VectorXd& p_x = j.data_marginal();
  double worst = 0.0;
  for (int s = 0; s < j.secret_size(); ++s) {
    const Eigen::VectorXd cond = j.data_given_secret(s);
    for (int x = 0; x < j.data_size(); ++x) {
      worst = std::max(
          worst, std::abs(detail::affine_log_ratio(alpha, cond(x), p_x(x), 1.0)));
    }
  }
  return worst;
}

namespace {

// Subset sums dp[mask] = sum_{x in mask} p(x) for all 2^a masks.
void subset_sums(const Eigen::VectorXd& p, std::vector<double>& dp) {
  const std::size_t total = dp.size();
  dp[0] = 0.0;
  for (std::size_t mask = 1; mask < total; ++mask) {
    const std::size_t low = mask & (mask - 1);  // mask without lowest bit
    const int bit = std::countr_zero(mask);
    dp[mask] = dp[low] + p(bit);
  }
}

}  // namespace

OueEvaluation oue_evaluate(double alpha, const JointDistribution& j) {
  const int a = j.data_size();
  const int c = j.secret_size();
  if (a > 20) {
    throw AlphabetTooLarge("OUE subset space infeasible beyond a = 20 (got " +
                           std::to_string(a) + ")");
  }
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");

  const std::size_t total = std::size_t{1} << a;
  std::vector<double> v(total), u(total);
  subset_sums(j.data_marginal(), v);

  OueEvaluation out;
  for (int s = 0; s < c; ++s) {
    subset_sums(j.data_given_secret(s), u);
    for (std::size_t mask = 0; mask < total; ++mask) {
      const double log_ratio =
          detail::affine_log_ratio(alpha, u[mask], v[mask], 1.0);
      out.lip = std::max(out.lip, std::abs(log_ratio));
    }
  }

  if (std::isinf(alpha)) {
    // Only the true category's fair bit survives: Y = {x} or {} equally.
    out.utility_nats = 0.5 * j.entropy_data();
    return out;
  }

  // I(X;Y) where P(y|x) = C_{#y} (1 + (e^a-1) 1{x in y}) with
  // C_k = e^{(a-k-1) alpha} / (2 (e^a+1)^{a-1}); grouping inputs by
  // membership leaves a per-mask expression in the subset mass v alone.
  const double log_ep1 =
      alpha <= kAlphaAsymptotic ? std::log(std::exp(alpha) + 1.0) : alpha;
  std::vector<double> log_c(a + 1);
  for (int k = 0; k <= a; ++k) {
    log_c[k] = (a - k - 1) * alpha - std::log(2.0) - (a - 1) * log_ep1;
  }
  double info = 0.0;
  for (std::size_t mask = 0; mask < total; ++mask) {
    const int k = std::popcount(mask);
    const double lv = detail::log1p_scaled(alpha, v[mask]);
    const double w_in = std::exp(log_c[k] + alpha);   // Q(y|x) for x in y
    const double w_out = std::exp(log_c[k]);          // Q(y|x) for x not in y
    info += w_in * v[mask] * (alpha - lv) + w_out * (1.0 - v[mask]) * (-lv);
  }
  out.utility_nats = std::max(info, 0.0);
  return out;
}

double oue_lip(double alpha, const JointDistribution& j) {
  const int a = j.data_size();
  const int c = j.secret_size();
  if (a > 20) {
    throw AlphabetTooLarge("OUE subset space infeasible beyond a = 20 (got " +
                           std::to_string(a) + ")");
  }
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
  const std::size_t total = std::size_t{1} << a;
  std::vector<double> v(total), u(total);
  subset_sums(j.data_marginal(), v);
  double lip = 0.0;
  for (int s = 0; s < c; ++s) {
    subset_sums(j.data_given_secret(s), u);
    for (std::size_t mask = 0; mask < total; ++mask) {
      lip = std::max(
          lip, std::abs(detail::affine_log_ratio(alpha, u[mask], v[mask], 1.0)));
    }
  }
  return lip;
}

Channel oue_channel(double alpha, int a) {
  if (a > 12) {
    throw AlphabetTooLarge("dense OUE channel restricted to a <= 12");
  }
  if (!(alpha >= 0.0) || std::isinf(alpha)) {
    throw Error("dense OUE channel needs finite alpha >= 0");
  }
  const std::size_t total = std::size_t{1} << a;
  const double p_other = 1.0 / (std::exp(alpha) + 1.0);
  Eigen::MatrixXd q(total, a);
  std::vector<std::string> labels(total);
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::string label;
    for (int x = 0; x < a; ++x) label += (mask >> x) & 1 ? '1' : '0';
    labels[mask] = label;
    for (int x = 0; x < a; ++x) {
      double prob = 1.0;
      for (int x2 = 0; x2 < a; ++x2) {
        const bool one = (mask >> x2) & 1;
        const double p_one = x2 == x ? 0.5 : p_other;
        prob *= one ? p_one : 1.0 - p_one;
      }
      q(mask, x) = prob;
    }
  }
  return Channel(std::move(q), std::move(labels));
}

int cr_sample(double alpha, const JointDistribution& j, int s, int x,
              std::mt19937_64& rng) {
  const int c = j.secret_size();
  if (s < 0 || s >= c || x < 0 || x >= j.data_size()) {
    throw DimensionMismatch("(s, x) out of range");
  }
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep = 1.0 / (1.0 + (c - 1) * std::exp(-alpha));
  int masked = s;
  if (c > 1 && unit(rng) >= keep) {
    int k = static_cast<int>(unit(rng) * (c - 1));
    if (k >= c - 1) k = c - 2;
    masked = k >= s ? k + 1 : k;
  }
  if (masked == s) return x;
  const Eigen::VectorXd cond = j.data_given_secret(masked);
  double cum = 0.0;
  const double draw = unit(rng);
  for (int y = 0; y < j.data_size(); ++y) {
    cum += cond(y);
    if (draw < cum) return y;
  }
  return j.data_size() - 1;
}

CrChannel cr_channel(double alpha, const JointDistribution& j) {
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
  const int a = j.data_size();
  const int c = j.secret_size();
  const double keep = 1.0 / (1.0 + (c - 1) * std::exp(-alpha));
  const double other = c > 1 ? (1.0 - keep) / (c - 1) : 0.0;

  Eigen::MatrixXd cond(a, c);  // column s = p_{X|s}
  for (int s = 0; s < c; ++s) cond.col(s) = j.data_given_secret(s);

  std::vector<Eigen::MatrixXd> per_secret(c);
  Eigen::MatrixXd y_given_s(a, c);
  for (int s = 0; s < c; ++s) {
    Eigen::VectorXd others = Eigen::VectorXd::Zero(a);
    for (int sp = 0; sp < c; ++sp) {
      if (sp != s) others += cond.col(sp);
    }
    per_secret[s] = other * others.replicate(1, a);
    per_secret[s].diagonal().array() += keep;
    y_given_s.col(s) = keep * cond.col(s) + other * others;
  }
  CrChannel out{SecretAwareChannel(std::move(per_secret)),
                std::move(y_given_s), Eigen::VectorXd()};
  out.y_marginal = out.y_given_s * j.secret_marginal();
  return out;
}

double cr_lip(double alpha, const JointDistribution& j) {
  if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
  const Eigen::VectorXd& p_x = j.data_marginal();
  const int a = j.data_size();
  const int c = j.secret_size();
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(a);  // sum_s' p_{x|s'}
  for (int s = 0; s < c; ++s) row_sum += j.data_given_secret(s);
  double worst = 0.0;
  for (int s = 0; s < c; ++s) {
    const Eigen::VectorXd cond = j.data_given_secret(s);
    for (int x = 0; x < a; ++x) {
      worst = std::max(worst, std::abs(detail::affine_log_ratio(
                                  alpha, cond(x), p_x(x), row_sum(x))));
    }
  }
  return worst;
}

double cr_utility(double alpha, const JointDistribution& j) {
  const CrChannel cr = cr_channel(alpha, j);
  const int a = j.data_size();
  Eigen::MatrixXd joint_xy = Eigen::MatrixXd::Zero(a, a);
  for (int s = 0; s < j.secret_size(); ++s) {
    for (int x = 0; x < a; ++x) {
      joint_xy.row(x) += j(s, x) * cr.channel.given_secret(s).col(x).transpose();
    }
  }
  return mutual_information(joint_xy);
}

double solve_alpha(double target_eps,
                   const std::function<double(double)>& leakage_of_alpha) {
  if (!(target_eps >= 0.0) || std::isinf(target_eps)) {
    throw Error("target epsilon must be finite and >= 0");
  }
  constexpr double kTol = 1e-9;
  constexpr double kBracketLimit = 1e4;
  constexpr int kMaxBisection = 200;

  double lo = 0.0;
  double f_lo = leakage_of_alpha(0.0);
  if (f_lo > target_eps + kTol) {
    throw Error("leakage at alpha = 0 already exceeds the target");
  }
  if (std::abs(f_lo - target_eps) <= kTol) return 0.0;

  double hi = 1.0;
  double f_hi = leakage_of_alpha(hi);
  if (f_hi < f_lo - kTol) {
    throw NonMonotoneDetected("leakage decreased between alpha 0 and 1");
  }
  while (f_hi < target_eps && hi <= kBracketLimit) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = leakage_of_alpha(hi);
    if (f_hi < f_lo - kTol) {
      throw NonMonotoneDetected("leakage decreased while expanding the bracket");
    }
  }
  if (f_hi < target_eps) {
    // Saturates below the target: no constraint binds, identity-like limit.
    return kInf;
  }
  if (std::abs(f_hi - target_eps) <= kTol) return hi;

  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = leakage_of_alpha(mid);
    if (f_mid < f_lo - kTol || (!std::isinf(f_hi) && f_mid > f_hi + kTol)) {
      throw NonMonotoneDetected("leakage not monotone inside the bracket");
    }
    if (std::abs(f_mid - target_eps) <= kTol) return mid;
    if (f_mid < target_eps) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_alpha(double target_eps, CalibratedProtocol protocol,
                   const JointDistribution& j) {
  switch (protocol) {
    case CalibratedProtocol::kGrr:
      return solve_alpha(target_eps,
                         [&](double a) { return grr_lip(a, j); });
    case CalibratedProtocol::kOue:
      return solve_alpha(target_eps,
                         [&](double a) { return oue_lip(a, j); });
    case CalibratedProtocol::kCr:
      return solve_alpha(target_eps, [&](double a) { return cr_lip(a, j); });
  }
  throw Error("unknown protocol");
}

}  // namespace funnel
