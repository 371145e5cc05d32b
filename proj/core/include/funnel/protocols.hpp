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

#ifndef FUNNEL_PROTOCOLS_HPP_
#define FUNNEL_PROTOCOLS_HPP_

#include <functional>
#include <random>

#include "funnel/channel.hpp"
#include "funnel/joint_distribution.hpp"

namespace funnel {

// Generalised randomised response over an alphabet of size a: keep the true
// value with probability e^alpha / (e^alpha + a - 1), otherwise report one
// of the others uniformly. alpha may be +infinity (identity channel).
Channel grr_channel(double alpha, int a);

// Closed-form worst-case LIP leakage of GRR under the given prior:
// max_{x,s} | ln (1 + (e^a - 1) p_{x|s}) / (1 + (e^a - 1) p_x) |.
double grr_lip(double alpha, const JointDistribution& j);

// Optimised unary encoding: the output is one independent Bernoulli bit per
// category, the true category's bit fair, the others 1 with probability
// 1/(e^alpha+1). The output space is the 2^a subsets, iterated rather than
// materialised; alphabets above 20 categories are rejected.
struct OueEvaluation {
  double lip = 0.0;
  double utility_nats = 0.0;
};
OueEvaluation oue_evaluate(double alpha, const JointDistribution& j);
double oue_lip(double alpha, const JointDistribution& j);

// Dense subset-output channel for small alphabets (tests and eval); output
// y is the subset with bit x' set iff category x' reported a 1. a <= 12.
Channel oue_channel(double alpha, int a);

// Conditional reporting: mask the secret by randomised response; release the
// true x when the masked secret matches, otherwise a fresh draw from the
// data distribution conditioned on the masked secret.
int cr_sample(double alpha, const JointDistribution& j, int s, int x,
              std::mt19937_64& rng);

// The CR mechanism in closed form: per-(x,s) output distributions plus the
// induced P(Y|S) columns and output marginal.
struct CrChannel {
  SecretAwareChannel channel;
  Eigen::MatrixXd y_given_s;  // (a outputs) x (c secrets)
  Eigen::VectorXd y_marginal;
};
CrChannel cr_channel(double alpha, const JointDistribution& j);

// Exact LIP level L(alpha) achieved by CR; satisfies L(alpha) <= alpha.
double cr_lip(double alpha, const JointDistribution& j);

// I(X;Y) in nats with Y = CR(X,S).
double cr_utility(double alpha, const JointDistribution& j);

enum class CalibratedProtocol { kGrr, kOue, kCr };

// Smallest alpha whose leakage meets target_eps within 1e-9, found by
// bracketing and bisection on the (empirically increasing) leakage curve.
// Returns +infinity when the leakage saturates below the target, meaning no
// privacy constraint binds and the identity-like limit protocol applies.
// Throws NonMonotoneDetected if an evaluation contradicts monotonicity by
// more than 1e-9.
double solve_alpha(double target_eps,
                   const std::function<double(double)>& leakage_of_alpha);
double solve_alpha(double target_eps, CalibratedProtocol protocol,
                   const JointDistribution& j);

namespace detail {
// ln(1 + (e^alpha - 1) p) for finite alpha >= 0, p >= 0, stable past the
// overflow point of e^alpha.
double log1p_scaled(double alpha, double p);
// ln( ((e^alpha - 1) p + t) / ((e^alpha - 1) r + t) ) for t > 0 and
// alpha in [0, +inf].
double affine_log_ratio(double alpha, double p, double r, double t);
}  // namespace detail

}  // namespace funnel

#endif  // FUNNEL_PROTOCOLS_HPP_
