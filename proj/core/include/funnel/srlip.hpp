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

#ifndef FUNNEL_SRLIP_HPP_
#define FUNNEL_SRLIP_HPP_

#include <cstddef>
#include <vector>

#include "funnel/channel.hpp"
#include "funnel/joint_distribution.hpp"
#include "funnel/polytope.hpp"
#include "funnel/synthesis.hpp"

namespace funnel {

// Side-channel resistant LIP treats every subset of attributes an attacker
// may already know as a possible conditioning event; a protocol must stay
// within e^{+-eps} of the conditioned output distribution in all of them.

// Feasible per-attribute channels: square stochastic matrices Q over
// attribute `attr`'s alphabet such that for every subset J of the *other*
// attributes, every positive-mass context x^J, every secret s and output y,
// e^{-eps_budget} (Q p_{X^attr|x^J})_y <= (Q p_{X^attr|s,x^J})_y
//                                      <= e^{+eps_budget} (Q p_{X^attr|x^J})_y.
// Zero-mass (s, x^J) cells contribute no rows. Throws
// AttributeBudgetExceeded when the prior has more than 8 attributes.
Polytope srlip_attribute_polytope(const JointDistribution& j,
                                  double eps_budget, int attr);

struct SrlipBundle {
  std::vector<Channel> attribute_channels;
  std::vector<double> budgets;        // per-attribute epsilon
  double epsilon_total = 0.0;
  Channel product = Channel::constant(1);  // channel over the full alphabet
  double utility_nats = 0.0;          // I(X;Y) of the product channel
  std::vector<std::size_t> vertex_counts;
  Certificate certificate;
};

// Builds an eps-SRLIP protocol by splitting the budget across attributes
// (uniformly unless a split is given), enumerating each attribute polytope
// and keeping the vertex that maximises I(X^j;Y^j). The resulting product
// channel is re-verified with srlip_check.
SrlipBundle srlip_protocol(const JointDistribution& j, double eps,
                           std::vector<double> split = {},
                           const EnumerationOptions& options = {});

struct SrlipWitness {
  int y = -1;
  int s = -1;
  JointDistribution::Context context;  // the conditioned attribute values
};

struct SrlipCheckResult {
  bool pass = false;
  double max_abs_log_ratio = 0.0;
  SrlipWitness witness;
};

// Exhaustive check of the definition: every attacker context J, every
// positive-mass x^J, every secret and output. The empty context reproduces
// the plain LIP ratio. Channel input must cover the full data alphabet.
SrlipCheckResult srlip_check(const Channel& q, const JointDistribution& j,
                             double eps, double tol = kFeasTol);

}  // namespace funnel

#endif  // FUNNEL_SRLIP_HPP_
