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

#ifndef FUNNEL_SYNTHESIS_HPP_
#define FUNNEL_SYNTHESIS_HPP_

#include <cstddef>
#include <string>

#include "funnel/channel.hpp"
#include "funnel/joint_distribution.hpp"
#include "funnel/polytope.hpp"

namespace funnel {

// Re-measured leakage of a synthesized protocol, produced by the generic
// evaluators rather than the synthesis path.
struct Certificate {
  std::string metric;
  double epsilon = 0.0;
  double measured = 0.0;
  bool pass = false;
};

// The (R, q) parameterisation of a protocol: output mass q over b outputs
// and posterior columns R(:,y) = p_{X|Y=y}, linked to the prior by R q = p_X.
struct ReverseChannel {
  Eigen::MatrixXd R;  // a x b
  Eigen::VectorXd q;  // b

  int output_size() const { return static_cast<int>(q.size()); }
};

// Feasible set of eps-LDP channels with b = a outputs, as a polytope over
// column-major vectorised channel matrices: column-stochasticity equalities,
// nonnegativity, and for every ordered secret pair (s,s') and output y
// (Q p_{X|s})_y <= e^eps (Q p_{X|s'})_y. eps = +infinity (or past the
// overflow point of e^eps) drops the leakage rows entirely.
Polytope ldp_channel_polytope(const JointDistribution& j, double eps);

// Admissible posterior columns under eps-LIP: the probability simplex cut by
// e^-eps p_s <= p_{s|X} . v <= e^eps p_s for every secret s.
Polytope lip_posterior_polytope(const JointDistribution& j, double eps);

struct LdpSolution {
  Channel channel = Channel::constant(1);
  double utility_nats = 0.0;
  std::size_t vertex_count = 0;
  Certificate certificate;
};

// Maximises I(X;Y) over eps-LDP channels: the maximum of a convex function
// over a polytope sits at a vertex, so enumerate and take the best one
// (ties broken by the lexicographically smallest vertex).
LdpSolution optimal_ldp(const JointDistribution& j, double eps,
                        const EnumerationOptions& options = {});

struct LipSolution {
  ReverseChannel reverse;
  Channel channel = Channel::constant(1);
  double utility_nats = 0.0;
  double lp_objective = 0.0;  // sum_i alpha_i H(v_i); utility = H(X) - this
  std::size_t vertex_count = 0;
  Certificate certificate;
};

// Maximises I(X;Y) over eps-LIP channels: enumerate the posterior polytope's
// vertices v_i, pick mixture weights by the linear program
// min sum_i H(v_i) alpha_i subject to alpha >= 0, sum_i alpha_i v_i = p_X,
// and read the protocol off the support (q_y = alpha_y, R(:,y) = v_y).
// The support size never exceeds a.
LipSolution optimal_lip(const JointDistribution& j, double eps,
                        const EnumerationOptions& options = {});

// Threshold below which LP weights count as zero when reading the support.
inline constexpr double kLpSupportTol = kSupportTol;

}  // namespace funnel

#endif  // FUNNEL_SYNTHESIS_HPP_
