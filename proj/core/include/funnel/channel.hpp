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

#ifndef FUNNEL_CHANNEL_HPP_
#define FUNNEL_CHANNEL_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funnel/common.hpp"
#include "funnel/joint_distribution.hpp"

namespace funnel {

// A sanitisation protocol as a b-by-a matrix Q with Q(y,x) = P(Y=y | X=x).
// Columns are probability distributions over the outputs.
class Channel {
 public:
  explicit Channel(Eigen::MatrixXd q, std::vector<std::string> labels = {});

  // Builds a channel from a vector that is column-stochastic only up to
  // enumeration noise: entries within snap of zero become exactly zero
  // (rounding dust would otherwise register as reachable cells with
  // arbitrary likelihood ratios), entries in [-tol, 0) are clamped, and
  // columns are renormalised. Anything worse is rejected.
  static Channel from_noisy(Eigen::MatrixXd q, double tol = kFeasTol,
                            double snap = 1e-12);
  static Channel identity(int a);
  // Maps every input to the single output 0 (b = 1).
  static Channel constant(int a);

  int input_size() const { return static_cast<int>(q_.cols()); }
  int output_size() const { return static_cast<int>(q_.rows()); }
  double operator()(int y, int x) const { return q_(y, x); }
  const Eigen::MatrixXd& matrix() const { return q_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  Eigen::MatrixXd q_;
  std::vector<std::string> labels_;
};

// A protocol whose randomisation may read the secret: tensor
// Q(y | x, s), stored as one b-by-a matrix per secret value.
class SecretAwareChannel {
 public:
  explicit SecretAwareChannel(std::vector<Eigen::MatrixXd> per_secret);

  int secret_size() const { return static_cast<int>(per_secret_.size()); }
  int input_size() const { return static_cast<int>(per_secret_[0].cols()); }
  int output_size() const { return static_cast<int>(per_secret_[0].rows()); }
  double operator()(int y, int x, int s) const { return per_secret_[s](y, x); }
  const Eigen::MatrixXd& given_secret(int s) const { return per_secret_[s]; }

 private:
  std::vector<Eigen::MatrixXd> per_secret_;
};

enum class Metric { kLdp, kLip };

std::string metric_name(Metric m);

struct LeakageWitness {
  int y = -1;
  int s = -1;
  int s_prime = -1;  // -1 for LIP witnesses
};

// Measured worst-case leakage of a channel, with the cells achieving it.
// value may be +infinity (a reachable output with a zero-probability
// denominator); infinity ranks protocols that fail LDP outright.
struct PrivacyReport {
  Metric metric = Metric::kLip;
  double value = 0.0;
  std::vector<LeakageWitness> witnesses;

  bool infinite() const;
};

// Worst-case log-ratio max over reachable y and s != s' of
// ln P(Y=y|S=s) / P(Y=y|S=s'). Ratios 0/0 count as 1; p/0 with p > 0 is
// infinite leakage.
PrivacyReport ldp_of(const Channel& q, const JointDistribution& j);

// Worst-case |ln P(Y=y|S=s) / P(Y=y)| over reachable outputs y and all s.
PrivacyReport lip_of(const Channel& q, const JointDistribution& j);

inline Pushforward pushforward(const Channel& q, const JointDistribution& j) {
  return pushforward(q.matrix(), j);
}

// I(X;Y) in nats for the channel applied to the prior's data marginal.
double channel_utility(const Channel& q, const JointDistribution& j);

// I(S;Y) in nats; useful for perfect-privacy checks.
double secret_leakage_information(const Channel& q, const JointDistribution& j);

}  // namespace funnel

#endif  // FUNNEL_CHANNEL_HPP_
