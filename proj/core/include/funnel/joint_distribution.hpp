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

#ifndef FUNNEL_JOINT_DISTRIBUTION_HPP_
#define FUNNEL_JOINT_DISTRIBUTION_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "funnel/common.hpp"
#include "funnel/distribution.hpp"

namespace funnel {

// The prior p_{S,X} of a secret S over c categories and a data item X over
// a categories, stored as a c-by-a matrix p[s][x]. X may optionally carry an
// attribute decomposition X = (X^1,...,X^m) with |X^j| = shape[j] and
// prod(shape) = a; attribute values map to the flat index in mixed radix
// with attribute 0 most significant.
//
// Construction enforces: entries >= 0, total mass 1 within kMassTol, and
// every marginal p_s and p_x strictly positive. Zero marginals are rejected
// rather than patched because leakage ratios and the reverse-channel
// parameterisation divide by them; callers must merge or drop empty
// categories at ingestion time.
class JointDistribution {
 public:
  explicit JointDistribution(Eigen::MatrixXd p_sx);
  JointDistribution(Eigen::MatrixXd p_sx, std::vector<int> attribute_shape);

  int secret_size() const { return static_cast<int>(p_.rows()); }
  int data_size() const { return static_cast<int>(p_.cols()); }

  bool has_attribute_shape() const { return explicit_shape_; }
  // The attribute cardinalities; {a} when no decomposition was given.
  const std::vector<int>& attribute_shape() const { return shape_; }
  int num_attributes() const { return static_cast<int>(shape_.size()); }
  int attribute_size(int attr) const { return shape_.at(attr); }

  const Eigen::MatrixXd& matrix() const { return p_; }
  double operator()(int s, int x) const { return p_(s, x); }

  const Eigen::VectorXd& secret_marginal() const { return p_s_; }
  const Eigen::VectorXd& data_marginal() const { return p_x_; }

  Eigen::VectorXd data_given_secret(int s) const;  // p_{X|s}
  Eigen::VectorXd secret_given_data(int x) const;  // p_{S|x}
  // Posterior matrix with [s][x] = P(S = s | X = x).
  const Eigen::MatrixXd& posterior() const { return posterior_; }

  int pack(const std::vector<int>& attr_values) const;
  std::vector<int> unpack(int x) const;

  // Conditionals of one attribute given known values of other attributes
  // (the side-channel context) and optionally the secret. A context is a
  // list of (attribute index, value) pairs; the target attribute must not
  // appear in it. Throws ZeroProbabilityEvent when the conditioning event
  // has zero mass, which callers treat as "skip this cell".
  using Context = std::vector<std::pair<int, int>>;
  Eigen::VectorXd attribute_given_context(int attr, const Context& ctx) const;
  Eigen::VectorXd attribute_given_secret_context(int attr, int s,
                                                 const Context& ctx) const;
  double context_mass(const Context& ctx) const;
  double secret_context_mass(int s, const Context& ctx) const;

  double entropy_data() const { return entropy(p_x_); }
  double entropy_secret() const { return entropy(p_s_); }
  double mutual_information_sx() const { return mutual_information(p_); }

 private:
  void validate_and_cache();
  bool context_matches(int x, const Context& ctx) const;

  Eigen::MatrixXd p_;         // p[s][x]
  Eigen::VectorXd p_s_;
  Eigen::VectorXd p_x_;
  Eigen::MatrixXd posterior_;  // [s][x] = P(S=s|X=x)
  std::vector<int> shape_;
  std::vector<int> stride_;
  bool explicit_shape_ = false;
};

// Joints of the sanitised output with the secret and with the data:
// ys(y,s) = sum_x Q(y,x) p(s,x) and yx(y,x) = Q(y,x) p_x. Q must be a
// column-stochastic b-by-a matrix.
struct Pushforward {
  Eigen::MatrixXd ys;
  Eigen::MatrixXd yx;
};
Pushforward pushforward(const Eigen::MatrixXd& q, const JointDistribution& j);

// Random priors for experiments. Deterministic given the seed.
JointDistribution sample_jeffreys(int c, int a, std::uint64_t seed);
JointDistribution sample_jeffreys(int c, const std::vector<int>& shape,
                                  std::uint64_t seed);
JointDistribution sample_uniform_normalised(int c, int a, std::uint64_t seed);
JointDistribution sample_uniform_normalised(int c,
                                            const std::vector<int>& shape,
                                            std::uint64_t seed);

}  // namespace funnel

#endif  // FUNNEL_JOINT_DISTRIBUTION_HPP_
