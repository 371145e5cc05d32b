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

#ifndef FUNNEL_DISTRIBUTION_HPP_
#define FUNNEL_DISTRIBUTION_HPP_

#include <Eigen/Dense>

#include "funnel/common.hpp"

namespace funnel {

// A probability mass function over a finite alphabet. Entries are
// nonnegative and sum to one within kMassTol; both are checked at
// construction.
class Distribution {
 public:
  explicit Distribution(Eigen::VectorXd p);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_(i); }
  const Eigen::VectorXd& vec() const { return p_; }

 private:
  Eigen::VectorXd p_;
};

// Shannon entropy in nats, with the 0*ln(0) = 0 convention. Entries <= 0
// contribute nothing, so vectors that are probability distributions only up
// to rounding noise are accepted.
double entropy(const Eigen::VectorXd& p);
inline double entropy(const Distribution& d) { return entropy(d.vec()); }

// Mutual information in nats of a two-variable joint given as a matrix
// p[u][v]. Terms with p(u,v) = 0 contribute nothing. Tiny negative results
// from rounding are clamped to zero.
double mutual_information(const Eigen::MatrixXd& joint);

}  // namespace funnel

#endif  // FUNNEL_DISTRIBUTION_HPP_
