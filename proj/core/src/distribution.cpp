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

#include "funnel/distribution.hpp"

#include <cmath>
#include <string>

namespace funnel {

Distribution::Distribution(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() == 0) {
    throw InvalidDistribution("distribution must have at least one entry");
  }
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!(p_(i) >= 0.0)) {
      throw InvalidDistribution("distribution entry " + std::to_string(i) +
                                " is negative or NaN");
    }
  }
  const double mass = p_.sum();
  if (std::abs(mass - 1.0) > kMassTol) {
    throw InvalidDistribution("distribution mass " + std::to_string(mass) +
                              " deviates from 1 beyond tolerance");
  }
}

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = p(i);
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double mutual_information(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd row = joint.rowwise().sum();
  const Eigen::VectorXd col = joint.colwise().sum();
  double info = 0.0;
  for (Eigen::Index u = 0; u < joint.rows(); ++u) {
    for (Eigen::Index v = 0; v < joint.cols(); ++v) {
      const double p = joint(u, v);
      if (p > 0.0) info += p * std::log(p / (row(u) * col(v)));
    }
  }
  // I >= 0 mathematically; summation order can leave a few ulps below zero.
  if (info < 0.0 && info > -1e-9) info = 0.0;
  return info;
}

}  // namespace funnel
