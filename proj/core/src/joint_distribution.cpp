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

#include "funnel/joint_distribution.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace funnel {

namespace {

std::vector<int> default_shape(Eigen::Index a) {
  return {static_cast<int>(a)};
}

}  // namespace

JointDistribution::JointDistribution(Eigen::MatrixXd p_sx)
    : p_(std::move(p_sx)), shape_(default_shape(p_.cols())) {
  validate_and_cache();
}

JointDistribution::JointDistribution(Eigen::MatrixXd p_sx,
                                     std::vector<int> attribute_shape)
    : p_(std::move(p_sx)),
      shape_(std::move(attribute_shape)),
      explicit_shape_(true) {
  if (shape_.empty()) {
    throw DimensionMismatch("attribute shape must be nonempty");
  }
  long long prod = 1;
  for (int s : shape_) {
    if (s < 1) throw DimensionMismatch("attribute sizes must be >= 1");
    prod *= s;
  }
  if (prod != p_.cols()) {
    throw DimensionMismatch("attribute shape product " + std::to_string(prod) +
                            " does not match alphabet size " +
                            std::to_string(p_.cols()));
  }
  validate_and_cache();
}

void JointDistribution::validate_and_cache() {
  if (p_.rows() < 1 || p_.cols() < 1) {
    throw InvalidDistribution("joint must be at least 1x1");
  }
  for (Eigen::Index s = 0; s < p_.rows(); ++s) {
    for (Eigen::Index x = 0; x < p_.cols(); ++x) {
      if (!(p_(s, x) >= 0.0)) {
        throw InvalidDistribution("joint entry (" + std::to_string(s) + "," +
                                  std::to_string(x) + ") is negative or NaN");
      }
    }
  }
  const double mass = p_.sum();
  if (std::abs(mass - 1.0) > kMassTol) {
    throw InvalidDistribution("joint mass " + std::to_string(mass) +
                              " deviates from 1 beyond tolerance");
  }
  p_s_ = p_.rowwise().sum();
  p_x_ = p_.colwise().sum();
  for (Eigen::Index s = 0; s < p_s_.size(); ++s) {
    if (p_s_(s) <= 0.0) {
      throw InvalidDistribution(
          "secret marginal p_s is zero at s=" + std::to_string(s) +
          "; merge or drop empty categories before construction");
    }
  }
  for (Eigen::Index x = 0; x < p_x_.size(); ++x) {
    if (p_x_(x) <= 0.0) {
      throw InvalidDistribution(
          "data marginal p_x is zero at x=" + std::to_string(x) +
          "; merge or drop empty categories before construction");
    }
  }
  posterior_ = p_;
  for (Eigen::Index x = 0; x < p_.cols(); ++x) {
    posterior_.col(x) /= p_x_(x);
  }
  stride_.assign(shape_.size(), 1);
  for (int j = static_cast<int>(shape_.size()) - 2; j >= 0; --j) {
    stride_[j] = stride_[j + 1] * shape_[j + 1];
  }
}

Eigen::VectorXd JointDistribution::data_given_secret(int s) const {
  if (s < 0 || s >= secret_size()) throw DimensionMismatch("secret out of range");
  return p_.row(s).transpose() / p_s_(s);
}

Eigen::VectorXd JointDistribution::secret_given_data(int x) const {
  if (x < 0 || x >= data_size()) throw DimensionMismatch("data value out of range");
  return posterior_.col(x);
}

int JointDistribution::pack(const std::vector<int>& attr_values) const {
  if (attr_values.size() != shape_.size()) {
    throw DimensionMismatch("attribute tuple has wrong arity");
  }
  int x = 0;
  for (std::size_t j = 0; j < shape_.size(); ++j) {
    if (attr_values[j] < 0 || attr_values[j] >= shape_[j]) {
      throw DimensionMismatch("attribute value out of range");
    }
    x += attr_values[j] * stride_[j];
  }
  return x;
}

std::vector<int> JointDistribution::unpack(int x) const {
  if (x < 0 || x >= data_size()) throw DimensionMismatch("data value out of range");
  std::vector<int> out(shape_.size());
  for (std::size_t j = 0; j < shape_.size(); ++j) {
    out[j] = (x / stride_[j]) % shape_[j];
  }
  return out;
}

bool JointDistribution::context_matches(int x, const Context& ctx) const {
  for (const auto& [attr, value] : ctx) {
    if ((x / stride_.at(attr)) % shape_.at(attr) != value) return false;
  }
  return true;
}

double JointDistribution::context_mass(const Context& ctx) const {
  double mass = 0.0;
  for (int x = 0; x < data_size(); ++x) {
    if (context_matches(x, ctx)) mass += p_x_(x);
  }
  return mass;
}

double JointDistribution::secret_context_mass(int s, const Context& ctx) const {
  double mass = 0.0;
  for (int x = 0; x < data_size(); ++x) {
    if (context_matches(x, ctx)) mass += p_(s, x);
  }
  return mass;
}

Eigen::VectorXd JointDistribution::attribute_given_context(
    int attr, const Context& ctx) const {
  for (const auto& [j, _] : ctx) {
    if (j == attr) throw DimensionMismatch("target attribute appears in context");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(shape_.at(attr));
  double mass = 0.0;
  for (int x = 0; x < data_size(); ++x) {
    if (!context_matches(x, ctx)) continue;
    out((x / stride_[attr]) % shape_[attr]) += p_x_(x);
    mass += p_x_(x);
  }
  if (mass <= 0.0) {
    throw ZeroProbabilityEvent("conditioning context has zero mass");
  }
  return out / mass;
}

Eigen::VectorXd JointDistribution::attribute_given_secret_context(
    int attr, int s, const Context& ctx) const {
  for (const auto& [j, _] : ctx) {
    if (j == attr) throw DimensionMismatch("target attribute appears in context");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(shape_.at(attr));
  double mass = 0.0;
  for (int x = 0; x < data_size(); ++x) {
    if (!context_matches(x, ctx)) continue;
    out((x / stride_[attr]) % shape_[attr]) += p_(s, x);
    mass += p_(s, x);
  }
  if (mass <= 0.0) {
    throw ZeroProbabilityEvent("conditioning (secret, context) cell has zero mass");
  }
  return out / mass;
}

Pushforward pushforward(const Eigen::MatrixXd& q, const JointDistribution& j) {
  if (q.cols() != j.data_size()) {
    throw DimensionMismatch("channel input size does not match prior");
  }
  Pushforward out;
  out.ys = q * j.matrix().transpose();            // (b x a) * (a x c)
  out.yx = q * j.data_marginal().asDiagonal();    // yx(y,x) = Q(y,x) p_x
  return out;
}

namespace {

JointDistribution sample_impl(int c, const std::vector<int>& shape,
                              std::uint64_t seed, bool jeffreys,
                              bool explicit_shape) {
  long long a = 1;
  for (int s : shape) a *= s;
  if (c < 1 || a < 1) throw DimensionMismatch("c and a must be >= 1");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(0.5, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::MatrixXd p(c, a);
  // Resample on the (measure-zero) event of a zero entry so that marginals
  // are strictly positive, as the constructor requires.
  for (int attempt = 0; attempt < 100; ++attempt) {
    bool ok = true;
    for (int s = 0; s < c && ok; ++s) {
      for (int x = 0; x < a && ok; ++x) {
        const double v = jeffreys ? gamma(rng) : uniform(rng);
        if (!(v > 0.0)) ok = false;
        p(s, x) = v;
      }
    }
    if (!ok) continue;
    p /= p.sum();
    if (explicit_shape) return JointDistribution(p, shape);
    return JointDistribution(p);
  }
  throw Error("random prior generation failed to produce positive entries");
}

}  // namespace

JointDistribution sample_jeffreys(int c, int a, std::uint64_t seed) {
  return sample_impl(c, {a}, seed, /*jeffreys=*/true, /*explicit_shape=*/false);
}

JointDistribution sample_jeffreys(int c, const std::vector<int>& shape,
                                  std::uint64_t seed) {
  return sample_impl(c, shape, seed, /*jeffreys=*/true, /*explicit_shape=*/true);
}

JointDistribution sample_uniform_normalised(int c, int a, std::uint64_t seed) {
  return sample_impl(c, {a}, seed, /*jeffreys=*/false, /*explicit_shape=*/false);
}

JointDistribution sample_uniform_normalised(int c, const std::vector<int>& shape,
                                            std::uint64_t seed) {
  return sample_impl(c, shape, seed, /*jeffreys=*/false, /*explicit_shape=*/true);
}

}  // namespace funnel
