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

#include "funnel/channel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace funnel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Cells within this of the running maximum are reported as co-witnesses.
constexpr double kWitnessTol = 1e-12;

void validate_columns(const Eigen::MatrixXd& q) {
  if (q.rows() < 1 || q.cols() < 1) {
    throw DimensionMismatch("channel must be at least 1x1");
  }
  for (Eigen::Index x = 0; x < q.cols(); ++x) {
    double mass = 0.0;
    for (Eigen::Index y = 0; y < q.rows(); ++y) {
      if (!(q(y, x) >= 0.0)) {
        throw InvalidDistribution("channel entry (" + std::to_string(y) + "," +
                                  std::to_string(x) + ") is negative or NaN");
      }
      mass += q(y, x);
    }
    if (std::abs(mass - 1.0) > kMassTol) {
      throw InvalidDistribution("channel column " + std::to_string(x) +
                                " has mass " + std::to_string(mass));
    }
  }
}

}  // namespace

Channel::Channel(Eigen::MatrixXd q, std::vector<std::string> labels)
    : q_(std::move(q)), labels_(std::move(labels)) {
  validate_columns(q_);
  if (labels_.empty()) {
    labels_.reserve(q_.rows());
    for (Eigen::Index y = 0; y < q_.rows(); ++y) {
      labels_.push_back(std::to_string(y));
    }
  } else if (static_cast<Eigen::Index>(labels_.size()) != q_.rows()) {
    throw DimensionMismatch("label count does not match output size");
  }
}

Channel Channel::from_noisy(Eigen::MatrixXd q, double tol, double snap) {
  for (Eigen::Index y = 0; y < q.rows(); ++y) {
    for (Eigen::Index x = 0; x < q.cols(); ++x) {
      if (q(y, x) < -tol) {
        throw InvalidDistribution("channel entry below -tolerance");
      }
      if (q(y, x) <= snap) q(y, x) = 0.0;
    }
  }
  for (Eigen::Index x = 0; x < q.cols(); ++x) {
    const double mass = q.col(x).sum();
    if (std::abs(mass - 1.0) > tol) {
      throw InvalidDistribution("channel column mass off by more than tolerance");
    }
    q.col(x) /= mass;
  }
  return Channel(std::move(q));
}

Channel Channel::identity(int a) {
  return Channel(Eigen::MatrixXd::Identity(a, a));
}

Channel Channel::constant(int a) {
  return Channel(Eigen::MatrixXd::Ones(1, a));
}

SecretAwareChannel::SecretAwareChannel(std::vector<Eigen::MatrixXd> per_secret)
    : per_secret_(std::move(per_secret)) {
  if (per_secret_.empty()) {
    throw DimensionMismatch("secret-aware channel needs at least one secret");
  }
  for (const auto& q : per_secret_) {
    if (q.rows() != per_secret_[0].rows() || q.cols() != per_secret_[0].cols()) {
      throw DimensionMismatch("per-secret channel shapes disagree");
    }
    validate_columns(q);
  }
}

std::string metric_name(Metric m) {
  return m == Metric::kLdp ? "ldp" : "lip";
}

bool PrivacyReport::infinite() const { return std::isinf(value); }

PrivacyReport ldp_of(const Channel& q, const JointDistribution& j) {
  const Pushforward push = pushforward(q, j);
  const Eigen::VectorXd& p_s = j.secret_marginal();
  const int b = q.output_size();
  const int c = j.secret_size();

  PrivacyReport report;
  report.metric = Metric::kLdp;
  report.value = 0.0;
  for (int y = 0; y < b; ++y) {
    for (int s = 0; s < c; ++s) {
      const double ps_y = push.ys(y, s) / p_s(s);
      for (int sp = 0; sp < c; ++sp) {
        if (sp == s) continue;
        const double psp_y = push.ys(y, sp) / p_s(sp);
        double ratio_log;
        if (ps_y <= 0.0 && psp_y <= 0.0) {
          continue;  // 0/0: unreachable from both secrets, ratio 1
        } else if (psp_y <= 0.0) {
          ratio_log = kInf;
        } else if (ps_y <= 0.0) {
          continue;  // ratio 0, log negative; covered by the (sp, s) cell
        } else {
          ratio_log = std::log(ps_y / psp_y);
        }
        if (ratio_log > report.value + kWitnessTol) {
          report.value = ratio_log;
          report.witnesses.assign(1, LeakageWitness{y, s, sp});
        } else if (ratio_log >= report.value - kWitnessTol) {
          report.witnesses.push_back(LeakageWitness{y, s, sp});
        }
      }
    }
  }
  return report;
}

PrivacyReport lip_of(const Channel& q, const JointDistribution& j) {
  const Pushforward push = pushforward(q, j);
  const Eigen::VectorXd& p_s = j.secret_marginal();
  const Eigen::VectorXd p_y = push.ys.rowwise().sum();
  const int b = q.output_size();
  const int c = j.secret_size();

  PrivacyReport report;
  report.metric = Metric::kLip;
  report.value = 0.0;
  for (int y = 0; y < b; ++y) {
    if (p_y(y) <= 0.0) continue;  // unreachable outputs carry no leakage
    for (int s = 0; s < c; ++s) {
      const double cond = push.ys(y, s) / p_s(s);
      const double abs_log =
          cond <= 0.0 ? kInf : std::abs(std::log(cond / p_y(y)));
      if (abs_log > report.value + kWitnessTol) {
        report.value = abs_log;
        report.witnesses.assign(1, LeakageWitness{y, s, -1});
      } else if (abs_log >= report.value - kWitnessTol) {
        report.witnesses.push_back(LeakageWitness{y, s, -1});
      }
    }
  }
  return report;
}

double channel_utility(const Channel& q, const JointDistribution& j) {
  return mutual_information(pushforward(q, j).yx);
}

double secret_leakage_information(const Channel& q, const JointDistribution& j) {
  return mutual_information(pushforward(q, j).ys);
}

}  // namespace funnel
