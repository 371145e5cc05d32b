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

#ifndef FUNNEL_SERIALIZE_HPP_
#define FUNNEL_SERIALIZE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "funnel/channel.hpp"
#include "funnel/joint_distribution.hpp"
#include "funnel/synthesis.hpp"

namespace funnel {

// JSON wire formats. Doubles print in shortest round-trip form, so
// serialise(load(serialise(x))) is byte-identical to serialise(x). Infinite
// values (an unbounded epsilon, infinite measured leakage) appear as the
// string "inf".

// {"c": int, "a": int, "shape": [ints]?, "p": [[...]]}
std::string joint_to_json(const JointDistribution& j, int indent = 2);
JointDistribution joint_from_json(const std::string& text);
void save_joint(const std::string& path, const JointDistribution& j);
JointDistribution load_joint(const std::string& path);

// {"a": int, "b": int, "labels": [...], "Q": [[...]]}, Q rows are outputs.
std::string channel_to_json(const Channel& q, int indent = 2);
Channel channel_from_json(const std::string& text);
void save_channel(const std::string& path, const Channel& q);
Channel load_channel(const std::string& path);

// Adds "c"; "Q" becomes a 3-axis array indexed [y][x][s].
std::string secret_channel_to_json(const SecretAwareChannel& q, int indent = 2);
SecretAwareChannel secret_channel_from_json(const std::string& text);

// A synthesized protocol with its certificate, as emitted by the CLI.
struct ProtocolBundle {
  std::string kind;  // "ldp" | "lip" | "srlip"
  double epsilon = 0.0;
  Channel channel = Channel::constant(1);
  std::optional<ReverseChannel> reverse;       // lip only
  double utility_nats = 0.0;
  std::size_t vertex_count = 0;
  Certificate certificate;
  std::vector<Channel> attribute_channels;     // srlip only
  std::vector<double> budgets;                 // srlip only
};

std::string bundle_to_json(const ProtocolBundle& bundle, int indent = 2);
ProtocolBundle bundle_from_json(const std::string& text);
void save_bundle(const std::string& path, const ProtocolBundle& bundle);
ProtocolBundle load_bundle(const std::string& path);

}  // namespace funnel

#endif  // FUNNEL_SERIALIZE_HPP_
