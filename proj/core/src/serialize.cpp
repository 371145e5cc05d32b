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

#include "funnel/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace funnel {

namespace {

using nlohmann::json;

json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

double real_from_json(const json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ParseError(std::string("expected a number for ") + what);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw ParseError(std::string("expected a nonempty array for ") + what);
  }
  const std::size_t n_cols = rows[0].size();
  Eigen::MatrixXd m(rows.size(), n_cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != n_cols) {
      throw ParseError(std::string("ragged rows in ") + what);
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      m(r, c) = real_from_json(rows[r][c], what);
    }
  }
  return m;
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << text << '\n';
}

json channel_to_json_obj(const Channel& q) {
  json obj;
  obj["a"] = q.input_size();
  obj["b"] = q.output_size();
  obj["labels"] = q.labels();
  obj["Q"] = matrix_to_json(q.matrix());
  return obj;
}

Channel channel_from_json_obj(const json& obj) {
  Eigen::MatrixXd q = matrix_from_json(obj.at("Q"), "channel Q");
  if (obj.contains("a") && obj.at("a").get<int>() != q.cols()) {
    throw ParseError("channel 'a' disagrees with Q column count");
  }
  if (obj.contains("b") && obj.at("b").get<int>() != q.rows()) {
    throw ParseError("channel 'b' disagrees with Q row count");
  }
  std::vector<std::string> labels;
  if (obj.contains("labels")) {
    labels = obj.at("labels").get<std::vector<std::string>>();
  }
  return Channel(std::move(q), std::move(labels));
}

json certificate_to_json(const Certificate& cert) {
  json obj;
  obj["metric"] = cert.metric;
  obj["epsilon"] = real_to_json(cert.epsilon);
  obj["measured"] = real_to_json(cert.measured);
  obj["pass"] = cert.pass;
  return obj;
}

Certificate certificate_from_json(const json& obj) {
  Certificate cert;
  cert.metric = obj.at("metric").get<std::string>();
  cert.epsilon = real_from_json(obj.at("epsilon"), "certificate epsilon");
  cert.measured = real_from_json(obj.at("measured"), "certificate measured");
  cert.pass = obj.at("pass").get<bool>();
  return cert;
}

}  // namespace

std::string joint_to_json(const JointDistribution& j, int indent) {
  json obj;
  obj["c"] = j.secret_size();
  obj["a"] = j.data_size();
  if (j.has_attribute_shape()) obj["shape"] = j.attribute_shape();
  obj["p"] = matrix_to_json(j.matrix());
  return obj.dump(indent);
}

JointDistribution joint_from_json(const std::string& text) {
  const json obj = parse(text);
  Eigen::MatrixXd p = matrix_from_json(obj.at("p"), "joint p");
  if (obj.contains("c") && obj.at("c").get<int>() != p.rows()) {
    throw ParseError("joint 'c' disagrees with row count");
  }
  if (obj.contains("a") && obj.at("a").get<int>() != p.cols()) {
    throw ParseError("joint 'a' disagrees with column count");
  }
  if (obj.contains("shape")) {
    return JointDistribution(std::move(p), obj.at("shape").get<std::vector<int>>());
  }
  return JointDistribution(std::move(p));
}

void save_joint(const std::string& path, const JointDistribution& j) {
  write_file(path, joint_to_json(j));
}

JointDistribution load_joint(const std::string& path) {
  return joint_from_json(read_file(path));
}

std::string channel_to_json(const Channel& q, int indent) {
  return channel_to_json_obj(q).dump(indent);
}

Channel channel_from_json(const std::string& text) {
  return channel_from_json_obj(parse(text));
}

void save_channel(const std::string& path, const Channel& q) {
  write_file(path, channel_to_json(q));
}

Channel load_channel(const std::string& path) {
  return channel_from_json(read_file(path));
}

std::string secret_channel_to_json(const SecretAwareChannel& q, int indent) {
  json obj;
  obj["a"] = q.input_size();
  obj["b"] = q.output_size();
  obj["c"] = q.secret_size();
  json cube = json::array();
  for (int y = 0; y < q.output_size(); ++y) {
    json plane = json::array();
    for (int x = 0; x < q.input_size(); ++x) {
      json line = json::array();
      for (int s = 0; s < q.secret_size(); ++s) line.push_back(q(y, x, s));
      plane.push_back(std::move(line));
    }
    cube.push_back(std::move(plane));
  }
  obj["Q"] = std::move(cube);
  return obj.dump(indent);
}

SecretAwareChannel secret_channel_from_json(const std::string& text) {
  const json obj = parse(text);
  const int b = obj.at("b").get<int>();
  const int a = obj.at("a").get<int>();
  const int c = obj.at("c").get<int>();
  const json& cube = obj.at("Q");
  if (static_cast<int>(cube.size()) != b) throw ParseError("Q has wrong y extent");
  std::vector<Eigen::MatrixXd> per_secret(c, Eigen::MatrixXd(b, a));
  for (int y = 0; y < b; ++y) {
    if (static_cast<int>(cube[y].size()) != a) throw ParseError("Q has wrong x extent");
    for (int x = 0; x < a; ++x) {
      if (static_cast<int>(cube[y][x].size()) != c) {
        throw ParseError("Q has wrong s extent");
      }
      for (int s = 0; s < c; ++s) {
        per_secret[s](y, x) = real_from_json(cube[y][x][s], "secret channel Q");
      }
    }
  }
  return SecretAwareChannel(std::move(per_secret));
}

std::string bundle_to_json(const ProtocolBundle& bundle, int indent) {
  json obj;
  obj["kind"] = bundle.kind;
  obj["epsilon"] = real_to_json(bundle.epsilon);
  obj["channel"] = channel_to_json_obj(bundle.channel);
  if (bundle.reverse.has_value()) {
    json rev;
    rev["R"] = matrix_to_json(bundle.reverse->R);
    json mass = json::array();
    for (Eigen::Index y = 0; y < bundle.reverse->q.size(); ++y) {
      mass.push_back(bundle.reverse->q(y));
    }
    rev["q"] = std::move(mass);
    obj["reverse"] = std::move(rev);
  }
  obj["utility_nats"] = real_to_json(bundle.utility_nats);
  obj["vertex_count"] = bundle.vertex_count;
  obj["certificate"] = certificate_to_json(bundle.certificate);
  if (!bundle.attribute_channels.empty()) {
    json channels = json::array();
    for (const auto& q : bundle.attribute_channels) {
      channels.push_back(channel_to_json_obj(q));
    }
    obj["attribute_channels"] = std::move(channels);
    obj["budgets"] = bundle.budgets;
  }
  return obj.dump(indent);
}

ProtocolBundle bundle_from_json(const std::string& text) {
  const json obj = parse(text);
  ProtocolBundle bundle;
  bundle.kind = obj.at("kind").get<std::string>();
  bundle.epsilon = real_from_json(obj.at("epsilon"), "bundle epsilon");
  bundle.channel = channel_from_json_obj(obj.at("channel"));
  if (obj.contains("reverse")) {
    ReverseChannel rev;
    rev.R = matrix_from_json(obj.at("reverse").at("R"), "reverse R");
    const json& mass = obj.at("reverse").at("q");
    rev.q = Eigen::VectorXd(mass.size());
    for (std::size_t y = 0; y < mass.size(); ++y) {
      rev.q(y) = real_from_json(mass[y], "reverse q");
    }
    bundle.reverse = std::move(rev);
  }
  bundle.utility_nats = real_from_json(obj.at("utility_nats"), "utility");
  bundle.vertex_count = obj.at("vertex_count").get<std::size_t>();
  bundle.certificate = certificate_from_json(obj.at("certificate"));
  if (obj.contains("attribute_channels")) {
    for (const auto& q : obj.at("attribute_channels")) {
      bundle.attribute_channels.push_back(channel_from_json_obj(q));
    }
    bundle.budgets = obj.at("budgets").get<std::vector<double>>();
  }
  return bundle;
}

void save_bundle(const std::string& path, const ProtocolBundle& bundle) {
  write_file(path, bundle_to_json(bundle));
}

ProtocolBundle load_bundle(const std::string& path) {
  return bundle_from_json(read_file(path));
}

}  // namespace funnel
