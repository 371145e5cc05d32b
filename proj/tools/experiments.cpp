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

#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <tuple>

#include "funnel/channel.hpp"
#include "funnel/joint_distribution.hpp"
#include "funnel/protocols.hpp"
#include "funnel/serialize.hpp"
#include "funnel/srlip.hpp"
#include "funnel/synthesis.hpp"

namespace funnel::tools {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string fmt_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

// Collects rows and writes them as CSV (quoted where needed) or a JSON
// array of objects. Timing columns are the only nondeterministic ones.
class RowWriter {
 public:
  explicit RowWriter(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> values) {
    if (values.size() != columns_.size()) {
      throw Error("internal: row arity mismatch");
    }
    rows_.push_back(std::move(values));
  }

  std::string write(const std::string& dir, const std::string& stem,
                    const std::string& format) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path =
        (fs::path(dir) / (stem + (format == "json" ? ".json" : ".csv")))
            .string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    if (format == "json") {
      out << "[\n";
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        out << "  {";
        for (std::size_t c = 0; c < columns_.size(); ++c) {
          out << '"' << columns_[c] << "\": \"" << rows_[r][c] << '"';
          if (c + 1 < columns_.size()) out << ", ";
        }
        out << (r + 1 < rows_.size() ? "},\n" : "}\n");
      }
      out << "]\n";
    } else {
      auto quote = [](const std::string& field) {
        if (field.find_first_of(",\"\n") == std::string::npos) return field;
        std::string quoted = "\"";
        for (char ch : field) {
          if (ch == '"') quoted += '"';
          quoted += ch;
        }
        quoted += '"';
        return quoted;
      };
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        out << columns_[c] << (c + 1 < columns_.size() ? ',' : '\n');
      }
      for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          out << quote(row[c]) << (c + 1 < row.size() ? ',' : '\n');
        }
      }
    }
    return path;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

template <typename F>
double timed_ms(F&& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

// Calibrated leakage, utility, and an independently recomputed certificate
// for one explicit protocol at one target epsilon.
struct CalibratedRow {
  double alpha = 0.0;
  double leakage = 0.0;
  double utility = 0.0;
  bool certificate = false;
};

CalibratedRow calibrate(CalibratedProtocol protocol, double eps,
                        const JointDistribution& j) {
  CalibratedRow row;
  row.alpha = solve_alpha(eps, protocol, j);
  switch (protocol) {
    case CalibratedProtocol::kGrr: {
      const Channel q = grr_channel(row.alpha, j.data_size());
      row.leakage = lip_of(q, j).value;
      row.utility = channel_utility(q, j);
      break;
    }
    case CalibratedProtocol::kOue: {
      const OueEvaluation eval = oue_evaluate(row.alpha, j);
      row.utility = eval.utility_nats;
      if (j.data_size() <= 12 && !std::isinf(row.alpha)) {
        row.leakage = lip_of(oue_channel(row.alpha, j.data_size()), j).value;
      } else {
        row.leakage = eval.lip;
      }
      break;
    }
    case CalibratedProtocol::kCr: {
      const CrChannel cc = cr_channel(row.alpha, j);
      double worst = 0.0;
      for (int y = 0; y < j.data_size(); ++y) {
        for (int s = 0; s < j.secret_size(); ++s) {
          if (cc.y_marginal(y) <= 0.0) continue;
          const double ratio = cc.y_given_s(y, s) / cc.y_marginal(y);
          if (ratio > 0.0) worst = std::max(worst, std::abs(std::log(ratio)));
        }
      }
      row.leakage = worst;
      row.utility = cr_utility(row.alpha, j);
      break;
    }
  }
  row.certificate = row.leakage <= eps + 1e-9;
  return row;
}

std::vector<std::string> run_ldp_vs_lip(const ExperimentConfig& config) {
  RowWriter rows({"kind", "instance", "seed", "c", "a", "epsilon", "method",
                  "utility_nats", "leakage", "certificate", "vertex_count",
                  "wall_ms", "status"});
  for (int i = 0; i < config.instances; ++i) {
    const std::uint64_t seed = instance_seed(config.seed, i);
    const JointDistribution j =
        sample_uniform_normalised(config.c, config.a, seed);
    for (double eps : config.eps_grid) {
      for (const std::string method : {"opt-lip", "opt-ldp"}) {
        std::string status = "ok";
        double utility = 0.0, leakage = 0.0, ms = 0.0;
        std::size_t verts = 0;
        bool cert = false;
        try {
          if (method == "opt-lip") {
            LipSolution sol;
            ms = timed_ms([&] { sol = optimal_lip(j, eps); });
            utility = sol.utility_nats;
            leakage = sol.certificate.measured;
            cert = sol.certificate.pass;
            verts = sol.vertex_count;
          } else {
            LdpSolution sol;
            ms = timed_ms([&] { sol = optimal_ldp(j, eps); });
            utility = sol.utility_nats;
            leakage = sol.certificate.measured;
            cert = sol.certificate.pass;
            verts = sol.vertex_count;
          }
        } catch (const Error& e) {
          status = std::string("error: ") + e.what();
        }
        rows.add_row({config.kind, std::to_string(i), std::to_string(seed),
                      std::to_string(config.c), std::to_string(config.a),
                      fmt_real(eps), method, fmt_real(utility),
                      fmt_real(leakage), fmt_bool(cert), std::to_string(verts),
                      fmt_real(ms), status});
      }
    }
  }
  return {rows.write(config.out_dir, "ldp_vs_lip", config.format)};
}

std::vector<std::string> run_lip_vs_srlip(const ExperimentConfig& config) {
  std::vector<int> shape = config.shape;
  if (shape.empty()) shape = {3, 3, 4};
  RowWriter rows({"kind", "instance", "seed", "c", "shape", "epsilon",
                  "method", "utility_nats", "leakage", "certificate",
                  "vertex_count", "wall_ms", "status"});
  std::string shape_str;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    shape_str += std::to_string(shape[k]);
    if (k + 1 < shape.size()) shape_str += 'x';
  }
  for (int i = 0; i < config.instances; ++i) {
    const std::uint64_t seed = instance_seed(config.seed, i);
    const JointDistribution j =
        sample_uniform_normalised(config.c, shape, seed);
    for (double eps : config.eps_grid) {
      for (const std::string method : {"opt-lip", "srlip"}) {
        std::string status = "ok";
        double utility = 0.0, leakage = 0.0, ms = 0.0;
        std::size_t verts = 0;
        bool cert = false;
        try {
          if (method == "opt-lip") {
            LipSolution sol;
            ms = timed_ms([&] { sol = optimal_lip(j, eps); });
            utility = sol.utility_nats;
            leakage = sol.certificate.measured;
            cert = sol.certificate.pass;
            verts = sol.vertex_count;
          } else {
            SrlipBundle bundle;
            ms = timed_ms([&] { bundle = srlip_protocol(j, eps); });
            utility = bundle.utility_nats;
            leakage = bundle.certificate.measured;
            cert = bundle.certificate.pass;
            for (std::size_t v : bundle.vertex_counts) verts += v;
          }
        } catch (const Error& e) {
          status = std::string("error: ") + e.what();
        }
        rows.add_row({config.kind, std::to_string(i), std::to_string(seed),
                      std::to_string(config.c), shape_str, fmt_real(eps),
                      method, fmt_real(utility), fmt_real(leakage),
                      fmt_bool(cert), std::to_string(verts), fmt_real(ms),
                      status});
      }
    }
  }
  return {rows.write(config.out_dir, "lip_vs_srlip", config.format)};
}

std::vector<std::string> run_protocols_on_dataset(const ExperimentConfig& config) {
  if (config.prior_path.empty()) {
    throw Error("protocols-on-dataset requires --prior");
  }
  const JointDistribution j = load_joint(config.prior_path);
  const double h_x = j.entropy_data();
  RowWriter rows({"kind", "c", "a", "epsilon", "method", "alpha",
                  "leakage", "utility_nats", "utility_normalised",
                  "certificate", "wall_ms", "status"});
  for (double eps : config.eps_grid) {
    {
      std::string status = "ok";
      double utility = 0.0, leakage = 0.0, ms = 0.0;
      bool cert = false;
      try {
        LipSolution sol;
        ms = timed_ms([&] { sol = optimal_lip(j, eps); });
        utility = sol.utility_nats;
        leakage = sol.certificate.measured;
        cert = sol.certificate.pass;
      } catch (const Error& e) {
        status = std::string("error: ") + e.what();
      }
      rows.add_row({config.kind, std::to_string(j.secret_size()),
                    std::to_string(j.data_size()), fmt_real(eps), "opt-lip",
                    "", fmt_real(leakage), fmt_real(utility),
                    fmt_real(h_x > 0 ? utility / h_x : 0.0), fmt_bool(cert),
                    fmt_real(ms), status});
    }
    const std::pair<std::string, CalibratedProtocol> protocols[] = {
        {"grr", CalibratedProtocol::kGrr},
        {"oue", CalibratedProtocol::kOue},
        {"cr", CalibratedProtocol::kCr}};
    for (const auto& [name, protocol] : protocols) {
      std::string status = "ok";
      CalibratedRow row;
      double ms = 0.0;
      try {
        ms = timed_ms([&] { row = calibrate(protocol, eps, j); });
      } catch (const Error& e) {
        status = std::string("error: ") + e.what();
      }
      rows.add_row({config.kind, std::to_string(j.secret_size()),
                    std::to_string(j.data_size()), fmt_real(eps), name,
                    fmt_real(row.alpha), fmt_real(row.leakage),
                    fmt_real(row.utility),
                    fmt_real(h_x > 0 ? row.utility / h_x : 0.0),
                    fmt_bool(row.certificate), fmt_real(ms), status});
    }
  }
  return {rows.write(config.out_dir, "protocols_on_dataset", config.format)};
}

std::vector<std::string> run_grr_vs_cr(const ExperimentConfig& config) {
  std::vector<std::pair<int, int>> pairs = config.ac_pairs;
  if (pairs.empty()) {
    pairs = {{5, 2}, {2, 5}, {5, 5}, {3, 5}, {5, 7}, {7, 5}};
  }
  RowWriter rows({"kind", "a", "c", "instance", "seed", "epsilon", "method",
                  "alpha", "leakage", "utility_nats", "utility_normalised",
                  "certificate", "status"});
  struct Agg {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;
  };
  std::map<std::tuple<int, int, double, std::string>, Agg> summary;

  for (const auto& [a, c] : pairs) {
    for (int i = 0; i < config.instances; ++i) {
      const std::uint64_t seed =
          instance_seed(config.seed, (static_cast<std::uint64_t>(a) << 32) +
                                         (static_cast<std::uint64_t>(c) << 16) +
                                         static_cast<std::uint64_t>(i));
      const JointDistribution j = sample_jeffreys(c, a, seed);
      const double h_x = j.entropy_data();
      for (double eps : config.eps_grid) {
        const std::pair<std::string, CalibratedProtocol> protocols[] = {
            {"grr", CalibratedProtocol::kGrr},
            {"cr", CalibratedProtocol::kCr}};
        for (const auto& [name, protocol] : protocols) {
          std::string status = "ok";
          CalibratedRow row;
          try {
            row = calibrate(protocol, eps, j);
          } catch (const Error& e) {
            status = std::string("error: ") + e.what();
          }
          const double norm = h_x > 0 ? row.utility / h_x : 0.0;
          rows.add_row({config.kind, std::to_string(a), std::to_string(c),
                        std::to_string(i), std::to_string(seed), fmt_real(eps),
                        name, fmt_real(row.alpha), fmt_real(row.leakage),
                        fmt_real(row.utility), fmt_real(norm),
                        fmt_bool(row.certificate), status});
          if (status == "ok") {
            Agg& agg = summary[{a, c, eps, name}];
            agg.sum += norm;
            agg.sum_sq += norm * norm;
            ++agg.n;
          }
        }
      }
    }
  }

  RowWriter summary_rows({"a", "c", "epsilon", "method",
                          "mean_utility_normalised", "sd_utility_normalised",
                          "n"});
  for (const auto& [key, agg] : summary) {
    const auto& [a, c, eps, name] = key;
    const double mean = agg.sum / agg.n;
    const double var =
        agg.n > 1 ? std::max(0.0, (agg.sum_sq - agg.n * mean * mean) /
                                      (agg.n - 1))
                  : 0.0;
    summary_rows.add_row({std::to_string(a), std::to_string(c), fmt_real(eps),
                          name, fmt_real(mean), fmt_real(std::sqrt(var)),
                          std::to_string(agg.n)});
  }
  return {rows.write(config.out_dir, "grr_vs_cr", config.format),
          summary_rows.write(config.out_dir, "grr_vs_cr_summary",
                             config.format)};
}

std::vector<std::string> run_alpha_vs_eps(const ExperimentConfig& config) {
  JointDistribution j = config.prior_path.empty()
                            ? sample_jeffreys(config.c, config.a,
                                              instance_seed(config.seed, 0))
                            : load_joint(config.prior_path);
  RowWriter rows({"kind", "c", "a", "epsilon", "alpha_grr", "alpha_cr",
                  "leakage_grr", "leakage_cr", "status"});
  for (double eps : config.eps_grid) {
    std::string status = "ok";
    double alpha_grr = kInf, alpha_cr = kInf;
    double leak_grr = 0.0, leak_cr = 0.0;
    try {
      alpha_grr = solve_alpha(eps, CalibratedProtocol::kGrr, j);
      alpha_cr = solve_alpha(eps, CalibratedProtocol::kCr, j);
      leak_grr = grr_lip(alpha_grr, j);
      leak_cr = cr_lip(alpha_cr, j);
    } catch (const Error& e) {
      status = std::string("error: ") + e.what();
    }
    rows.add_row({config.kind, std::to_string(j.secret_size()),
                  std::to_string(j.data_size()), fmt_real(eps),
                  fmt_real(alpha_grr), fmt_real(alpha_cr), fmt_real(leak_grr),
                  fmt_real(leak_cr), status});
  }
  return {rows.write(config.out_dir, "alpha_vs_epsilon", config.format)};
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9e3779b97f4a7c15ull * (index + 1));
}

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  for (double eps : config.eps_grid) {
    if (!(eps >= 0.0)) throw Error("epsilon grid entries must be >= 0");
  }
  if (config.kind == "ldp-vs-lip") return run_ldp_vs_lip(config);
  if (config.kind == "lip-vs-srlip") return run_lip_vs_srlip(config);
  if (config.kind == "protocols-on-dataset") {
    return run_protocols_on_dataset(config);
  }
  if (config.kind == "grr-vs-cr-synthetic") return run_grr_vs_cr(config);
  if (config.kind == "alpha-vs-epsilon") return run_alpha_vs_eps(config);
  throw Error("unknown experiment kind: " + config.kind);
}

}  // namespace funnel::tools
