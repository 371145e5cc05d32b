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
//
// funnel: synthesize and evaluate local sanitisation protocols that cap
// worst-case leakage about a correlated secret while preserving as much
// mutual information with the data as possible.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "funnel/channel.hpp"
#include "funnel/dataset.hpp"
#include "funnel/joint_distribution.hpp"
#include "funnel/protocols.hpp"
#include "funnel/serialize.hpp"
#include "funnel/srlip.hpp"
#include "funnel/synthesis.hpp"

namespace {

using namespace funnel;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInput = 3;

void print_error(const std::string& type, const std::string& message) {
  std::cerr << "{\"error\": {\"type\": \"" << type << "\", \"message\": \""
            << message << "\"}}\n";
}

double parse_epsilon(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(text);
  } catch (...) {
    throw Error("cannot parse epsilon: " + text);
  }
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double bits(double nats) { return nats / std::log(2.0); }

struct GenArgs {
  int c = 2;
  int a = 5;
  std::vector<int> shape;
  std::string sampler = "jeffreys";
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  JointDistribution j = [&] {
    if (!args.shape.empty()) {
      return args.sampler == "uniform"
                 ? sample_uniform_normalised(args.c, args.shape, args.seed)
                 : sample_jeffreys(args.c, args.shape, args.seed);
    }
    return args.sampler == "uniform"
               ? sample_uniform_normalised(args.c, args.a, args.seed)
               : sample_jeffreys(args.c, args.a, args.seed);
  }();
  if (args.out.empty()) {
    std::cout << joint_to_json(j) << "\n";
  } else {
    save_joint(args.out, j);
    std::cout << "wrote " << args.out << " (c=" << j.secret_size()
              << ", a=" << j.data_size() << ")\n";
  }
  return kExitOk;
}

struct OptimalArgs {
  std::string metric = "lip";
  std::string prior;
  std::string epsilon = "1";
  std::string out;
  std::vector<double> split;
  std::size_t max_vertices = 1'000'000;
  bool show_bits = false;
};

int cmd_optimal(const OptimalArgs& args) {
  const JointDistribution j = load_joint(args.prior);
  const double eps = parse_epsilon(args.epsilon);
  EnumerationOptions options;
  options.max_vertices = args.max_vertices;

  ProtocolBundle bundle;
  bundle.epsilon = eps;
  if (args.metric == "ldp") {
    const LdpSolution sol = optimal_ldp(j, eps, options);
    bundle.kind = "ldp";
    bundle.channel = sol.channel;
    bundle.utility_nats = sol.utility_nats;
    bundle.vertex_count = sol.vertex_count;
    bundle.certificate = sol.certificate;
  } else if (args.metric == "lip") {
    const LipSolution sol = optimal_lip(j, eps, options);
    bundle.kind = "lip";
    bundle.channel = sol.channel;
    bundle.reverse = sol.reverse;
    bundle.utility_nats = sol.utility_nats;
    bundle.vertex_count = sol.vertex_count;
    bundle.certificate = sol.certificate;
  } else if (args.metric == "srlip") {
    const SrlipBundle sol = srlip_protocol(j, eps, args.split, options);
    bundle.kind = "srlip";
    bundle.channel = sol.product;
    bundle.utility_nats = sol.utility_nats;
    for (std::size_t v : sol.vertex_counts) bundle.vertex_count += v;
    bundle.certificate = sol.certificate;
    bundle.attribute_channels = sol.attribute_channels;
    bundle.budgets = sol.budgets;
  } else {
    throw Error("unknown metric: " + args.metric);
  }

  if (args.out.empty()) {
    std::cout << bundle_to_json(bundle) << "\n";
  } else {
    save_bundle(args.out, bundle);
  }
  std::cerr << "metric=" << bundle.kind << " epsilon=" << fmt(eps)
            << " utility=" << fmt(bundle.utility_nats) << " nats";
  if (args.show_bits) std::cerr << " (" << fmt(bits(bundle.utility_nats)) << " bits)";
  std::cerr << " outputs=" << bundle.channel.output_size()
            << " vertices=" << bundle.vertex_count
            << " measured=" << fmt(bundle.certificate.measured)
            << " certificate=" << (bundle.certificate.pass ? "pass" : "FAIL")
            << "\n";
  return bundle.certificate.pass ? kExitOk : kExitInfeasible;
}

struct SolveArgs {
  std::string protocol = "grr";
  std::string prior;
  std::string epsilon = "1";
  std::string out;
  bool show_bits = false;
};

int cmd_solve(const SolveArgs& args) {
  const JointDistribution j = load_joint(args.prior);
  const double eps = parse_epsilon(args.epsilon);
  CalibratedProtocol protocol;
  if (args.protocol == "grr") {
    protocol = CalibratedProtocol::kGrr;
  } else if (args.protocol == "oue") {
    protocol = CalibratedProtocol::kOue;
  } else if (args.protocol == "cr") {
    protocol = CalibratedProtocol::kCr;
  } else {
    throw Error("unknown protocol: " + args.protocol);
  }

  const double alpha = solve_alpha(eps, protocol, j);
  double leakage = 0.0;
  double utility = 0.0;
  switch (protocol) {
    case CalibratedProtocol::kGrr:
      leakage = grr_lip(alpha, j);
      utility = channel_utility(grr_channel(alpha, j.data_size()), j);
      break;
    case CalibratedProtocol::kOue: {
      const OueEvaluation eval = oue_evaluate(alpha, j);
      leakage = eval.lip;
      utility = eval.utility_nats;
      break;
    }
    case CalibratedProtocol::kCr:
      leakage = cr_lip(alpha, j);
      utility = cr_utility(alpha, j);
      break;
  }

  const double h_x = j.entropy_data();
  std::string json = "{\n  \"protocol\": \"" + args.protocol + "\",\n";
  json += "  \"target_epsilon\": " + (std::isinf(eps) ? std::string("\"inf\"")
                                                      : fmt(eps)) + ",\n";
  json += "  \"alpha\": " +
          (std::isinf(alpha) ? std::string("\"inf\"") : fmt(alpha)) + ",\n";
  json += "  \"leakage\": " + fmt(leakage) + ",\n";
  json += "  \"utility_nats\": " + fmt(utility) + ",\n";
  json += "  \"utility_normalised\": " + fmt(h_x > 0 ? utility / h_x : 0.0) +
          "\n}";
  if (args.out.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(args.out);
    if (!out) throw IoError("cannot write " + args.out);
    out << json << "\n";
  }
  std::cerr << "protocol=" << args.protocol << " alpha=" << fmt(alpha)
            << " leakage=" << fmt(leakage) << " utility=" << fmt(utility)
            << " nats";
  if (args.show_bits) std::cerr << " (" << fmt(bits(utility)) << " bits)";
  std::cerr << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string channel;
  std::string prior;
  std::string metric = "all";
  std::string epsilon;
  bool show_bits = false;
};

int cmd_eval(const EvalArgs& args) {
  const JointDistribution j = load_joint(args.prior);
  const Channel q = load_channel(args.channel);
  const bool have_eps = !args.epsilon.empty();
  const double eps = have_eps ? parse_epsilon(args.epsilon) : 0.0;

  bool pass = true;
  std::string json = "{\n";
  bool first = true;
  auto emit = [&](const std::string& name, double value) {
    if (!first) json += ",\n";
    first = false;
    json += "  \"" + name + "\": " +
            (std::isinf(value) ? std::string("\"inf\"") : fmt(value));
  };

  if (args.metric == "ldp" || args.metric == "all") {
    const PrivacyReport report = ldp_of(q, j);
    emit("ldp", report.value);
    if (have_eps && report.value > eps + 1e-9) pass = false;
  }
  if (args.metric == "lip" || args.metric == "all") {
    const PrivacyReport report = lip_of(q, j);
    emit("lip", report.value);
    if (have_eps && report.value > eps + 1e-9) pass = false;
  }
  if (args.metric == "srlip" ||
      (args.metric == "all" && j.has_attribute_shape())) {
    const SrlipCheckResult check = srlip_check(q, j, have_eps ? eps : 0.0);
    emit("srlip", check.max_abs_log_ratio);
    if (have_eps && check.max_abs_log_ratio > eps + 1e-9) pass = false;
  }
  emit("utility_nats", channel_utility(q, j));
  emit("secret_information_nats", secret_leakage_information(q, j));
  if (args.show_bits) {
    emit("utility_bits", bits(channel_utility(q, j)));
  }
  if (have_eps) {
    json += ",\n  \"epsilon\": " + fmt(eps);
    json += std::string(",\n  \"pass\": ") + (pass ? "true" : "false");
  }
  json += "\n}";
  std::cout << json << "\n";
  return (have_eps && !pass) ? kExitInfeasible : kExitOk;
}

struct IngestArgs {
  std::string csv;
  std::string secret;
  std::vector<std::string> data;
  std::string delimiter = ",";
  std::string missing = "?";
  double smoothing = 0.0;
  std::string out;
};

int cmd_ingest(const IngestArgs& args) {
  DatasetSchema schema;
  schema.path = args.csv;
  schema.secret_column = args.secret;
  schema.data_columns = args.data;
  if (args.delimiter.size() != 1) throw Error("delimiter must be one character");
  schema.delimiter = args.delimiter[0];
  schema.missing_token = args.missing;
  schema.smoothing = args.smoothing;

  const IngestResult result = ingest(schema);
  if (args.out.empty()) {
    std::cout << joint_to_json(result.joint) << "\n";
  } else {
    save_joint(args.out, result.joint);
  }
  std::cerr << "rows total=" << result.total_rows
            << " used=" << result.used_rows
            << " dropped=" << result.dropped_rows
            << "; c=" << result.joint.secret_size()
            << " a=" << result.joint.data_size() << " shape=";
  const auto& shape = result.joint.attribute_shape();
  for (std::size_t i = 0; i < shape.size(); ++i) {
    std::cerr << shape[i] << (i + 1 < shape.size() ? "x" : "");
  }
  std::cerr << "\ncategories:";
  for (std::size_t col = 0; col < result.codebook.column_names.size(); ++col) {
    std::cerr << " " << result.codebook.column_names[col] << "="
              << result.codebook.labels[col].size();
  }
  std::cerr << "\n";
  return kExitOk;
}

int classify_exit(const Error& e) {
  if (dynamic_cast<const BudgetExceeded*>(&e) ||
      dynamic_cast<const EmptyPolytope*>(&e) ||
      dynamic_cast<const UnboundedPolytope*>(&e) ||
      dynamic_cast<const LPInfeasible*>(&e) ||
      dynamic_cast<const AlphabetTooLarge*>(&e) ||
      dynamic_cast<const AttributeBudgetExceeded*>(&e) ||
      dynamic_cast<const NonMonotoneDetected*>(&e)) {
    return kExitInfeasible;
  }
  return kExitInput;
}

std::string error_type(const Error& e) {
  if (dynamic_cast<const BudgetExceeded*>(&e)) return "budget_exceeded";
  if (dynamic_cast<const EmptyPolytope*>(&e)) return "empty_polytope";
  if (dynamic_cast<const UnboundedPolytope*>(&e)) return "unbounded_polytope";
  if (dynamic_cast<const LPInfeasible*>(&e)) return "lp_infeasible";
  if (dynamic_cast<const AlphabetTooLarge*>(&e)) return "alphabet_too_large";
  if (dynamic_cast<const AttributeBudgetExceeded*>(&e)) {
    return "attribute_budget_exceeded";
  }
  if (dynamic_cast<const NonMonotoneDetected*>(&e)) return "non_monotone";
  if (dynamic_cast<const SchemaMismatch*>(&e)) return "schema_mismatch";
  if (dynamic_cast<const EmptyAfterFiltering*>(&e)) return "empty_after_filtering";
  if (dynamic_cast<const InvalidDistribution*>(&e)) return "invalid_distribution";
  if (dynamic_cast<const ZeroProbabilityEvent*>(&e)) return "zero_probability";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "dimension_mismatch";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  return "error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "funnel: optimal local sanitisation protocols for correlated secrets\n"
      "(worst-case leakage metrics, polytope vertex enumeration, explicit\n"
      "randomised-response style protocols)"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic prior");
  gen->add_option("--c", gen_args.c, "secret alphabet size");
  gen->add_option("--a", gen_args.a, "data alphabet size");
  gen->add_option("--shape", gen_args.shape,
                  "attribute sizes, e.g. --shape 3 3 4 (overrides --a)");
  gen->add_option("--sampler", gen_args.sampler, "jeffreys | uniform")
      ->check(CLI::IsMember({"jeffreys", "uniform"}));
  gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_option("--out", gen_args.out, "output path (stdout if omitted)");

  OptimalArgs optimal_args;
  CLI::App* optimal =
      app.add_subcommand("optimal", "synthesize an optimal protocol");
  optimal->add_option("--metric", optimal_args.metric, "ldp | lip | srlip")
      ->check(CLI::IsMember({"ldp", "lip", "srlip"}));
  optimal->add_option("--prior", optimal_args.prior, "prior JSON file")
      ->required();
  optimal->add_option("--epsilon", optimal_args.epsilon,
                      "privacy level (number or 'inf')");
  optimal->add_option("--out", optimal_args.out, "bundle output path");
  optimal->add_option("--split", optimal_args.split,
                      "per-attribute budget split (srlip)");
  optimal->add_option("--max-vertices", optimal_args.max_vertices,
                      "enumeration budget");
  optimal->add_flag("--bits", optimal_args.show_bits,
                    "also report utility in bits");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "calibrate an explicit protocol to a target leakage");
  solve->add_option("--protocol", solve_args.protocol, "grr | oue | cr")
      ->check(CLI::IsMember({"grr", "oue", "cr"}));
  solve->add_option("--prior", solve_args.prior, "prior JSON file")->required();
  solve->add_option("--epsilon", solve_args.epsilon, "target leakage");
  solve->add_option("--out", solve_args.out, "output path (stdout if omitted)");
  solve->add_flag("--bits", solve_args.show_bits, "also report utility in bits");

  EvalArgs eval_args;
  CLI::App* eval =
      app.add_subcommand("eval", "measure the leakage of a channel file");
  eval->add_option("--channel", eval_args.channel, "channel JSON file")
      ->required();
  eval->add_option("--prior", eval_args.prior, "prior JSON file")->required();
  eval->add_option("--metric", eval_args.metric, "ldp | lip | srlip | all")
      ->check(CLI::IsMember({"ldp", "lip", "srlip", "all"}));
  eval->add_option("--epsilon", eval_args.epsilon,
                   "optional level to certify against");
  eval->add_flag("--bits", eval_args.show_bits, "also report utility in bits");

  IngestArgs ingest_args;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "build an empirical prior from a CSV");
  ingest_cmd->add_option("--csv", ingest_args.csv, "input CSV path")->required();
  ingest_cmd->add_option("--secret", ingest_args.secret, "secret column name")
      ->required();
  ingest_cmd->add_option("--data", ingest_args.data, "data column names")
      ->required();
  ingest_cmd->add_option("--delimiter", ingest_args.delimiter, "field delimiter");
  ingest_cmd->add_option("--missing", ingest_args.missing, "missing-value token");
  ingest_cmd->add_option("--smooth", ingest_args.smoothing,
                         "add-lambda smoothing of counts");
  ingest_cmd->add_option("--out", ingest_args.out, "output prior path");

  funnel::tools::ExperimentConfig experiment_config;
  std::vector<std::string> pair_specs;
  CLI::App* experiment =
      app.add_subcommand("experiment", "run a reproducible sweep");
  experiment
      ->add_option("--kind", experiment_config.kind,
                   "ldp-vs-lip | lip-vs-srlip | protocols-on-dataset | "
                   "grr-vs-cr-synthetic | alpha-vs-epsilon")
      ->required();
  experiment->add_option("--eps-grid", experiment_config.eps_grid,
                         "epsilon grid");
  experiment->add_option("--instances", experiment_config.instances,
                         "instances per configuration");
  experiment->add_option("--seed", experiment_config.seed, "master seed");
  experiment->add_option("--c", experiment_config.c, "secret alphabet size");
  experiment->add_option("--a", experiment_config.a, "data alphabet size");
  experiment->add_option("--shape", experiment_config.shape,
                         "attribute sizes (lip-vs-srlip)");
  experiment->add_option("--pairs", pair_specs,
                         "a:c pairs for grr-vs-cr-synthetic, e.g. 5:2 2:5");
  experiment->add_option("--prior", experiment_config.prior_path,
                         "prior JSON file (dataset kinds)");
  experiment->add_option("--out", experiment_config.out_dir,
                         "output directory");
  experiment->add_option("--format", experiment_config.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen) return cmd_gen(gen_args);
    if (*optimal) return cmd_optimal(optimal_args);
    if (*solve) return cmd_solve(solve_args);
    if (*eval) return cmd_eval(eval_args);
    if (*ingest_cmd) return cmd_ingest(ingest_args);
    if (*experiment) {
      for (const auto& spec : pair_specs) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) {
          throw Error("pair spec must look like a:c, got " + spec);
        }
        experiment_config.ac_pairs.emplace_back(
            std::stoi(spec.substr(0, colon)), std::stoi(spec.substr(colon + 1)));
      }
      const auto paths = funnel::tools::run_experiment(experiment_config);
      for (const auto& path : paths) std::cout << "wrote " << path << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    print_error(error_type(e), e.what());
    return classify_exit(e);
  } catch (const std::exception& e) {
    print_error("error", e.what());
    return kExitInput;
  }
  return kExitInput;
}
