// End-to-end checks of the funnel binary: exit codes, file outputs, and
// reproducibility of sweep outputs under a fixed seed.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "funnel/serialize.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = FUNNEL_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("funnel_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("gen, optimal, eval round trip with passing certificates") {
  TempDir tmp;
  const std::string prior = tmp.file("prior.json");
  REQUIRE(run("gen --c 2 --a 3 --seed 7 --out " + prior) == 0);

  const std::string bundle_path = tmp.file("bundle.json");
  REQUIRE(run("optimal --metric lip --prior " + prior +
              " --epsilon 0.8 --out " + bundle_path) == 0);
  const funnel::ProtocolBundle bundle = funnel::load_bundle(bundle_path);
  CHECK(bundle.kind == "lip");
  CHECK(bundle.certificate.pass);
  CHECK(bundle.reverse.has_value());
  CHECK(bundle.channel.output_size() <= 3);

  // Evaluating the synthesized channel against the same budget passes.
  const std::string channel_path = tmp.file("channel.json");
  funnel::save_channel(channel_path, bundle.channel);
  CHECK(run("eval --channel " + channel_path + " --prior " + prior +
            " --metric lip --epsilon 0.8") == 0);
  // And fails against a tighter one.
  CHECK(run("eval --channel " + channel_path + " --prior " + prior +
            " --metric lip --epsilon 0.01") == 2);
}

TEST_CASE("optimal ldp bundle and budget exhaustion exit code") {
  TempDir tmp;
  const std::string prior = tmp.file("prior.json");
  REQUIRE(run("gen --c 2 --a 2 --seed 3 --out " + prior) == 0);
  const std::string bundle_path = tmp.file("ldp.json");
  CHECK(run("optimal --metric ldp --prior " + prior + " --epsilon 1 --out " +
            bundle_path) == 0);
  CHECK(funnel::load_bundle(bundle_path).kind == "ldp");

  // An absurdly small vertex budget trips the infeasible/budget exit code.
  CHECK(run("optimal --metric ldp --prior " + prior +
            " --epsilon inf --max-vertices 2") == 2);
}

TEST_CASE("solve reports the closed-form alpha") {
  TempDir tmp;
  const std::string prior = tmp.file("correlated.json");
  {
    std::ofstream out(prior);
    out << R"({"c":2,"a":2,"p":[[0.5,0.0],[0.0,0.5]]})";
  }
  const std::string solved = tmp.file("solved.json");
  REQUIRE(run("solve --protocol grr --prior " + prior +
              " --epsilon 0.6931471805599453 --out " + solved) == 0);
  const std::string text = slurp(solved);
  // alpha = ln 3 = 1.0986...
  CHECK(text.find("\"alpha\": 1.0986") != std::string::npos);

  // Independent prior saturates: alpha = inf.
  const std::string indep = tmp.file("indep.json");
  {
    std::ofstream out(indep);
    out << R"({"c":2,"a":2,"p":[[0.25,0.25],[0.25,0.25]]})";
  }
  const std::string sat = tmp.file("sat.json");
  REQUIRE(run("solve --protocol cr --prior " + indep + " --epsilon 1 --out " +
              sat) == 0);
  CHECK(slurp(sat).find("\"alpha\": \"inf\"") != std::string::npos);
}

TEST_CASE("ingest builds a prior from CSV") {
  TempDir tmp;
  const std::string csv = tmp.file("toy.csv");
  {
    std::ofstream out(csv);
    out << "s,x\nyes,a\nyes,a\nno,b\nno,a\n?,b\n";
  }
  const std::string prior = tmp.file("ingested.json");
  REQUIRE(run("ingest --csv " + csv + " --secret s --data x --out " + prior) ==
          0);
  const auto j = funnel::load_joint(prior);
  CHECK(j.secret_size() == 2);
  CHECK(j.data_size() == 2);

  CHECK(run("ingest --csv " + csv + " --secret nope --data x --out " +
            tmp.file("x.json")) == 3);
  CHECK(run("ingest --csv " + tmp.file("missing.csv") +
            " --secret s --data x") == 3);
}

TEST_CASE("experiment sweeps are reproducible modulo timing columns") {
  TempDir tmp;
  const std::string dir1 = (tmp.path / "run1").string();
  const std::string dir2 = (tmp.path / "run2").string();
  // alpha-vs-epsilon has no timing columns: outputs must be byte-identical.
  REQUIRE(run("experiment --kind alpha-vs-epsilon --c 3 --a 4 --seed 11 "
              "--eps-grid 0.5 1.0 --out " + dir1) == 0);
  REQUIRE(run("experiment --kind alpha-vs-epsilon --c 3 --a 4 --seed 11 "
              "--eps-grid 0.5 1.0 --out " + dir2) == 0);
  CHECK(slurp(fs::path(dir1) / "alpha_vs_epsilon.csv") ==
        slurp(fs::path(dir2) / "alpha_vs_epsilon.csv"));

  REQUIRE(run("experiment --kind grr-vs-cr-synthetic --pairs 3:2 --instances 3 "
              "--seed 5 --eps-grid 0.5 1.0 --out " + dir1) == 0);
  REQUIRE(run("experiment --kind grr-vs-cr-synthetic --pairs 3:2 --instances 3 "
              "--seed 5 --eps-grid 0.5 1.0 --out " + dir2) == 0);
  CHECK(slurp(fs::path(dir1) / "grr_vs_cr.csv") ==
        slurp(fs::path(dir2) / "grr_vs_cr.csv"));
  const std::string summary = slurp(fs::path(dir1) / "grr_vs_cr_summary.csv");
  CHECK(summary.find("mean_utility_normalised") != std::string::npos);

  // Certificates hold on every emitted row.
  const std::string rows = slurp(fs::path(dir1) / "grr_vs_cr.csv");
  CHECK(rows.find("false") == std::string::npos);
  CHECK(rows.find("error") == std::string::npos);
}

TEST_CASE("small ldp-vs-lip sweep emits certified rows") {
  TempDir tmp;
  const std::string dir = (tmp.path / "sweep").string();
  REQUIRE(run("experiment --kind ldp-vs-lip --c 2 --a 3 --instances 2 "
              "--seed 9 --eps-grid 0.5 --out " + dir) == 0);
  const std::string rows = slurp(fs::path(dir) / "ldp_vs_lip.csv");
  CHECK(rows.find("opt-lip") != std::string::npos);
  CHECK(rows.find("opt-ldp") != std::string::npos);
  CHECK(rows.find("error") == std::string::npos);
  CHECK(rows.find("false") == std::string::npos);
}

TEST_CASE("bad inputs exit with the input error code") {
  TempDir tmp;
  CHECK(run("optimal --metric lip --prior " + tmp.file("nope.json") +
            " --epsilon 1") == 3);
  const std::string bad = tmp.file("bad.json");
  {
    std::ofstream out(bad);
    out << R"({"c":1,"a":2,"p":[[0.7,0.4]]})";
  }
  CHECK(run("optimal --metric lip --prior " + bad + " --epsilon 1") == 3);
  CHECK(run("nonsense") == 3);
}
