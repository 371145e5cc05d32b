#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "funnel/dataset.hpp"
#include "funnel/serialize.hpp"

using namespace funnel;

namespace {

DatasetSchema toy_schema() {
  DatasetSchema schema;
  schema.secret_column = "s";
  schema.data_columns = {"x"};
  return schema;
}

}  // namespace

TEST_CASE("csv parsing handles quotes and delimiters") {
  const auto plain = parse_csv_record("a,b,c", ',');
  CHECK(plain == std::vector<std::string>{"a", "b", "c"});

  const auto quoted = parse_csv_record("\"a,b\",c,\"say \"\"hi\"\"\"", ',');
  CHECK(quoted == std::vector<std::string>{"a,b", "c", "say \"hi\""});

  const auto semicolon = parse_csv_record("x;y;z", ';');
  CHECK(semicolon == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("ingest counts co-occurrences") {
  std::istringstream in("s,x\nyes,a\nyes,a\nno,b\nno,b\n");
  const IngestResult result = ingest_stream(in, toy_schema());
  CHECK(result.total_rows == 4);
  CHECK(result.used_rows == 4);
  CHECK(result.dropped_rows == 0);
  CHECK(result.joint.secret_size() == 2);
  CHECK(result.joint.data_size() == 2);
  CHECK(result.joint(0, 0) == doctest::Approx(0.5));
  CHECK(result.joint(0, 1) == doctest::Approx(0.0));
  CHECK(result.joint(1, 1) == doctest::Approx(0.5));
  CHECK(result.codebook.labels[0] == std::vector<std::string>{"yes", "no"});
  CHECK(result.codebook.code_of(1, "b") == 1);
}

TEST_CASE("missing values drop rows and are counted") {
  std::istringstream in("s,x,extra\nyes,a,1\n?,a,2\nno,?,3\nno,b,4\n");
  const IngestResult result = ingest_stream(in, toy_schema());
  CHECK(result.total_rows == 4);
  CHECK(result.used_rows == 2);
  CHECK(result.dropped_rows == 2);
  CHECK(result.used_rows + result.dropped_rows == result.total_rows);
}

TEST_CASE("schema errors and empty results raise") {
  std::istringstream missing_col("s,y\nyes,a\n");
  CHECK_THROWS_AS(ingest_stream(missing_col, toy_schema()), SchemaMismatch);

  std::istringstream all_missing("s,x\n?,a\n?,b\n");
  CHECK_THROWS_AS(ingest_stream(all_missing, toy_schema()),
                  EmptyAfterFiltering);

  DatasetSchema bad = toy_schema();
  bad.data_columns = {"s"};
  std::istringstream dup("s,x\nyes,a\n");
  CHECK_THROWS_AS(ingest_stream(dup, bad), SchemaMismatch);
}

TEST_CASE("multi-attribute ingest produces a shaped joint") {
  std::istringstream in(
      "s,x1,x2\n"
      "y,a,p\ny,a,q\ny,b,p\ny,b,q\n"
      "n,a,p\nn,a,q\nn,b,p\nn,b,q\n");
  DatasetSchema schema;
  schema.secret_column = "s";
  schema.data_columns = {"x1", "x2"};
  const IngestResult result = ingest_stream(in, schema);
  CHECK(result.joint.has_attribute_shape());
  CHECK(result.joint.attribute_shape() == std::vector<int>{2, 2});
  CHECK(result.joint.data_size() == 4);
  CHECK(result.joint(0, 0) == doctest::Approx(0.125));
}

TEST_CASE("zero-mass product cells need smoothing") {
  // (b, q) never co-occurs, so the product alphabet has an empty cell.
  std::istringstream in("s,x1,x2\ny,a,p\ny,a,q\nn,b,p\nn,a,q\n");
  DatasetSchema schema;
  schema.secret_column = "s";
  schema.data_columns = {"x1", "x2"};
  CHECK_THROWS_AS(ingest_stream(in, schema), InvalidDistribution);

  std::istringstream again("s,x1,x2\ny,a,p\ny,a,q\nn,b,p\nn,a,q\n");
  schema.smoothing = 0.5;
  const IngestResult result = ingest_stream(again, schema);
  CHECK(result.joint.data_marginal().minCoeff() > 0.0);
}

TEST_CASE("row order changes the codebook but not the aligned joint") {
  const std::string rows[] = {"y,a", "y,b", "n,a", "n,b", "y,a", "n,b"};
  std::string forward = "s,x\n";
  std::string reversed = "s,x\n";
  for (const auto& r : rows) forward += r + "\n";
  for (auto it = std::rbegin(rows); it != std::rend(rows); ++it) {
    reversed += *it + "\n";
  }
  std::istringstream in1(forward), in2(reversed);
  const IngestResult r1 = ingest_stream(in1, toy_schema());
  const IngestResult r2 = ingest_stream(in2, toy_schema());
  // Align r2's codes to r1's label order and compare cell by cell.
  for (int s = 0; s < 2; ++s) {
    for (int x = 0; x < 2; ++x) {
      const int s2 = r2.codebook.code_of(0, r1.codebook.labels[0][s]);
      const int x2 = r2.codebook.code_of(1, r1.codebook.labels[1][x]);
      CHECK(r1.joint(s, x) == doctest::Approx(r2.joint(s2, x2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint JSON round trip is byte-stable") {
  const JointDistribution j = sample_jeffreys(2, 3, 5);
  const std::string once = joint_to_json(j);
  const JointDistribution back = joint_from_json(once);
  CHECK(joint_to_json(back) == once);
  CHECK((back.matrix() - j.matrix()).lpNorm<Eigen::Infinity>() == 0.0);

  const JointDistribution shaped = sample_jeffreys(2, {2, 3}, 6);
  const std::string shaped_json = joint_to_json(shaped);
  const JointDistribution shaped_back = joint_from_json(shaped_json);
  CHECK(shaped_back.has_attribute_shape());
  CHECK(joint_to_json(shaped_back) == shaped_json);
}

TEST_CASE("joint JSON validation rejects corrupt input") {
  CHECK_THROWS_AS(joint_from_json("not json"), ParseError);
  CHECK_THROWS_AS(joint_from_json(R"({"c":1,"a":2,"p":[[0.5,-0.5]]})"),
                  InvalidDistribution);
  // Mass off by 1e-6: beyond tolerance.
  CHECK_THROWS_AS(joint_from_json(R"({"c":1,"a":2,"p":[[0.5,0.500001]]})"),
                  InvalidDistribution);
  CHECK_THROWS_AS(joint_from_json(R"({"c":2,"a":2,"p":[[0.5,0.5]]})"),
                  ParseError);
}

TEST_CASE("channel JSON round trip") {
  Eigen::MatrixXd q(2, 3);
  q << 0.25, 0.5, 0.125, 0.75, 0.5, 0.875;
  const Channel channel(q, {"low", "high"});
  const std::string once = channel_to_json(channel);
  const Channel back = channel_from_json(once);
  CHECK(channel_to_json(back) == once);
  CHECK(back.labels()[1] == "high");
  CHECK_THROWS_AS(
      channel_from_json(R"({"a":1,"b":2,"Q":[[0.6],[0.6]]})"),
      InvalidDistribution);
}

TEST_CASE("bundle JSON carries the certificate and reverse channel") {
  ProtocolBundle bundle;
  bundle.kind = "lip";
  bundle.epsilon = 0.5;
  Eigen::MatrixXd q(2, 2);
  q << 0.8, 0.3, 0.2, 0.7;
  bundle.channel = Channel(q);
  ReverseChannel rev;
  rev.R = Eigen::MatrixXd(2, 2);
  rev.R << 0.9, 0.1, 0.1, 0.9;
  rev.q = Eigen::VectorXd(2);
  rev.q << 0.6, 0.4;
  bundle.reverse = rev;
  bundle.utility_nats = 0.123;
  bundle.vertex_count = 7;
  bundle.certificate = {"lip", 0.5, 0.499, true};

  const std::string once = bundle_to_json(bundle);
  const ProtocolBundle back = bundle_from_json(once);
  CHECK(bundle_to_json(back) == once);
  CHECK(back.reverse.has_value());
  CHECK(back.certificate.pass);
  CHECK(back.vertex_count == 7);
}
