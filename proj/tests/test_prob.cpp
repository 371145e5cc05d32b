#include <doctest.h>

#include <cmath>
#include <random>

#include "funnel/distribution.hpp"
#include "funnel/joint_distribution.hpp"

using namespace funnel;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("entropy on degenerate, uniform and skewed distributions") {
  Eigen::VectorXd degenerate(3);
  degenerate << 1, 0, 0;
  CHECK(entropy(degenerate) == doctest::Approx(0.0).epsilon(1e-15));

  CHECK(entropy(vec2(0.5, 0.5)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // Direct summation oracle for the skewed case.
  const double expected = -0.2 * std::log(0.2) - 0.8 * std::log(0.8);
  CHECK(expected == doctest::Approx(0.500402).epsilon(1e-5));
  CHECK(entropy(vec2(0.2, 0.8)) == doctest::Approx(expected).epsilon(1e-12));

  // Bounds: 0 <= H <= ln(len).
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd p(5);
    for (int i = 0; i < 5; ++i) p(i) = u(rng);
    p /= p.sum();
    const double h = entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(5.0) + 1e-12);
  }
}

TEST_CASE("mutual information: independence, perfect correlation, skew") {
  CHECK(mutual_information(mat2(0.25, 0.25, 0.25, 0.25)) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mutual_information(mat2(0.5, 0.0, 0.0, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // Direct summation, and the identity I = ln2 - H(0.2, 0.8).
  const Eigen::MatrixXd skew = mat2(0.4, 0.1, 0.1, 0.4);
  double direct = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int v = 0; v < 2; ++v) {
      direct += skew(u, v) * std::log(skew(u, v) / (0.5 * 0.5));
    }
  }
  CHECK(direct == doctest::Approx(0.192745).epsilon(1e-5));
  CHECK(mutual_information(skew) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(mutual_information(skew) ==
        doctest::Approx(std::log(2.0) - entropy(vec2(0.2, 0.8))).epsilon(1e-12));
}

TEST_CASE("mutual information is symmetric") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const JointDistribution j = sample_uniform_normalised(3, 4, rng());
    CHECK(mutual_information(j.matrix()) ==
          doctest::Approx(mutual_information(j.matrix().transpose()))
              .epsilon(1e-12));
  }
}

TEST_CASE("joint distribution construction rejects bad input") {
  CHECK_THROWS_AS(JointDistribution(mat2(0.6, 0.5, -0.05, -0.05)),
                  InvalidDistribution);
  CHECK_THROWS_AS(JointDistribution(mat2(0.3, 0.3, 0.3, 0.2)),
                  InvalidDistribution);
  // Zero column marginal.
  CHECK_THROWS_AS(JointDistribution(mat2(0.5, 0.0, 0.5, 0.0)),
                  InvalidDistribution);
  // Zero row marginal.
  CHECK_THROWS_AS(JointDistribution(mat2(0.5, 0.5, 0.0, 0.0)),
                  InvalidDistribution);
  CHECK_THROWS_AS(JointDistribution(mat2(0.25, 0.25, 0.25, 0.25), {3}),
                  DimensionMismatch);
}

TEST_CASE("conditionals match row and column normalisation") {
  const JointDistribution perfect(mat2(0.5, 0.0, 0.0, 0.5));
  CHECK(perfect.data_given_secret(0)(0) == doctest::Approx(1.0));
  CHECK(perfect.data_given_secret(0)(1) == doctest::Approx(0.0));

  const JointDistribution indep(mat2(0.25, 0.25, 0.25, 0.25));
  CHECK(indep.data_given_secret(0)(0) == doctest::Approx(0.5));

  const JointDistribution skew(mat2(0.4, 0.1, 0.1, 0.4));
  CHECK(skew.data_given_secret(0)(0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(skew.data_given_secret(0)(1) == doctest::Approx(0.2).epsilon(1e-12));

  // Bayes consistency p_{x|s} p_s = p_{s,x}.
  for (int s = 0; s < 2; ++s) {
    const Eigen::VectorXd cond = skew.data_given_secret(s);
    for (int x = 0; x < 2; ++x) {
      CHECK(cond(x) * skew.secret_marginal()(s) ==
            doctest::Approx(skew(s, x)).epsilon(1e-12));
    }
  }
  // Posterior columns are distributions.
  for (int x = 0; x < 2; ++x) {
    CHECK(skew.secret_given_data(x).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("attribute conditionals and the mixed-radix packing") {
  // Shape (2, 2): x = 2 x^0 + x^1.
  Eigen::MatrixXd p(2, 4);
  p << 0.10, 0.20, 0.05, 0.15,
       0.25, 0.05, 0.15, 0.05;
  const JointDistribution j(p, {2, 2});
  CHECK(j.pack({1, 0}) == 2);
  CHECK(j.unpack(3) == std::vector<int>{1, 1});

  // p(x^1 | x^0 = 0) from direct sums.
  const double mass = 0.10 + 0.20 + 0.25 + 0.05;
  const Eigen::VectorXd cond = j.attribute_given_context(1, {{0, 0}});
  CHECK(cond(0) == doctest::Approx((0.10 + 0.25) / mass).epsilon(1e-12));
  CHECK(cond(1) == doctest::Approx((0.20 + 0.05) / mass).epsilon(1e-12));

  const Eigen::VectorXd cond_s =
      j.attribute_given_secret_context(1, 0, {{0, 1}});
  CHECK(cond_s(0) == doctest::Approx(0.05 / 0.20).epsilon(1e-12));
  CHECK(cond_s(1) == doctest::Approx(0.15 / 0.20).epsilon(1e-12));

  // Zero-mass conditioning must raise.
  Eigen::MatrixXd q(2, 4);
  q << 0.25, 0.25, 0.00, 0.00,
       0.00, 0.00, 0.25, 0.25;
  const JointDistribution j2(q, {2, 2});
  CHECK_THROWS_AS(j2.attribute_given_secret_context(
                      1, 0, JointDistribution::Context{{0, 1}}),
                  ZeroProbabilityEvent);
}

TEST_CASE("pushforward against hand-computed products") {
  const JointDistribution skew(mat2(0.4, 0.1, 0.1, 0.4));

  // Identity channel: p_{Y,S} is the transpose-indexed joint.
  const Pushforward ident = pushforward(Eigen::MatrixXd::Identity(2, 2), skew);
  CHECK(ident.ys(0, 0) == doctest::Approx(0.4));
  CHECK(ident.ys(0, 1) == doctest::Approx(0.1));
  CHECK(ident.ys.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Constant channel: single row equal to p_S.
  const Pushforward constant = pushforward(Eigen::MatrixXd::Ones(1, 2), skew);
  CHECK(constant.ys(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(constant.ys(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  // Randomised response with e^alpha = 3 on the uniform perfectly
  // correlated prior: 0.75 * 0.5 = 0.375 on the diagonal.
  Eigen::MatrixXd rr(2, 2);
  rr << 0.75, 0.25, 0.25, 0.75;
  const JointDistribution correlated(mat2(0.5, 0.0, 0.0, 0.5));
  const Pushforward out = pushforward(rr, correlated);
  CHECK(out.ys(0, 0) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(out.ys(0, 1) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(out.ys(1, 0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(out.ys(1, 1) == doctest::Approx(0.375).epsilon(1e-12));

  Eigen::MatrixXd wrong(2, 3);
  wrong.setConstant(1.0 / 2.0);
  CHECK_THROWS_AS(pushforward(wrong, skew), DimensionMismatch);
}

TEST_CASE("samplers are deterministic and positive") {
  const JointDistribution a = sample_jeffreys(2, 5, 1);
  const JointDistribution b = sample_jeffreys(2, 5, 1);
  CHECK((a.matrix() - b.matrix()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(a.matrix().minCoeff() > 0.0);
  CHECK(a.matrix().sum() == doctest::Approx(1.0).epsilon(1e-12));

  const JointDistribution u1 = sample_uniform_normalised(2, 2, 42);
  const JointDistribution u2 = sample_uniform_normalised(2, 2, 42);
  CHECK((u1.matrix() - u2.matrix()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(u1.matrix().minCoeff() > 0.0);
  CHECK(u1.matrix().maxCoeff() < 1.0);

  const JointDistribution shaped = sample_jeffreys(2, {3, 3, 4}, 9);
  CHECK(shaped.data_size() == 36);
  CHECK(shaped.has_attribute_shape());
}

TEST_CASE("sampler cell means match the symmetric expectation") {
  const int draws = 10000;
  double mean_j = 0.0;
  double mean_u = 0.0;
  for (int i = 0; i < draws; ++i) {
    mean_j += sample_jeffreys(2, 2, 1000 + i)(0, 0);
    mean_u += sample_uniform_normalised(2, 2, 5000 + i)(0, 0);
  }
  mean_j /= draws;
  mean_u /= draws;
  CHECK(std::abs(mean_j - 0.25) < 0.01);
  CHECK(std::abs(mean_u - 0.25) < 0.01);
}

TEST_CASE("chain rule H(S) + H(X|S) = H(S,X) on random instances") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const JointDistribution j = sample_jeffreys(3, 5, rng());
    double h_joint = 0.0;
    for (int s = 0; s < 3; ++s) {
      for (int x = 0; x < 5; ++x) {
        if (j(s, x) > 0) h_joint -= j(s, x) * std::log(j(s, x));
      }
    }
    double h_cond = 0.0;
    for (int s = 0; s < 3; ++s) {
      h_cond += j.secret_marginal()(s) * entropy(j.data_given_secret(s));
    }
    CHECK(j.entropy_secret() + h_cond == doctest::Approx(h_joint).epsilon(1e-10));
  }
}

TEST_CASE("pushforward preserves mass and data processing holds") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const JointDistribution j = sample_uniform_normalised(3, 4, rng());
    // Random column-stochastic channel with 3 outputs.
    Eigen::MatrixXd q(3, 4);
    for (int x = 0; x < 4; ++x) {
      for (int y = 0; y < 3; ++y) q(y, x) = u(rng);
      q.col(x) /= q.col(x).sum();
    }
    const Pushforward out = pushforward(q, j);
    CHECK(out.ys.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.yx.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // I(S;Y) <= I(S;X).
    CHECK(mutual_information(out.ys.transpose()) <=
          j.mutual_information_sx() + 1e-9);
  }
}
