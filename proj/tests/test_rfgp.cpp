#include <cmath>
#include <random>

#include <doctest.h>

#include "igpr/bayes_linear.hpp"
#include "igpr/dataset.hpp"
#include "igpr/errors.hpp"
#include "igpr/rfgp.hpp"
#include "oracles.hpp"

namespace {

igpr::Hyper hyper2() { return {0.35, Eigen::Vector2d(1.0, 0.5), 0.25}; }

}  // namespace

TEST_CASE("frequencies are deterministic and have the spectral scale") {
  const igpr::Hyper h = hyper2();
  const Eigen::MatrixXd V1 = igpr::sample_frequencies(20000, h, 99);
  const Eigen::MatrixXd V2 = igpr::sample_frequencies(20000, h, 99);
  CHECK((V1 - V2).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const auto col = V1.col(j).array();
    const double sd = std::sqrt((col - col.mean()).square().sum() / (col.size() - 1));
    CHECK(sd * h.lengthscales[j] == doctest::Approx(1.0).epsilon(0.03));
  }
  CHECK((igpr::sample_frequencies(5, h, 1) - igpr::sample_frequencies(5, h, 2)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("feature map has squared norm M and approximates the kernel") {
  const igpr::Hyper h = hyper2();
  const Eigen::Index M = 20000;
  const Eigen::MatrixXd V = igpr::sample_frequencies(M, h, 7);
  const Eigen::Vector2d a(0.3, 1.1), b(0.8, 0.9);
  const Eigen::VectorXd pa = igpr::feature_map(a, V);
  CHECK(pa.squaredNorm() == doctest::Approx(static_cast<double>(M)).epsilon(1e-12));
  const double approx = h.signal_variance / M * pa.dot(igpr::feature_map(b, V));
  CHECK(std::abs(approx - igpr::ardse_eval(a, b, h)) <= 5.0 * h.signal_variance / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("zeta equals the path integral of the feature-map gradient") {
  const igpr::Hyper h = hyper2();
  const Eigen::MatrixXd V = igpr::sample_frequencies(30, h, 3);
  const Eigen::Vector2d x(2.0, -1.0), xt(0.5, 0.7);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const Eigen::VectorXd z = igpr::zeta(x, xt, i, V);
    for (Eigen::Index m = 0; m < V.rows(); ++m) {
      const auto v = V.row(m);
      const double ds = oracle::gk([&](double t) { return v(i) * std::cos(v.dot(oracle::path(x, xt, t))); });
      const double dc = oracle::gk([&](double t) { return -v(i) * std::sin(v.dot(oracle::path(x, xt, t))); });
      CHECK(z[2 * m] == doctest::Approx(ds).epsilon(1e-12));
      CHECK(z[2 * m + 1] == doctest::Approx(dc).epsilon(1e-12));
    }
  }
}

TEST_CASE("zeta is continuous across the orthogonal-frequency branch") {
  Eigen::MatrixXd V(1, 2);
  V << 1.3, -0.7;
  const Eigen::Vector2d xt(0.4, 0.2);
  // Delta orthogonal to v, then nudged off it.
  const Eigen::Vector2d orth(0.7, 1.3);
  const Eigen::VectorXd z0 = igpr::zeta(xt + orth, xt, 0, V);
  for (const double eps : {1e-12, 1e-9, 1e-6}) {
    const Eigen::VectorXd z1 = igpr::zeta(xt + orth + eps * Eigen::Vector2d(1.3, -0.7), xt, 0, V);
    CHECK((z1 - z0).cwiseAbs().maxCoeff() <= 10.0 * eps);
  }
}

TEST_CASE("RFGP is the Bayesian linear model on the random features") {
  const igpr::Dataset d = igpr::simulate(80, 0.5, 6);
  const igpr::Hyper h = hyper2();
  const Eigen::Index M = 40;
  const igpr::RfgpModel rf = igpr::RfgpModel::fit(d.X, d.y, h, M, 5);
  Eigen::MatrixXd Phi(d.rows(), 2 * M);
  for (Eigen::Index n = 0; n < d.rows(); ++n) Phi.row(n) = igpr::feature_map(d.X.row(n).transpose(), rf.frequencies()).transpose();
  const Eigen::VectorXd yc = d.y.array() - d.y.mean();
  const igpr::LinearPosterior post = igpr::bayes_linear_posterior(
      Phi, yc, Eigen::VectorXd::Zero(2 * M),
      Eigen::MatrixXd::Identity(2 * M, 2 * M) * (h.signal_variance / M), h.noise_variance);
  const Eigen::Vector2d q(3.0, 4.0);
  const Eigen::VectorXd phi = igpr::feature_map(q, rf.frequencies());
  const igpr::Prediction p = rf.predict(q);
  CHECK(p.mean == doctest::Approx(phi.dot(post.mean) + d.y.mean()).epsilon(1e-9));
  CHECK(p.variance == doctest::Approx(phi.dot(post.cov * phi)).epsilon(1e-8));
}

TEST_CASE("RFGP attributions are complete and vanish on the dummy axis") {
  const igpr::Dataset d = igpr::simulate(100, 0.5, 8);
  const igpr::RfgpModel rf = igpr::RfgpModel::fit(d.X, d.y, hyper2(), 100, 12);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    const auto [x, xt] = oracle::random_pair(rng, 2, 0.0, 10.0);
    const double total = igpr::rfgp_attribution(rf, x, xt, 0).mean + igpr::rfgp_attribution(rf, x, xt, 1).mean;
    CHECK(std::abs(total - (rf.predict_mean(x) - rf.predict_mean(xt))) <= 1e-10);
  }
  const auto g = igpr::rfgp_attribution(rf, Eigen::Vector2d(1, 2), Eigen::Vector2d(4, 2), 1);
  CHECK(g.mean == 0.0);
  CHECK(g.variance == 0.0);
}

TEST_CASE("mixture moments") {
  const igpr::MixtureAttribution mix = igpr::make_mixture({{0, 1.0, 0.5}, {0, 3.0, 1.5}});
  CHECK(mix.mixture_mean == 2.0);
  CHECK(mix.total_variance == doctest::Approx(1.0 + 1.0));
  CHECK_THROWS_AS(igpr::make_mixture({}), igpr::DomainError);

  const igpr::Dataset d = igpr::simulate(60, 0.5, 9);
  const Eigen::Vector2d x(7.0, 2.0), xt(1.0, 5.0);
  const igpr::MixtureAttribution one = igpr::marginalized_attribution(d.X, d.y, hyper2(), 50, 0, x, xt, 1, 33);
  const igpr::RfgpModel rf = igpr::RfgpModel::fit(d.X, d.y, hyper2(), 50, 33);
  const igpr::AttributionGaussian single = igpr::rfgp_attribution(rf, x, xt, 0);
  CHECK(one.mixture_mean == single.mean);
  CHECK(one.total_variance == single.variance);
  REQUIRE(one.seeds.size() == 1);
  CHECK(one.seeds[0] == 33);
}
