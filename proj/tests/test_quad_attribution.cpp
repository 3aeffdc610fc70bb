#include <cmath>
#include <random>

#include <doctest.h>

#include "igpr/dataset.hpp"
#include "igpr/quad_attribution.hpp"
#include "oracles.hpp"

using igpr::QuadratureRule;

namespace {

igpr::GprModel model() {
  const igpr::Dataset d = igpr::simulate(120, 0.5, 77);
  return igpr::GprModel::fit(d.X, d.y, {0.3, Eigen::Vector2d(1.0, 0.5), 0.25});
}

}  // namespace

TEST_CASE("quadrature attribution equals a direct double sum over the nodes") {
  const igpr::GprModel m = model();
  const igpr::Hyper& h = m.hyper();
  const Eigen::Vector2d x(8.1, 1.7), xt(2.2, 6.4);
  for (const auto rule : {QuadratureRule::right_hand, QuadratureRule::trapezoid, QuadratureRule::simpson,
                          QuadratureRule::simpson_quarter}) {
    const igpr::NodesWeights nw = igpr::nodes_weights({rule, 12});
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double di = x[i] - xt[i];
      double prior = 0.0;
      double mean = 0.0;
      Eigen::VectorXd q = Eigen::VectorXd::Zero(m.size());
      for (Eigen::Index r = 0; r < nw.nodes.size(); ++r) {
        const Eigen::VectorXd pr = oracle::path(x, xt, nw.nodes[r]);
        q += nw.weights[r] * igpr::kernel_grad_vector(m.train_inputs(), pr, i, h);
        mean += nw.weights[r] * igpr::posterior_mean_gradient(m, pr, i);
        for (Eigen::Index c = 0; c < nw.nodes.size(); ++c) {
          prior += nw.weights[r] * nw.weights[c] *
                   igpr::ardse_hess_ii(pr, oracle::path(x, xt, nw.nodes[c]), i, h);
        }
      }
      q *= di;
      const double var = di * di * prior - q.dot(m.solve(q));
      const igpr::AttributionGaussian g = igpr::quad_attribution(m, x, xt, i, {rule, 12});
      CHECK(g.mean == doctest::Approx(di * mean).epsilon(1e-12));
      CHECK(g.variance == doctest::Approx(var).epsilon(1e-9));
    }
  }
}

TEST_CASE("posterior mean gradient matches finite differences of the mean") {
  const igpr::GprModel m = model();
  const Eigen::Vector2d x(4.4, 3.3);
  const double eps = 1e-5;
  for (Eigen::Index i = 0; i < 2; ++i) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[i] = eps;
    const double fd = (m.predict_mean(x + e) - m.predict_mean(x - e)) / (2 * eps);
    CHECK(igpr::posterior_mean_gradient(m, x, i) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("sweep covers every requested combination and converges") {
  const igpr::GprModel m = model();
  const Eigen::Vector2d x(8.1, 1.7), xt(2.2, 6.4);
  const std::vector<QuadratureRule> rules{QuadratureRule::right_hand, QuadratureRule::simpson};
  const std::vector<Eigen::Index> Ls{8, 16, 32};
  const auto rows = igpr::convergence_sweep(m, x, xt, rules, Ls);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].rule == QuadratureRule::right_hand);
  CHECK(rows[5].partitions == 32);
  CHECK(rows[5].function_evals == 65);
  CHECK(rows[1].mean_abs_err < rows[0].mean_abs_err);
  CHECK(rows[5].mean_abs_err < rows[4].mean_abs_err);
  CHECK(rows[5].mean_abs_err < 1e-4);
}

TEST_CASE("Monte Carlo path sampling agrees with the closed form") {
  const igpr::GprModel m = model();
  const Eigen::Vector2d x(6.0, 2.5), xt(3.0, 4.0);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const igpr::AttributionGaussian g = igpr::gpr_attribution(m, x, xt, i);
    const igpr::McEstimate mc = igpr::mc_attribution_oracle(m, x, xt, i, 257, 10000, 42 + i);
    CHECK(std::abs(mc.mean - g.mean) <= 3.0 * mc.std_error);
    CHECK(std::abs(mc.variance - g.variance) <= 0.1 * g.variance);
  }
  const igpr::McEstimate zero = igpr::mc_attribution_oracle(m, xt, xt, 0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.variance == 0.0);
}
