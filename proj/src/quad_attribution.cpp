#include "igpr/quad_attribution.hpp"

#include <cmath>
#include <random>
#include <string>

#include "igpr/errors.hpp"

namespace igpr {

namespace {

void check_query(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i) {
  if (x.size() != model.dim() || x_tilde.size() != model.dim()) {
    throw ShapeError("query and baseline must have dimension " + std::to_string(model.dim()));
  }
  if (i < 0 || i >= model.dim()) {
    throw ShapeError("feature index " + std::to_string(i) + " out of range");
  }
}

// sum_{l,l'} w_l w_l' d^2k(gamma(t_l), gamma(t_l'))/dx_i dx'_i for equispaced
// nodes. The kernel is stationary and the path is straight, so the Hessian
// only depends on the lag l - l'; the double sum collapses onto the weight
// autocorrelation.
double tensor_hessian_sum(const Hyper& h, const Eigen::VectorXd& x_tilde,
                          const Eigen::VectorXd& delta, Eigen::Index i, const NodesWeights& nw) {
  const Eigen::Index n = nw.nodes.size();
  const Eigen::VectorXd& w = nw.weights;
  if (n == 1) return w[0] * w[0] * ardse_hess_ii(x_tilde, x_tilde, i, h);

  const double spacing = (nw.nodes[n - 1] - nw.nodes[0]) / static_cast<double>(n - 1);
  double sum = 0.0;
  for (Eigen::Index lag = 0; lag < n; ++lag) {
    const double corr = w.head(n - lag).dot(w.tail(n - lag));
    const Eigen::VectorXd p = x_tilde + (static_cast<double>(lag) * spacing) * delta;
    const double g = ardse_hess_ii(p, x_tilde, i, h);
    sum += (lag == 0 ? 1.0 : 2.0) * corr * g;
  }
  return sum;
}

}  // namespace

double posterior_mean_gradient(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                               Eigen::Index i) {
  if (x.size() != model.dim()) throw ShapeError("query dimension does not match the model");
  return kernel_grad_vector(model.train_inputs(), x, i, model.hyper()).dot(model.alpha());
}

AttributionGaussian quad_attribution(const GprModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                     Eigen::Index i, const QuadratureSpec& spec) {
  check_query(model, x, x_tilde, i);
  const NodesWeights nw = nodes_weights(spec);
  AttributionGaussian g;
  g.feature = i;
  const double delta_i = x[i] - x_tilde[i];
  if (delta_i == 0.0) return g;

  const Eigen::VectorXd base = x_tilde;
  const Eigen::VectorXd delta = x - x_tilde;
  const Eigen::MatrixXd& X = model.train_inputs();
  const Hyper& h = model.hyper();

  Eigen::VectorXd q = Eigen::VectorXd::Zero(X.rows());
  for (Eigen::Index l = 0; l < nw.nodes.size(); ++l) {
    const Eigen::VectorXd p = base + nw.nodes[l] * delta;
    q += nw.weights[l] * kernel_grad_vector(X, p, i, h);
  }
  q *= delta_i;

  const double prior = delta_i * delta_i * tensor_hessian_sum(h, base, delta, i, nw);
  g.mean = q.dot(model.alpha());
  g.variance = clamp_variance(prior - model.inverse_quadratic_form(q),
                              std::max(prior, h.signal_variance));
  return g;
}

AttributionReport quad_attribution_report(const GprModel& model,
                                          const Eigen::Ref<const Eigen::VectorXd>& x,
                                          const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                          const QuadratureSpec& spec) {
  AttributionReport r;
  r.query = x;
  r.baseline = x_tilde;
  double total = 0.0;
  for (Eigen::Index i = 0; i < model.dim(); ++i) {
    r.features.push_back(quad_attribution(model, x, x_tilde, i, spec));
    total += r.features.back().mean;
  }
  r.prediction_delta = model.predict_mean(x) - model.predict_mean(x_tilde);
  r.completeness_residual = std::abs(total - r.prediction_delta);
  return r;
}

std::vector<SweepRow> convergence_sweep(const GprModel& model,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                        const std::vector<QuadratureRule>& rules,
                                        const std::vector<Eigen::Index>& partitions,
                                        const Tolerances& tol) {
  const AttributionReport exact = attribution_report(model, x, x_tilde, tol);
  std::vector<SweepRow> rows;
  for (const QuadratureRule rule : rules) {
    for (const Eigen::Index L : partitions) {
      const QuadratureSpec spec{rule, L};
      SweepRow row;
      row.rule = rule;
      row.partitions = L;
      row.function_evals = function_evaluations(spec);
      for (Eigen::Index i = 0; i < model.dim(); ++i) {
        const AttributionGaussian approx = quad_attribution(model, x, x_tilde, i, spec);
        const AttributionGaussian& ref = exact.features[static_cast<std::size_t>(i)];
        row.mean_abs_err = std::max(row.mean_abs_err, std::abs(approx.mean - ref.mean));
        row.var_abs_err = std::max(row.var_abs_err, std::abs(approx.variance - ref.variance));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

McEstimate mc_attribution_oracle(const GprModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                 Eigen::Index i, Eigen::Index grid_points, Eigen::Index samples,
                                 std::uint64_t seed, const Tolerances& tol) {
  check_query(model, x, x_tilde, i);
  if (grid_points < 3) throw DomainError("MC oracle needs at least 3 grid points");
  if (samples < 100) throw DomainError("MC oracle needs at least 100 samples");

  McEstimate est;
  est.samples = samples;
  const double delta_i = x[i] - x_tilde[i];
  if (delta_i == 0.0) return est;

  const Eigen::MatrixXd& X = model.train_inputs();
  const Hyper& h = model.hyper();
  const Eigen::VectorXd delta = x - x_tilde;
  const Eigen::Index G = grid_points;

  Eigen::MatrixXd P(G, model.dim());
  for (Eigen::Index g = 0; g < G; ++g) {
    const double t = static_cast<double>(g) / static_cast<double>(G - 1);
    P.row(g) = (x_tilde + t * delta).transpose();
  }

  // Joint posterior of the gradient process at the nodes.
  Eigen::MatrixXd D(X.rows(), G);
  Eigen::VectorXd mean(G);
  for (Eigen::Index g = 0; g < G; ++g) {
    D.col(g) = kernel_grad_vector(X, P.row(g).transpose(), i, h);
    mean[g] = D.col(g).dot(model.alpha());
  }
  Eigen::MatrixXd cov(G, G);
  for (Eigen::Index c = 0; c < G; ++c) {
    for (Eigen::Index r = c; r < G; ++r) {
      cov(r, c) = ardse_hess_ii(P.row(r).transpose(), P.row(c).transpose(), i, h);
      cov(c, r) = cov(r, c);
    }
  }
  const Eigen::MatrixXd L = model.chol();
  const Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(D);
  cov.noalias() -= W.transpose() * W;
  cov = 0.5 * (cov + cov.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt;
  est.jitter = factorize_with_jitter(cov, llt, tol);

  Eigen::VectorXd w = Eigen::VectorXd::Constant(G, 1.0 / static_cast<double>(G - 1));
  w[0] = w[G - 1] = 0.5 / static_cast<double>(G - 1);
  const double center = delta_i * w.dot(mean);
  // Each sample integrates mean + L z, so only (L^T w) . z is random.
  const Eigen::VectorXd u = (llt.matrixU() * w).eval() * delta_i;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(G);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index s = 0; s < samples; ++s) {
    for (Eigen::Index g = 0; g < G; ++g) z[g] = normal(rng);
    const double value = center + u.dot(z);
    sum += value;
    sum_sq += (value - center) * (value - center);
  }
  const double n = static_cast<double>(samples);
  est.mean = sum / n;
  const double shift = est.mean - center;
  est.variance = (sum_sq - n * shift * shift) / (n - 1.0);
  est.std_error = std::sqrt(est.variance / n);
  est.variance_std_error = est.variance * std::sqrt(2.0 / (n - 1.0));
  return est;
}

}  // namespace igpr
