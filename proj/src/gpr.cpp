#include "igpr/gpr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "igpr/dataset.hpp"
#include "igpr/errors.hpp"

namespace igpr {

double factorize_with_jitter(const Eigen::MatrixXd& A, Eigen::LLT<Eigen::MatrixXd>& llt,
                             const Tolerances& tol) {
  tol.validate();
  llt.compute(A);
  if (llt.info() == Eigen::Success) return 0.0;

  const double base = tol.solver_jitter * std::max(A.diagonal().mean(), 0.0);
  double jitter = base > 0.0 ? base : tol.solver_jitter;
  constexpr int kEscalations = 6;
  for (int attempt = 0; attempt <= kEscalations; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd B = A;
    B.diagonal().array() += jitter;
    llt.compute(B);
    if (llt.info() == Eigen::Success) return jitter;
  }
  throw NumericalError("Cholesky factorization failed after jitter escalation to " +
                       std::to_string(jitter / 10.0) + " (matrix size " +
                       std::to_string(A.rows()) + ", mean diagonal " +
                       std::to_string(A.diagonal().mean()) + ")");
}

GprModel GprModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& hyper,
                       const Tolerances& tol) {
  hyper.validate();
  if (X.rows() < 1) throw DataError("GPR needs at least one training point");
  if (y.size() != X.rows()) throw ShapeError("X and y have different numbers of rows");
  if (X.cols() != hyper.dim()) {
    throw ShapeError("training inputs have " + std::to_string(X.cols()) +
                     " columns but the kernel has " + std::to_string(hyper.dim()) +
                     " lengthscales");
  }
  if (!y.allFinite() || !X.allFinite()) throw DataError("training data must be finite");

  GprModel m;
  m.hyper_ = hyper;
  m.X_ = X;
  m.y_ = y;
  m.y_offset_ = y.mean();

  Eigen::MatrixXd Ky = kernel_matrix(X, hyper);
  Ky.diagonal().array() += hyper.noise_variance;
  m.jitter_ = factorize_with_jitter(Ky, m.llt_, tol);
  m.alpha_ = m.llt_.solve((y.array() - m.y_offset_).matrix());
  return m;
}

GprModel GprModel::fit(const Dataset& data, const Hyper& hyper, const Tolerances& tol) {
  data.validate();
  return fit(data.X, data.y, hyper, tol);
}

GprModel GprModel::from_parts(const Hyper& hyper, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                              double y_offset, double jitter) {
  hyper.validate();
  if (X.cols() != hyper.dim() || alpha.size() != X.rows() || y.size() != X.rows()) {
    throw ShapeError("inconsistent model parts");
  }
  GprModel m;
  m.hyper_ = hyper;
  m.X_ = X;
  m.y_ = y;
  m.alpha_ = alpha;
  m.y_offset_ = y_offset;
  m.jitter_ = jitter;
  Eigen::MatrixXd Ky = kernel_matrix(X, hyper);
  Ky.diagonal().array() += hyper.noise_variance + jitter;
  m.llt_.compute(Ky);
  if (m.llt_.info() != Eigen::Success) {
    throw NumericalError("stored model does not factorize with its recorded jitter");
  }
  return m;
}

Prediction GprModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) {
    throw ShapeError("query has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(dim()));
  }
  const Eigen::VectorXd k = kernel_vector(X_, x, hyper_);
  Prediction p;
  p.mean = k.dot(alpha_) + y_offset_;
  double var = hyper_.signal_variance - inverse_quadratic_form(k);
  // Round-off below zero is clamped; anything larger signals a broken factor.
  if (var < 0.0) {
    if (var < -1e-10 * std::max(1.0, hyper_.signal_variance)) {
      throw NumericalError("posterior variance is negative (" + std::to_string(var) + ")");
    }
    var = 0.0;
  }
  p.variance = var;
  return p;
}

double GprModel::predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw ShapeError("query dimension does not match the model");
  return kernel_vector(X_, x, hyper_).dot(alpha_) + y_offset_;
}

Eigen::VectorXd GprModel::solve(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (b.size() != size()) throw ShapeError("right-hand side length does not match N");
  return llt_.solve(b);
}

double GprModel::inverse_quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (b.size() != size()) throw ShapeError("vector length does not match N");
  return llt_.matrixL().solve(b).squaredNorm();
}

double log_marginal_likelihood(const GprModel& model) {
  return log_marginal_likelihood(model, model.train_targets());
}

double log_marginal_likelihood(const GprModel& model, const Eigen::VectorXd& y) {
  if (y.size() != model.size()) throw ShapeError("target length does not match N");
  const Eigen::VectorXd yc = y.array() - model.y_offset();
  const Eigen::MatrixXd L = model.chol();
  const double n = static_cast<double>(model.size());
  return -0.5 * model.inverse_quadratic_form(yc) - L.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

Hyper default_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(y.size());
  double var_y = n > 1 ? (y.array() - y.mean()).square().sum() / (n - 1) : 1.0;
  if (!(var_y > 0.0)) var_y = 1.0;
  Hyper h;
  h.signal_variance = var_y;
  h.noise_variance = 0.1 * var_y;
  h.lengthscales.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto col = X.col(j).array();
    const double s = n > 1 ? std::sqrt((col - col.mean()).square().sum() / (n - 1)) : 0.0;
    h.lengthscales[j] = s > 0.0 ? s : 1.0;
  }
  return h;
}

namespace {

// Coordinates: [log s0^2, log l_1 .. log l_D, log noise].
Eigen::VectorXd pack(const Hyper& h) {
  Eigen::VectorXd t(h.dim() + 2);
  t[0] = std::log(h.signal_variance);
  t.segment(1, h.dim()) = h.lengthscales.array().log();
  t[h.dim() + 1] = std::log(h.noise_variance);
  return t;
}

Hyper unpack(const Eigen::VectorXd& t) {
  const Eigen::Index d = t.size() - 2;
  Hyper h;
  h.signal_variance = std::exp(t[0]);
  h.lengthscales = t.segment(1, d).array().exp();
  h.noise_variance = std::exp(t[d + 1]);
  return h;
}

}  // namespace

OptimizeResult coordinate_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const Hyper& init, int budget, const OptimizeOptions& opts,
                                 const Tolerances& tol) {
  init.validate();
  if (budget < 1) throw DomainError("optimization budget must be at least 1");
  if (!(init.noise_variance > 0.0)) {
    throw DomainError("hyperparameter search needs a positive initial noise variance");
  }

  const Eigen::Index d = init.dim();
  const double n = static_cast<double>(y.size());
  const double var_y =
      n > 1 ? std::max((y.array() - y.mean()).square().sum() / (n - 1), 1e-300) : 1.0;
  const double log_noise_floor = opts.min_log_noise + std::log(var_y);

  auto objective = [&](const Eigen::VectorXd& t) {
    try {
      return log_marginal_likelihood(GprModel::fit(X, y, unpack(t), tol));
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  auto in_bounds = [&](Eigen::Index c, double value) {
    if (c >= 1 && c <= d) {
      return value >= opts.min_log_lengthscale && value <= opts.max_log_lengthscale;
    }
    if (c == d + 1) return value >= log_noise_floor;
    return true;
  };

  OptimizeResult r;
  Eigen::VectorXd best = pack(init);
  double best_f = objective(best);
  r.evaluations = 1;
  r.trace.push_back(best_f);

  double step = opts.initial_step;
  while (r.evaluations < budget && step >= opts.min_step) {
    bool improved = false;
    for (Eigen::Index c = 0; c < best.size() && r.evaluations < budget; ++c) {
      for (const double dir : {+1.0, -1.0}) {
        if (r.evaluations >= budget) break;
        Eigen::VectorXd cand = best;
        cand[c] += dir * step;
        if (!in_bounds(c, cand[c])) continue;
        const double f = objective(cand);
        ++r.evaluations;
        const bool lengthscale_growth = c >= 1 && c <= d && dir > 0.0;
        const bool accept = f > best_f || (lengthscale_growth && f == best_f);
        if (accept) {
          improved = true;
          best = cand;
          best_f = f;
        }
        r.trace.push_back(best_f);
        if (accept) break;
      }
    }
    if (!improved) step *= 0.5;
  }

  r.hyper = unpack(best);
  r.log_likelihood = best_f;
  if (r.evaluations == 1) r.hyper = init;
  return r;
}

OptimizeResult multi_start_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Hyper& init, int budget, const OptimizeOptions& opts,
                                  const Tolerances& tol) {
  OptimizeResult best = coordinate_search(X, y, init, budget, opts, tol);
  const double n = static_cast<double>(y.size());
  if (n < 2) return best;
  const double half_var = 0.5 * (y.array() - y.mean()).square().sum() / (n - 1);
  if (!(half_var > 0.0)) return best;

  Hyper noisy = init;
  noisy.signal_variance = half_var;
  noisy.noise_variance = half_var;
  OptimizeResult second = coordinate_search(X, y, noisy, budget, opts, tol);
  const int total = best.evaluations + second.evaluations;
  if (second.log_likelihood > best.log_likelihood) best = std::move(second);
  best.evaluations = total;
  return best;
}

Hyper optimize_hyperparameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Hyper& init, int budget, const OptimizeOptions& opts,
                               const Tolerances& tol) {
  return multi_start_search(X, y, init, budget, opts, tol).hyper;
}

Hyper optimize_hyperparameters(const Dataset& data, const Hyper& init, int budget,
                               const OptimizeOptions& opts, const Tolerances& tol) {
  data.validate();
  return multi_start_search(data.X, data.y, init, budget, opts, tol).hyper;
}

}  // namespace igpr
