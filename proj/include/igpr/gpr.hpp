#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "igpr/kernels.hpp"
#include "igpr/specfun.hpp"

namespace igpr {

struct Dataset;

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact GP regression with a zero-mean ARD-SE prior.
///
/// Targets are centered by their sample mean before conditioning; the offset
/// is added back in `predict`. Because attributions only involve differences
/// F(x) - F(x~), the offset never enters them.
///
/// The model is immutable after `fit`; every const member is safe to call
/// concurrently.
class GprModel {
 public:
  /// Conditions the prior on (X, y). Cholesky of K + noise*I is attempted
  /// plain first, then with jitter tol.solver_jitter * mean(diag K) growing
  /// tenfold up to six times. Throws NumericalError if all attempts fail.
  static GprModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& hyper,
                      const Tolerances& tol = {});
  static GprModel fit(const Dataset& data, const Hyper& hyper, const Tolerances& tol = {});

  /// Rebuilds a model from serialized parts. The factor is recomputed with
  /// the recorded jitter; alpha is taken as stored.
  static GprModel from_parts(const Hyper& hyper, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                             double y_offset, double jitter);

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// (K + noise*I)^{-1} b through the stored factor.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& b) const;
  /// b^T (K + noise*I)^{-1} b, computed as |L^{-1} b|^2.
  double inverse_quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& b) const;

  const Hyper& hyper() const { return hyper_; }
  const Eigen::MatrixXd& train_inputs() const { return X_; }
  const Eigen::VectorXd& train_targets() const { return y_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Lower-triangular factor L with L L^T = K + (noise + jitter) I.
  Eigen::MatrixXd chol() const { return llt_.matrixL(); }
  double y_offset() const { return y_offset_; }
  /// Diagonal jitter that the factorization needed (0 when none).
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return X_.rows(); }
  Eigen::Index dim() const { return X_.cols(); }

 private:
  GprModel() = default;

  Hyper hyper_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double y_offset_ = 0.0;
  double jitter_ = 0.0;
};

/// Cholesky of a symmetric matrix with the escalating-jitter policy above.
/// Returns the jitter that was added; throws NumericalError on failure.
double factorize_with_jitter(const Eigen::MatrixXd& A, Eigen::LLT<Eigen::MatrixXd>& llt,
                             const Tolerances& tol = {});

/// -1/2 y_c^T alpha - sum log diag(L) - N/2 log(2 pi), where y_c are the
/// centered targets.
double log_marginal_likelihood(const GprModel& model);
/// Same objective for caller-supplied targets; y is centered by the model offset.
double log_marginal_likelihood(const GprModel& model, const Eigen::VectorXd& y);

struct OptimizeOptions {
  /// Initial step in log-space for every coordinate.
  double initial_step = 1.0;
  /// Search stops once the step falls below this.
  double min_step = 1e-3;
  /// Lower bound on log(noise / var(y)).
  double min_log_noise = std::log(1e-6);
  /// Bounds on log lengthscales, in input units.
  double max_log_lengthscale = std::log(1e6);
  double min_log_lengthscale = std::log(1e-3);
};

struct OptimizeResult {
  Hyper hyper;
  double log_likelihood = 0.0;
  int evaluations = 0;
  /// Best objective after each evaluation; non-decreasing.
  std::vector<double> trace;
};

/// Derivative-free coordinate search over (log signal variance, log l_i,
/// log noise variance) maximizing the log marginal likelihood. Each
/// likelihood evaluation counts against `budget`; the best point found is
/// returned, so the result is never worse than `init`. A lengthscale move that
/// grows l_i and leaves the objective unchanged is accepted, which sends the
/// lengthscales of constant features outward.
OptimizeResult coordinate_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const Hyper& init, int budget, const OptimizeOptions& opts = {},
                                 const Tolerances& tol = {});

/// Runs coordinate_search from `init` and again from `init` with signal and
/// noise variance both set to var(y)/2, each with the full budget, and keeps
/// the higher likelihood (the first on ties). A small initial noise can
/// otherwise lead into an interpolating optimum with noise near zero.
OptimizeResult multi_start_search(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Hyper& init, int budget, const OptimizeOptions& opts = {},
                                  const Tolerances& tol = {});

/// Hyperparameters from multi_start_search.
Hyper optimize_hyperparameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Hyper& init, int budget, const OptimizeOptions& opts = {},
                               const Tolerances& tol = {});
Hyper optimize_hyperparameters(const Dataset& data, const Hyper& init, int budget,
                               const OptimizeOptions& opts = {}, const Tolerances& tol = {});

/// Data-scaled starting point: signal variance var(y), lengthscales std(X_i)
/// (1 for constant columns), noise 0.1 var(y).
Hyper default_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace igpr
