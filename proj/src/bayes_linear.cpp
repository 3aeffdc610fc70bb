#include "igpr/bayes_linear.hpp"

#include <string>

#include "igpr/errors.hpp"

namespace igpr {

LinearPosterior bayes_linear_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& prior_mean,
                                       const Eigen::MatrixXd& prior_cov, double noise_variance) {
  const Eigen::Index d = prior_mean.size();
  if (prior_cov.rows() != d || prior_cov.cols() != d) {
    throw ShapeError("prior covariance must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (X.rows() != y.size() || (X.rows() > 0 && X.cols() != d)) {
    throw ShapeError("design matrix and targets are inconsistent with the prior");
  }
  if (!(noise_variance > 0.0)) throw DomainError("noise variance must be positive");

  const Eigen::LLT<Eigen::MatrixXd> prior_llt(prior_cov);
  if (prior_llt.info() != Eigen::Success) {
    throw NumericalError("prior covariance is not positive definite");
  }
  if (X.rows() == 0) return {prior_mean, prior_cov};

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd precision = prior_llt.solve(I);
  precision.noalias() += X.transpose() * X / noise_variance;
  const Eigen::LLT<Eigen::MatrixXd> post_llt(precision);
  if (post_llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }

  LinearPosterior post;
  post.cov = post_llt.solve(I);
  post.mean = post_llt.solve(prior_llt.solve(prior_mean) + X.transpose() * y / noise_variance);
  return post;
}

AttributionGaussian bayes_linear_attribution(const LinearPosterior& posterior,
                                             const Eigen::Ref<const Eigen::VectorXd>& x,
                                             const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                             Eigen::Index i) {
  const Eigen::Index d = posterior.mean.size();
  if (x.size() != d || x_tilde.size() != d) throw ShapeError("query dimension mismatch");
  if (i < 0 || i >= d) throw ShapeError("feature index " + std::to_string(i) + " out of range");
  const double delta = x[i] - x_tilde[i];
  return {i, posterior.mean[i] * delta, posterior.cov(i, i) * delta * delta};
}

}  // namespace igpr
