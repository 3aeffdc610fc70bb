#pragma once

#include <Eigen/Dense>

#include "igpr/attribution.hpp"

namespace igpr {

/// Gaussian posterior over the weights of y = X w + eps, eps ~ N(0, noise I).
struct LinearPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Conjugate update of the prior N(prior_mean, prior_cov):
///   cov  = (prior_cov^-1 + X^T X / noise)^-1
///   mean = cov (prior_cov^-1 prior_mean + X^T y / noise)
/// X may have zero rows, in which case the prior is returned. Throws
/// NumericalError when prior_cov is not positive definite.
LinearPosterior bayes_linear_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& prior_mean,
                                       const Eigen::MatrixXd& prior_cov, double noise_variance);

/// For a linear model the integrated gradient of feature i is w_i (x_i - x~_i),
/// so the attribution is N(mean_i Delta_i, cov_ii Delta_i^2).
AttributionGaussian bayes_linear_attribution(const LinearPosterior& posterior,
                                             const Eigen::Ref<const Eigen::VectorXd>& x,
                                             const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                             Eigen::Index i);

}  // namespace igpr
