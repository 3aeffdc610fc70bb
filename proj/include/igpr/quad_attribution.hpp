#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "igpr/attribution.hpp"
#include "igpr/gpr.hpp"
#include "igpr/quadrature.hpp"

namespace igpr {

/// d mu / d x_i = sum_n alpha_n dk(x, x_n)/dx_i for the posterior mean mu.
double posterior_mean_gradient(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                               Eigen::Index i);

/// Integrated-gradients attribution with the path integral replaced by a
/// quadrature rule:
///
///   mean     = Delta_i sum_l w_l dmu/dx_i(gamma(t_l))
///   variance = Delta_i^2 sum_{l,l'} w_l w_l' d^2k(gamma(t_l), gamma(t_l'))/dx_i dx'_i
///              - q^T (K + noise I)^{-1} q,     q_n = Delta_i sum_l w_l dk(gamma(t_l), x_n)/dx_i
///
/// The double sum uses the same nodes on both axes.
AttributionGaussian quad_attribution(const GprModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                     Eigen::Index i, const QuadratureSpec& spec);

/// Same as above for every feature, with the completeness residual of the
/// quadrature means.
AttributionReport quad_attribution_report(const GprModel& model,
                                          const Eigen::Ref<const Eigen::VectorXd>& x,
                                          const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                          const QuadratureSpec& spec);

struct SweepRow {
  QuadratureRule rule = QuadratureRule::right_hand;
  Eigen::Index partitions = 0;
  Eigen::Index function_evals = 0;
  /// max_i |quad mean_i - exact mean_i|
  double mean_abs_err = 0.0;
  /// max_i |quad variance_i - exact variance_i|
  double var_abs_err = 0.0;
};

/// Errors of the quadrature attributions against the closed form for every
/// (rule, L) pair, rules outermost. Errors are maxima over features.
std::vector<SweepRow> convergence_sweep(const GprModel& model,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                        const std::vector<QuadratureRule>& rules,
                                        const std::vector<Eigen::Index>& partitions,
                                        const Tolerances& tol = {});

struct McEstimate {
  double mean = 0.0;
  double variance = 0.0;
  /// Standard error of `mean`.
  double std_error = 0.0;
  /// Standard error of `variance` under a Gaussian sampling model.
  double variance_std_error = 0.0;
  Eigen::Index samples = 0;
  /// Jitter the path covariance needed.
  double jitter = 0.0;
};

/// Sampling validator for the closed form. Draws joint posterior samples of
/// dF/dx_i at `grid_points` equispaced nodes of the path, integrates each
/// sample with the trapezoid rule and scales by Delta_i.
McEstimate mc_attribution_oracle(const GprModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                 Eigen::Index i, Eigen::Index grid_points = 257,
                                 Eigen::Index samples = 10000, std::uint64_t seed = 0,
                                 const Tolerances& tol = {});

}  // namespace igpr
