#pragma once

#include <vector>

#include <Eigen/Dense>

#include "igpr/gpr.hpp"
#include "igpr/kernels.hpp"
#include "igpr/specfun.hpp"

namespace igpr {

/// Marginal distribution N(mean, variance) of the integrated-gradients
/// attribution of one feature, for the straight path from a baseline x~ to x.
struct AttributionGaussian {
  Eigen::Index feature = 0;
  double mean = 0.0;
  double variance = 0.0;

  double stddev() const;
};

/// Clamps round-off negatives of magnitude <= 1e-10 * max(1, scale) to zero and
/// throws NumericalError for anything more negative.
double clamp_variance(double variance, double scale = 1.0);

/// Scalars that parametrize the path integrals of the ARD-SE kernel slice
/// k(gamma(t), x_n), gamma(t) = x~ + t (x - x~), with Delta = x - x~:
///
///   a = Delta^T L^-2 Delta              b = 2 Delta^T L^-2 (x~ - x_n)
///   c = (x~ - x_n)^T L^-2 (x~ - x_n)
///   d = -s0^2 Delta_i^2 / l_i^2         f = -s0^2 Delta_i (x~_i - x_n,i) / l_i^2
///   v = -s0^2 Delta_i^2 / l_i^4         w = s0^2 / l_i^2
///
/// so that Delta_i dk(gamma(t), x_n)/dx_i = exp(-(a t^2 + b t + c)/2) (d t + f)
/// and Delta_i^2 d^2k(gamma(s), gamma(t))/dx_i dx'_i = Delta_i^2 exp(-a u^2/2) (w + v u^2), u = s - t.
struct AttrConstants {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double f = 0.0;
  double v = 0.0;
  double w = 0.0;
};

AttrConstants attr_constants(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                             const Eigen::Ref<const Eigen::VectorXd>& x_n, Eigen::Index i,
                             const Hyper& h);

/// Attribution of feature i for the single kernel slice k(., x_n):
///
///   A_{n,i}(x) = Delta_i int_0^1 dk(gamma(t), x_n)/dx_i dt.
///
/// Closed form in terms of erf; evaluated through erfcx so that no factor
/// overflows and the erf difference keeps relative precision in the tails.
/// For a < 1e-2 the erf differences cancel, and a 32-point Gauss-Legendre
/// rule on the (nearly polynomial) integrand is used. When
/// a <= tol.singular_threshold the closed form is 0/0 and a Simpson rule with
/// 256 panels is used instead.
double mean_component_A(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                        const Eigen::Ref<const Eigen::VectorXd>& x_n, Eigen::Index i,
                        const Hyper& h, const Tolerances& tol = {});

/// Prior attribution variance
///
///   B_i(x) = Delta_i^2 int_0^1 int_0^1 d^2k(gamma(s), gamma(t))/dx_i dx'_i ds dt
///          = Delta_i^2 [ sqrt(2 pi) erf(sqrt(a/2)) (a w + v) / a^{3/2}
///                        - 2 e^{-a/2} (e^{a/2} - 1) (a w + 2 v) / a^2 ].
///
/// For a < 1 the bracket cancels badly, so a power series in a is summed
/// instead. a <= tol.singular_threshold falls back to 2-D Simpson (256 panels).
double variance_component_B(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                            const Hyper& h, const Tolerances& tol = {});

/// The vector [A_{n,i}(x)]_n over all training inputs of the model.
Eigen::VectorXd mean_components(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                                const Tolerances& tol = {});

/// Closed-form attribution of the GPR posterior:
///
///   mean     = sum_n alpha_n A_{n,i}(x)
///   variance = B_i(x) - A_i^T (K + noise I)^{-1} A_i
///
/// The quadratic form goes through the stored Cholesky factor. Only the
/// marginal variance (x = x') is available in closed form.
AttributionGaussian gpr_attribution(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                    Eigen::Index i, const Tolerances& tol = {});

struct AttributionReport {
  std::vector<AttributionGaussian> features;
  Eigen::VectorXd query;
  Eigen::VectorXd baseline;
  /// E[F(x)] - E[F(x~)].
  double prediction_delta = 0.0;
  /// |sum_i mean_i - prediction_delta|.
  double completeness_residual = 0.0;
};

/// All D attributions at x, in feature order, plus the completeness residual.
AttributionReport attribution_report(const GprModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                     const Tolerances& tol = {});

}  // namespace igpr
