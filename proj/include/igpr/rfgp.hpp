#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "igpr/attribution.hpp"
#include "igpr/gpr.hpp"

namespace igpr {

/// M x D matrix of spectral samples v_m ~ N(0, diag(l)^-2). Standard normals
/// are drawn row-major from mt19937_64(seed) and column j is scaled by 1/l_j,
/// so the same seed with different lengthscales gives rescaled copies.
Eigen::MatrixXd sample_frequencies(Eigen::Index M, const Hyper& h, std::uint64_t seed);

/// phi(x) = [sin(v_1.x), cos(v_1.x), ..., sin(v_M.x), cos(v_M.x)], unnormalized.
Eigen::VectorXd feature_map(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& V);

/// Random-feature GP (sparse spectrum GP). With Phi = [phi(x_1) .. phi(x_N)]
/// and A = Phi Phi^T + (M noise / s0^2) I_{2M}:
///
///   E F(x)          = phi(x)^T A^-1 Phi y_c + offset
///   Cov(F(x), F(x')) = noise phi(x)^T A^-1 phi(x')
///
/// which equals the Bayesian linear model with weight prior N(0, s0^2/M I).
/// Targets are centered like GprModel.
class RfgpModel {
 public:
  /// Throws NumericalError when A does not factorize (only possible for zero noise).
  static RfgpModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& h,
                       Eigen::Index M, std::uint64_t seed);

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// A^-1 b through the stored factor.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& b) const;
  double inverse_quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& b) const;

  const Eigen::MatrixXd& frequencies() const { return V_; }
  /// A^-1 Phi y_c, length 2M.
  const Eigen::VectorXd& weights() const { return weights_; }
  const Hyper& hyper() const { return hyper_; }
  std::uint64_t seed() const { return seed_; }
  double y_offset() const { return y_offset_; }
  Eigen::Index features() const { return V_.rows(); }
  Eigen::Index dim() const { return V_.cols(); }

 private:
  RfgpModel() = default;

  Hyper hyper_;
  Eigen::MatrixXd V_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd weights_;
  double y_offset_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Path integral of the feature-map gradient divided by Delta_i:
/// entry (sin row m) = v_{m,i} (sin(v_m.x) - sin(v_m.x~)) / v_m.Delta,
/// entry (cos row m) = v_{m,i} (cos(v_m.x) - cos(v_m.x~)) / v_m.Delta.
/// When |v_m.Delta| <= rel_tol |v_m| |Delta| the analytic limits
/// v_{m,i} cos(v_m.x~) and -v_{m,i} sin(v_m.x~) are used.
Eigen::VectorXd zeta(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                     const Eigen::MatrixXd& V, double rel_tol = 1e-10);

/// mean = Delta_i zeta^T A^-1 Phi y,  variance = Delta_i^2 noise zeta^T A^-1 zeta.
AttributionGaussian rfgp_attribution(const RfgpModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                     Eigen::Index i);

/// Equally weighted mixture of attribution Gaussians.
struct MixtureAttribution {
  std::vector<AttributionGaussian> components;
  std::vector<std::uint64_t> seeds;
  double mixture_mean = 0.0;
  /// mean of component variances + population variance of component means.
  double total_variance = 0.0;
};

/// Fits R independent RFGPs with seeds seed .. seed + R - 1 and mixes their
/// attributions of feature i.
MixtureAttribution marginalized_attribution(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                            const Hyper& h, Eigen::Index M, Eigen::Index i,
                                            const Eigen::Ref<const Eigen::VectorXd>& x,
                                            const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                            Eigen::Index ensemble_size, std::uint64_t seed);

/// Mixture summary from given components.
MixtureAttribution make_mixture(std::vector<AttributionGaussian> components);

}  // namespace igpr
