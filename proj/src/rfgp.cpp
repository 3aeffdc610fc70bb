#include "igpr/rfgp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "igpr/errors.hpp"

namespace igpr {

Eigen::MatrixXd sample_frequencies(Eigen::Index M, const Hyper& h, std::uint64_t seed) {
  h.validate();
  if (M < 1) throw DomainError("need at least one random feature");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd V(M, h.dim());
  for (Eigen::Index m = 0; m < M; ++m) {
    for (Eigen::Index j = 0; j < h.dim(); ++j) V(m, j) = normal(rng) / h.lengthscales[j];
  }
  return V;
}

Eigen::VectorXd feature_map(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& V) {
  if (x.size() != V.cols()) throw ShapeError("feature map input has the wrong dimension");
  const Eigen::VectorXd proj = V * x;
  Eigen::VectorXd phi(2 * V.rows());
  for (Eigen::Index m = 0; m < V.rows(); ++m) {
    phi[2 * m] = std::sin(proj[m]);
    phi[2 * m + 1] = std::cos(proj[m]);
  }
  return phi;
}

RfgpModel RfgpModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Hyper& h,
                         Eigen::Index M, std::uint64_t seed) {
  h.validate();
  if (X.rows() < 1) throw DataError("RFGP needs at least one training point");
  if (y.size() != X.rows() || X.cols() != h.dim()) throw ShapeError("RFGP training shape mismatch");

  RfgpModel m;
  m.hyper_ = h;
  m.seed_ = seed;
  m.V_ = sample_frequencies(M, h, seed);
  m.y_offset_ = y.mean();

  Eigen::MatrixXd Phi(2 * M, X.rows());
  for (Eigen::Index n = 0; n < X.rows(); ++n) Phi.col(n) = feature_map(X.row(n).transpose(), m.V_);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * M, 2 * M);
  A.selfadjointView<Eigen::Lower>().rankUpdate(Phi);
  A.diagonal().array() += static_cast<double>(M) * h.noise_variance / h.signal_variance;
  m.llt_.compute(A);
  if (m.llt_.info() != Eigen::Success) {
    throw NumericalError("RFGP system matrix is not positive definite (noise variance " +
                         std::to_string(h.noise_variance) + ")");
  }
  m.weights_ = m.llt_.solve(Phi * (y.array() - m.y_offset_).matrix());
  return m;
}

Prediction RfgpModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd phi = feature_map(x, V_);
  return {phi.dot(weights_) + y_offset_, hyper_.noise_variance * inverse_quadratic_form(phi)};
}

double RfgpModel::predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return feature_map(x, V_).dot(weights_) + y_offset_;
}

Eigen::VectorXd RfgpModel::solve(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (b.size() != 2 * features()) throw ShapeError("vector length must be 2M");
  return llt_.solve(b);
}

double RfgpModel::inverse_quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (b.size() != 2 * features()) throw ShapeError("vector length must be 2M");
  return llt_.matrixL().solve(b).squaredNorm();
}

Eigen::VectorXd zeta(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                     const Eigen::MatrixXd& V, double rel_tol) {
  if (x.size() != V.cols() || x_tilde.size() != V.cols()) {
    throw ShapeError("zeta inputs have the wrong dimension");
  }
  if (i < 0 || i >= V.cols()) throw ShapeError("feature index out of range");
  const Eigen::VectorXd delta = x - x_tilde;
  const double delta_norm = delta.norm();
  Eigen::VectorXd z(2 * V.rows());
  for (Eigen::Index m = 0; m < V.rows(); ++m) {
    const auto v = V.row(m);
    const double base = v.dot(x_tilde);
    const double proj = v.dot(delta);
    const double vi = v(i);
    if (std::abs(proj) <= rel_tol * v.norm() * delta_norm) {
      z[2 * m] = vi * std::cos(base);
      z[2 * m + 1] = -vi * std::sin(base);
      continue;
    }
    // sin(b + p) - sin(b) = 2 cos(b + p/2) sin(p/2), and likewise for cos,
    // keeps full precision when p = v.Delta is small.
    const double half = 0.5 * proj;
    const double sinc = std::sin(half) / half;
    const double mid = base + half;
    z[2 * m] = vi * std::cos(mid) * sinc;
    z[2 * m + 1] = -vi * std::sin(mid) * sinc;
  }
  return z;
}

AttributionGaussian rfgp_attribution(const RfgpModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                     Eigen::Index i) {
  if (x.size() != model.dim() || x_tilde.size() != model.dim()) {
    throw ShapeError("query and baseline must match the model dimension");
  }
  if (i < 0 || i >= model.dim()) throw ShapeError("feature index out of range");
  AttributionGaussian g;
  g.feature = i;
  const double delta_i = x[i] - x_tilde[i];
  if (delta_i == 0.0) return g;
  const Eigen::VectorXd z = zeta(x, x_tilde, i, model.frequencies());
  g.mean = delta_i * z.dot(model.weights());
  g.variance = delta_i * delta_i * model.hyper().noise_variance * model.inverse_quadratic_form(z);
  return g;
}

MixtureAttribution make_mixture(std::vector<AttributionGaussian> components) {
  if (components.empty()) throw DomainError("mixture needs at least one component");
  MixtureAttribution mix;
  const double r = static_cast<double>(components.size());
  double mean = 0.0;
  double within = 0.0;
  for (const auto& c : components) {
    mean += c.mean;
    within += c.variance;
  }
  mean /= r;
  within /= r;
  double between = 0.0;
  for (const auto& c : components) between += (c.mean - mean) * (c.mean - mean);
  between /= r;
  mix.components = std::move(components);
  mix.mixture_mean = mean;
  mix.total_variance = within + between;
  return mix;
}

MixtureAttribution marginalized_attribution(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                            const Hyper& h, Eigen::Index M, Eigen::Index i,
                                            const Eigen::Ref<const Eigen::VectorXd>& x,
                                            const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                            Eigen::Index ensemble_size, std::uint64_t seed) {
  if (ensemble_size < 1) throw DomainError("ensemble size must be at least 1");
  std::vector<AttributionGaussian> parts;
  std::vector<std::uint64_t> seeds;
  for (Eigen::Index r = 0; r < ensemble_size; ++r) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(r);
    const RfgpModel model = RfgpModel::fit(X, y, h, M, s);
    parts.push_back(rfgp_attribution(model, x, x_tilde, i));
    seeds.push_back(s);
  }
  MixtureAttribution mix = make_mixture(std::move(parts));
  mix.seeds = std::move(seeds);
  return mix;
}

}  // namespace igpr
