#include "igpr/attribution.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "igpr/errors.hpp"
#include "igpr/quadrature.hpp"

namespace igpr {

double AttributionGaussian::stddev() const { return std::sqrt(std::max(variance, 0.0)); }

double clamp_variance(double variance, double scale) {
  if (variance >= 0.0) return variance;
  if (variance >= -1e-10 * std::max(1.0, scale)) return 0.0;
  throw NumericalError("attribution variance is negative beyond round-off (" +
                       std::to_string(variance) + ")");
}

namespace {

void check_path(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                const Hyper& h) {
  if (x.size() != h.dim() || x_tilde.size() != h.dim()) {
    throw ShapeError("query and baseline must have dimension " + std::to_string(h.dim()));
  }
  if (i < 0 || i >= h.dim()) {
    throw ShapeError("feature index " + std::to_string(i) + " out of range");
  }
}

// Scaled squared distance (p - q)^T L^-2 (p - q).
double scaled_distance(const Eigen::Ref<const Eigen::VectorXd>& p,
                       const Eigen::Ref<const Eigen::VectorXd>& q, const Hyper& h) {
  return ((p - q).array() / h.lengthscales.array()).square().sum();
}

constexpr Eigen::Index kFallbackPanels = 256;
// Below this a the erf/erfcx differences cancel to about eps / a relative.
// The integrand is then within a few Taylor terms of a polynomial, and a
// 32-point Gauss-Legendre rule is exact to round-off.
constexpr double kGaussLegendreBelow = 1e-2;

// int_0^1 exp(-(a t^2 + b t + c)/2) dt for a > 0, with q0 = c and q1 = a + b + c.
double gaussian_segment(double a, double b, double q0, double q1) {
  const double root = std::sqrt(2.0 * a);
  const double s0 = b / (2.0 * root);
  const double s1 = (2.0 * a + b) / (2.0 * root);
  const double scale = std::sqrt(std::numbers::pi / (2.0 * a));
  if (s0 >= 0.0) {
    return scale * (std::exp(-q0 / 2.0) * igpr::erfcx(s0) - std::exp(-q1 / 2.0) * igpr::erfcx(s1));
  }
  if (s1 <= 0.0) {
    return scale *
           (std::exp(-q1 / 2.0) * igpr::erfcx(-s1) - std::exp(-q0 / 2.0) * igpr::erfcx(-s0));
  }
  // Completed-square exponent (4ac - b^2)/(8a) >= 0 up to round-off.
  const double kappa = std::max(q0 / 2.0 - s0 * s0, 0.0);
  return scale * std::exp(-kappa) * (igpr::erf(s1) - igpr::erf(s0));
}

}  // namespace

AttrConstants attr_constants(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                             const Eigen::Ref<const Eigen::VectorXd>& x_n, Eigen::Index i,
                             const Hyper& h) {
  check_path(x, x_tilde, i, h);
  if (x_n.size() != h.dim()) throw ShapeError("training point has the wrong dimension");
  const Eigen::ArrayXd inv_l2 = h.lengthscales.array().square().inverse();
  const Eigen::ArrayXd delta = (x - x_tilde).array();
  const Eigen::ArrayXd offset = (x_tilde - x_n).array();
  const double li2 = h.lengthscales[i] * h.lengthscales[i];
  const double s0 = h.signal_variance;

  AttrConstants k;
  k.a = (delta.square() * inv_l2).sum();
  k.b = 2.0 * (delta * offset * inv_l2).sum();
  k.c = (offset.square() * inv_l2).sum();
  k.d = -s0 * delta[i] * delta[i] / li2;
  k.f = -s0 * delta[i] * offset[i] / li2;
  k.v = -s0 * delta[i] * delta[i] / (li2 * li2);
  k.w = s0 / li2;
  return k;
}

double mean_component_A(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                        const Eigen::Ref<const Eigen::VectorXd>& x_n, Eigen::Index i,
                        const Hyper& h, const Tolerances& tol) {
  const AttrConstants k = attr_constants(x, x_tilde, x_n, i, h);
  const double delta_i = x[i] - x_tilde[i];
  if (delta_i == 0.0) return 0.0;

  if (k.a <= tol.singular_threshold) {
    const Eigen::VectorXd dir = x - x_tilde;
    return delta_i * integrate_unit({QuadratureRule::simpson, kFallbackPanels}, [&](double t) {
             const Eigen::VectorXd p = x_tilde + t * dir;
             return ardse_grad_i(p, x_n, i, h);
           });
  }

  if (k.a < kGaussLegendreBelow) {
    const auto g = [&](double t) {
      const double q = (k.a * t + k.b) * t + k.c;
      return std::exp(-q / 2.0) * (k.d * t + k.f);
    };
    return boost::math::quadrature::gauss<double, 32>::integrate(g, 0.0, 1.0);
  }

  // Exact q(0) and q(1) avoid the cancellation in a + b + c.
  const double q0 = k.c;
  const double q1 = scaled_distance(x, x_n, h);
  const double g0 = gaussian_segment(k.a, k.b, q0, q1);
  // From d/dt exp(-q/2) = -(a t + b/2) exp(-q/2).
  const double g1 = (std::exp(-q0 / 2.0) - std::exp(-q1 / 2.0) - 0.5 * k.b * g0) / k.a;
  return k.d * g1 + k.f * g0;
}

double variance_component_B(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                            const Hyper& h, const Tolerances& tol) {
  check_path(x, x_tilde, i, h);
  const double delta_i = x[i] - x_tilde[i];
  if (delta_i == 0.0) return 0.0;
  const AttrConstants k = attr_constants(x, x_tilde, x_tilde, i, h);
  const double a = k.a;

  if (a <= tol.singular_threshold) {
    const NodesWeights nw = nodes_weights({QuadratureRule::simpson, kFallbackPanels});
    const Eigen::VectorXd dir = x - x_tilde;
    double sum = 0.0;
    for (Eigen::Index s = 0; s < nw.nodes.size(); ++s) {
      const Eigen::VectorXd ps = x_tilde + nw.nodes[s] * dir;
      for (Eigen::Index t = 0; t < nw.nodes.size(); ++t) {
        const Eigen::VectorXd pt = x_tilde + nw.nodes[t] * dir;
        sum += nw.weights[s] * nw.weights[t] * ardse_hess_ii(ps, pt, i, h);
      }
    }
    return delta_i * delta_i * sum;
  }

  double bracket = 0.0;
  if (a < 1.0) {
    // 2 int_0^1 (1 - u) exp(-a u^2 / 2) (w + v u^2) du, expanded in a.
    double coeff = 1.0;  // (-a/2)^j / j!
    for (int j = 0; j < 40; ++j) {
      const double m = 2.0 * j;
      const double term =
          coeff * (2.0 * k.w / ((m + 1) * (m + 2)) + 2.0 * k.v / ((m + 3) * (m + 4)));
      bracket += term;
      if (std::abs(term) <= 1e-18 * std::abs(bracket)) break;
      coeff *= -0.5 * a / (j + 1.0);
    }
  } else {
    const double sqrt_a = std::sqrt(a);
    bracket = std::sqrt(2.0 * std::numbers::pi) * igpr::erf(sqrt_a / std::sqrt(2.0)) *
                  (a * k.w + k.v) / (a * sqrt_a) +
              2.0 * std::expm1(-a / 2.0) * (a * k.w + 2.0 * k.v) / (a * a);
  }
  return delta_i * delta_i * bracket;
}

Eigen::VectorXd mean_components(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& x_tilde, Eigen::Index i,
                                const Tolerances& tol) {
  const Eigen::MatrixXd& X = model.train_inputs();
  Eigen::VectorXd A(X.rows());
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    A[n] = mean_component_A(x, x_tilde, X.row(n).transpose(), i, model.hyper(), tol);
  }
  return A;
}

AttributionGaussian gpr_attribution(const GprModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                    Eigen::Index i, const Tolerances& tol) {
  check_path(x, x_tilde, i, model.hyper());
  AttributionGaussian g;
  g.feature = i;
  if (x[i] == x_tilde[i]) return g;

  const Eigen::VectorXd A = mean_components(model, x, x_tilde, i, tol);
  const double B = variance_component_B(x, x_tilde, i, model.hyper(), tol);
  g.mean = A.dot(model.alpha());
  g.variance = clamp_variance(B - model.inverse_quadratic_form(A),
                              std::max(B, model.hyper().signal_variance));
  return g;
}

AttributionReport attribution_report(const GprModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& x_tilde,
                                     const Tolerances& tol) {
  AttributionReport r;
  r.query = x;
  r.baseline = x_tilde;
  double total = 0.0;
  for (Eigen::Index i = 0; i < model.dim(); ++i) {
    r.features.push_back(gpr_attribution(model, x, x_tilde, i, tol));
    total += r.features.back().mean;
  }
  r.prediction_delta = model.predict_mean(x) - model.predict_mean(x_tilde);
  r.completeness_residual = std::abs(total - r.prediction_delta);
  return r;
}

}  // namespace igpr
