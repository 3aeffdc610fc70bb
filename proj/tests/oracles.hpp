#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the attribution or quadrature code under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include "igpr/gpr.hpp"
#include "igpr/kernels.hpp"

namespace oracle {

template <typename F>
double gk(F&& f, double lo = 0.0, double hi = 1.0) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-13);
}

// Composite Simpson with classical (1, 4, 1)/6 panel weights, written out
// independently of igpr::nodes_weights.
template <typename F>
double simpson(F&& f, int panels) {
  const double h = 1.0 / panels;
  double s = f(0.0) + f(1.0);
  for (int p = 0; p < panels; ++p) s += 4.0 * f((p + 0.5) * h);
  for (int p = 1; p < panels; ++p) s += 2.0 * f(p * h);
  return s * h / 6.0;
}

inline std::vector<double> simpson_weights(int panels) {
  std::vector<double> w(static_cast<std::size_t>(2 * panels + 1), 0.0);
  for (int p = 0; p < panels; ++p) {
    w[static_cast<std::size_t>(2 * p)] += 1.0 / (6.0 * panels);
    w[static_cast<std::size_t>(2 * p + 1)] += 4.0 / (6.0 * panels);
    w[static_cast<std::size_t>(2 * p + 2)] += 1.0 / (6.0 * panels);
  }
  return w;
}

inline Eigen::VectorXd path(const Eigen::VectorXd& x, const Eigen::VectorXd& xt, double t) {
  return xt + t * (x - xt);
}

// Delta_i int_0^1 dk(gamma(t), x_n)/dx_i dt by adaptive Gauss-Kronrod.
inline double A_gk(const Eigen::VectorXd& x, const Eigen::VectorXd& xt, const Eigen::VectorXd& xn,
                   Eigen::Index i, const igpr::Hyper& h) {
  const double di = x[i] - xt[i];
  return di * gk([&](double t) { return igpr::ardse_grad_i(path(x, xt, t), xn, i, h); });
}

// Delta_i^2 int int d^2k(gamma(s), gamma(t))/dx_i dx'_i ds dt by 2-D Simpson.
inline double B_simpson2d(const Eigen::VectorXd& x, const Eigen::VectorXd& xt, Eigen::Index i,
                          const igpr::Hyper& h, int panels = 512) {
  const double di = x[i] - xt[i];
  const auto w = simpson_weights(panels);
  const int n = 2 * panels + 1;
  std::vector<Eigen::VectorXd> pts;
  for (int l = 0; l < n; ++l) pts.push_back(path(x, xt, static_cast<double>(l) / (n - 1)));
  double s = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      s += w[static_cast<std::size_t>(r)] * w[static_cast<std::size_t>(c)] *
           igpr::ardse_hess_ii(pts[static_cast<std::size_t>(r)], pts[static_cast<std::size_t>(c)], i, h);
    }
  }
  return di * di * s;
}

// Same double integral by nested Gauss-Kronrod.
inline double B_gk(const Eigen::VectorXd& x, const Eigen::VectorXd& xt, Eigen::Index i,
                   const igpr::Hyper& h) {
  const double di = x[i] - xt[i];
  return di * di * gk([&](double s) {
           const Eigen::VectorXd ps = path(x, xt, s);
           return gk([&](double t) { return igpr::ardse_hess_ii(ps, path(x, xt, t), i, h); });
         });
}

// GP posterior through an explicit dense inverse (with centered targets, as
// the model under test uses).
struct DenseGp {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  igpr::Hyper h;
  Eigen::MatrixXd K;
  Eigen::MatrixXd Kinv;
  double offset = 0.0;

  DenseGp(const Eigen::MatrixXd& X_, const Eigen::VectorXd& y_, const igpr::Hyper& h_)
      : X(X_), y(y_), h(h_), offset(y_.mean()) {
    K.resize(X.rows(), X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      for (Eigen::Index c = 0; c < X.rows(); ++c) {
        const Eigen::VectorXd d = (X.row(r) - X.row(c)).transpose().cwiseQuotient(h.lengthscales);
        K(r, c) = h.signal_variance * std::exp(-0.5 * d.squaredNorm());
      }
    }
    K.diagonal().array() += h.noise_variance;
    Kinv = K.fullPivLu().inverse();
  }

  Eigen::VectorXd kvec(const Eigen::VectorXd& x) const {
    Eigen::VectorXd k(X.rows());
    for (Eigen::Index n = 0; n < X.rows(); ++n) {
      const Eigen::VectorXd d = (x - X.row(n).transpose()).cwiseQuotient(h.lengthscales);
      k[n] = h.signal_variance * std::exp(-0.5 * d.squaredNorm());
    }
    return k;
  }
  double mean(const Eigen::VectorXd& x) const {
    return kvec(x).dot(Kinv * (y.array() - offset).matrix()) + offset;
  }
  double variance(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd k = kvec(x);
    return h.signal_variance - k.dot(Kinv * k);
  }
  double lml() const {
    const Eigen::VectorXd yc = y.array() - offset;
    const double logdet = K.fullPivLu().matrixLU().diagonal().array().abs().log().sum();
    return -0.5 * yc.dot(Kinv * yc) - 0.5 * logdet -
           0.5 * static_cast<double>(y.size()) * std::log(2.0 * M_PI);
  }
};

// Random (x, x~) pair inside the box [lo, hi]^D.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> random_pair(std::mt19937_64& rng, Eigen::Index D,
                                                               double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd x(D), xt(D);
  for (Eigen::Index d = 0; d < D; ++d) x[d] = u(rng);
  for (Eigen::Index d = 0; d < D; ++d) xt[d] = u(rng);
  return {x, xt};
}

inline double rel_err(double got, double want, double floor = 1e-12) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

}  // namespace oracle
