#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "igpr/errors.hpp"

namespace igpr {

/// Hyperparameters of the ARD squared-exponential covariance
///
///   k(x, x') = signal_variance * exp(-sum_i (x_i - x'_i)^2 / (2 l_i^2))
///
/// plus the observation-noise variance of the regression likelihood. The
/// isotropic SE kernel is the special case of tied lengthscales.
template <typename Scalar>
struct ArdSeHyper {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar signal_variance = Scalar(1);
  Vector lengthscales;
  Scalar noise_variance = Scalar(0);

  static ArdSeHyper isotropic(Scalar signal_variance, Scalar lengthscale, Eigen::Index dim,
                              Scalar noise_variance) {
    return {signal_variance, Vector::Constant(dim, lengthscale), noise_variance};
  }

  Eigen::Index dim() const { return lengthscales.size(); }

  /// 1 / l_i, the ARD relevance of each feature.
  Vector relevance() const { return lengthscales.cwiseInverse(); }

  void validate() const {
    using std::isfinite;
    if (!(isfinite(signal_variance) && signal_variance > Scalar(0))) {
      throw DomainError("signal variance must be positive");
    }
    if (!(isfinite(noise_variance) && noise_variance >= Scalar(0))) {
      throw DomainError("noise variance must be non-negative");
    }
    if (lengthscales.size() == 0) throw DomainError("at least one lengthscale is required");
    for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
      if (!(isfinite(lengthscales[i]) && lengthscales[i] > Scalar(0))) {
        throw DomainError("lengthscale " + std::to_string(i) + " must be positive");
      }
    }
  }
};

using Hyper = ArdSeHyper<double>;

namespace detail {

template <typename DerivedA, typename DerivedB, typename Scalar>
void check_pair(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& x2,
                const ArdSeHyper<Scalar>& h) {
  if (x.size() != h.dim() || x2.size() != h.dim()) {
    throw ShapeError("kernel arguments have dimension " + std::to_string(x.size()) + " and " +
                     std::to_string(x2.size()) + ", hyperparameters expect " +
                     std::to_string(h.dim()));
  }
}

template <typename Scalar>
void check_index(Eigen::Index i, const ArdSeHyper<Scalar>& h) {
  if (i < 0 || i >= h.dim()) {
    throw ShapeError("feature index " + std::to_string(i) + " out of range for D = " +
                     std::to_string(h.dim()));
  }
}

/// Squared scaled distance sum_i (x_i - x2_i)^2 / l_i^2.
template <typename DerivedA, typename DerivedB, typename Scalar>
Scalar scaled_sqdist(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& x2,
                     const ArdSeHyper<Scalar>& h) {
  Scalar s(0);
  for (Eigen::Index j = 0; j < h.dim(); ++j) {
    const Scalar r = (x(j) - x2(j)) / h.lengthscales[j];
    s += r * r;
  }
  return s;
}

}  // namespace detail

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar ardse_eval(const Eigen::MatrixBase<DerivedA>& x,
                                     const Eigen::MatrixBase<DerivedB>& x2,
                                     const ArdSeHyper<typename DerivedA::Scalar>& h) {
  using std::exp;
  detail::check_pair(x, x2, h);
  return h.signal_variance * exp(-detail::scaled_sqdist(x, x2, h) / 2);
}

/// dk/dx_i, derivative with respect to the first argument.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar ardse_grad_i(const Eigen::MatrixBase<DerivedA>& x,
                                       const Eigen::MatrixBase<DerivedB>& x2, Eigen::Index i,
                                       const ArdSeHyper<typename DerivedA::Scalar>& h) {
  detail::check_index(i, h);
  const auto li = h.lengthscales[i];
  return ardse_eval(x, x2, h) * (-(x(i) - x2(i)) / (li * li));
}

/// d^2 k / dx_i dx2_i, the covariance of the i-th partial derivative process.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar ardse_hess_ii(const Eigen::MatrixBase<DerivedA>& x,
                                        const Eigen::MatrixBase<DerivedB>& x2, Eigen::Index i,
                                        const ArdSeHyper<typename DerivedA::Scalar>& h) {
  detail::check_index(i, h);
  const auto li2 = h.lengthscales[i] * h.lengthscales[i];
  const auto d = x(i) - x2(i);
  return ardse_eval(x, x2, h) * (1 / li2 - d * d / (li2 * li2));
}

/// Cross-covariance matrix [k(a_r, b_c)] between the rows of A and B.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> cross_kernel(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
    const ArdSeHyper<typename DerivedA::Scalar>& h) {
  using Scalar = typename DerivedA::Scalar;
  if (A.cols() != h.dim() || B.cols() != h.dim()) {
    throw ShapeError("kernel inputs must have " + std::to_string(h.dim()) + " columns");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K(A.rows(), B.rows());
  for (Eigen::Index c = 0; c < B.rows(); ++c) {
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      K(r, c) = ardse_eval(A.row(r).transpose(), B.row(c).transpose(), h);
    }
  }
  return K;
}

/// Gram matrix K of the rows of X (noise not included).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> kernel_matrix(
    const Eigen::MatrixBase<Derived>& X, const ArdSeHyper<typename Derived::Scalar>& h) {
  using Scalar = typename Derived::Scalar;
  if (X.cols() != h.dim()) {
    throw ShapeError("kernel inputs must have " + std::to_string(h.dim()) + " columns");
  }
  const Eigen::Index n = X.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    K(c, c) = h.signal_variance;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      K(r, c) = ardse_eval(X.row(r).transpose(), X.row(c).transpose(), h);
      K(c, r) = K(r, c);
    }
  }
  return K;
}

/// Kernel vector [k(x, x_n)]_n against the rows of X.
template <typename DerivedX, typename DerivedV>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> kernel_vector(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedV>& x,
    const ArdSeHyper<typename DerivedX::Scalar>& h) {
  Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> k(X.rows());
  for (Eigen::Index n = 0; n < X.rows(); ++n) k[n] = ardse_eval(x, X.row(n).transpose(), h);
  return k;
}

/// Gradient vector [dk(x, x_n)/dx_i]_n against the rows of X.
template <typename DerivedX, typename DerivedV>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> kernel_grad_vector(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedV>& x, Eigen::Index i,
    const ArdSeHyper<typename DerivedX::Scalar>& h) {
  Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> g(X.rows());
  for (Eigen::Index n = 0; n < X.rows(); ++n) g[n] = ardse_grad_i(x, X.row(n).transpose(), i, h);
  return g;
}

}  // namespace igpr
