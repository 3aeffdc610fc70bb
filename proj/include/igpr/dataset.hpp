#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace igpr {

/// Per-feature z-score statistics.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd invert(const Eigen::Ref<const Eigen::VectorXd>& z) const;
};

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> feature_names;
  std::string target_name = "y";
  std::optional<NormStats> norm;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }

  /// Throws DataError unless N >= 1, shapes agree and every entry is finite.
  void validate() const;

  /// Dataset without row `r` (the held-out query).
  Dataset without_row(Eigen::Index r) const;
};

/// Reads a comma-separated file with a header row. Every column other than
/// `target_column` becomes a feature, in header order. Cells must parse fully
/// as finite numbers; empty, NaN or non-numeric cells raise DataError naming
/// the 1-based file line.
Dataset load_csv(const std::string& path, const std::string& target_column);

/// Writes features then target, header included, with round-trip precision.
void write_csv(const Dataset& data, const std::string& path);

/// Z-scores every feature and records the statistics. Uses the sample
/// standard deviation (N - 1); N = 1 is rejected. Throws DataError naming the
/// first zero-variance feature.
Dataset normalize(const Dataset& data);

/// Maps z-scored rows back to the original units.
Eigen::MatrixXd denormalize(const Eigen::MatrixXd& Z, const NormStats& stats);

/// Feature-wise mean of all rows.
Eigen::VectorXd mean_baseline(const Dataset& data);

/// Feature-wise mean over rows whose target satisfies `keep`. Throws DataError
/// when no row qualifies.
Eigen::VectorXd mean_baseline_where(const Dataset& data,
                                    const std::function<bool(double)>& keep);

/// Synthetic benchmark: X1, X2 ~ U(0, 10), Y = sin(X1) sin(2 X2) + noise_scale * N(0, 1).
Dataset simulate(Eigen::Index n_samples, double noise_scale = 0.5, std::uint64_t seed = 0);

/// Appends a feature column filled with `value` (a dummy input for the ARD and
/// dummy-axiom checks).
Dataset append_constant_feature(const Dataset& data, double value,
                                const std::string& name = "constant");

}  // namespace igpr
