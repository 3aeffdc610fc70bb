#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "igpr/attribution.hpp"
#include "igpr/dataset.hpp"
#include "igpr/gpr.hpp"
#include "igpr/quad_attribution.hpp"
#include "igpr/rfgp.hpp"

namespace igpr {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;
inline constexpr int kManifestFormatVersion = 1;

nlohmann::json to_json(const Hyper& h);
Hyper hyper_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NormStats& s);
NormStats norm_stats_from_json(const nlohmann::json& j);

/// Versioned model document:
///   {"format": "igpr.gpr_model", "version": 1,
///    "hyperparameters": {"signal_variance", "lengthscales": [..], "noise_variance"},
///    "train_inputs": [[..], ..], "train_targets": [..], "alpha": [..],
///    "y_offset", "jitter", "feature_names": [..], "normalization": {..} | null}
nlohmann::json model_to_json(const GprModel& model, const std::vector<std::string>& feature_names,
                             const std::optional<NormStats>& norm);

struct LoadedModel {
  GprModel model;
  std::vector<std::string> feature_names;
  std::optional<NormStats> norm;
};
LoadedModel model_from_json(const nlohmann::json& j);

/// {"format": "igpr.attribution_report", "version": 1, "engine", "query", "baseline",
///  "prediction_delta", "completeness_residual",
///  "features": [{"index", "name", "mean", "std", "variance"}, ..]}
nlohmann::json report_to_json(const AttributionReport& r, const std::vector<std::string>& names,
                              const std::string& engine);

/// Columns: feature,mean,std,completeness_residual (residual repeated per row).
std::string report_to_csv(const AttributionReport& r, const std::vector<std::string>& names);

/// Columns: rule,L,function_evals,mean_abs_err,var_abs_err.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// {"components": [{"mean", "var", "seed"}, ..], "mixture_mean", "total_var"}
nlohmann::json mixture_to_json(const MixtureAttribution& m);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace igpr
