#include "igpr/serialize.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "igpr/errors.hpp"

namespace igpr {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(vector_json(M.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw DataError("ragged matrix in JSON document");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return M;
}

std::string feature_name(const std::vector<std::string>& names, Eigen::Index i) {
  const auto k = static_cast<std::size_t>(i);
  return k < names.size() ? names[k] : "x" + std::to_string(i + 1);
}

}  // namespace

json to_json(const Hyper& h) {
  return {{"signal_variance", h.signal_variance},
          {"lengthscales", vector_json(h.lengthscales)},
          {"noise_variance", h.noise_variance}};
}

Hyper hyper_from_json(const json& j) {
  Hyper h;
  h.signal_variance = j.at("signal_variance").get<double>();
  h.lengthscales = vector_from(j.at("lengthscales"));
  h.noise_variance = j.at("noise_variance").get<double>();
  h.validate();
  return h;
}

json to_json(const NormStats& s) {
  return {{"mean", vector_json(s.mean)}, {"stddev", vector_json(s.stddev)}};
}

NormStats norm_stats_from_json(const json& j) {
  return {vector_from(j.at("mean")), vector_from(j.at("stddev"))};
}

json model_to_json(const GprModel& model, const std::vector<std::string>& feature_names,
                   const std::optional<NormStats>& norm) {
  json j;
  j["format"] = "igpr.gpr_model";
  j["version"] = kModelFormatVersion;
  j["hyperparameters"] = to_json(model.hyper());
  j["feature_names"] = feature_names;
  j["train_inputs"] = matrix_json(model.train_inputs());
  j["train_targets"] = vector_json(model.train_targets());
  j["alpha"] = vector_json(model.alpha());
  j["y_offset"] = model.y_offset();
  j["jitter"] = model.jitter();
  j["normalization"] = norm ? to_json(*norm) : json(nullptr);
  return j;
}

LoadedModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "igpr.gpr_model") {
      throw DataError("not a GPR model document");
    }
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model version " + j.at("version").dump());
    }
    const Hyper h = hyper_from_json(j.at("hyperparameters"));
    GprModel model = GprModel::from_parts(h, matrix_from(j.at("train_inputs")),
                                          vector_from(j.at("train_targets")),
                                          vector_from(j.at("alpha")),
                                          j.at("y_offset").get<double>(),
                                          j.at("jitter").get<double>());
    LoadedModel out{std::move(model), j.value("feature_names", std::vector<std::string>{}),
                    std::nullopt};
    if (j.contains("normalization") && !j["normalization"].is_null()) {
      out.norm = norm_stats_from_json(j["normalization"]);
    }
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

json report_to_json(const AttributionReport& r, const std::vector<std::string>& names,
                    const std::string& engine) {
  json features = json::array();
  for (const auto& f : r.features) {
    features.push_back({{"index", f.feature},
                        {"name", feature_name(names, f.feature)},
                        {"mean", f.mean},
                        {"std", f.stddev()},
                        {"variance", f.variance}});
  }
  return {{"format", "igpr.attribution_report"},
          {"version", kReportFormatVersion},
          {"engine", engine},
          {"query", vector_json(r.query)},
          {"baseline", vector_json(r.baseline)},
          {"prediction_delta", r.prediction_delta},
          {"completeness_residual", r.completeness_residual},
          {"features", features}};
}

std::string report_to_csv(const AttributionReport& r, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "feature,mean,std,completeness_residual\n";
  for (const auto& f : r.features) {
    out << feature_name(names, f.feature) << ',' << f.mean << ',' << f.stddev() << ','
        << r.completeness_residual << '\n';
  }
  return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "rule,L,function_evals,mean_abs_err,var_abs_err\n";
  for (const auto& row : rows) {
    out << to_string(row.rule) << ',' << row.partitions << ',' << row.function_evals << ','
        << row.mean_abs_err << ',' << row.var_abs_err << '\n';
  }
  return out.str();
}

json mixture_to_json(const MixtureAttribution& m) {
  json comps = json::array();
  for (std::size_t k = 0; k < m.components.size(); ++k) {
    json c = {{"mean", m.components[k].mean}, {"var", m.components[k].variance}};
    if (k < m.seeds.size()) c["seed"] = m.seeds[k];
    comps.push_back(std::move(c));
  }
  return {{"components", comps}, {"mixture_mean", m.mixture_mean}, {"total_var", m.total_variance}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const json& j, const std::string& path) {
  write_text_file(j.dump(2) + "\n", path);
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace igpr
