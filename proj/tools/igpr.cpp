// igpr: fit GP regressors and report integrated-gradients attribution
// distributions from the command line.
//
//   igpr simulate     --n 500 --seed 1 --out data.csv
//   igpr fit          --data data.csv --optimize 200 --out-dir run
//   igpr attribute    --model run/model.json --engine exact --out-dir run
//   igpr quad-sweep   --model run/model.json --out-dir run
//   igpr rfgp-compare --model run/model.json --M 10,100,1000 --seeds 20 --out-dir run
//   igpr mc-validate  --model run/model.json --samples 10000 --out-dir run
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "igpr/attribution.hpp"
#include "igpr/dataset.hpp"
#include "igpr/errors.hpp"
#include "igpr/gpr.hpp"
#include "igpr/quad_attribution.hpp"
#include "igpr/quadrature.hpp"
#include "igpr/rfgp.hpp"
#include "igpr/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- helpers

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// KL(p||q) + KL(q||p) for univariate Gaussians; null when either is degenerate.
json symmetric_kl(double m1, double v1, double m2, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0)) return nullptr;
  const double dm = m1 - m2;
  return 0.5 * (v1 / v2 + v2 / v1 - 2.0 + dm * dm * (1.0 / v1 + 1.0 / v2));
}

std::string feature_name(const std::vector<std::string>& names, Eigen::Index i) {
  const auto k = static_cast<std::size_t>(i);
  return k < names.size() ? names[k] : "x" + std::to_string(i + 1);
}

json versions() {
  return {{"igpr", IGPR_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"cli11", CLI11_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

// Manifest: {"schema": "igpr.manifest", "version", "command", "config",
// "versions", "seeds", "outputs"}. No timestamps, so reruns are byte-identical.
void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                    const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& outputs) {
  const json m = {{"schema", "igpr.manifest"},
                  {"version", igpr::kManifestFormatVersion},
                  {"command", command},
                  {"config", config},
                  {"versions", versions()},
                  {"seeds", seeds},
                  {"outputs", outputs}};
  igpr::write_json_file(m, (dir / (command + ".manifest.json")).string());
}

fs::path prepare_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw igpr::DataError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

// "y>=5", ">= 5", "==6" ... applied to target values.
std::function<bool(double)> parse_filter(const std::string& text) {
  static const std::regex re(R"(^\s*(?:[A-Za-z_][A-Za-z0-9_]*)?\s*(<=|>=|==|!=|<|>)\s*(\S+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) {
    throw UsageError("baseline filter '" + text + "' is not of the form 'y<op>value'");
  }
  const std::string op = m[1];
  const std::string num = m[2];
  double value = 0.0;
  const auto [end, err] = std::from_chars(num.data(), num.data() + num.size(), value);
  if (err != std::errc() || end != num.data() + num.size()) {
    throw UsageError("baseline filter value '" + num + "' is not a number");
  }
  if (op == "<") return [value](double y) { return y < value; };
  if (op == "<=") return [value](double y) { return y <= value; };
  if (op == ">") return [value](double y) { return y > value; };
  if (op == ">=") return [value](double y) { return y >= value; };
  if (op == "==") return [value](double y) { return y == value; };
  return [value](double y) { return y != value; };
}

// ---------------------------------------------------------------- model + query

struct ModelBundle {
  igpr::LoadedModel loaded;
  std::optional<Eigen::VectorXd> held_out;  // original units

  const igpr::GprModel& model() const { return loaded.model; }
  Eigen::Index dim() const { return loaded.model.dim(); }

  Eigen::VectorXd to_model(const Eigen::VectorXd& raw) const {
    return loaded.norm ? loaded.norm->apply(raw) : raw;
  }
  Eigen::VectorXd to_raw(const Eigen::VectorXd& z) const {
    return loaded.norm ? loaded.norm->invert(z) : z;
  }
};

ModelBundle load_model(const std::string& path) {
  const json doc = igpr::read_json_file(path);
  ModelBundle b{igpr::model_from_json(doc), std::nullopt};
  if (doc.contains("held_out") && !doc["held_out"].is_null()) {
    b.held_out = to_eigen(doc["held_out"].at("x").get<std::vector<double>>());
  }
  return b;
}

struct QueryOptions {
  std::vector<double> query;
  std::string query_data;
  std::string target = "y";
  long query_row = -1;
  std::string baseline = "mean";
  std::string baseline_filter;
  std::vector<double> baseline_values;

  void add(CLI::App* app) {
    app->add_option("--query", query, "Query point in original units, comma separated")
        ->delimiter(',');
    app->add_option("--data", query_data, "CSV to take the query row from");
    app->add_option("--target", target, "Target column of --data");
    app->add_option("--query-row", query_row, "0-based row of --data used as the query")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--baseline", baseline, "mean | zero | explicit")
        ->check(CLI::IsMember({"mean", "zero", "explicit"}));
    app->add_option("--baseline-filter", baseline_filter,
                    "Average only training rows whose target satisfies e.g. 'y>=5'");
    app->add_option("--baseline-values", baseline_values,
                    "Baseline in original units for --baseline explicit")
        ->delimiter(',');
  }

  json config() const {
    return {{"query", query},       {"data", query_data},
            {"target", target},     {"query_row", query_row},
            {"baseline", baseline}, {"baseline_filter", baseline_filter},
            {"baseline_values", baseline_values}};
  }
};

// Query and baseline in model coordinates.
struct QueryPair {
  Eigen::VectorXd x;
  Eigen::VectorXd x_tilde;
};

QueryPair resolve_query(const ModelBundle& b, const QueryOptions& q) {
  Eigen::VectorXd raw;
  if (!q.query.empty()) {
    raw = to_eigen(q.query);
  } else if (!q.query_data.empty()) {
    const igpr::Dataset data = igpr::load_csv(q.query_data, q.target);
    const Eigen::Index row = q.query_row < 0 ? data.rows() - 1 : q.query_row;
    if (row >= data.rows()) throw UsageError("--query-row is past the end of --data");
    raw = data.X.row(row).transpose();
  } else if (b.held_out) {
    raw = *b.held_out;
  } else {
    throw UsageError("no query: pass --query, --data or fit with a held-out row");
  }
  if (raw.size() != b.dim()) {
    throw igpr::ShapeError("query has " + std::to_string(raw.size()) + " features, model has " +
                           std::to_string(b.dim()));
  }

  QueryPair p;
  p.x = b.to_model(raw);
  const igpr::GprModel& m = b.model();
  if (q.baseline == "explicit") {
    if (q.baseline_values.empty()) throw UsageError("--baseline explicit needs --baseline-values");
    const Eigen::VectorXd base = to_eigen(q.baseline_values);
    if (base.size() != b.dim()) throw igpr::ShapeError("baseline dimension does not match the model");
    p.x_tilde = b.to_model(base);
  } else if (q.baseline == "zero") {
    p.x_tilde = b.to_model(Eigen::VectorXd::Zero(b.dim()));
  } else {
    igpr::Dataset train;
    train.X = m.train_inputs();
    train.y = m.train_targets();
    p.x_tilde = q.baseline_filter.empty()
                    ? igpr::mean_baseline(train)
                    : igpr::mean_baseline_where(train, parse_filter(q.baseline_filter));
  }
  return p;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  long n = 500;
  double noise = 0.5;
  std::uint64_t seed = 0;
  std::string out = "simulated.csv";
};

int run_simulate(const SimulateOptions& o) {
  const igpr::Dataset data = igpr::simulate(o.n, o.noise, o.seed);
  const fs::path out(o.out);
  const fs::path dir = prepare_dir(out.has_parent_path() ? out.parent_path().string() : ".");
  igpr::write_csv(data, out.string());
  write_manifest(dir, "simulate", {{"n", o.n}, {"noise", o.noise}, {"seed", o.seed}, {"out", o.out}},
                 {o.seed}, {out.filename().string()});
  std::cout << "wrote " << data.rows() << " rows to " << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string data;
  std::string target = "y";
  std::string out_dir = ".";
  int optimize = 0;
  std::optional<double> signal_variance;
  std::vector<double> lengthscales;
  std::optional<double> noise_variance;
  bool normalize = false;
  long query_row = -1;
  bool no_holdout = false;
};

int run_fit(const FitOptions& o) {
  const igpr::Dataset raw = igpr::load_csv(o.data, o.target);
  const fs::path dir = prepare_dir(o.out_dir);

  std::optional<Eigen::Index> held_row;
  if (!o.no_holdout) held_row = o.query_row < 0 ? raw.rows() - 1 : o.query_row;
  if (held_row && *held_row >= raw.rows()) throw UsageError("--query-row is past the end of the data");
  igpr::Dataset train = held_row ? raw.without_row(*held_row) : raw;
  if (o.normalize) train = igpr::normalize(train);

  igpr::Hyper h = igpr::default_hyper(train.X, train.y);
  if (o.signal_variance) h.signal_variance = *o.signal_variance;
  if (!o.lengthscales.empty()) {
    h.lengthscales = to_eigen(o.lengthscales);
    if (h.lengthscales.size() == 1 && train.dim() > 1) {
      h.lengthscales = Eigen::VectorXd::Constant(train.dim(), o.lengthscales[0]);
    }
  }
  if (o.noise_variance) h.noise_variance = *o.noise_variance;
  if (h.lengthscales.size() != train.dim()) {
    throw igpr::ShapeError("expected " + std::to_string(train.dim()) + " lengthscales, got " +
                           std::to_string(h.lengthscales.size()));
  }
  h.validate();

  int evaluations = 0;
  if (o.optimize > 0) {
    const igpr::OptimizeResult r = igpr::multi_start_search(train.X, train.y, h, o.optimize);
    h = r.hyper;
    evaluations = r.evaluations;
  }
  const igpr::GprModel model = igpr::GprModel::fit(train, h);
  const double lml = igpr::log_marginal_likelihood(model);

  json doc = igpr::model_to_json(model, train.feature_names, train.norm);
  json report = {{"log_marginal_likelihood", lml},
                 {"optimizer_evaluations", evaluations},
                 {"hyperparameters", igpr::to_json(h)},
                 {"train_rows", train.rows()}};
  json relevance = json::array();
  const Eigen::VectorXd r = h.relevance();
  for (Eigen::Index i = 0; i < train.dim(); ++i) {
    relevance.push_back({{"feature", feature_name(train.feature_names, i)}, {"relevance", r[i]}});
  }
  report["relevance"] = relevance;
  if (held_row) {
    const Eigen::VectorXd x = raw.X.row(*held_row).transpose();
    const igpr::Prediction p = model.predict(train.norm ? train.norm->apply(x) : x);
    doc["held_out"] = {{"row", *held_row}, {"x", vec_json(x)}, {"y", raw.y[*held_row]}};
    report["held_out"] = {{"row", *held_row},
                          {"y", raw.y[*held_row]},
                          {"predicted_mean", p.mean},
                          {"predicted_variance", p.variance}};
  } else {
    doc["held_out"] = nullptr;
  }

  igpr::write_json_file(doc, (dir / "model.json").string());
  igpr::write_json_file(report, (dir / "fit_report.json").string());
  json config = {{"data", o.data},         {"target", o.target},
                 {"optimize", o.optimize}, {"normalize", o.normalize},
                 {"query_row", o.query_row}, {"no_holdout", o.no_holdout},
                 {"lengthscales", o.lengthscales}};
  config["signal_variance"] = o.signal_variance ? json(*o.signal_variance) : json(nullptr);
  config["noise_variance"] = o.noise_variance ? json(*o.noise_variance) : json(nullptr);
  write_manifest(dir, "fit", config, {}, {"model.json", "fit_report.json"});

  std::cout << "log marginal likelihood " << lml << "\n";
  for (Eigen::Index i = 0; i < train.dim(); ++i) {
    std::cout << "  relevance " << feature_name(train.feature_names, i) << " = " << r[i] << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- attribute

struct AttributeOptions {
  std::string model;
  std::string out_dir = ".";
  std::string engine = "exact";
  QueryOptions query;
};

struct Engine {
  enum Kind { exact, quad, rfgp } kind = exact;
  igpr::QuadratureSpec spec;
  Eigen::Index features = 0;
  std::uint64_t seed = 0;
};

Engine parse_engine(const std::string& text) {
  Engine e;
  if (text == "exact") return e;
  if (text.rfind("quad:", 0) == 0) {
    e.kind = Engine::quad;
    try {
      e.spec = igpr::parse_quadrature_spec(text.substr(5));
    } catch (const igpr::Error& err) {
      throw UsageError(err.what());
    }
    return e;
  }
  static const std::regex re(R"(^rfgp:(\d+)(?::(\d+))?$)");
  std::smatch m;
  if (std::regex_match(text, m, re)) {
    e.kind = Engine::rfgp;
    e.features = std::stol(m[1]);
    e.seed = m[2].matched ? std::stoull(m[2]) : 0;
    if (e.features < 1) throw UsageError("rfgp engine needs M >= 1");
    return e;
  }
  throw UsageError("unknown engine '" + text + "' (exact | quad:<rule>:<L> | rfgp:<M>[:<seed>])");
}

int run_attribute(const AttributeOptions& o) {
  const Engine engine = parse_engine(o.engine);
  const ModelBundle b = load_model(o.model);
  const QueryPair q = resolve_query(b, o.query);
  const fs::path dir = prepare_dir(o.out_dir);
  const igpr::GprModel& m = b.model();

  igpr::AttributionReport r;
  std::vector<std::uint64_t> seeds;
  switch (engine.kind) {
    case Engine::exact:
      r = igpr::attribution_report(m, q.x, q.x_tilde);
      break;
    case Engine::quad:
      r = igpr::quad_attribution_report(m, q.x, q.x_tilde, engine.spec);
      break;
    case Engine::rfgp: {
      const igpr::RfgpModel rf =
          igpr::RfgpModel::fit(m.train_inputs(), m.train_targets(), m.hyper(), engine.features,
                               engine.seed);
      double total = 0.0;
      for (Eigen::Index i = 0; i < m.dim(); ++i) {
        r.features.push_back(igpr::rfgp_attribution(rf, q.x, q.x_tilde, i));
        total += r.features.back().mean;
      }
      r.prediction_delta = rf.predict_mean(q.x) - rf.predict_mean(q.x_tilde);
      r.completeness_residual = std::abs(total - r.prediction_delta);
      seeds.push_back(engine.seed);
      break;
    }
  }
  // Echo the points in the units the user supplied them in.
  r.query = b.to_raw(q.x);
  r.baseline = b.to_raw(q.x_tilde);

  const auto& names = b.loaded.feature_names;
  igpr::write_json_file(igpr::report_to_json(r, names, o.engine), (dir / "attribution.json").string());
  igpr::write_text_file(igpr::report_to_csv(r, names), (dir / "attribution.csv").string());
  json config = o.query.config();
  config["model"] = o.model;
  config["engine"] = o.engine;
  write_manifest(dir, "attribute", config, seeds, {"attribution.json", "attribution.csv"});

  for (const auto& f : r.features) {
    std::cout << feature_name(names, f.feature) << ": " << f.mean << " +/- " << f.stddev() << "\n";
  }
  std::cout << "completeness residual " << r.completeness_residual << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- quad-sweep

struct SweepOptions {
  std::string model;
  std::string out_dir = ".";
  std::vector<std::string> rules{"right_hand", "trapezoid", "simpson"};
  std::vector<long> partitions{8, 16, 32, 64, 128, 256, 512, 1024};
  QueryOptions query;
};

int run_quad_sweep(const SweepOptions& o) {
  std::vector<igpr::QuadratureRule> rules;
  for (const auto& name : o.rules) {
    try {
      rules.push_back(igpr::parse_rule(name));
    } catch (const igpr::Error& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<Eigen::Index> Ls(o.partitions.begin(), o.partitions.end());
  const ModelBundle b = load_model(o.model);
  const QueryPair q = resolve_query(b, o.query);
  const fs::path dir = prepare_dir(o.out_dir);

  const auto rows = igpr::convergence_sweep(b.model(), q.x, q.x_tilde, rules, Ls);
  igpr::write_text_file(igpr::sweep_to_csv(rows), (dir / "sweep.csv").string());
  json config = o.query.config();
  config["model"] = o.model;
  config["rules"] = o.rules;
  config["partitions"] = o.partitions;
  write_manifest(dir, "quad-sweep", config, {}, {"sweep.csv"});
  std::cout << "wrote " << rows.size() << " rows to " << (dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- rfgp-compare

struct CompareOptions {
  std::string model;
  std::string out_dir = ".";
  std::vector<long> Ms{10, 100, 1000};
  long seeds = 20;
  long ensemble = 20;
  std::uint64_t seed = 0;
  QueryOptions query;
};

int run_rfgp_compare(const CompareOptions& o) {
  const ModelBundle b = load_model(o.model);
  const QueryPair q = resolve_query(b, o.query);
  const fs::path dir = prepare_dir(o.out_dir);
  const igpr::GprModel& m = b.model();
  const Eigen::Index D = m.dim();
  const auto& names = b.loaded.feature_names;

  const igpr::AttributionReport exact = igpr::attribution_report(m, q.x, q.x_tilde);
  json out;
  out["query"] = vec_json(b.to_raw(q.x));
  out["baseline"] = vec_json(b.to_raw(q.x_tilde));
  json exact_json = json::array();
  for (const auto& f : exact.features) {
    exact_json.push_back({{"index", f.feature},
                          {"name", feature_name(names, f.feature)},
                          {"mean", f.mean},
                          {"var", f.variance}});
  }
  out["exact"] = exact_json;

  const long fits = std::max(o.seeds, o.ensemble);
  std::vector<std::uint64_t> used;
  for (long s = 0; s < fits; ++s) used.push_back(o.seed + static_cast<std::uint64_t>(s));

  json sweep = json::array();
  for (const long M : o.Ms) {
    if (M < 1) throw UsageError("--M values must be positive");
    // results[s][i]
    std::vector<std::vector<igpr::AttributionGaussian>> results;
    for (const std::uint64_t s : used) {
      const igpr::RfgpModel rf = igpr::RfgpModel::fit(m.train_inputs(), m.train_targets(), m.hyper(), M, s);
      std::vector<igpr::AttributionGaussian> row;
      for (Eigen::Index i = 0; i < D; ++i) row.push_back(igpr::rfgp_attribution(rf, q.x, q.x_tilde, i));
      results.push_back(std::move(row));
    }
    json per_feature = json::array();
    for (Eigen::Index i = 0; i < D; ++i) {
      const auto& ex = exact.features[static_cast<std::size_t>(i)];
      json comps = json::array();
      std::vector<double> gaps;
      std::vector<double> kls;
      std::vector<double> vars;
      for (long s = 0; s < o.seeds; ++s) {
        const auto& g = results[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
        const double gap = std::abs(g.mean - ex.mean);
        const json kl = symmetric_kl(g.mean, g.variance, ex.mean, ex.variance);
        gaps.push_back(gap);
        vars.push_back(g.variance);
        if (!kl.is_null()) kls.push_back(kl.get<double>());
        comps.push_back({{"seed", used[static_cast<std::size_t>(s)]},
                         {"mean", g.mean},
                         {"var", g.variance},
                         {"mean_gap", gap},
                         {"sym_kl", kl}});
      }
      std::vector<igpr::AttributionGaussian> mix_parts;
      for (long s = 0; s < o.ensemble; ++s) {
        mix_parts.push_back(results[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]);
      }
      igpr::MixtureAttribution mix = igpr::make_mixture(std::move(mix_parts));
      mix.seeds.assign(used.begin(), used.begin() + o.ensemble);
      json mixture = igpr::mixture_to_json(mix);
      mixture["mean_gap"] = std::abs(mix.mixture_mean - ex.mean);
      mixture["sym_kl"] = symmetric_kl(mix.mixture_mean, mix.total_variance, ex.mean, ex.variance);
      per_feature.push_back({{"index", i},
                             {"name", feature_name(names, i)},
                             {"median_mean_gap", median(gaps)},
                             {"median_sym_kl", kls.empty() ? json(nullptr) : json(median(kls))},
                             {"median_var", median(vars)},
                             {"components", comps},
                             {"mixture", mixture}});
    }
    sweep.push_back({{"M", M}, {"features", per_feature}});
    std::cout << "M = " << M << " done\n";
  }
  out["sweep"] = sweep;

  igpr::write_json_file(out, (dir / "rfgp_compare.json").string());
  json config = o.query.config();
  config["model"] = o.model;
  config["M"] = o.Ms;
  config["seeds"] = o.seeds;
  config["ensemble"] = o.ensemble;
  config["seed"] = o.seed;
  write_manifest(dir, "rfgp-compare", config, used, {"rfgp_compare.json"});
  return kExitOk;
}

// ---------------------------------------------------------------- mc-validate

struct McOptions {
  std::string model;
  std::string out_dir = ".";
  long samples = 10000;
  long grid = 257;
  std::uint64_t seed = 0;
  QueryOptions query;
};

int run_mc_validate(const McOptions& o) {
  const ModelBundle b = load_model(o.model);
  const QueryPair q = resolve_query(b, o.query);
  const fs::path dir = prepare_dir(o.out_dir);
  const igpr::GprModel& m = b.model();
  const auto& names = b.loaded.feature_names;

  json features = json::array();
  bool all_pass = true;
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    const igpr::AttributionGaussian ex = igpr::gpr_attribution(m, q.x, q.x_tilde, i);
    const igpr::McEstimate mc = igpr::mc_attribution_oracle(
        m, q.x, q.x_tilde, i, o.grid, o.samples, o.seed + static_cast<std::uint64_t>(i));
    const bool mean_ok = std::abs(mc.mean - ex.mean) <= 3.0 * mc.std_error;
    const bool var_ok = std::abs(mc.variance - ex.variance) <= 0.1 * ex.variance;
    all_pass = all_pass && mean_ok && var_ok;
    features.push_back({{"index", i},
                        {"name", feature_name(names, i)},
                        {"closed_form", {{"mean", ex.mean}, {"var", ex.variance}}},
                        {"empirical",
                         {{"mean", mc.mean},
                          {"var", mc.variance},
                          {"mean_std_error", mc.std_error},
                          {"var_std_error", mc.variance_std_error},
                          {"jitter", mc.jitter}}},
                        {"mean_within_3se", mean_ok},
                        {"var_within_10pct", var_ok}});
    std::cout << feature_name(names, i) << ": mean " << ex.mean << " vs " << mc.mean << " (se "
              << mc.std_error << "), var " << ex.variance << " vs " << mc.variance << " -> "
              << (mean_ok && var_ok ? "pass" : "FAIL") << "\n";
  }
  const json report = {{"schema", "igpr.mc_validation"},
                       {"version", 1},
                       {"query", vec_json(b.to_raw(q.x))},
                       {"baseline", vec_json(b.to_raw(q.x_tilde))},
                       {"samples", o.samples},
                       {"grid_points", o.grid},
                       {"features", features},
                       {"passed", all_pass}};
  igpr::write_json_file(report, (dir / "mc_validation.json").string());
  json config = o.query.config();
  config["model"] = o.model;
  config["samples"] = o.samples;
  config["grid"] = o.grid;
  config["seed"] = o.seed;
  std::vector<std::uint64_t> seeds;
  for (Eigen::Index i = 0; i < m.dim(); ++i) seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
  write_manifest(dir, "mc-validate", config, seeds, {"mc_validation.json"});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process regression with integrated-gradients attribution distributions"};
  app.set_version_flag("--version", std::string(IGPR_VERSION));
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Write the two-feature sinusoid benchmark to CSV");
  c_sim->add_option("--n", sim.n, "Number of rows")->check(CLI::PositiveNumber);
  c_sim->add_option("--noise", sim.noise, "Noise scale on a unit normal")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--out", sim.out, "Output CSV path");

  FitOptions fit;
  auto* c_fit = app.add_subcommand("fit", "Fit an ARD-SE GP regressor and write model.json");
  c_fit->add_option("--data", fit.data, "Training CSV with a header row")->required();
  c_fit->add_option("--target", fit.target, "Target column name");
  c_fit->add_option("--out-dir", fit.out_dir, "Output directory");
  c_fit->add_option("--optimize", fit.optimize,
                    "Marginal-likelihood evaluations per start of the hyperparameter search (0 = none)")
      ->check(CLI::NonNegativeNumber);
  c_fit->add_option("--signal-variance", fit.signal_variance, "Kernel amplitude s0^2");
  c_fit->add_option("--lengthscales", fit.lengthscales, "One per feature, or a single shared value")
      ->delimiter(',');
  c_fit->add_option("--noise-variance", fit.noise_variance, "Observation noise variance");
  c_fit->add_flag("--normalize", fit.normalize, "Z-score features before fitting");
  c_fit->add_option("--query-row", fit.query_row, "0-based row held out as the query (default last)")
      ->check(CLI::NonNegativeNumber);
  c_fit->add_flag("--no-holdout", fit.no_holdout, "Train on every row");

  AttributeOptions attr;
  auto* c_attr = app.add_subcommand("attribute", "Attribution mean and std per feature");
  c_attr->add_option("--model", attr.model, "model.json from 'fit'")->required();
  c_attr->add_option("--out-dir", attr.out_dir, "Output directory");
  c_attr->add_option("--engine", attr.engine, "exact | quad:<rule>:<L> | rfgp:<M>[:<seed>]");
  attr.query.add(c_attr);

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("quad-sweep", "Quadrature error against the closed form");
  c_sweep->add_option("--model", sweep.model, "model.json from 'fit'")->required();
  c_sweep->add_option("--out-dir", sweep.out_dir, "Output directory");
  c_sweep->add_option("--rules", sweep.rules, "Comma separated rule names")->delimiter(',');
  c_sweep->add_option("--L", sweep.partitions, "Comma separated partition counts")->delimiter(',');
  sweep.query.add(c_sweep);

  CompareOptions cmp;
  auto* c_cmp = app.add_subcommand("rfgp-compare", "Random-feature attributions against the exact ones");
  c_cmp->add_option("--model", cmp.model, "model.json from 'fit'")->required();
  c_cmp->add_option("--out-dir", cmp.out_dir, "Output directory");
  c_cmp->add_option("--M", cmp.Ms, "Comma separated feature counts")->delimiter(',');
  c_cmp->add_option("--seeds", cmp.seeds, "Independent fits per M")->check(CLI::PositiveNumber);
  c_cmp->add_option("--R", cmp.ensemble, "Mixture size per M")->check(CLI::PositiveNumber);
  c_cmp->add_option("--seed", cmp.seed, "First seed");
  cmp.query.add(c_cmp);

  McOptions mc;
  auto* c_mc = app.add_subcommand("mc-validate", "Check the closed form against posterior path samples");
  c_mc->add_option("--model", mc.model, "model.json from 'fit'")->required();
  c_mc->add_option("--out-dir", mc.out_dir, "Output directory");
  c_mc->add_option("--samples", mc.samples, "Posterior samples")->check(CLI::Range(100L, 100000000L));
  c_mc->add_option("--grid", mc.grid, "Path grid points")->check(CLI::Range(3L, 100000L));
  c_mc->add_option("--seed", mc.seed, "RNG seed");
  mc.query.add(c_mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_sim) return run_simulate(sim);
    if (*c_fit) return run_fit(fit);
    if (*c_attr) return run_attribute(attr);
    if (*c_sweep) return run_quad_sweep(sweep);
    if (*c_cmp) return run_rfgp_compare(cmp);
    if (*c_mc) return run_mc_validate(mc);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const igpr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const igpr::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
