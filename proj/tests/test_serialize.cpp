#include <sstream>

#include <doctest.h>

#include "igpr/errors.hpp"
#include "igpr/serialize.hpp"

TEST_CASE("model document round-trips to identical predictions") {
  const igpr::Dataset d = igpr::normalize(igpr::simulate(40, 0.5, 3));
  const igpr::GprModel m = igpr::GprModel::fit(d, {0.3, Eigen::Vector2d(0.7, 0.4), 0.2});
  const nlohmann::json doc = igpr::model_to_json(m, d.feature_names, d.norm);
  CHECK(doc["format"] == "igpr.gpr_model");
  CHECK(doc["version"] == igpr::kModelFormatVersion);
  const igpr::LoadedModel back = igpr::model_from_json(nlohmann::json::parse(doc.dump()));
  const Eigen::Vector2d q(0.2, -0.5);
  CHECK(back.model.predict(q).mean == m.predict(q).mean);
  CHECK(back.model.predict(q).variance == m.predict(q).variance);
  CHECK(back.feature_names == d.feature_names);
  REQUIRE(back.norm.has_value());
  CHECK(back.norm->mean == d.norm->mean);
  CHECK(igpr::model_to_json(back.model, back.feature_names, back.norm).dump() == doc.dump());
}

TEST_CASE("malformed model documents are data errors") {
  CHECK_THROWS_AS(igpr::model_from_json(nlohmann::json::parse(R"({"format":"other"})")), igpr::DataError);
  CHECK_THROWS_AS(igpr::model_from_json(nlohmann::json::parse(R"({"format":"igpr.gpr_model","version":1})")),
                  igpr::DataError);
}

TEST_CASE("report CSV and JSON layout") {
  igpr::AttributionReport r;
  r.features = {{0, 0.5, 0.25}, {1, -0.1, 0.04}};
  r.query = Eigen::Vector2d(1, 2);
  r.baseline = Eigen::Vector2d(0, 0);
  r.completeness_residual = 1e-16;
  const std::string csv = igpr::report_to_csv(r, {"a", "b"});
  std::istringstream in(csv);
  std::string header, row1;
  std::getline(in, header);
  std::getline(in, row1);
  CHECK(header == "feature,mean,std,completeness_residual");
  CHECK(row1.rfind("a,0.5,0.5,", 0) == 0);
  const nlohmann::json j = igpr::report_to_json(r, {"a", "b"}, "exact");
  CHECK(j["features"][1]["name"] == "b");
  CHECK(j["features"][1]["std"].get<double>() == doctest::Approx(0.2));
  CHECK(j["baseline"].size() == 2);
}

TEST_CASE("sweep CSV") {
  std::vector<igpr::SweepRow> rows{{igpr::QuadratureRule::simpson, 8, 17, 1e-3, 2e-3}};
  CHECK(igpr::sweep_to_csv(rows).rfind("rule,L,function_evals,mean_abs_err,var_abs_err\nsimpson,8,17,", 0) == 0);
}

TEST_CASE("mixture JSON") {
  igpr::MixtureAttribution m = igpr::make_mixture({{0, 1.0, 0.5}, {0, 2.0, 0.5}});
  m.seeds = {4, 5};
  const nlohmann::json j = igpr::mixture_to_json(m);
  CHECK(j["components"].size() == 2);
  CHECK(j["components"][1]["seed"] == 5);
  CHECK(j["mixture_mean"].get<double>() == 1.5);
  CHECK(j["total_var"].get<double>() == doctest::Approx(0.75));
}
