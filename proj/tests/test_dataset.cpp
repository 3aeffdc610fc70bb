#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "igpr/dataset.hpp"
#include "igpr/errors.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("igpr_test_" + name);
  std::ofstream(p) << text;
  return p.string();
}

std::string error_of(const std::string& text) {
  try {
    igpr::load_csv(write_tmp("bad.csv", text), "y");
  } catch (const igpr::DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("CSV loads features in header order and round-trips") {
  const std::string path = write_tmp("ok.csv", "a, y ,b\n1,2,3\n4.5,-1e-3,6\n\n");
  const igpr::Dataset d = igpr::load_csv(path, "y");
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.X(1, 0) == 4.5);
  CHECK(d.X(1, 1) == 6.0);
  CHECK(d.y[1] == -1e-3);

  const igpr::Dataset sim = igpr::simulate(20, 0.5, 3);
  const std::string out = (fs::temp_directory_path() / "igpr_test_roundtrip.csv").string();
  igpr::write_csv(sim, out);
  const igpr::Dataset back = igpr::load_csv(out, "y");
  CHECK((back.X - sim.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y - sim.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("malformed CSV is reported with its line") {
  CHECK(error_of("x,y\n1,2\n3,\n").find("line 3") != std::string::npos);
  CHECK(error_of("x,y\n1,abc\n").find("line 2") != std::string::npos);
  CHECK(error_of("x,y\nnan,1\n").find("line 2") != std::string::npos);
  CHECK(error_of("x,y\n1,2,3\n").find("line 2") != std::string::npos);
  CHECK(error_of("x,z\n1,2\n").find("target column") != std::string::npos);
  CHECK(error_of("x,y\n") != "");
  CHECK_THROWS_AS(igpr::load_csv("/nonexistent/file.csv", "y"), igpr::DataError);
}

TEST_CASE("normalization round-trips and names constant features") {
  const igpr::Dataset d = igpr::simulate(50, 0.5, 4);
  const igpr::Dataset z = igpr::normalize(d);
  REQUIRE(z.norm.has_value());
  CHECK(z.X.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXd back = igpr::denormalize(z.X, *z.norm);
  CHECK((back - d.X).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::VectorXd row = d.X.row(7).transpose();
  CHECK((z.norm->invert(z.norm->apply(row)) - row).cwiseAbs().maxCoeff() <= 1e-12);

  const igpr::Dataset c = igpr::append_constant_feature(d, 3.0, "flat");
  try {
    igpr::normalize(c);
    FAIL("expected DataError");
  } catch (const igpr::DataError& e) {
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
}

TEST_CASE("baselines") {
  igpr::Dataset d;
  d.X.resize(4, 1);
  d.X << 1, 2, 3, 10;
  d.y = Eigen::Vector4d(5, 6, 6, 7);
  CHECK(igpr::mean_baseline(d)[0] == 4.0);
  CHECK(igpr::mean_baseline_where(d, [](double y) { return y == 6.0; })[0] == 2.5);
  CHECK_THROWS_AS(igpr::mean_baseline_where(d, [](double y) { return y > 100.0; }), igpr::DataError);
}

TEST_CASE("simulate is seeded and noise-free draws follow the generator exactly") {
  const igpr::Dataset a = igpr::simulate(30, 0.5, 1);
  const igpr::Dataset b = igpr::simulate(30, 0.5, 1);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  const igpr::Dataset c = igpr::simulate(30, 0.0, 1);
  for (Eigen::Index r = 0; r < 30; ++r) {
    CHECK(c.y[r] == std::sin(c.X(r, 0)) * std::sin(2.0 * c.X(r, 1)));
  }
  CHECK((a.X.array() >= 0.0).all());
  CHECK((a.X.array() <= 10.0).all());
}

TEST_CASE("simulated target variance matches a numerical integral") {
  // E[g] and E[g^2] for g = sin(x1) sin(2 x2), x ~ U(0, 10)^2.
  const double m1 = oracle::gk([](double u) { return std::sin(u); }, 0, 10) / 10.0;
  const double m2 = oracle::gk([](double u) { return std::sin(2 * u); }, 0, 10) / 10.0;
  const double s1 = oracle::gk([](double u) { return std::sin(u) * std::sin(u); }, 0, 10) / 10.0;
  const double s2 = oracle::gk([](double u) { return std::sin(2 * u) * std::sin(2 * u); }, 0, 10) / 10.0;
  const double expected = 0.25 + s1 * s2 - (m1 * m2) * (m1 * m2);
  const igpr::Dataset d = igpr::simulate(100000, 0.5, 2024);
  const double mean = d.y.mean();
  const double var = (d.y.array() - mean).square().sum() / (d.rows() - 1);
  CHECK(std::abs(var - expected) <= 0.02 * expected);
}
