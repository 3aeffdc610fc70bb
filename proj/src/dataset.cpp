#include "igpr/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "igpr/errors.hpp"

namespace igpr {

Eigen::VectorXd NormStats::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != mean.size()) throw ShapeError("normalization dimension mismatch");
  return ((x - mean).array() / stddev.array()).matrix();
}

Eigen::VectorXd NormStats::invert(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (z.size() != mean.size()) throw ShapeError("normalization dimension mismatch");
  return (z.array() * stddev.array()).matrix() + mean;
}

void Dataset::validate() const {
  if (X.rows() < 1) throw DataError("dataset has no rows");
  if (y.size() != X.rows()) throw DataError("feature and target row counts differ");
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != X.cols()) {
    throw DataError("feature name count does not match the number of columns");
  }
  if (!X.allFinite() || !y.allFinite()) throw DataError("dataset contains non-finite values");
  if (norm) {
    if (norm->mean.size() != X.cols() || norm->stddev.size() != X.cols()) {
      throw DataError("normalization statistics have the wrong dimension");
    }
    if ((norm->stddev.array() <= 0.0).any()) throw DataError("normalization std must be > 0");
  }
}

Dataset Dataset::without_row(Eigen::Index r) const {
  if (r < 0 || r >= rows()) throw ShapeError("row index out of range");
  if (rows() < 2) throw DataError("cannot hold out the only row");
  Dataset out = *this;
  const Eigen::Index n = rows() - 1;
  out.X.resize(n, dim());
  out.y.resize(n);
  for (Eigen::Index s = 0, t = 0; s < rows(); ++s) {
    if (s == r) continue;
    out.X.row(t) = X.row(s);
    out.y[t] = y[s];
    ++t;
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, const std::string& column) {
  const auto where = [&] {
    return "line " + std::to_string(line_no) + ", column '" + column + "'";
  };
  if (cell.empty()) throw DataError("missing value at " + where());
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("non-numeric value '" + cell + "' at " + where());
  }
  if (!std::isfinite(value)) throw DataError("non-finite value '" + cell + "' at " + where());
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_line(line);
      break;
    }
  }
  if (header.empty()) throw DataError("'" + path + "' has no header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  std::ptrdiff_t target = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target_column) target = static_cast<std::ptrdiff_t>(c);
  }
  if (target < 0) throw DataError("target column '" + target_column + "' not in header");
  if (header.size() < 2) throw DataError("need at least one feature column");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      values[c] = parse_cell(cells[c], line_no, header[c]);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw DataError("'" + path + "' has no data rows");

  Dataset data;
  data.target_name = target_column;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(header.size()) - 1;
  data.X.resize(n, d);
  data.y.resize(n);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) != target) data.feature_names.push_back(header[c]);
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index f = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == target) {
        data.y[r] = rows[r][c];
      } else {
        data.X(r, f++) = rows[r][c];
      }
    }
  }
  data.validate();
  return data;
}

void write_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    out << (data.feature_names.empty() ? "x" + std::to_string(j + 1) : data.feature_names[j])
        << ',';
  }
  out << data.target_name << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << data.X(r, j) << ',';
    out << data.y[r] << '\n';
  }
}

Dataset normalize(const Dataset& data) {
  data.validate();
  if (data.rows() < 2) throw DataError("normalization needs at least two rows");
  const double n = static_cast<double>(data.rows());
  NormStats stats;
  stats.mean = data.X.colwise().mean().transpose();
  stats.stddev.resize(data.dim());
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    const double ss = (data.X.col(j).array() - stats.mean[j]).square().sum();
    stats.stddev[j] = std::sqrt(ss / (n - 1));
    if (!(stats.stddev[j] > 0.0)) {
      const std::string name =
          data.feature_names.empty() ? "#" + std::to_string(j) : data.feature_names[j];
      throw DataError("feature '" + name + "' has zero variance and cannot be normalized");
    }
  }
  Dataset out = data;
  out.X = (data.X.rowwise() - stats.mean.transpose()).array().rowwise() /
          stats.stddev.transpose().array();
  out.norm = std::move(stats);
  return out;
}

Eigen::MatrixXd denormalize(const Eigen::MatrixXd& Z, const NormStats& stats) {
  if (Z.cols() != stats.mean.size()) throw ShapeError("normalization dimension mismatch");
  return (Z.array().rowwise() * stats.stddev.transpose().array()).matrix().rowwise() +
         stats.mean.transpose();
}

Eigen::VectorXd mean_baseline(const Dataset& data) {
  data.validate();
  return data.X.colwise().mean().transpose();
}

Eigen::VectorXd mean_baseline_where(const Dataset& data,
                                    const std::function<bool(double)>& keep) {
  data.validate();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.dim());
  Eigen::Index count = 0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    if (keep(data.y[r])) {
      sum += data.X.row(r).transpose();
      ++count;
    }
  }
  if (count == 0) throw DataError("no rows satisfy the baseline filter");
  return sum / static_cast<double>(count);
}

Dataset simulate(Eigen::Index n_samples, double noise_scale, std::uint64_t seed) {
  if (n_samples < 1) throw DomainError("simulate needs n_samples >= 1");
  if (!(std::isfinite(noise_scale) && noise_scale >= 0.0)) {
    throw DomainError("noise scale must be finite and non-negative");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 10.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset data;
  data.X.resize(n_samples, 2);
  data.y.resize(n_samples);
  data.feature_names = {"x1", "x2"};
  data.target_name = "y";
  for (Eigen::Index r = 0; r < n_samples; ++r) {
    const double x1 = uniform(rng);
    const double x2 = uniform(rng);
    const double noise = normal(rng);
    data.X(r, 0) = x1;
    data.X(r, 1) = x2;
    data.y[r] = std::sin(x1) * std::sin(2.0 * x2);
    if (noise_scale > 0.0) data.y[r] += noise_scale * noise;
  }
  return data;
}

Dataset append_constant_feature(const Dataset& data, double value, const std::string& name) {
  Dataset out = data;
  out.X.conservativeResize(Eigen::NoChange, data.dim() + 1);
  out.X.col(data.dim()).setConstant(value);
  if (!out.feature_names.empty() || data.dim() == 0) out.feature_names.push_back(name);
  if (out.norm) {
    out.norm.reset();
  }
  return out;
}

}  // namespace igpr
