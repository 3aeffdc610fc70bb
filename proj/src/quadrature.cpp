#include "igpr/quadrature.hpp"

#include <charconv>

#include "igpr/errors.hpp"

namespace igpr {

NodesWeights nodes_weights(const QuadratureSpec& spec) {
  const Eigen::Index L = spec.partitions;
  if (L < 1) throw DomainError("quadrature needs at least one partition");
  const double h = 1.0 / static_cast<double>(L);
  NodesWeights nw;

  switch (spec.rule) {
    case QuadratureRule::right_hand:
      nw.nodes.resize(L);
      nw.weights = Eigen::VectorXd::Constant(L, h);
      for (Eigen::Index l = 0; l < L; ++l) nw.nodes[l] = static_cast<double>(l + 1) * h;
      break;

    case QuadratureRule::trapezoid:
      nw.nodes.resize(L + 1);
      nw.weights = Eigen::VectorXd::Constant(L + 1, h);
      nw.weights[0] = nw.weights[L] = 0.5 * h;
      for (Eigen::Index l = 0; l <= L; ++l) nw.nodes[l] = static_cast<double>(l) * h;
      break;

    case QuadratureRule::simpson:
    case QuadratureRule::simpson_quarter: {
      const bool classical = spec.rule == QuadratureRule::simpson;
      const double end_w = (classical ? 1.0 / 6.0 : 0.25) * h;
      const double mid_w = (classical ? 4.0 / 6.0 : 0.5) * h;
      nw.nodes.resize(2 * L + 1);
      nw.weights = Eigen::VectorXd::Zero(2 * L + 1);
      for (Eigen::Index k = 0; k <= 2 * L; ++k) nw.nodes[k] = 0.5 * static_cast<double>(k) * h;
      // Panel l covers nodes 2l, 2l+1, 2l+2; shared endpoints accumulate.
      for (Eigen::Index l = 0; l < L; ++l) {
        nw.weights[2 * l] += end_w;
        nw.weights[2 * l + 1] += mid_w;
        nw.weights[2 * l + 2] += end_w;
      }
      break;
    }
  }
  // The last node is exactly 1 regardless of rounding in l * h.
  nw.nodes[nw.nodes.size() - 1] = 1.0;
  return nw;
}

Eigen::Index function_evaluations(const QuadratureSpec& spec) {
  if (spec.partitions < 1) throw DomainError("quadrature needs at least one partition");
  switch (spec.rule) {
    case QuadratureRule::right_hand:
      return spec.partitions;
    case QuadratureRule::trapezoid:
      return spec.partitions + 1;
    case QuadratureRule::simpson:
    case QuadratureRule::simpson_quarter:
      return 2 * spec.partitions + 1;
  }
  return 0;
}

std::string to_string(QuadratureRule rule) {
  switch (rule) {
    case QuadratureRule::right_hand:
      return "right_hand";
    case QuadratureRule::trapezoid:
      return "trapezoid";
    case QuadratureRule::simpson:
      return "simpson";
    case QuadratureRule::simpson_quarter:
      return "simpson_quarter";
  }
  return "unknown";
}

QuadratureRule parse_rule(std::string_view name) {
  if (name == "right_hand" || name == "right-hand" || name == "righthand") {
    return QuadratureRule::right_hand;
  }
  if (name == "trapezoid") return QuadratureRule::trapezoid;
  if (name == "simpson") return QuadratureRule::simpson;
  if (name == "simpson_quarter" || name == "simpson-quarter") {
    return QuadratureRule::simpson_quarter;
  }
  throw DomainError("unknown quadrature rule '" + std::string(name) + "'");
}

QuadratureSpec parse_quadrature_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw DomainError("quadrature spec must look like <rule>:<partitions>");
  }
  QuadratureSpec spec;
  spec.rule = parse_rule(text.substr(0, colon));
  const auto count = text.substr(colon + 1);
  long long L = 0;
  const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), L);
  if (ec != std::errc() || ptr != count.data() + count.size() || L < 1) {
    throw DomainError("invalid partition count '" + std::string(count) + "'");
  }
  spec.partitions = static_cast<Eigen::Index>(L);
  return spec;
}

}  // namespace igpr
