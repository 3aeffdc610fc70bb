#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace igpr {

/// Composite rules on a uniform partition 0 = t_0 < ... < t_L = 1.
enum class QuadratureRule {
  /// Nodes l/L for l = 1..L, weight 1/L each (never evaluates t = 0).
  right_hand,
  /// Nodes l/L for l = 0..L, weights (1/2, 1, ..., 1, 1/2)/L.
  trapezoid,
  /// Classical composite Simpson: endpoints and panel midpoints, panel
  /// weights (1/6, 4/6, 1/6)/L. Exact on cubics.
  simpson,
  /// Panel weights (1/4, 1/2, 1/4)/L on the Simpson nodes. Algebraically the
  /// mean of the trapezoid and midpoint rules; second order only.
  simpson_quarter,
};

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::simpson;
  Eigen::Index partitions = 1;
};

struct NodesWeights {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Nodes in increasing order; weights sum to one. Throws DomainError for L < 1.
NodesWeights nodes_weights(const QuadratureSpec& spec);

/// Number of integrand evaluations the rule makes (the node count).
Eigen::Index function_evaluations(const QuadratureSpec& spec);

std::string to_string(QuadratureRule rule);
/// Accepts "right_hand" (or "right-hand"), "trapezoid", "simpson", "simpson_quarter".
QuadratureRule parse_rule(std::string_view name);
/// Parses "<rule>:<L>", e.g. "simpson:4096".
QuadratureSpec parse_quadrature_spec(std::string_view text);

/// Integrates g over [0, 1] with the given rule.
template <typename Fn>
double integrate_unit(const QuadratureSpec& spec, Fn&& g) {
  const NodesWeights nw = nodes_weights(spec);
  double sum = 0.0;
  for (Eigen::Index l = 0; l < nw.nodes.size(); ++l) sum += nw.weights[l] * g(nw.nodes[l]);
  return sum;
}

}  // namespace igpr
