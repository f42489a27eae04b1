#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "tvi/errors.hpp"

namespace tvi {

/// Quadrature rule on [0,1]: nodes c_i, weights b_i, the classical order of
/// accuracy, and whether the rule is symmetric under c -> 1-c (weights
/// matching).  `order` is the advertised order; check_order() measures it.
struct QuadratureRule {
  std::string name;
  std::vector<double> c;
  std::vector<double> b;
  int order = 0;
  bool symmetric = false;
};

enum class RuleKind { rect_left, rect_right, midpoint, trapezoid, simpson, gauss };

/// True iff for every node i there is a partner j with c_j = 1-c_i and
/// b_j = b_i (to tolerance).  This is the definitional test; make_rule uses
/// it to fill in the symmetric flag rather than hard-coding it.
inline bool is_symmetric(const QuadratureRule& rule, double tol = 1e-12) {
  const std::size_t m = rule.c.size();
  std::vector<bool> used(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    bool found = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      if (std::abs(rule.c[j] - (1.0 - rule.c[i])) <= tol && std::abs(rule.b[j] - rule.b[i]) <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

/// Largest s such that all monomials t^k, k < s, are integrated exactly
/// (to 1e-12).  Capped to keep the probe away from float noise at high k.
inline int check_order(const QuadratureRule& rule, int cap = 50) {
  for (int k = 0; k < cap; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.c.size(); ++i) sum += rule.b[i] * std::pow(rule.c[i], k);
    if (std::abs(sum - 1.0 / (k + 1)) > 1e-12) return k;
  }
  return cap;
}

/// Gauss-Legendre rule with m points, mapped from [-1,1] to [0,1].
/// Nodes are the roots of the Legendre polynomial P_m, found by Newton from
/// the Chebyshev-like initial guesses; weights w = 2 / ((1-x^2) P_m'(x)^2).
inline QuadratureRule make_gauss(int m) {
  if (m < 1) throw ConfigError("make_gauss: need at least one point");
  QuadratureRule rule;
  rule.name = "gauss" + std::to_string(m);
  std::vector<std::pair<double, double>> nodes;
  nodes.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_m and P_{m-1} at x.
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // Weight 2/((1-x^2) P'^2) on [-1,1]; halved by the map to [0,1].
    nodes.emplace_back((x + 1.0) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp));
  }
  std::sort(nodes.begin(), nodes.end());
  rule.c.reserve(nodes.size());
  rule.b.reserve(nodes.size());
  for (const auto& [c, b] : nodes) {
    rule.c.push_back(c);
    rule.b.push_back(b);
  }
  rule.order = 2 * m;
  rule.symmetric = is_symmetric(rule);
  return rule;
}

inline QuadratureRule make_rule(RuleKind kind, int gauss_points = 0) {
  QuadratureRule rule;
  switch (kind) {
    case RuleKind::rect_left:
      rule = {"rect_left", {0.0}, {1.0}, 1, false};
      break;
    case RuleKind::rect_right:
      rule = {"rect_right", {1.0}, {1.0}, 1, false};
      break;
    case RuleKind::midpoint:
      rule = {"midpoint", {0.5}, {1.0}, 2, false};
      break;
    case RuleKind::trapezoid:
      rule = {"trapezoid", {0.0, 1.0}, {0.5, 0.5}, 2, false};
      break;
    case RuleKind::simpson:
      rule = {"simpson", {0.0, 0.5, 1.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 4, false};
      break;
    case RuleKind::gauss:
      return make_gauss(gauss_points);
  }
  rule.symmetric = is_symmetric(rule);
  return rule;
}

/// Parse "rect_left", "midpoint", "trapezoid", "simpson", "gauss<m>".
inline QuadratureRule rule_from_string(const std::string& s) {
  if (s == "rect_left") return make_rule(RuleKind::rect_left);
  if (s == "rect_right") return make_rule(RuleKind::rect_right);
  if (s == "midpoint") return make_rule(RuleKind::midpoint);
  if (s == "trapezoid") return make_rule(RuleKind::trapezoid);
  if (s == "simpson") return make_rule(RuleKind::simpson);
  if (s.rfind("gauss", 0) == 0 && s.size() > 5) {
    try {
      std::size_t pos = 0;
      int m = std::stoi(s.substr(5), &pos);
      if (pos == s.size() - 5 && m >= 1) return make_gauss(m);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown quadrature rule: " + s);
}

}  // namespace tvi
