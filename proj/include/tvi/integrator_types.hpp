#pragma once

#include <vector>

#include "tvi/errors.hpp"
#include "tvi/quadrature.hpp"
#include "tvi/solver.hpp"

namespace tvi {

/// Method parameters shared by the Lagrangian, Hamiltonian, and symmetric
/// integrators: Taylor truncation r, quadrature on [0,1], Newton settings.
struct TviConfig {
  int r = 1;
  QuadratureRule rule = make_rule(RuleKind::trapezoid);
  NewtonConfig newton;
};

struct StepResult {
  std::vector<double> q1, p1;
  SolveReport report;
};

namespace detail {

inline void validate_step_params(int n, std::size_t q, std::size_t p, double h, int r,
                                 const QuadratureRule& rule) {
  if (static_cast<int>(q) != n || static_cast<int>(p) != n)
    throw ConfigError("state dimension does not match the system");
  if (h == 0.0) throw DomainError("time step must be nonzero");
  if (r < 0) throw ConfigError("order parameter r must be nonnegative");
  if (rule.c.empty() || rule.c.size() != rule.b.size())
    throw ConfigError("quadrature rule has no nodes");
  for (double c : rule.c)
    if (c < 0.0 || c > 1.0) throw ConfigError("quadrature nodes must lie in [0,1]");
}

}  // namespace detail
}  // namespace tvi
