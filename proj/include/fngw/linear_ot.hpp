#pragma once

#include <optional>

#include "fngw/common.hpp"

namespace fngw {

// Coupling matrix with prescribed marginals. Row sums match row_marginal and
// column sums match col_marginal within 1e-9; entries are nonnegative (values
// above -1e-12 are clamped to 0 on solver output).
struct TransportPlan {
  Matrix matrix;
  Vector row_marginal;
  Vector col_marginal;
};

// Returns an error description when the plan violates its declared marginals
// (tolerance tol) or carries negative mass.
std::optional<std::string> validate_plan(const TransportPlan& plan, double tol = 1e-9);

struct LinearOtSolution {
  TransportPlan plan;
  double objective;
  Vector row_potentials;  // duals u
  Vector col_potentials;  // duals v, c(i,j) >= u(i) + v(j) with equality on support
  int pivots;
};

// Exact solver for  min_{pi in Pi(p,q)} <cost, pi>  by a transportation
// network simplex on the dense bipartite graph. Returns an optimal vertex of
// the polytope; optimality is certified internally by complementary slackness
// with the recovered dual potentials (tolerance 1e-8).
//
// Determinism: entering arcs are chosen by most negative reduced cost with
// ties broken by lowest (row, col); degenerate pivots are avoided by an
// ascending ε-perturbation of the marginals that is removed on output, and the
// final plan is re-projected to the exact marginals by one rounding pass.
// Exceeding the pivot cap 50*(n+m)*max(n,m) is an error.
LinearOtSolution solve_linear_ot(const Matrix& cost, const Vector& p, const Vector& q);

}  // namespace fngw
