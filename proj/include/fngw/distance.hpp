#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fngw/graph.hpp"
#include "fngw/linear_ot.hpp"

namespace fngw {

// Trade-off weights and solver knobs. The exponents are fixed to the
// squared-metric / linear-mixture regime by construction.
struct FngwParams {
  double alpha = 0.5;   // edge-feature term weight, in [0,1]
  double beta = 0.25;   // structure term weight, alpha + beta <= 1
  NodeMetric node_metric = NodeMetric::SquaredEuclidean;
  int max_iters = 1000;
  double rel_tol = 1e-9;
  std::optional<std::uint64_t> seed;
  // A pair with no node features (S == 0) or no edge features (T == 0) is only
  // accepted when the caller acknowledges it; guards against silently dropping
  // a term through a data bug.
  bool allow_no_node_features = false;
  bool allow_no_edge_features = false;
};

void validate_params(const FngwParams& params);

// Per-pair constant factors of the quadratic energy.
struct CostFactors {
  Matrix node_cost;  // M(i,j), n x m
  Matrix g_struct;   // elementwise squares of the first structure matrix
  Matrix h_struct;   // same for the second
  Matrix g_edge;     // (i,j) -> squared norm of the first edge slice
  Matrix h_edge;     // same for the second
};

Matrix node_cost_matrix(const Matrix& features, const Matrix& features2, NodeMetric metric);

CostFactors make_cost_factors(const Graph& a, const Graph& b, NodeMetric metric);

// sum_{k,l} (A(i,k) - B(j,l))^2 pi(k,l), factorized to O(n^2 m + n m^2).
// Exact for any pi (the marginal terms use pi's actual row/column sums).
Matrix structure_contract(const Matrix& a, const Matrix& b, const Matrix& pi,
                          const Matrix& g_struct, const Matrix& h_struct);

// sum_{k,l} ||E(i,k,:) - E2(j,l,:)||^2 pi(k,l) in O(n^2 m T + n m^2 T).
Matrix edge_tensor_contract(const std::vector<Matrix>& ea, const std::vector<Matrix>& eb,
                            const Matrix& pi, const Matrix& g_edge, const Matrix& h_edge);

// Precomputed per-pair state used by the solver; builds the factors once and
// keeps transposed copies for the gradient of asymmetric inputs.
struct FngwProblem {
  FngwProblem(const Graph& a, const Graph& b, const FngwParams& params);

  double energy(const Matrix& pi) const;          // E_{alpha,beta} at pi
  Matrix gradient(const Matrix& pi) const;        // exact gradient of energy
  std::pair<double, double> line_coefficients(const Matrix& pi_old, const Matrix& pi_new) const;

  FngwParams params;
  Vector p, q;
  Matrix struct_a, struct_b, struct_a_t, struct_b_t;
  std::vector<Matrix> edges_a, edges_b, edges_a_t, edges_b_t;
  CostFactors factors;
};

// Energy of a feasible plan; validates the plan against the graph weights.
double fngw_cost(const Graph& a, const Graph& b, const TransportPlan& plan,
                 const FngwParams& params);

// Exact gradient of the energy with respect to the plan. For symmetric inputs
// this equals the familiar  (1-alpha-beta) M + 2 beta J x pi + 2 alpha L x pi;
// for asymmetric inputs the transposed contractions are added explicitly.
Matrix fngw_gradient(const Graph& a, const Graph& b, const TransportPlan& plan,
                     const FngwParams& params);

// Coefficients (a, b) with  energy(pi_old + t (pi_new - pi_old)) = a t^2 + b t + c,
// c = energy(pi_old), exact for any feasible pair of plans.
std::pair<double, double> line_search_coefficients(const Graph& a, const Graph& b,
                                                   const TransportPlan& pi_old,
                                                   const TransportPlan& pi_new,
                                                   const FngwParams& params);

// Step of the quadratic line search restricted to [0, 1].
double line_search_step(double a, double b);

struct FngwResult {
  double value = 0.0;
  TransportPlan plan;
  std::vector<double> trace;  // objective per iteration, starting at the init plan
  int iterations = 0;
  bool converged = false;
};

// Conditional gradient descent from the product coupling (or init_plan when
// given). Each iteration solves the linear subproblem exactly and applies the
// closed-form line search; stops when the relative objective decrease falls
// below rel_tol or max_iters is reached.
FngwResult fngw_distance(const Graph& a, const Graph& b, const FngwParams& params,
                         const Matrix* init_plan = nullptr);

}  // namespace fngw
