#pragma once

#include <optional>
#include <vector>

#include "fngw/distance.hpp"

namespace fngw {

struct BarycenterConfig {
  int node_count = 0;
  Vector weights;                      // histogram p; empty -> uniform
  std::vector<double> lambda_weights;  // per-input simplex; empty -> uniform
  double gamma_sparsity = 0.0;         // l1 weight on the structure block
  double prox_step = 0.0;              // <= 0 -> 0.9 / (2 beta max_i p_i^2)
  int prox_iters = 10;
  int outer_iters = 50;
  double rel_tol = 1e-7;
  std::uint64_t seed = 0;
  std::optional<Graph> init;  // block init; otherwise seeded from the inputs
};

// Closed-form minimizer of the edge block:
// per channel, (sum_k lambda_k pi_k E_k[t] pi_k^T) / (p p^T) elementwise.
std::vector<Matrix> update_edge_tensor(const std::vector<Graph>& graphs,
                                       const std::vector<TransportPlan>& plans,
                                       const std::vector<double>& lambda, const Vector& p);

// Weighted barycentric projection of the node features:
// diag(1/p) sum_k lambda_k pi_k F_k.
Matrix update_node_features(const std::vector<Graph>& graphs,
                            const std::vector<TransportPlan>& plans,
                            const std::vector<double>& lambda, const Vector& p);

// sign(x) * max(0, |x| - threshold), elementwise.
Matrix soft_threshold(const Matrix& a, double threshold);

// Proximal-gradient steps on the structure block:
// gradient 2 beta sum_k lambda_k (A o p p^T - pi_k A_k pi_k^T), then the
// soft threshold at step * gamma. The composite objective is non-increasing
// for step <= 1 / (2 beta max_i p_i^2).
Matrix update_structure_prox(const Matrix& a_init, const std::vector<Graph>& graphs,
                             const std::vector<TransportPlan>& plans,
                             const std::vector<double>& lambda, const Vector& p, double beta,
                             double gamma_sparsity, double step, int iters);

struct BarycenterResult {
  Graph barycenter;
  std::vector<double> loss_trace;  // weighted energy + gamma * l1(structure), per round
  std::vector<TransportPlan> plans;
  std::vector<double> final_costs;
  int rounds = 0;
};

// Block coordinate descent: per-input plans (warm-started across rounds),
// then closed-form edge / node updates and proximal structure steps.
BarycenterResult fngw_barycenter(const std::vector<Graph>& graphs, const FngwParams& params,
                                 const BarycenterConfig& config);

}  // namespace fngw
