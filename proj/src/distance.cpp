#include "fngw/distance.hpp"

#include <cmath>
#include <sstream>

#include "fngw/kernels.hpp"

namespace fngw {

void validate_params(const FngwParams& params) {
  if (!(params.alpha >= 0.0) || !(params.beta >= 0.0))
    throw ValidationError("fngw params: alpha and beta must be nonnegative");
  if (params.alpha > 1.0 || params.beta > 1.0 || params.alpha + params.beta > 1.0 + 1e-15)
    throw ValidationError("fngw params: require alpha, beta in [0,1] with alpha + beta <= 1");
  if (params.max_iters < 1) throw ValidationError("fngw params: max_iters must be positive");
  if (!(params.rel_tol > 0.0)) throw ValidationError("fngw params: rel_tol must be positive");
}

Matrix node_cost_matrix(const Matrix& features, const Matrix& features2, NodeMetric metric) {
  if (features.cols() != features2.cols()) {
    std::ostringstream oss;
    oss << "node feature dimension mismatch: " << features.cols() << " vs " << features2.cols();
    throw ValidationError(oss.str());
  }
  return metric == NodeMetric::SquaredEuclidean
             ? kernels::node_cost_sqeuclidean(features, features2)
             : kernels::node_cost_hamming(features, features2);
}

CostFactors make_cost_factors(const Graph& a, const Graph& b, NodeMetric metric) {
  CostFactors f;
  f.node_cost = node_cost_matrix(a.node_features, b.node_features, metric);
  f.g_struct = a.structure.cwiseProduct(a.structure);
  f.h_struct = b.structure.cwiseProduct(b.structure);
  f.g_edge = kernels::slice_sq_norms(a.edge_channels, a.node_count());
  f.h_edge = kernels::slice_sq_norms(b.edge_channels, b.node_count());
  return f;
}

namespace {

// marginal rank-one terms plus the cross product:  g r 1^T + 1 c^T h^T - 2 a pi b^T
Matrix assemble_contract(const Matrix& cross, const Matrix& g, const Matrix& h, const Matrix& pi) {
  const Vector r = pi.rowwise().sum();
  const Vector c = pi.colwise().sum().transpose();
  const Vector gr = g * r;
  const Vector hc = h * c;
  Matrix out = -2.0 * cross;
  out.colwise() += gr;
  out.rowwise() += hc.transpose();
  return out;
}

}  // namespace

Matrix structure_contract(const Matrix& a, const Matrix& b, const Matrix& pi,
                          const Matrix& g_struct, const Matrix& h_struct) {
  if (a.rows() != pi.rows() || b.rows() != pi.cols())
    throw ValidationError("structure_contract: shape mismatch");
  return assemble_contract(kernels::cross_product(a, pi, b), g_struct, h_struct, pi);
}

Matrix edge_tensor_contract(const std::vector<Matrix>& ea, const std::vector<Matrix>& eb,
                            const Matrix& pi, const Matrix& g_edge, const Matrix& h_edge) {
  if (ea.size() != eb.size()) throw ValidationError("edge_tensor_contract: channel count mismatch");
  if (!ea.empty() && (ea[0].rows() != pi.rows() || eb[0].rows() != pi.cols()))
    throw ValidationError("edge_tensor_contract: shape mismatch");
  return assemble_contract(kernels::edge_cross_product(ea, pi, eb), g_edge, h_edge, pi);
}

FngwProblem::FngwProblem(const Graph& a, const Graph& b, const FngwParams& prm) : params(prm) {
  validate_params(params);
  if (a.feature_dim() != b.feature_dim()) {
    std::ostringstream oss;
    oss << "node feature dimension mismatch: " << a.feature_dim() << " vs " << b.feature_dim();
    throw ValidationError(oss.str());
  }
  if (a.channel_count() != b.channel_count()) {
    std::ostringstream oss;
    oss << "edge channel count mismatch: " << a.channel_count() << " vs " << b.channel_count();
    throw ValidationError(oss.str());
  }
  if (a.feature_dim() == 0 && !params.allow_no_node_features)
    throw ValidationError(
        "graphs carry no node features; set allow_no_node_features to acknowledge");
  if (a.channel_count() == 0 && !params.allow_no_edge_features)
    throw ValidationError(
        "graphs carry no edge features; set allow_no_edge_features to acknowledge");

  p = a.weights;
  q = b.weights;
  struct_a = a.structure;
  struct_b = b.structure;
  struct_a_t = a.structure.transpose();
  struct_b_t = b.structure.transpose();
  edges_a = a.edge_channels;
  edges_b = b.edge_channels;
  edges_a_t.reserve(edges_a.size());
  edges_b_t.reserve(edges_b.size());
  for (const Matrix& c : edges_a) edges_a_t.push_back(c.transpose());
  for (const Matrix& c : edges_b) edges_b_t.push_back(c.transpose());
  factors = make_cost_factors(a, b, params.node_metric);
}

double FngwProblem::energy(const Matrix& pi) const {
  const double node_w = 1.0 - params.alpha - params.beta;
  double total = 0.0;
  if (node_w != 0.0 && factors.node_cost.size() > 0)
    total += node_w * factors.node_cost.cwiseProduct(pi).sum();
  if (params.beta != 0.0) {
    const Matrix js = structure_contract(struct_a, struct_b, pi, factors.g_struct, factors.h_struct);
    total += params.beta * js.cwiseProduct(pi).sum();
  }
  if (params.alpha != 0.0 && !edges_a.empty()) {
    const Matrix le = edge_tensor_contract(edges_a, edges_b, pi, factors.g_edge, factors.h_edge);
    total += params.alpha * le.cwiseProduct(pi).sum();
  }
  return total;
}

Matrix FngwProblem::gradient(const Matrix& pi) const {
  const double node_w = 1.0 - params.alpha - params.beta;
  Matrix g = Matrix::Zero(pi.rows(), pi.cols());
  if (node_w != 0.0 && factors.node_cost.size() > 0) g = node_w * factors.node_cost;
  if (params.beta != 0.0) {
    g += params.beta *
         (structure_contract(struct_a, struct_b, pi, factors.g_struct, factors.h_struct) +
          structure_contract(struct_a_t, struct_b_t, pi, factors.g_struct.transpose(),
                             factors.h_struct.transpose()));
  }
  if (params.alpha != 0.0 && !edges_a.empty()) {
    g += params.alpha *
         (edge_tensor_contract(edges_a, edges_b, pi, factors.g_edge, factors.h_edge) +
          edge_tensor_contract(edges_a_t, edges_b_t, pi, factors.g_edge.transpose(),
                               factors.h_edge.transpose()));
  }
  return g;
}

std::pair<double, double> FngwProblem::line_coefficients(const Matrix& pi_old,
                                                         const Matrix& pi_new) const {
  const double node_w = 1.0 - params.alpha - params.beta;
  const Matrix delta = pi_new - pi_old;
  double a_coef = 0.0;
  double b_coef = 0.0;
  if (node_w != 0.0 && factors.node_cost.size() > 0)
    b_coef += node_w * factors.node_cost.cwiseProduct(delta).sum();
  if (params.beta != 0.0) {
    const Matrix cross_d = kernels::cross_product(struct_a, delta, struct_b);
    a_coef += -2.0 * params.beta * cross_d.cwiseProduct(delta).sum();
    b_coef += params.beta *
              structure_contract(struct_a, struct_b, pi_old, factors.g_struct, factors.h_struct)
                  .cwiseProduct(delta)
                  .sum();
    b_coef += -2.0 * params.beta * cross_d.cwiseProduct(pi_old).sum();
  }
  if (params.alpha != 0.0 && !edges_a.empty()) {
    const Matrix cross_d = kernels::edge_cross_product(edges_a, delta, edges_b);
    a_coef += -2.0 * params.alpha * cross_d.cwiseProduct(delta).sum();
    b_coef += params.alpha *
              edge_tensor_contract(edges_a, edges_b, pi_old, factors.g_edge, factors.h_edge)
                  .cwiseProduct(delta)
                  .sum();
    b_coef += -2.0 * params.alpha * cross_d.cwiseProduct(pi_old).sum();
  }
  return {a_coef, b_coef};
}

namespace {

void check_plan_against(const FngwProblem& problem, const TransportPlan& plan) {
  if (auto err = validate_plan(plan, 1e-7)) throw ValidationError("invalid plan: " + *err);
  if ((plan.row_marginal - problem.p).cwiseAbs().maxCoeff() > 1e-9 ||
      (plan.col_marginal - problem.q).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("plan marginals do not match the graph weights");
}

}  // namespace

double fngw_cost(const Graph& a, const Graph& b, const TransportPlan& plan,
                 const FngwParams& params) {
  require_valid(a);
  require_valid(b);
  FngwProblem problem(a, b, params);
  check_plan_against(problem, plan);
  return problem.energy(plan.matrix);
}

Matrix fngw_gradient(const Graph& a, const Graph& b, const TransportPlan& plan,
                     const FngwParams& params) {
  require_valid(a);
  require_valid(b);
  FngwProblem problem(a, b, params);
  check_plan_against(problem, plan);
  return problem.gradient(plan.matrix);
}

std::pair<double, double> line_search_coefficients(const Graph& a, const Graph& b,
                                                   const TransportPlan& pi_old,
                                                   const TransportPlan& pi_new,
                                                   const FngwParams& params) {
  FngwProblem problem(a, b, params);
  check_plan_against(problem, pi_old);
  check_plan_against(problem, pi_new);
  return problem.line_coefficients(pi_old.matrix, pi_new.matrix);
}

double line_search_step(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw ValidationError("line_search_step: non-finite coefficients");
  if (a > 0.0) {
    const double t = -b / (2.0 * a);
    return std::min(1.0, std::max(0.0, t));
  }
  return a + b < 0.0 ? 1.0 : 0.0;
}

FngwResult fngw_distance(const Graph& a, const Graph& b, const FngwParams& params,
                         const Matrix* init_plan) {
  require_valid(a);
  require_valid(b);
  FngwProblem problem(a, b, params);

  Matrix pi;
  if (init_plan != nullptr) {
    if (init_plan->rows() != problem.p.size() || init_plan->cols() != problem.q.size())
      throw ValidationError("fngw_distance: init plan shape mismatch");
    pi = *init_plan;
  } else {
    pi = problem.p * problem.q.transpose();
  }

  FngwResult result;
  double current = problem.energy(pi);
  result.trace.push_back(current);

  for (int it = 0; it < params.max_iters; ++it) {
    const Matrix grad = problem.gradient(pi);
    const LinearOtSolution lp = solve_linear_ot(grad, problem.p, problem.q);
    const auto [a_coef, b_coef] = problem.line_coefficients(pi, lp.plan.matrix);
    const double step = line_search_step(a_coef, b_coef);
    result.iterations = it + 1;
    if (step == 0.0) {
      result.converged = true;
      break;
    }
    pi += step * (lp.plan.matrix - pi);
    const double next = problem.energy(pi);
    result.trace.push_back(next);
    const double scale = std::max({std::abs(current), std::abs(next), 1e-16});
    const bool settled = std::abs(current - next) <= params.rel_tol * scale;
    current = next;
    if (settled) {
      result.converged = true;
      break;
    }
  }

  result.value = current;
  result.plan.matrix = std::move(pi);
  result.plan.row_marginal = problem.p;
  result.plan.col_marginal = problem.q;
  return result;
}

}  // namespace fngw
