#include "fngw/barycenter.hpp"

#include <cmath>
#include <limits>

#include "fngw/kernels.hpp"

namespace fngw {

namespace {

void check_positive_histogram(const Vector& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) <= 0.0)
      throw ValidationError("barycenter histogram has a zero entry at node " +
                            std::to_string(i));
}

std::vector<double> normalized_lambda(std::size_t k, const std::vector<double>& given) {
  if (given.empty()) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  if (given.size() != k) throw ValidationError("lambda_weights length must match the input count");
  double sum = 0.0;
  for (double w : given) {
    if (w < 0.0) throw ValidationError("lambda_weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("lambda_weights must sum to 1");
  return given;
}

}  // namespace

std::vector<Matrix> update_edge_tensor(const std::vector<Graph>& graphs,
                                       const std::vector<TransportPlan>& plans,
                                       const std::vector<double>& lambda, const Vector& p) {
  if (graphs.empty() || graphs.size() != plans.size() || graphs.size() != lambda.size())
    throw ValidationError("update_edge_tensor: inconsistent inputs");
  check_positive_histogram(p);
  const int n = static_cast<int>(p.size());
  const int channels = graphs[0].channel_count();
  const Matrix denom = p * p.transpose();
  std::vector<Matrix> out(channels, Matrix::Zero(n, n));
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const Matrix& pi = plans[k].matrix;
    for (int t = 0; t < channels; ++t)
      out[t] += lambda[k] * kernels::cross_product(pi, graphs[k].edge_channels[t], pi);
  }
  for (int t = 0; t < channels; ++t) out[t] = out[t].cwiseQuotient(denom);
  return out;
}

Matrix update_node_features(const std::vector<Graph>& graphs,
                            const std::vector<TransportPlan>& plans,
                            const std::vector<double>& lambda, const Vector& p) {
  if (graphs.empty() || graphs.size() != plans.size() || graphs.size() != lambda.size())
    throw ValidationError("update_node_features: inconsistent inputs");
  check_positive_histogram(p);
  const int n = static_cast<int>(p.size());
  Matrix out = Matrix::Zero(n, graphs[0].feature_dim());
  for (std::size_t k = 0; k < graphs.size(); ++k)
    out += lambda[k] * (plans[k].matrix * graphs[k].node_features);
  return p.cwiseInverse().asDiagonal() * out;
}

Matrix soft_threshold(const Matrix& a, double threshold) {
  if (threshold < 0.0) throw ValidationError("soft_threshold: negative threshold");
  return a.unaryExpr([threshold](double x) {
    const double shrunk = std::abs(x) - threshold;
    return shrunk > 0.0 ? (x > 0.0 ? shrunk : -shrunk) : 0.0;
  });
}

Matrix update_structure_prox(const Matrix& a_init, const std::vector<Graph>& graphs,
                             const std::vector<TransportPlan>& plans,
                             const std::vector<double>& lambda, const Vector& p, double beta,
                             double gamma_sparsity, double step, int iters) {
  if (!(step > 0.0)) throw ValidationError("update_structure_prox: step must be positive");
  if (gamma_sparsity < 0.0) throw ValidationError("update_structure_prox: negative sparsity");
  check_positive_histogram(p);
  const Matrix weight = p * p.transpose();
  Matrix target = Matrix::Zero(p.size(), p.size());
  for (std::size_t k = 0; k < graphs.size(); ++k)
    target += lambda[k] * kernels::cross_product(plans[k].matrix, graphs[k].structure,
                                                 plans[k].matrix);
  Matrix a = a_init;
  for (int it = 0; it < iters; ++it) {
    const Matrix grad = 2.0 * beta * (a.cwiseProduct(weight) - target);
    a = soft_threshold(a - step * grad, step * gamma_sparsity);
  }
  return a;
}

BarycenterResult fngw_barycenter(const std::vector<Graph>& graphs, const FngwParams& params,
                                 const BarycenterConfig& config) {
  if (graphs.empty()) throw ValidationError("fngw_barycenter: need at least one input graph");
  validate_params(params);
  for (const Graph& g : graphs) require_valid(g);
  const int feat_dim = graphs[0].feature_dim();
  const int channels = graphs[0].channel_count();
  for (const Graph& g : graphs)
    if (g.feature_dim() != feat_dim || g.channel_count() != channels)
      throw ValidationError("fngw_barycenter: inputs disagree on feature dimensions");
  if (feat_dim > 0 && params.node_metric != NodeMetric::SquaredEuclidean)
    throw ValidationError("fngw_barycenter: node feature block requires the squared-euclidean metric");
  if (config.node_count < 1) throw ValidationError("fngw_barycenter: node_count must be >= 1");

  const int n = config.node_count;
  const Vector p = config.weights.size() == 0 ? uniform_weights(n) : config.weights;
  if (p.size() != n) throw ValidationError("fngw_barycenter: histogram length mismatch");
  check_positive_histogram(p);
  const std::vector<double> lambda = normalized_lambda(graphs.size(), config.lambda_weights);

  Graph bary;
  bary.weights = p;
  if (config.init.has_value()) {
    const Graph& init = *config.init;
    if (init.node_count() != n || init.feature_dim() != feat_dim ||
        init.channel_count() != channels)
      throw ValidationError("fngw_barycenter: provided init has wrong shape");
    bary.node_features = init.node_features;
    bary.structure = init.structure;
    bary.edge_channels = init.edge_channels;
  } else {
    // feature rows drawn from the pooled input rows; structure and edge
    // channels start at the input means
    Rng rng(config.seed);
    bary.node_features.resize(n, feat_dim);
    if (feat_dim > 0) {
      std::vector<std::pair<int, int>> pool;
      for (std::size_t k = 0; k < graphs.size(); ++k)
        for (int i = 0; i < graphs[k].node_count(); ++i) pool.push_back({static_cast<int>(k), i});
      for (int i = 0; i < n; ++i) {
        const auto [k, row] = pool[rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1)];
        bary.node_features.row(i) = graphs[k].node_features.row(row);
      }
    }
    double struct_mean = 0.0;
    Vector channel_mean = Vector::Zero(channels);
    double cells = 0.0;
    for (const Graph& g : graphs) {
      struct_mean += g.structure.sum();
      for (int t = 0; t < channels; ++t) channel_mean(t) += g.edge_channels[t].sum();
      cells += static_cast<double>(g.node_count()) * g.node_count();
    }
    struct_mean /= cells;
    channel_mean /= cells;
    bary.structure = Matrix::Constant(n, n, struct_mean);
    bary.edge_channels.assign(channels, Matrix());
    for (int t = 0; t < channels; ++t) bary.edge_channels[t] = Matrix::Constant(n, n, channel_mean(t));
  }

  const double prox_step =
      config.prox_step > 0.0
          ? config.prox_step
          : (params.beta > 0.0 ? 0.9 / (2.0 * params.beta * p.maxCoeff() * p.maxCoeff()) : 0.0);

  BarycenterResult result;
  result.plans.resize(graphs.size());
  result.final_costs.assign(graphs.size(), 0.0);
  std::vector<bool> has_plan(graphs.size(), false);

  double previous = std::numeric_limits<double>::infinity();
  for (int round = 0; round < config.outer_iters; ++round) {
    double loss = 0.0;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      const Matrix* warm = has_plan[k] ? &result.plans[k].matrix : nullptr;
      FngwResult sol = fngw_distance(bary, graphs[k], params, warm);
      result.plans[k] = std::move(sol.plan);
      result.final_costs[k] = sol.value;
      has_plan[k] = true;
      loss += lambda[k] * sol.value;
    }
    if (config.gamma_sparsity > 0.0)
      loss += config.gamma_sparsity * bary.structure.cwiseAbs().sum();
    result.loss_trace.push_back(loss);
    result.rounds = round + 1;

    if (channels > 0) bary.edge_channels = update_edge_tensor(graphs, result.plans, lambda, p);
    if (feat_dim > 0) bary.node_features = update_node_features(graphs, result.plans, lambda, p);
    if (params.beta > 0.0)
      bary.structure =
          update_structure_prox(bary.structure, graphs, result.plans, lambda, p, params.beta,
                                config.gamma_sparsity, prox_step, config.prox_iters);

    const double scale = std::max({std::abs(previous), std::abs(loss), 1e-16});
    if (std::isfinite(previous) && std::abs(previous - loss) <= config.rel_tol * scale) break;
    previous = loss;
  }

  result.barycenter = std::move(bary);
  require_valid(result.barycenter);
  return result;
}

}  // namespace fngw
