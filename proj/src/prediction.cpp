#include "fngw/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fngw {

void validate_model(const PredictionModel& model) {
  const Eigen::Index n = model.gram_train.rows();
  if (n < 1 || model.gram_train.cols() != n)
    throw ValidationError("prediction model: gram_train must be square and nonempty");
  if ((model.gram_train - model.gram_train.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("prediction model: gram_train must be symmetric within 1e-9");
  if (!(model.ridge_lambda > 0.0))
    throw ValidationError("prediction model: ridge_lambda must be positive");
  if (static_cast<Eigen::Index>(model.train_outputs.size()) != n)
    throw ValidationError("prediction model: train_outputs length must match gram_train");
  if (model.barycenter_nodes < 1)
    throw ValidationError("prediction model: barycenter_nodes must be >= 1");
  if (model.top_weights < 1) throw ValidationError("prediction model: top_weights must be >= 1");
}

Vector ridge_weights(const PredictionModel& model, const Vector& k_x) {
  validate_model(model);
  const Eigen::Index n = model.gram_train.rows();
  if (k_x.size() != n) throw ValidationError("ridge_weights: kernel column length mismatch");
  Matrix system = model.gram_train;
  system.diagonal().array() += static_cast<double>(n) * model.ridge_lambda;
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(system);
    std::ostringstream oss;
    oss << "ridge_weights: Cholesky factorization failed; smallest eigenvalue estimate "
        << (eig.info() == Eigen::Success ? eig.eigenvalues().minCoeff()
                                         : std::numeric_limits<double>::quiet_NaN());
    throw SolverError(oss.str());
  }
  return llt.solve(k_x);
}

Graph predict_relaxed(const PredictionModel& model, const Vector& k_x) {
  const Vector gamma = ridge_weights(model, k_x);
  const int keep = std::min<int>(model.top_weights, static_cast<int>(gamma.size()));
  std::vector<int> order(gamma.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gamma(a) > gamma(b); });
  order.resize(keep);

  Vector raw(keep);
  for (int i = 0; i < keep; ++i) raw(i) = std::max(0.0, gamma(order[i]));
  const double total = raw.sum();
  if (total <= 0.0)
    throw ValidationError("predict_relaxed: all surrogate weights nonpositive (degenerate kernel)");
  raw /= total;

  std::vector<Graph> selected;
  selected.reserve(keep);
  for (int idx : order) selected.push_back(model.train_outputs[idx]);

  BarycenterConfig cfg = model.decode_config;
  cfg.node_count = model.barycenter_nodes;
  cfg.weights = uniform_weights(model.barycenter_nodes);
  cfg.gamma_sparsity = 0.0;
  cfg.lambda_weights.assign(raw.data(), raw.data() + keep);
  return fngw_barycenter(selected, model.decode_params, cfg).barycenter;
}

std::vector<CandidateRank> decode_candidates(const Graph& relaxed,
                                             const std::vector<Graph>& candidates,
                                             const FngwParams& params) {
  if (candidates.empty()) throw ValidationError("decode_candidates: empty candidate set");
  std::vector<CandidateRank> ranks(candidates.size());
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ranks[i].index = static_cast<int>(i);
    try {
      ranks[i].value = fngw_distance(candidates[i], relaxed, params).value;
    } catch (const std::exception&) {
      ranks[i].failed = true;
      ranks[i].value = std::numeric_limits<double>::infinity();
    }
  }
  std::stable_sort(ranks.begin(), ranks.end(), [](const CandidateRank& a, const CandidateRank& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.value != b.value) return a.value < b.value;
    return a.index < b.index;
  });
  return ranks;
}

double top_k_accuracy(const std::vector<std::vector<int>>& rankings,
                      const std::vector<int>& truths, int k) {
  if (k < 1) throw ValidationError("top_k_accuracy: k must be >= 1");
  if (rankings.size() != truths.size())
    throw ValidationError("top_k_accuracy: rankings / truths length mismatch");
  if (rankings.empty()) return 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const auto& ranked = rankings[i];
    const int limit = std::min<int>(k, static_cast<int>(ranked.size()));
    for (int r = 0; r < limit; ++r) {
      if (ranked[r] == truths[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

namespace {

Eigen::Index nearest_row(const std::vector<Vector>& vocab, const Vector& value) {
  Eigen::Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    const double d = (vocab[v] - value).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<Eigen::Index>(v);
    }
  }
  return best;
}

}  // namespace

Graph discretize_graph(const Graph& relaxed, const std::vector<Vector>& feature_vocab,
                       const std::vector<Vector>& edge_vocab, double structure_threshold) {
  Graph out = relaxed;
  out.structure = (relaxed.structure.array() >= structure_threshold).cast<double>();
  const int n = relaxed.node_count();
  if (!feature_vocab.empty() && relaxed.feature_dim() > 0) {
    for (int i = 0; i < n; ++i)
      out.node_features.row(i) =
          feature_vocab[nearest_row(feature_vocab, relaxed.node_features.row(i).transpose())]
              .transpose();
  }
  if (!edge_vocab.empty() && relaxed.channel_count() > 0) {
    const int channels = relaxed.channel_count();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vector slice(channels);
        for (int t = 0; t < channels; ++t) slice(t) = relaxed.edge_channels[t](i, j);
        const Vector& snapped = edge_vocab[nearest_row(edge_vocab, slice)];
        for (int t = 0; t < channels; ++t) out.edge_channels[t](i, j) = snapped(t);
      }
    }
  }
  return out;
}

Matrix gaussian_kernel(const Matrix& rows_x, const Matrix& rows_y, double gamma) {
  if (rows_x.cols() != rows_y.cols())
    throw ValidationError("gaussian_kernel: feature dimension mismatch");
  if (!(gamma > 0.0)) throw ValidationError("gaussian_kernel: gamma must be positive");
  Matrix out(rows_x.rows(), rows_y.rows());
  for (Eigen::Index i = 0; i < rows_x.rows(); ++i)
    for (Eigen::Index j = 0; j < rows_y.rows(); ++j)
      out(i, j) = std::exp(-gamma * (rows_x.row(i) - rows_y.row(j)).squaredNorm());
  return out;
}

}  // namespace fngw
