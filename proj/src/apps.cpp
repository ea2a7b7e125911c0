#include "fngw/apps.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace fngw {

PairwiseResult pairwise_distance_matrix(const std::vector<Graph>& dataset,
                                        const FngwParams& params) {
  if (dataset.empty()) throw ValidationError("pairwise_distance_matrix: empty dataset");
  for (const Graph& g : dataset) require_valid(g);
  const int n = static_cast<int>(dataset.size());

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});

  PairwiseResult result;
  result.distances = Matrix::Zero(n, n);
  result.iterations.assign(pairs.size(), 0);
  std::vector<std::string> failures(pairs.size());

#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    try {
      const FngwResult sol = fngw_distance(dataset[i], dataset[j], params);
      result.distances(i, j) = sol.value;
      result.distances(j, i) = sol.value;
      result.iterations[k] = sol.iterations;
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  }

  std::ostringstream failed;
  bool any_failed = false;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!failures[k].empty()) {
      if (any_failed) failed << "; ";
      failed << "pair (" << pairs[k].first << "," << pairs[k].second << "): " << failures[k];
      any_failed = true;
    }
  }
  if (any_failed) throw SolverError("pairwise distances failed: " + failed.str());
  return result;
}

Matrix gram_matrix(const std::vector<Graph>& dataset, const FngwParams& params,
                   double gamma_kernel) {
  if (!(gamma_kernel > 0.0)) throw ValidationError("gram_matrix: gamma_kernel must be positive");
  const PairwiseResult pw = pairwise_distance_matrix(dataset, params);
  return (-gamma_kernel * pw.distances.array()).exp();
}

namespace {

// cheap per-graph summary for the farthest-point seeding
Matrix summary_rows(const std::vector<Graph>& dataset) {
  const int s = dataset[0].feature_dim();
  Matrix out(dataset.size(), std::max(1, s));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (s > 0)
      out.row(i) = dataset[i].node_features.colwise().mean();
    else
      out(i, 0) = static_cast<double>(dataset[i].node_count());
  }
  return out;
}

// deterministic node subsample of a dataset member as a centroid seed
Graph subsample_graph(const Graph& g, int size, Rng& rng) {
  std::vector<int> idx(size);
  if (g.node_count() >= size) {
    std::vector<int> pool(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) pool[i] = i;
    for (int i = 0; i < size; ++i) {
      const auto pick = static_cast<int>(rng.uniform_int(i, g.node_count() - 1));
      std::swap(pool[i], pool[pick]);
      idx[i] = pool[i];
    }
    std::sort(idx.begin(), idx.end());
  } else {
    for (int i = 0; i < size; ++i)
      idx[i] = static_cast<int>(rng.uniform_int(0, g.node_count() - 1));
  }
  Graph out;
  out.node_features.resize(size, g.feature_dim());
  out.structure.resize(size, size);
  out.edge_channels.assign(g.channel_count(), Matrix(size, size));
  for (int i = 0; i < size; ++i) {
    if (g.feature_dim() > 0) out.node_features.row(i) = g.node_features.row(idx[i]);
    for (int j = 0; j < size; ++j) {
      out.structure(i, j) = g.structure(idx[i], idx[j]);
      for (int t = 0; t < g.channel_count(); ++t)
        out.edge_channels[t](i, j) = g.edge_channels[t](idx[i], idx[j]);
    }
  }
  out.weights = uniform_weights(size);
  return out;
}

}  // namespace

KmeansResult kmeans_cluster(const std::vector<Graph>& dataset, int k, int centroid_size,
                            const FngwParams& params, const KmeansConfig& config) {
  if (k < 1) throw ValidationError("kmeans_cluster: k must be >= 1");
  if (static_cast<int>(dataset.size()) < k)
    throw ValidationError("kmeans_cluster: dataset smaller than k");
  if (centroid_size < 1) throw ValidationError("kmeans_cluster: centroid_size must be >= 1");
  for (const Graph& g : dataset) require_valid(g);
  const int n = static_cast<int>(dataset.size());

  // farthest-point seeding over the summary proxy
  Rng rng(config.seed);
  const Matrix summaries = summary_rows(dataset);
  std::vector<int> seeds;
  seeds.push_back(static_cast<int>(rng.uniform_int(0, n - 1)));
  while (static_cast<int>(seeds.size()) < k) {
    int best = -1;
    double best_dist = -1.0;
    for (int i = 0; i < n; ++i) {
      if (std::find(seeds.begin(), seeds.end(), i) != seeds.end()) continue;
      double nearest = std::numeric_limits<double>::infinity();
      for (int s : seeds)
        nearest = std::min(nearest, (summaries.row(i) - summaries.row(s)).squaredNorm());
      if (nearest > best_dist) {
        best_dist = nearest;
        best = i;
      }
    }
    seeds.push_back(best);
  }

  KmeansResult result;
  result.centroids.reserve(k);
  for (int c = 0; c < k; ++c)
    result.centroids.push_back(subsample_graph(dataset[seeds[c]], centroid_size, rng));
  result.assignments.assign(n, -1);

  BarycenterConfig centroid_cfg = config.centroid;
  centroid_cfg.node_count = centroid_size;
  centroid_cfg.weights = uniform_weights(centroid_size);
  centroid_cfg.lambda_weights.clear();

  Matrix dist(n, k);
  for (int round = 0; round < config.max_iters; ++round) {
    std::vector<std::string> failures(static_cast<std::size_t>(n) * k);
#pragma omp parallel for schedule(dynamic) num_threads(max_threads()) collapse(2)
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) {
        try {
          dist(i, c) = fngw_distance(dataset[i], result.centroids[c], params).value;
        } catch (const std::exception& e) {
          failures[static_cast<std::size_t>(i) * k + c] = e.what();
        }
      }
    }
    for (std::size_t f = 0; f < failures.size(); ++f)
      if (!failures[f].empty())
        throw SolverError("kmeans assignment failed for graph " + std::to_string(f / k) +
                          " vs centroid " + std::to_string(f % k) + ": " + failures[f]);

    std::vector<int> next(n);
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (dist(i, c) < dist(i, best)) best = c;
      next[i] = best;
      inertia += dist(i, best);
    }
    result.inertia_trace.push_back(inertia);
    result.iterations = round + 1;
    const bool unchanged = next == result.assignments;
    result.assignments = std::move(next);
    if (unchanged) break;

    for (int c = 0; c < k; ++c) {
      std::vector<Graph> members;
      for (int i = 0; i < n; ++i)
        if (result.assignments[i] == c) members.push_back(dataset[i]);
      if (members.empty()) {
        // re-seed from the worst-assigned sample
        int worst = 0;
        double worst_dist = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = dist(i, result.assignments[i]);
          if (d > worst_dist) {
            worst_dist = d;
            worst = i;
          }
        }
        result.centroids[c] = subsample_graph(dataset[worst], centroid_size, rng);
        continue;
      }
      centroid_cfg.init = result.centroids[c];  // warm start
      centroid_cfg.seed = config.seed;
      result.centroids[c] = fngw_barycenter(members, params, centroid_cfg).barycenter;
    }
  }
  return result;
}

}  // namespace fngw
