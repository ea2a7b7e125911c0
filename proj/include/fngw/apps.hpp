#pragma once

#include <vector>

#include "fngw/barycenter.hpp"

namespace fngw {

struct PairwiseResult {
  Matrix distances;             // symmetric, zero diagonal
  std::vector<int> iterations;  // solver iterations per unordered pair, i < j row-major
};

// Full distance matrix: one solve per unordered pair (in parallel), diagonal
// fixed at 0, then mirrored. Failed pairs are reported with their indices.
PairwiseResult pairwise_distance_matrix(const std::vector<Graph>& dataset,
                                        const FngwParams& params);

// K(i,j) = exp(-gamma_kernel * distance(i,j)) over the pairwise matrix.
Matrix gram_matrix(const std::vector<Graph>& dataset, const FngwParams& params,
                   double gamma_kernel);

struct KmeansConfig {
  int max_iters = 20;
  std::uint64_t seed = 0;
  BarycenterConfig centroid;  // node_count overridden by centroid_size
};

struct KmeansResult {
  std::vector<int> assignments;
  std::vector<Graph> centroids;
  std::vector<double> inertia_trace;  // sum of assignment distances per Lloyd round
  int iterations = 0;
};

// Lloyd iterations with barycenter centroids: assign each graph to the
// nearest centroid, recompute each centroid as the uniform-weight barycenter
// of its members (warm-started from the previous centroid). Empty clusters
// are re-seeded from the worst-assigned sample. Initial centroids come from a
// seeded farthest-point pass over mean-node-feature summaries.
KmeansResult kmeans_cluster(const std::vector<Graph>& dataset, int k, int centroid_size,
                            const FngwParams& params, const KmeansConfig& config);

}  // namespace fngw
