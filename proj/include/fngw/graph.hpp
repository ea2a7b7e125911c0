#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fngw/common.hpp"

namespace fngw {

// A graph as a discrete measured tuple: per-node feature rows, a (possibly
// asymmetric) real structure matrix, per-ordered-pair edge feature vectors
// stored channel-wise, and a node weight histogram.
struct Graph {
  Matrix node_features;               // n x S, S >= 0
  Matrix structure;                   // n x n
  std::vector<Matrix> edge_channels;  // T matrices, each n x n
  Vector weights;                     // length n, simplex

  int node_count() const { return static_cast<int>(structure.rows()); }
  int feature_dim() const { return static_cast<int>(node_features.cols()); }
  int channel_count() const { return static_cast<int>(edge_channels.size()); }
};

enum class NodeMetric { SquaredEuclidean, Hamming };

// Returns an error description, or nullopt when all invariants hold:
// weights form a histogram (sum 1 within 1e-12, nonnegative), all blocks have
// shapes consistent with n, and every entry is finite.
std::optional<std::string> validate_graph(const Graph& g);

// Throws ValidationError with the same message instead.
void require_valid(const Graph& g);

// Convenience constructor with uniform weights and T zero channels.
Graph make_graph(Matrix node_features, Matrix structure, std::vector<Matrix> edge_channels,
                 Vector weights = Vector());

}  // namespace fngw
