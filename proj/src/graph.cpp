#include "fngw/graph.hpp"

#include <cmath>
#include <sstream>

namespace fngw {

namespace {

// first non-finite entry of a matrix, if any
std::optional<std::string> find_non_finite(const Matrix& m, const std::string& name) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        std::ostringstream oss;
        oss << "non-finite entry at " << name << "(" << i << "," << j << ")";
        return oss.str();
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_graph(const Graph& g) {
  const Eigen::Index n = g.structure.rows();
  if (n < 1) return "graph must have at least one node";
  if (g.structure.cols() != n) {
    std::ostringstream oss;
    oss << "structure must be square, got " << g.structure.rows() << "x" << g.structure.cols();
    return oss.str();
  }
  if (g.node_features.rows() != n && !(g.node_features.size() == 0 && g.node_features.rows() == 0)) {
    std::ostringstream oss;
    oss << "node_features has " << g.node_features.rows() << " rows, expected " << n;
    return oss.str();
  }
  for (std::size_t t = 0; t < g.edge_channels.size(); ++t) {
    const Matrix& c = g.edge_channels[t];
    if (c.rows() != n || c.cols() != n) {
      std::ostringstream oss;
      oss << "edge channel " << t << " is " << c.rows() << "x" << c.cols() << ", expected " << n
          << "x" << n;
      return oss.str();
    }
  }
  if (g.weights.size() != n) {
    std::ostringstream oss;
    oss << "weights has length " << g.weights.size() << ", expected " << n;
    return oss.str();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(g.weights(i))) return "non-finite weight entry";
    if (g.weights(i) < 0.0) {
      std::ostringstream oss;
      oss << "negative weight " << g.weights(i) << " at node " << i;
      return oss.str();
    }
  }
  const double sum = g.weights.sum();
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream oss;
    oss.precision(17);
    oss << "weights sum " << sum;
    return oss.str();
  }
  if (auto err = find_non_finite(g.structure, "structure")) return err;
  if (g.node_features.size() > 0) {
    if (auto err = find_non_finite(g.node_features, "node_features")) return err;
  }
  for (std::size_t t = 0; t < g.edge_channels.size(); ++t) {
    if (auto err = find_non_finite(g.edge_channels[t], "edge_channels[" + std::to_string(t) + "]"))
      return err;
  }
  return std::nullopt;
}

void require_valid(const Graph& g) {
  if (auto err = validate_graph(g)) throw ValidationError("invalid graph: " + *err);
}

Graph make_graph(Matrix node_features, Matrix structure, std::vector<Matrix> edge_channels,
                 Vector weights) {
  Graph g;
  const int n = static_cast<int>(structure.rows());
  g.node_features = std::move(node_features);
  if (g.node_features.size() == 0 && g.node_features.rows() != n) g.node_features.resize(n, 0);
  g.structure = std::move(structure);
  g.edge_channels = std::move(edge_channels);
  g.weights = weights.size() == 0 ? uniform_weights(n) : std::move(weights);
  return g;
}

}  // namespace fngw
