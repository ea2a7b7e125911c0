#include "fngw/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace fngw {

Matrix shortest_path_matrix(const Matrix& adjacency, bool directed, bool strict_unreachable) {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) throw ValidationError("shortest_path_matrix: adjacency must be square");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = adjacency(i, j);
      if (!std::isfinite(w) || w < 0.0)
        throw ValidationError("shortest_path_matrix: entries must be finite and nonnegative");
    }

  // effective weighted out-edges
  std::vector<std::vector<std::pair<int, double>>> edges(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double w = adjacency(i, j);
      if (!directed) {
        const double back = adjacency(j, i);
        if (w <= 0.0) w = back;
        else if (back > 0.0) w = std::min(w, back);
      }
      if (w > 0.0) edges[i].push_back({static_cast<int>(j), w});
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  Matrix dist = Matrix::Constant(n, n, inf);
  using Item = std::pair<double, int>;
  for (Eigen::Index s = 0; s < n; ++s) {
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    dist(s, s) = 0.0;
    heap.push({0.0, static_cast<int>(s)});
    while (!heap.empty()) {
      const auto [d, x] = heap.top();
      heap.pop();
      if (d > dist(s, x)) continue;
      for (const auto& [y, w] : edges[x]) {
        const double cand = d + w;
        if (cand < dist(s, y)) {
          dist(s, y) = cand;
          heap.push({cand, y});
        }
      }
    }
  }

  double max_finite = 0.0;
  bool unreachable = false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::isinf(dist(i, j))) unreachable = true;
      else max_finite = std::max(max_finite, dist(i, j));
    }
  if (unreachable) {
    if (strict_unreachable)
      throw ValidationError("shortest_path_matrix: graph has unreachable node pairs");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::isinf(dist(i, j))) dist(i, j) = max_finite;
  }
  return dist;
}

std::vector<Eigen::MatrixXi> wl_relabel(const std::vector<std::vector<int>>& labels,
                                        const std::vector<Matrix>& adjacency, int iterations) {
  if (labels.empty()) throw ValidationError("wl_relabel: empty dataset");
  if (labels.size() != adjacency.size())
    throw ValidationError("wl_relabel: labels / adjacency count mismatch");
  if (iterations < 0) throw ValidationError("wl_relabel: iterations must be >= 0");

  const std::size_t graphs = labels.size();
  std::vector<std::vector<std::vector<int>>> neighbors(graphs);
  std::vector<Eigen::MatrixXi> out(graphs);
  for (std::size_t g = 0; g < graphs; ++g) {
    const int n = static_cast<int>(labels[g].size());
    if (adjacency[g].rows() != n || adjacency[g].cols() != n)
      throw ValidationError("wl_relabel: adjacency shape mismatch at graph " + std::to_string(g));
    for (int i = 0; i < n; ++i)
      if (labels[g][i] < 0) throw ValidationError("wl_relabel: labels must be nonnegative");
    neighbors[g].resize(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && (adjacency[g](i, j) != 0.0 || adjacency[g](j, i) != 0.0))
          neighbors[g][i].push_back(j);
    out[g].resize(n, iterations + 1);
    for (int i = 0; i < n; ++i) out[g](i, 0) = labels[g][i];
  }

  std::vector<std::vector<int>> current(labels);
  for (int round = 1; round <= iterations; ++round) {
    // dense ids per round, assigned in dataset order of first appearance
    std::map<std::vector<int>, int> dictionary;
    int next_id = 0;
    std::vector<std::vector<int>> refined(graphs);
    for (std::size_t g = 0; g < graphs; ++g) {
      const int n = static_cast<int>(current[g].size());
      refined[g].resize(n);
      for (int i = 0; i < n; ++i) {
        std::vector<int> signature;
        signature.reserve(neighbors[g][i].size() + 1);
        signature.push_back(current[g][i]);
        std::vector<int> multiset;
        for (int j : neighbors[g][i]) multiset.push_back(current[g][j]);
        std::sort(multiset.begin(), multiset.end());
        signature.insert(signature.end(), multiset.begin(), multiset.end());
        auto [it, inserted] = dictionary.try_emplace(std::move(signature), next_id);
        if (inserted) ++next_id;
        refined[g][i] = it->second;
      }
    }
    for (std::size_t g = 0; g < graphs; ++g)
      for (int i = 0; i < static_cast<int>(refined[g].size()); ++i) out[g](i, round) = refined[g][i];
    current = std::move(refined);
  }
  return out;
}

Matrix wl_to_features(const Eigen::MatrixXi& labels) { return labels.cast<double>(); }

Matrix laplacian_diffuse(const Matrix& features, const Matrix& adjacency, double tau) {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n) throw ValidationError("laplacian_diffuse: adjacency must be square");
  if (features.rows() != n) throw ValidationError("laplacian_diffuse: feature rows mismatch");
  if (tau < 0.0) throw ValidationError("laplacian_diffuse: tau must be nonnegative");
  const double asym = (adjacency - adjacency.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream oss;
    oss << "laplacian_diffuse: adjacency asymmetric, max |A - A^T| = " << asym;
    throw ValidationError(oss.str());
  }

  Vector inv_sqrt_deg(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = adjacency.row(i).sum();
    inv_sqrt_deg(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Matrix lap = -(inv_sqrt_deg.asDiagonal() * adjacency * inv_sqrt_deg.asDiagonal());
  // isolated nodes get a zero row: diffusion leaves their features unchanged
  for (Eigen::Index i = 0; i < n; ++i)
    if (inv_sqrt_deg(i) > 0.0) lap(i, i) += 1.0;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  if (eig.info() != Eigen::Success) throw SolverError("laplacian_diffuse: eigendecomposition failed");
  const Vector decay = (-tau * eig.eigenvalues().array()).exp();
  return eig.eigenvectors() * decay.asDiagonal() * eig.eigenvectors().transpose() * features;
}

std::vector<Matrix> one_hot_edge_tensor(const std::vector<EdgeLabelTriplet>& triplets, int n,
                                        int vocab_size, const Vector& empty_edge_vector) {
  if (n < 1) throw ValidationError("one_hot_edge_tensor: n must be >= 1");
  if (vocab_size < 1) throw ValidationError("one_hot_edge_tensor: vocab_size must be >= 1");
  if (empty_edge_vector.size() != vocab_size)
    throw ValidationError("one_hot_edge_tensor: empty_edge_vector length must equal vocab_size");

  std::vector<Matrix> channels(vocab_size, Matrix::Zero(n, n));
  std::vector<char> labeled(static_cast<std::size_t>(n) * n, 0);
  for (const auto& [i, j, label] : triplets) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw ValidationError("one_hot_edge_tensor: node index out of range");
    if (label < 0 || label >= vocab_size) {
      std::ostringstream oss;
      oss << "one_hot_edge_tensor: label " << label << " out of range [0," << vocab_size << ")";
      throw ValidationError(oss.str());
    }
    char& seen = labeled[static_cast<std::size_t>(i) * n + j];
    if (seen) {
      std::ostringstream oss;
      oss << "one_hot_edge_tensor: duplicate triplet for pair (" << i << "," << j << ")";
      throw ValidationError(oss.str());
    }
    seen = 1;
    channels[label](i, j) = 1.0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!labeled[static_cast<std::size_t>(i) * n + j])
        for (int t = 0; t < vocab_size; ++t) channels[t](i, j) = empty_edge_vector(t);
  return channels;
}

Vector seeded_empty_edge_vector(int size, std::uint64_t seed) {
  if (size < 0) throw ValidationError("seeded_empty_edge_vector: negative size");
  Rng rng(seed);
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace fngw
