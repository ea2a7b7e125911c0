#pragma once

// Independent test oracles. Everything here is deliberately written as plain
// brute force (quadruple loops, vertex enumeration, series expansions) and
// stays independent of the library implementations it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "fngw/common.hpp"
#include "fngw/graph.hpp"

namespace oracles {

using fngw::Matrix;
using fngw::Vector;

// Direct quadruple-sum energy of the quadratic terms plus the linear node
// term, straight from the definition.
inline double brute_force_energy(const fngw::Graph& a, const fngw::Graph& b, const Matrix& pi,
                                 double alpha, double beta, bool hamming = false) {
  const int n = a.node_count(), m = b.node_count();
  double node = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double d = 0.0;
      for (int s = 0; s < a.feature_dim(); ++s) {
        if (hamming) {
          if (a.node_features(i, s) != b.node_features(j, s)) d += 1.0;
        } else {
          const double diff = a.node_features(i, s) - b.node_features(j, s);
          d += diff * diff;
        }
      }
      node += d * pi(i, j);
    }
  }
  double quad = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < m; ++l) {
          double cell = 0.0;
          const double ds = a.structure(i, k) - b.structure(j, l);
          cell += beta * ds * ds;
          double de = 0.0;
          for (int t = 0; t < a.channel_count(); ++t) {
            const double diff = a.edge_channels[t](i, k) - b.edge_channels[t](j, l);
            de += diff * diff;
          }
          cell += alpha * de;
          quad += cell * pi(i, j) * pi(k, l);
        }
  return (1.0 - alpha - beta) * node + quad;
}

// (i,j) -> sum_{k,l} (A(i,k)-B(j,l))^2 pi(k,l)
inline Matrix brute_force_structure_contract(const Matrix& a, const Matrix& b, const Matrix& pi) {
  const Eigen::Index n = a.rows(), m = b.rows();
  Matrix out = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < m; ++l) {
          const double d = a(i, k) - b(j, l);
          out(i, j) += d * d * pi(k, l);
        }
  return out;
}

inline Matrix brute_force_edge_contract(const std::vector<Matrix>& ea,
                                        const std::vector<Matrix>& eb, const Matrix& pi) {
  const Eigen::Index n = ea.empty() ? pi.rows() : ea[0].rows();
  const Eigen::Index m = eb.empty() ? pi.cols() : eb[0].rows();
  Matrix out = Matrix::Zero(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < m; ++l) {
          double d = 0.0;
          for (std::size_t t = 0; t < ea.size(); ++t) {
            const double diff = ea[t](i, k) - eb[t](j, l);
            d += diff * diff;
          }
          out(i, j) += d * pi(k, l);
        }
  return out;
}

// O(n^3) dynamic-programming all-pairs shortest paths
inline Matrix floyd_warshall(const Matrix& adjacency, bool directed) {
  const Eigen::Index n = adjacency.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double w = adjacency(i, j);
      if (!directed) {
        const double back = adjacency(j, i);
        if (w <= 0.0) w = back;
        else if (back > 0.0) w = std::min(w, back);
      }
      if (w > 0.0) d(i, j) = std::min(d(i, j), w);
    }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

// truncated Taylor series of exp(-tau L) F
inline Matrix expm_series(const Matrix& lap, double tau, const Matrix& features, int terms = 30) {
  Matrix acc = features;
  Matrix term = features;
  for (int k = 1; k <= terms; ++k) {
    term = (-tau / k) * (lap * term);
    acc += term;
  }
  return acc;
}

// LP oracle: enumerate every basis (spanning tree of the bipartite support),
// solve the flows on the tree, keep the best feasible objective.
inline double lp_vertex_enumeration(const Matrix& cost, const Vector& p, const Vector& q) {
  const int n = static_cast<int>(p.size()), m = static_cast<int>(q.size());
  const int cells = n * m, basis_size = n + m - 1, nodes = n + m;
  std::vector<int> pick(basis_size);
  std::iota(pick.begin(), pick.end(), 0);
  double best = std::numeric_limits<double>::infinity();

  auto evaluate = [&](const std::vector<int>& chosen) {
    // union-find acyclicity + connectivity
    std::vector<int> root(nodes);
    std::iota(root.begin(), root.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    for (int cell : chosen) {
      const int u = cell / m, v = n + cell % m;
      const int ru = find(u), rv = find(v);
      if (ru == rv) return;  // cycle
      root[ru] = rv;
    }
    // leaf elimination on the tree
    std::vector<std::vector<int>> adj(nodes);
    for (int cell : chosen) {
      adj[cell / m].push_back(n + cell % m);
      adj[n + cell % m].push_back(cell / m);
    }
    std::vector<double> resid(nodes);
    for (int i = 0; i < n; ++i) resid[i] = p(i);
    for (int j = 0; j < m; ++j) resid[n + j] = q(j);
    std::vector<int> deg(nodes);
    std::vector<char> done(nodes, 0);
    std::vector<int> stack;
    for (int x = 0; x < nodes; ++x) {
      deg[x] = static_cast<int>(adj[x].size());
      if (deg[x] == 1) stack.push_back(x);
    }
    double objective = 0.0;
    double min_flow = 0.0;
    int processed = 0;
    while (!stack.empty() && processed < nodes - 1) {
      const int x = stack.back();
      stack.pop_back();
      if (done[x]) continue;
      int y = -1;
      for (int cand : adj[x])
        if (!done[cand]) {
          y = cand;
          break;
        }
      if (y < 0) break;
      const double f = resid[x];
      min_flow = std::min(min_flow, f);
      const int row = x < n ? x : y, col = x < n ? y - n : x - n;
      objective += f * cost(row, col);
      resid[y] -= f;
      done[x] = 1;
      ++processed;
      if (--deg[y] == 1) stack.push_back(y);
    }
    if (processed == nodes - 1 && min_flow >= -1e-12) best = std::min(best, objective);
  };

  // iterate all C(cells, basis_size) combinations
  while (true) {
    evaluate(pick);
    int i = basis_size - 1;
    while (i >= 0 && pick[i] == cells - basis_size + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < basis_size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

// Jonker-Volgenant style shortest augmenting path assignment, O(n^3)
inline double hungarian_min_cost(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // column -> row, 1-based
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    std::vector<int> way(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

// exactly feasible vertex plan via the north-west corner rule
inline Matrix northwest_plan(const Vector& p, const Vector& q) {
  const int n = static_cast<int>(p.size()), m = static_cast<int>(q.size());
  Matrix plan = Matrix::Zero(n, m);
  Vector a = p, b = q;
  int i = 0, j = 0;
  while (true) {
    const double x = std::min(a(i), b(j));
    plan(i, j) = x;
    a(i) -= x;
    b(j) -= x;
    if (i == n - 1 && j == m - 1) break;
    if (a(i) <= 0.0 && i < n - 1) ++i;
    else if (j < m - 1) ++j;
    else ++i;
  }
  return plan;
}

inline Vector random_histogram(fngw::Rng& rng, int n) {
  Vector h(n);
  for (int i = 0; i < n; ++i) h(i) = 0.1 + rng.uniform();
  return h / h.sum();
}

// generic feasible plan: convex mix of a vertex and the product coupling
inline Matrix random_feasible_plan(fngw::Rng& rng, const Vector& p, const Vector& q) {
  const double theta = rng.uniform(0.2, 0.8);
  Vector pp = p;
  // permute the supply order fed to the vertex for variety
  std::vector<int> perm(p.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
  Vector shuffled(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) shuffled(i) = p(perm[i]);
  Matrix vertex_perm = northwest_plan(shuffled, q);
  Matrix vertex = Matrix::Zero(p.size(), q.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) vertex.row(perm[i]) = vertex_perm.row(i);
  return theta * vertex + (1.0 - theta) * (p * q.transpose());
}

// adjusted Rand index between two labelings
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(ka, kb);
  for (int i = 0; i < n; ++i) table(a[i], b[i])++;
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) sum_ij += choose2(table(i, j));
  for (int i = 0; i < ka; ++i) sum_a += choose2(table.row(i).sum());
  for (int j = 0; j < kb; ++j) sum_b += choose2(table.col(j).sum());
  const double total = choose2(n);
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

// random dense graph with real entries; dyadic=true snaps every entry to a
// grid of multiples of 1/16 so fp arithmetic on the instance is exact
inline fngw::Graph random_graph(fngw::Rng& rng, int n, int feat_dim, int channels,
                                bool dyadic = false, bool uniform_weights_only = false) {
  auto draw = [&](double lo, double hi) {
    double x = rng.uniform(lo, hi);
    if (dyadic) x = std::round(x * 16.0) / 16.0;
    return x;
  };
  fngw::Graph g;
  g.node_features.resize(n, feat_dim);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < feat_dim; ++s) g.node_features(i, s) = draw(-1.0, 1.0);
  g.structure.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.structure(i, j) = draw(0.0, 1.0);
  g.edge_channels.assign(channels, Matrix());
  for (int t = 0; t < channels; ++t) {
    g.edge_channels[t].resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g.edge_channels[t](i, j) = draw(-1.0, 1.0);
  }
  if (uniform_weights_only || dyadic) {
    g.weights = fngw::uniform_weights(n);
  } else {
    g.weights = random_histogram(rng, n);
  }
  return g;
}

}  // namespace oracles
