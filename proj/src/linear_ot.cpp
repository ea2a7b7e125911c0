#include "fngw/linear_ot.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <vector>

namespace fngw {

std::optional<std::string> validate_plan(const TransportPlan& plan, double tol) {
  const Eigen::Index n = plan.row_marginal.size(), m = plan.col_marginal.size();
  if (plan.matrix.rows() != n || plan.matrix.cols() != m) return "plan shape mismatch";
  if ((plan.matrix.array() < -1e-12).any()) return "negative plan entry";
  const Vector row_err = plan.matrix.rowwise().sum() - plan.row_marginal;
  const Vector col_err = plan.matrix.colwise().sum().transpose() - plan.col_marginal;
  const double worst = std::max(row_err.cwiseAbs().maxCoeff(), col_err.cwiseAbs().maxCoeff());
  if (worst > tol) {
    std::ostringstream oss;
    oss << "plan marginals off by " << worst;
    return oss.str();
  }
  return std::nullopt;
}

namespace {

// Dense transportation simplex. Nodes 0..n-1 are rows, n..n+m-1 are columns;
// the basis is a spanning tree over them with exactly n+m-1 arcs (cells).
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, const Vector& p, const Vector& q)
      : cost_(cost),
        n_(static_cast<int>(p.size())),
        m_(static_cast<int>(q.size())),
        nodes_(n_ + m_),
        supply_(p),
        demand_(q),
        flow_(Matrix::Zero(n_, m_)),
        basic_(static_cast<std::size_t>(n_) * m_, 0),
        adj_(nodes_),
        parent_(nodes_, -1),
        depth_(nodes_, 0),
        u_(n_),
        v_(m_) {
    pivot_cap_ = 50LL * (n_ + m_) * std::max(n_, m_);
    cost_scale_ = 1.0 + cost.cwiseAbs().maxCoeff();
  }

  LinearOtSolution solve(const Vector& orig_p, const Vector& orig_q) {
    perturb();
    northwest_init();
    rebuild_tree();

    const double enter_tol = 1e-11 * cost_scale_;
    while (true) {
      compute_potentials();
      int ei, ej;
      if (!find_entering(enter_tol, ei, ej)) break;
      if (++pivots_ > pivot_cap_) {
        std::ostringstream oss;
        oss << "linear OT pivot cap exceeded after " << pivots_ << " pivots";
        throw SolverError(oss.str());
      }
      pivot(ei, ej);
      rebuild_tree();
    }
    compute_potentials();

    Matrix plan = tree_flows(orig_p, orig_q);
    plan = plan.cwiseMax(0.0);
    certify(plan);
    round_to_marginals(plan, orig_p, orig_q);

    LinearOtSolution sol;
    sol.plan.matrix = std::move(plan);
    sol.plan.row_marginal = orig_p;
    sol.plan.col_marginal = orig_q;
    sol.objective = sol.plan.matrix.cwiseProduct(cost_).sum();
    sol.row_potentials = u_;
    sol.col_potentials = v_;
    sol.pivots = pivots_;
    return sol;
  }

 private:
  bool is_basic(int i, int j) const { return basic_[static_cast<std::size_t>(i) * m_ + j] != 0; }
  void set_basic(int i, int j, bool b) { basic_[static_cast<std::size_t>(i) * m_ + j] = b ? 1 : 0; }

  // Ascending perturbation of the supplies keeps the northwest chain free of
  // ties; the total is absorbed by the last demand so the problem stays
  // balanced. Removed again by tree_flows().
  void perturb() {
    const double total = supply_.sum();
    const double eps = total > 0 ? total * 1e-12 : 1e-12;
    double added = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double d = eps * (i + 1) / n_;
      supply_(i) += d;
      added += d;
    }
    demand_(m_ - 1) += added;
  }

  void northwest_init() {
    int i = 0, j = 0;
    Vector a = supply_, b = demand_;
    while (true) {
      const double x = std::min(a(i), b(j));
      flow_(i, j) = x;
      set_basic(i, j, true);
      adj_[i].push_back(n_ + j);
      adj_[n_ + j].push_back(i);
      a(i) -= x;
      b(j) -= x;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (a(i) <= 0.0 && i < n_ - 1) {
        ++i;
      } else if (j < m_ - 1) {
        ++j;
      } else {
        ++i;  // fp dust exhausted the demand side early; march down the last column
      }
    }
  }

  void rebuild_tree() {
    std::fill(parent_.begin(), parent_.end(), -1);
    std::fill(depth_.begin(), depth_.end(), 0);
    bfs_order_.clear();
    bfs_order_.reserve(nodes_);
    std::deque<int> queue{0};
    std::vector<char> seen(nodes_, 0);
    seen[0] = 1;
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      bfs_order_.push_back(x);
      for (int y : adj_[x]) {
        if (seen[y]) continue;
        seen[y] = 1;
        parent_[y] = x;
        depth_[y] = depth_[x] + 1;
        queue.push_back(y);
      }
    }
    if (static_cast<int>(bfs_order_.size()) != nodes_)
      throw SolverError("linear OT basis lost connectivity");
  }

  void compute_potentials() {
    u_(0) = 0.0;
    for (int x : bfs_order_) {
      if (x == 0) continue;
      const int par = parent_[x];
      if (x < n_) {
        u_(x) = cost_(x, par - n_) - v_(par - n_);
      } else {
        v_(x - n_) = cost_(par, x - n_) - u_(par);
      }
    }
  }

  bool find_entering(double tol, int& ei, int& ej) {
    double best = -tol;
    ei = -1;
    ej = -1;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < m_; ++j) {
        if (is_basic(i, j)) continue;
        const double rc = cost_(i, j) - u_(i) - v_(j);
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
        }
      }
    }
    return ei >= 0;
  }

  // cell of the tree arc between x and its parent
  std::pair<int, int> parent_cell(int x) const {
    const int par = parent_[x];
    return x < n_ ? std::pair<int, int>{x, par - n_} : std::pair<int, int>{par, x - n_};
  }

  void pivot(int ei, int ej) {
    // cycle: entering cell, then the tree path col-node -> lca -> row-node;
    // signs alternate along the sequence, entering cell gets +theta
    std::vector<std::pair<int, int>> cycle;
    cycle.emplace_back(ei, ej);
    int a = n_ + ej, b = ei;
    std::vector<std::pair<int, int>> up_a, up_b;
    while (depth_[a] > depth_[b]) {
      up_a.push_back(parent_cell(a));
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      up_b.push_back(parent_cell(b));
      b = parent_[b];
    }
    while (a != b) {
      up_a.push_back(parent_cell(a));
      a = parent_[a];
      up_b.push_back(parent_cell(b));
      b = parent_[b];
    }
    for (const auto& cell : up_a) cycle.push_back(cell);
    for (auto it = up_b.rbegin(); it != up_b.rend(); ++it) cycle.push_back(*it);

    double theta = std::numeric_limits<double>::infinity();
    std::pair<int, int> leaving{-1, -1};
    for (std::size_t k = 1; k < cycle.size(); k += 2) {
      const auto [ci, cj] = cycle[k];
      const double f = flow_(ci, cj);
      if (f < theta || (f == theta && cycle[k] < leaving)) {
        theta = f;
        leaving = cycle[k];
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const auto [ci, cj] = cycle[k];
      flow_(ci, cj) += (k % 2 == 0) ? theta : -theta;
    }
    flow_(leaving.first, leaving.second) = 0.0;

    set_basic(leaving.first, leaving.second, false);
    drop_arc(leaving.first, n_ + leaving.second);
    set_basic(ei, ej, true);
    adj_[ei].push_back(n_ + ej);
    adj_[n_ + ej].push_back(ei);
  }

  void drop_arc(int x, int y) {
    auto erase_from = [](std::vector<int>& lst, int val) {
      lst.erase(std::find(lst.begin(), lst.end(), val));
    };
    erase_from(adj_[x], y);
    erase_from(adj_[y], x);
  }

  // Re-solves the basic flows on the final tree with the unperturbed marginals
  // by leaf elimination; off-tree cells are zero.
  Matrix tree_flows(const Vector& p, const Vector& q) const {
    std::vector<double> resid(nodes_);
    for (int i = 0; i < n_; ++i) resid[i] = p(i);
    for (int j = 0; j < m_; ++j) resid[n_ + j] = q(j);
    std::vector<std::vector<int>> adj = adj_;
    std::vector<int> deg(nodes_);
    std::deque<int> leaves;
    for (int x = 0; x < nodes_; ++x) {
      deg[x] = static_cast<int>(adj[x].size());
      if (deg[x] == 1) leaves.push_back(x);
    }
    std::vector<char> done(nodes_, 0);
    Matrix out = Matrix::Zero(n_, m_);
    int processed = 0;
    while (!leaves.empty() && processed < nodes_ - 1) {
      const int x = leaves.front();
      leaves.pop_front();
      if (done[x]) continue;
      int y = -1;
      for (int cand : adj[x]) {
        if (!done[cand]) {
          y = cand;
          break;
        }
      }
      if (y < 0) break;
      const double f = resid[x];
      if (x < n_) {
        out(x, y - n_) = f;
      } else {
        out(y, x - n_) = f;
      }
      resid[y] -= f;
      resid[x] = 0.0;
      done[x] = 1;
      ++processed;
      if (--deg[y] == 1) leaves.push_back(y);
    }
    return out;
  }

  // One pass of row scaling, column scaling and a nonnegative rank-one
  // correction; restores exact marginals after the perturbation removal.
  static void round_to_marginals(Matrix& plan, const Vector& p, const Vector& q) {
    for (Eigen::Index i = 0; i < plan.rows(); ++i) {
      const double rs = plan.row(i).sum();
      if (rs > p(i) && rs > 0.0) plan.row(i) *= p(i) / rs;
    }
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      const double cs = plan.col(j).sum();
      if (cs > q(j) && cs > 0.0) plan.col(j) *= q(j) / cs;
    }
    Vector r = p - plan.rowwise().sum();
    Vector c = q - plan.colwise().sum().transpose();
    r = r.cwiseMax(0.0);
    c = c.cwiseMax(0.0);
    const double total = r.sum();
    if (total > 0.0) plan += r * c.transpose() / total;
  }

  void certify(const Matrix& plan) const {
    const double tol = 1e-8 * cost_scale_;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < m_; ++j) {
        const double rc = cost_(i, j) - u_(i) - v_(j);
        if (rc < -tol) throw SolverError("linear OT dual feasibility certificate failed");
        if (plan(i, j) > 1e-12 && std::abs(rc) > tol)
          throw SolverError("linear OT complementary slackness certificate failed");
      }
    }
  }

  const Matrix& cost_;
  int n_, m_, nodes_;
  Vector supply_, demand_;
  Matrix flow_;
  std::vector<char> basic_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> parent_, depth_, bfs_order_;
  Vector u_, v_;
  long long pivot_cap_;
  long long pivots_ = 0;
  double cost_scale_;
};

}  // namespace

LinearOtSolution solve_linear_ot(const Matrix& cost, const Vector& p, const Vector& q) {
  const Eigen::Index n = p.size(), m = q.size();
  if (n < 1 || m < 1) throw ValidationError("linear OT: empty marginal");
  if (cost.rows() != n || cost.cols() != m) throw ValidationError("linear OT: cost shape mismatch");
  if (!cost.allFinite()) throw ValidationError("linear OT: non-finite cost entry");
  if ((p.array() < 0).any() || (q.array() < 0).any())
    throw ValidationError("linear OT: negative marginal entry");
  const double gap = std::abs(p.sum() - q.sum());
  if (gap > 1e-9) {
    std::ostringstream oss;
    oss << "linear OT: infeasible marginals, sums differ by " << gap;
    throw ValidationError(oss.str());
  }
  TransportSimplex simplex(cost, p, q);
  return simplex.solve(p, q);
}

}  // namespace fngw
