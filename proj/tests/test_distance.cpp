#include <doctest.h>

#include "fngw/distance.hpp"
#include "fngw/generate.hpp"
#include "fngw/kernels.hpp"
#include "oracles.hpp"

using namespace fngw;

namespace {

FngwParams loose_params(double alpha, double beta) {
  FngwParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.allow_no_node_features = true;
  p.allow_no_edge_features = true;
  return p;
}

TransportPlan feasible_plan(Rng& rng, const Graph& a, const Graph& b) {
  TransportPlan plan;
  plan.matrix = oracles::random_feasible_plan(rng, a.weights, b.weights);
  plan.row_marginal = a.weights;
  plan.col_marginal = b.weights;
  return plan;
}

}  // namespace

TEST_CASE("node cost matrices") {
  Matrix f(1, 1), g(2, 1);
  f << 0.0;
  g << 0.0, 1.0;
  const Matrix m = node_cost_matrix(f, g, NodeMetric::SquaredEuclidean);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 1.0);

  Matrix fh(1, 2), gh(1, 2);
  fh << 1, 2;
  gh << 1, 3;
  CHECK(node_cost_matrix(fh, gh, NodeMetric::Hamming)(0, 0) == 1.0);

  Rng rng(5);
  Matrix fr(5, 3), gr(4, 3);
  for (int i = 0; i < 5; ++i)
    for (int s = 0; s < 3; ++s) fr(i, s) = rng.uniform(-1, 1);
  for (int i = 0; i < 4; ++i)
    for (int s = 0; s < 3; ++s) gr(i, s) = rng.uniform(-1, 1);
  const Matrix got = node_cost_matrix(fr, gr, NodeMetric::SquaredEuclidean);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      double want = 0.0;
      for (int s = 0; s < 3; ++s) {
        const double d = fr(i, s) - gr(j, s);
        want += d * d;
      }
      CHECK(got(i, j) == doctest::Approx(want).epsilon(1e-12));
    }

  Matrix wrong(2, 4);
  CHECK_THROWS_AS(node_cost_matrix(fr, wrong, NodeMetric::SquaredEuclidean), ValidationError);
}

TEST_CASE("edge tensor contraction") {
  Rng rng(9);
  SUBCASE("all-zero tensors contract to zero") {
    std::vector<Matrix> ea(2, Matrix::Zero(3, 3)), eb(2, Matrix::Zero(4, 4));
    const Matrix pi = Matrix::Constant(3, 4, 1.0 / 12);
    const Matrix g = kernels::slice_sq_norms(ea, 3), h = kernels::slice_sq_norms(eb, 4);
    CHECK(edge_tensor_contract(ea, eb, pi, g, h).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("constant tensors cancel exactly on a dyadic instance") {
    const int n = 4, m = 4;
    std::vector<Matrix> ea(2, Matrix::Constant(n, n, 0.5)), eb(2, Matrix::Constant(m, m, 0.5));
    const Matrix pi = oracles::northwest_plan(uniform_weights(n), uniform_weights(m));
    const Matrix g = kernels::slice_sq_norms(ea, n), h = kernels::slice_sq_norms(eb, m);
    CHECK(edge_tensor_contract(ea, eb, pi, g, h).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("constant tensors cancel within fp noise for generic values") {
    const int n = 3, m = 5;
    std::vector<Matrix> ea(2, Matrix::Constant(n, n, 0.7)), eb(2, Matrix::Constant(m, m, 0.7));
    const Matrix pi = oracles::random_feasible_plan(rng, oracles::random_histogram(rng, n),
                                                    oracles::random_histogram(rng, m));
    const Matrix g = kernels::slice_sq_norms(ea, n), h = kernels::slice_sq_norms(eb, m);
    CHECK(edge_tensor_contract(ea, eb, pi, g, h).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("matches the quadruple-loop oracle on the product coupling") {
    const int n = 6, m = 5, t = 3;
    const Graph a = oracles::random_graph(rng, n, 0, t);
    const Graph b = oracles::random_graph(rng, m, 0, t);
    const Matrix pi = a.weights * b.weights.transpose();
    const Matrix g = kernels::slice_sq_norms(a.edge_channels, n);
    const Matrix h = kernels::slice_sq_norms(b.edge_channels, m);
    const Matrix got = edge_tensor_contract(a.edge_channels, b.edge_channels, pi, g, h);
    const Matrix want = oracles::brute_force_edge_contract(a.edge_channels, b.edge_channels, pi);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("structure contraction") {
  SUBCASE("zero matrices") {
    const Matrix pi = Matrix::Constant(2, 2, 0.25);
    const Matrix z2 = Matrix::Zero(2, 2);
    CHECK(structure_contract(z2, z2, pi, z2, z2).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single-pair arithmetic") {
    Matrix a(1, 1), b(1, 1), pi(1, 1);
    a << 2.0;
    b << 5.0;
    pi << 1.0;
    const Matrix got = structure_contract(a, b, pi, a.cwiseProduct(a), b.cwiseProduct(b));
    CHECK(got(0, 0) == 9.0);
  }
  SUBCASE("matches the quadruple-loop oracle") {
    Rng rng(21);
    const Graph a = oracles::random_graph(rng, 7, 0, 0);
    const Graph b = oracles::random_graph(rng, 6, 0, 0);
    const Matrix pi = oracles::random_feasible_plan(rng, a.weights, b.weights);
    const Matrix got = structure_contract(a.structure, b.structure, pi,
                                          a.structure.cwiseProduct(a.structure),
                                          b.structure.cwiseProduct(b.structure));
    const Matrix want = oracles::brute_force_structure_contract(a.structure, b.structure, pi);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fngw cost") {
  SUBCASE("identity with the diagonal plan is exactly zero on integral graphs") {
    // power-of-two node count keeps every fp product exact
    CircleParams params;
    params.min_nodes = 16;
    params.max_nodes = 16;
    const Graph g = generate_circle_graphs(params, 3)[0];
    TransportPlan diag;
    diag.matrix = Matrix::Identity(16, 16) / 16.0;
    diag.row_marginal = g.weights;
    diag.col_marginal = g.weights;
    CHECK(fngw_cost(g, g, diag, loose_params(0.4, 0.3)) == 0.0);
  }
  SUBCASE("single-node forced coupling") {
    Graph a = make_graph(Matrix::Zero(1, 1), Matrix::Zero(1, 1), {Matrix::Zero(1, 1)});
    Graph b = a;
    b.node_features(0, 0) = 1.0;
    b.edge_channels[0](0, 0) = 2.0;
    TransportPlan plan;
    plan.matrix = Matrix::Constant(1, 1, 1.0);
    plan.row_marginal = a.weights;
    plan.col_marginal = b.weights;
    CHECK(fngw_cost(a, b, plan, loose_params(0.5, 0.25)) == 2.25);
  }
  SUBCASE("matches the brute-force energy oracle") {
    Rng rng(33);
    for (int rep = 0; rep < 10; ++rep) {
      const Graph a = oracles::random_graph(rng, 5, 2, 2);
      const Graph b = oracles::random_graph(rng, 4, 2, 2);
      const TransportPlan plan = feasible_plan(rng, a, b);
      const double got = fngw_cost(a, b, plan, loose_params(0.3, 0.4));
      const double want = oracles::brute_force_energy(a, b, plan.matrix, 0.3, 0.4);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }
  SUBCASE("invalid plans are rejected") {
    Rng rng(35);
    const Graph a = oracles::random_graph(rng, 3, 1, 1);
    const Graph b = oracles::random_graph(rng, 3, 1, 1);
    TransportPlan plan = feasible_plan(rng, a, b);
    plan.matrix(0, 0) += 0.2;
    CHECK_THROWS_AS(fngw_cost(a, b, plan, loose_params(0.3, 0.3)), ValidationError);
  }
}

TEST_CASE("fngw cost is nonnegative and symmetric under plan transposition") {
  Rng rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    const bool dyadic = rep % 2 == 0;
    // power-of-two sizes keep uniform weights exactly representable
    const Graph a = oracles::random_graph(rng, 4, 2, 2, dyadic);
    const Graph b = oracles::random_graph(rng, dyadic ? 8 : 5, 2, 2, dyadic);
    TransportPlan plan = feasible_plan(rng, a, b);
    if (dyadic) {
      plan.matrix = oracles::northwest_plan(a.weights, b.weights);
    }
    TransportPlan transposed;
    transposed.matrix = plan.matrix.transpose();
    transposed.row_marginal = b.weights;
    transposed.col_marginal = a.weights;
    const auto params = loose_params(0.35, 0.25);
    const double forward = fngw_cost(a, b, plan, params);
    const double backward = fngw_cost(b, a, transposed, params);
    CHECK(forward >= 0.0);
    if (dyadic) {
      CHECK(forward == backward);  // every intermediate is exact
    } else {
      CHECK(forward == doctest::Approx(backward).epsilon(1e-14));
    }
  }
}

TEST_CASE("fngw gradient") {
  Rng rng(41);
  SUBCASE("alpha = beta = 0 reduces to the node cost") {
    const Graph a = oracles::random_graph(rng, 4, 2, 1);
    const Graph b = oracles::random_graph(rng, 5, 2, 1);
    const TransportPlan plan = feasible_plan(rng, a, b);
    const Matrix grad = fngw_gradient(a, b, plan, loose_params(0.0, 0.0));
    const Matrix m = node_cost_matrix(a.node_features, b.node_features,
                                      NodeMetric::SquaredEuclidean);
    CHECK(grad == m);
  }
  SUBCASE("symmetric inputs reduce to the doubled contraction form") {
    Graph a = oracles::random_graph(rng, 5, 2, 2);
    Graph b = oracles::random_graph(rng, 4, 2, 2);
    a.structure = (a.structure + a.structure.transpose()).eval();
    b.structure = (b.structure + b.structure.transpose()).eval();
    for (auto& c : a.edge_channels) c = (c + c.transpose()).eval();
    for (auto& c : b.edge_channels) c = (c + c.transpose()).eval();
    const TransportPlan plan = feasible_plan(rng, a, b);
    const auto params = loose_params(0.3, 0.35);
    const Matrix grad = fngw_gradient(a, b, plan, params);
    const CostFactors f = make_cost_factors(a, b, params.node_metric);
    const Matrix want =
        (1 - params.alpha - params.beta) * f.node_cost +
        2 * params.beta *
            structure_contract(a.structure, b.structure, plan.matrix, f.g_struct, f.h_struct) +
        2 * params.alpha *
            edge_tensor_contract(a.edge_channels, b.edge_channels, plan.matrix, f.g_edge, f.h_edge);
    CHECK((grad - want).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("matches central finite differences on asymmetric inputs") {
    for (int rep = 0; rep < 5; ++rep) {
      const Graph a = oracles::random_graph(rng, 4, 2, 2);
      const Graph b = oracles::random_graph(rng, 3, 2, 2);
      const auto params = loose_params(0.4, 0.3);
      const FngwProblem problem(a, b, params);
      Matrix pi = oracles::random_feasible_plan(rng, a.weights, b.weights);
      const Matrix grad = problem.gradient(pi);
      const double h = 1e-6;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 3; ++j) {
          Matrix hi = pi, lo = pi;
          hi(i, j) += h;
          lo(i, j) -= h;
          const double fd = (problem.energy(hi) - problem.energy(lo)) / (2 * h);
          const double scale = std::max(std::abs(fd), std::abs(grad(i, j)));
          if (scale > 1e-8) {
            CHECK(std::abs(fd - grad(i, j)) / scale <= 1e-5);
          }
        }
      }
    }
  }
}

TEST_CASE("line search coefficients and step") {
  Rng rng(47);
  SUBCASE("identical plans give zero coefficients") {
    const Graph a = oracles::random_graph(rng, 4, 1, 1);
    const Graph b = oracles::random_graph(rng, 4, 1, 1);
    const TransportPlan plan = feasible_plan(rng, a, b);
    const auto [ca, cb] = line_search_coefficients(a, b, plan, plan, loose_params(0.4, 0.3));
    CHECK(ca == 0.0);
    CHECK(cb == 0.0);
  }
  SUBCASE("linear objective has zero curvature") {
    const Graph a = oracles::random_graph(rng, 4, 2, 1);
    const Graph b = oracles::random_graph(rng, 5, 2, 1);
    const TransportPlan p0 = feasible_plan(rng, a, b);
    TransportPlan p1 = p0;
    p1.matrix = oracles::northwest_plan(a.weights, b.weights);
    const auto [ca, cb] = line_search_coefficients(a, b, p0, p1, loose_params(0.0, 0.0));
    CHECK(ca == 0.0);
    const Matrix m =
        node_cost_matrix(a.node_features, b.node_features, NodeMetric::SquaredEuclidean);
    CHECK(cb == doctest::Approx(m.cwiseProduct(p1.matrix - p0.matrix).sum()).epsilon(1e-12));
  }
  SUBCASE("three-point quadratic identity") {
    for (int rep = 0; rep < 10; ++rep) {
      const Graph a = oracles::random_graph(rng, 5, 2, 2);
      const Graph b = oracles::random_graph(rng, 4, 2, 2);
      const auto params = loose_params(0.35, 0.3);
      const FngwProblem problem(a, b, params);
      const TransportPlan p0 = feasible_plan(rng, a, b);
      TransportPlan p1 = p0;
      p1.matrix = oracles::random_feasible_plan(rng, a.weights, b.weights);
      const auto [ca, cb] = problem.line_coefficients(p0.matrix, p1.matrix);
      const double c = problem.energy(p0.matrix);
      for (double t : {0.0, 0.37, 1.0}) {
        const Matrix at = p0.matrix + t * (p1.matrix - p0.matrix);
        CHECK(std::abs(ca * t * t + cb * t + c - problem.energy(at)) < 1e-10);
      }
    }
  }
  SUBCASE("step selection") {
    CHECK(line_search_step(1.0, -1.0) == 0.5);
    CHECK(line_search_step(-1.0, -1.0) == 1.0);
    CHECK(line_search_step(-1.0, 2.0) == 0.0);
    CHECK(line_search_step(2.0, -8.0) == 1.0);   // clamped minimizer
    CHECK(line_search_step(2.0, 8.0) == 0.0);    // clamped minimizer
    CHECK_THROWS_AS(line_search_step(std::numeric_limits<double>::quiet_NaN(), 0.0),
                    ValidationError);
  }
}

TEST_CASE("fngw distance solver") {
  Rng rng(53);
  SUBCASE("pure node term converges to the exact linear OT value in one step") {
    const Graph a = oracles::random_graph(rng, 5, 3, 1);
    const Graph b = oracles::random_graph(rng, 6, 3, 1);
    const auto params = loose_params(0.0, 0.0);
    const FngwResult sol = fngw_distance(a, b, params);
    const Matrix m =
        node_cost_matrix(a.node_features, b.node_features, NodeMetric::SquaredEuclidean);
    const auto lp = solve_linear_ot(m, a.weights, b.weights);
    CHECK(sol.value == doctest::Approx(lp.objective).epsilon(1e-10));
    CHECK(sol.converged);
  }
  SUBCASE("two single-node graphs use the forced plan") {
    Graph a = make_graph(Matrix::Zero(1, 1), Matrix::Zero(1, 1), {Matrix::Zero(1, 1)});
    Graph b = a;
    b.node_features(0, 0) = 1.0;
    b.edge_channels[0](0, 0) = 2.0;
    const FngwResult sol = fngw_distance(a, b, loose_params(0.5, 0.25));
    CHECK(sol.plan.matrix(0, 0) == 1.0);
    CHECK(sol.value == 2.25);
  }
  SUBCASE("recovers a permutation when node features dominate") {
    const int n = 6;
    Rng prng(61);
    Graph a = oracles::random_graph(prng, n, 1, 1, false, true);
    for (int i = 0; i < n; ++i) a.node_features(i, 0) = 10.0 * i;  // far apart
    std::vector<int> perm{3, 0, 5, 1, 4, 2};
    Graph b = a;
    for (int i = 0; i < n; ++i) {
      b.node_features.row(perm[i]) = a.node_features.row(i);
      for (int j = 0; j < n; ++j) {
        b.structure(perm[i], perm[j]) = a.structure(i, j);
        b.edge_channels[0](perm[i], perm[j]) = a.edge_channels[0](i, j);
      }
    }
    const FngwResult sol = fngw_distance(a, b, loose_params(0.2, 0.2));
    CHECK(sol.value <= 1e-9);
    Matrix want = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) want(i, perm[i]) = 1.0 / n;
    CHECK((sol.plan.matrix - want).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("trace is non-increasing") {
    for (int rep = 0; rep < 10; ++rep) {
      const Graph a = oracles::random_graph(rng, 6, 2, 2);
      const Graph b = oracles::random_graph(rng, 5, 2, 2);
      const FngwResult sol = fngw_distance(a, b, loose_params(0.45, 0.35));
      for (std::size_t i = 1; i < sol.trace.size(); ++i)
        CHECK(sol.trace[i] <= sol.trace[i - 1] + 1e-12);
      CHECK(sol.value >= 0.0);
    }
  }
  SUBCASE("feature dimension mismatches are rejected") {
    const Graph a = oracles::random_graph(rng, 3, 2, 1);
    const Graph b = oracles::random_graph(rng, 3, 3, 1);
    CHECK_THROWS_AS(fngw_distance(a, b, loose_params(0.3, 0.3)), ValidationError);
  }
  SUBCASE("missing node features require an acknowledgment flag") {
    const Graph a = oracles::random_graph(rng, 3, 0, 1);
    const Graph b = oracles::random_graph(rng, 3, 0, 1);
    FngwParams params;
    params.alpha = 0.5;
    params.beta = 0.5;
    params.allow_no_edge_features = true;
    CHECK_THROWS_AS(fngw_distance(a, b, params), ValidationError);
    params.allow_no_node_features = true;
    CHECK_NOTHROW(fngw_distance(a, b, params));
  }
}

TEST_CASE("relaxed triangle inequality on exhaustively solved instances") {
  // n <= 3 with uniform weights: global optimum by vertex enumeration
  Rng rng(67);
  auto global_optimum = [&](const Graph& x, const Graph& y, const FngwParams& params) {
    const int n = x.node_count(), m = y.node_count();
    // enumerate all spanning-tree vertices of the polytope via the oracle
    // used for the LP, evaluating the quadratic energy instead
    const int cells = n * m, basis = n + m - 1, nodes = n + m;
    std::vector<int> pick(basis);
    std::iota(pick.begin(), pick.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
      // build the candidate vertex
      std::vector<int> root(nodes);
      std::iota(root.begin(), root.end(), 0);
      std::function<int(int)> find = [&](int v) {
        while (root[v] != v) v = root[v] = root[root[v]];
        return v;
      };
      bool tree = true;
      for (int cell : pick) {
        const int ru = find(cell / m), rv = find(n + cell % m);
        if (ru == rv) {
          tree = false;
          break;
        }
        root[ru] = rv;
      }
      if (tree) {
        std::vector<std::vector<int>> adj(nodes);
        for (int cell : pick) {
          adj[cell / m].push_back(n + cell % m);
          adj[n + cell % m].push_back(cell / m);
        }
        std::vector<double> resid(nodes);
        for (int i = 0; i < n; ++i) resid[i] = x.weights(i);
        for (int j = 0; j < m; ++j) resid[n + j] = y.weights(j);
        std::vector<int> deg(nodes);
        std::vector<char> done(nodes, 0);
        std::vector<int> stack;
        for (int v = 0; v < nodes; ++v) {
          deg[v] = static_cast<int>(adj[v].size());
          if (deg[v] == 1) stack.push_back(v);
        }
        Matrix plan = Matrix::Zero(n, m);
        double min_flow = 0.0;
        int processed = 0;
        while (!stack.empty() && processed < nodes - 1) {
          const int v = stack.back();
          stack.pop_back();
          if (done[v]) continue;
          int other = -1;
          for (int cand : adj[v])
            if (!done[cand]) {
              other = cand;
              break;
            }
          if (other < 0) break;
          const double f = resid[v];
          min_flow = std::min(min_flow, f);
          if (v < n) plan(v, other - n) = f;
          else plan(other, v - n) = f;
          resid[other] -= f;
          done[v] = 1;
          ++processed;
          if (--deg[other] == 1) stack.push_back(other);
        }
        if (processed == nodes - 1 && min_flow >= -1e-12) {
          best = std::min(best,
                          oracles::brute_force_energy(x, y, plan.cwiseMax(0.0), params.alpha,
                                                      params.beta));
        }
      }
      int i = basis - 1;
      while (i >= 0 && pick[i] == cells - basis + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < basis; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
  };

  const auto params = loose_params(0.3, 0.3);
  for (int rep = 0; rep < 8; ++rep) {
    const Graph x = oracles::random_graph(rng, 3, 1, 1, false, true);
    const Graph y = oracles::random_graph(rng, 3, 1, 1, false, true);
    const Graph z = oracles::random_graph(rng, 3, 1, 1, false, true);
    const double xy = global_optimum(x, y, params);
    const double yz = global_optimum(y, z, params);
    const double xz = global_optimum(x, z, params);
    CHECK(xz <= 2.0 * (xy + yz) + 1e-9);
  }
}
