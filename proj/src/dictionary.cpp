#include "fngw/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fngw/kernels.hpp"

namespace fngw {

namespace {

void check_dictionary(const Dictionary& dict) {
  if (dict.atoms.empty()) throw ValidationError("dictionary must contain at least one atom");
  for (const Graph& atom : dict.atoms) require_valid(atom);
  const int s = dict.atoms[0].feature_dim(), t = dict.atoms[0].channel_count();
  for (const Graph& atom : dict.atoms)
    if (atom.feature_dim() != s || atom.channel_count() != t)
      throw ValidationError("dictionary atoms disagree on feature dimensions");
}

// lifted atom blocks under fixed plans; reconstruction blocks are their
// w-weighted sums
struct LiftedAtoms {
  std::vector<Matrix> features;                // diag(1/p) plan_s F_s
  std::vector<Matrix> structures;              // plan_s A_s plan_s^T / (p p^T)
  std::vector<std::vector<Matrix>> edges;      // per atom, per channel
};

LiftedAtoms lift_atoms(const Dictionary& dict, const std::vector<TransportPlan>& plans,
                       const Vector& p) {
  const Matrix denom = p * p.transpose();
  const auto inv_p = p.cwiseInverse().asDiagonal();
  LiftedAtoms lifted;
  const std::size_t count = dict.atoms.size();
  lifted.features.resize(count);
  lifted.structures.resize(count);
  lifted.edges.resize(count);
  for (std::size_t s = 0; s < count; ++s) {
    const Graph& atom = dict.atoms[s];
    const Matrix& pi = plans[s].matrix;
    if (pi.rows() != p.size() || pi.cols() != atom.node_count())
      throw ValidationError("reconstruct_from_atoms: plan shape mismatch");
    lifted.features[s] = inv_p * (pi * atom.node_features);
    lifted.structures[s] = kernels::cross_product(pi, atom.structure, pi).cwiseQuotient(denom);
    lifted.edges[s].resize(atom.channel_count());
    for (int t = 0; t < atom.channel_count(); ++t)
      lifted.edges[s][t] =
          kernels::cross_product(pi, atom.edge_channels[t], pi).cwiseQuotient(denom);
  }
  return lifted;
}

Graph blend(const LiftedAtoms& lifted, const Vector& w, const Vector& p, int feat_dim,
            int channels) {
  const int n = static_cast<int>(p.size());
  Graph g;
  g.weights = p;
  g.node_features = Matrix::Zero(n, feat_dim);
  g.structure = Matrix::Zero(n, n);
  g.edge_channels.assign(channels, Matrix::Zero(n, n));
  for (Eigen::Index s = 0; s < w.size(); ++s) {
    g.node_features += w(s) * lifted.features[s];
    g.structure += w(s) * lifted.structures[s];
    for (int t = 0; t < channels; ++t) g.edge_channels[t] += w(s) * lifted.edges[s][t];
  }
  return g;
}

void check_simplex(const Vector& w) {
  if ((w.array() < -1e-10).any() || std::abs(w.sum() - 1.0) > 1e-9)
    throw ValidationError("weights must lie on the simplex");
}

}  // namespace

Graph reconstruct_from_atoms(const Vector& w, const Dictionary& dict,
                             const std::vector<TransportPlan>& atom_plans, const Vector& p) {
  check_dictionary(dict);
  check_simplex(w);
  if (static_cast<int>(w.size()) != dict.atom_count() ||
      static_cast<int>(atom_plans.size()) != dict.atom_count())
    throw ValidationError("reconstruct_from_atoms: weight / plan count mismatch");
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) <= 0.0) throw ValidationError("reconstruct_from_atoms: zero histogram entry");
  const LiftedAtoms lifted = lift_atoms(dict, atom_plans, p);
  return blend(lifted, w, p, dict.atoms[0].feature_dim(), dict.atoms[0].channel_count());
}

Unmixing unmix(const Graph& g, const Dictionary& dict, double lambda_reg,
               const FngwParams& params, const UnmixConfig& config) {
  require_valid(g);
  check_dictionary(dict);
  if (lambda_reg < 0.0) throw ValidationError("unmix: lambda_reg must be nonnegative");
  validate_params(params);

  const int atom_count = dict.atom_count();
  const Vector p = g.weights;
  const int feat_dim = g.feature_dim();
  const int channels = g.channel_count();
  if (dict.atoms[0].feature_dim() != feat_dim || dict.atoms[0].channel_count() != channels)
    throw ValidationError("unmix: sample and dictionary dimensions disagree");

  Unmixing result;
  result.weights = Vector::Constant(atom_count, 1.0 / atom_count);

  BarycenterConfig bary_cfg;
  bary_cfg.node_count = g.node_count();
  bary_cfg.weights = p;
  bary_cfg.outer_iters = config.bary_outer_iters;
  bary_cfg.prox_iters = config.bary_prox_iters;
  bary_cfg.seed = config.seed;

  double previous = std::numeric_limits<double>::infinity();
  Graph reconstruction;
  for (int round = 0; round < config.outer_iters; ++round) {
    // barycenter of the atoms under the current weights; keep the atom plans
    bary_cfg.lambda_weights.assign(result.weights.data(),
                                   result.weights.data() + atom_count);
    if (round > 0) bary_cfg.init = reconstruction;  // warm start the blocks
    BarycenterResult bary = fngw_barycenter(dict.atoms, params, bary_cfg);
    result.atom_plans = std::move(bary.plans);

    // re-derive the reconstruction from the plans so it matches the
    // closed-form blocks the weight update differentiates
    const LiftedAtoms lifted = lift_atoms(dict, result.atom_plans, p);
    reconstruction = blend(lifted, result.weights, p, feat_dim, channels);

    FngwResult fit = fngw_distance(g, reconstruction, params);
    result.sample_plan = std::move(fit.plan);

    // conditional-gradient weight update with the plans fixed
    const Matrix& pi = result.sample_plan.matrix;
    Vector w = result.weights;
    auto blend_energy = [&](const Vector& weights) {
      const Graph cand = blend(lifted, weights, p, feat_dim, channels);
      const FngwProblem prob(g, cand, params);
      return prob.energy(pi) - lambda_reg * weights.squaredNorm();
    };
    double current_value = blend_energy(w);
    for (int it = 0; it < config.weight_iters; ++it) {
      const Graph cand = blend(lifted, w, p, feat_dim, channels);
      // residual gradients of the energy with respect to the candidate blocks
      const Matrix pp = p * p.transpose();
      const double node_w = 1.0 - params.alpha - params.beta;
      Vector grad = Vector::Zero(atom_count);
      Matrix rf, ra;
      std::vector<Matrix> re(channels);
      if (node_w != 0.0 && feat_dim > 0)
        rf = 2.0 * node_w *
             (p.asDiagonal() * cand.node_features - pi.transpose() * g.node_features);
      if (params.beta != 0.0)
        ra = 2.0 * params.beta *
             (cand.structure.cwiseProduct(pp) -
              kernels::cross_product(pi.transpose(), g.structure, pi.transpose()));
      for (int t = 0; t < channels; ++t)
        if (params.alpha != 0.0)
          re[t] = 2.0 * params.alpha *
                  (cand.edge_channels[t].cwiseProduct(pp) -
                   kernels::cross_product(pi.transpose(), g.edge_channels[t], pi.transpose()));
      for (int s = 0; s < atom_count; ++s) {
        double gs = 0.0;
        if (rf.size() > 0) gs += rf.cwiseProduct(lifted.features[s]).sum();
        if (ra.size() > 0) gs += ra.cwiseProduct(lifted.structures[s]).sum();
        if (params.alpha != 0.0)
          for (int t = 0; t < channels; ++t) gs += re[t].cwiseProduct(lifted.edges[s][t]).sum();
        grad(s) = gs - 2.0 * lambda_reg * w(s);
      }

      int vertex = 0;
      grad.minCoeff(&vertex);
      Vector direction = -w;
      direction(vertex) += 1.0;
      const double b_coef = grad.dot(direction);
      if (b_coef >= -1e-14) break;  // stationary over the simplex
      // exact quadratic along the segment: sample the far end
      const double far_value = blend_energy(w + direction);
      const double a_coef = far_value - current_value - b_coef;
      const double step = line_search_step(a_coef, b_coef);
      if (step <= 0.0) break;
      w += step * direction;
      const double next_value = blend_energy(w);
      const double scale = std::max({std::abs(current_value), std::abs(next_value), 1e-16});
      const bool settled = std::abs(current_value - next_value) <= config.weight_rel_tol * scale;
      current_value = next_value;
      if (settled) break;
    }
    result.weights = w;
    reconstruction = blend(lifted, w, p, feat_dim, channels);

    const FngwProblem final_prob(g, reconstruction, params);
    result.loss = final_prob.energy(pi);
    result.rounds = round + 1;
    const double scale = std::max({std::abs(previous), std::abs(result.loss), 1e-16});
    if (std::isfinite(previous) && std::abs(previous - result.loss) <= config.rel_tol * scale)
      break;
    previous = result.loss;
  }
  return result;
}

std::vector<AtomGradients> atom_gradients(const std::vector<Graph>& samples,
                                          const std::vector<Unmixing>& unmixings,
                                          const Dictionary& dict, const FngwParams& params) {
  check_dictionary(dict);
  if (samples.size() != unmixings.size() || samples.empty())
    throw ValidationError("atom_gradients: sample / unmixing count mismatch");
  validate_params(params);

  const int atom_count = dict.atom_count();
  const int feat_dim = dict.atoms[0].feature_dim();
  const int channels = dict.atoms[0].channel_count();
  const double node_w = 1.0 - params.alpha - params.beta;
  const double batch = static_cast<double>(samples.size());

  std::vector<AtomGradients> grads(atom_count);
  for (int s = 0; s < atom_count; ++s) {
    const int ns = dict.atoms[s].node_count();
    grads[s].node_features = Matrix::Zero(ns, feat_dim);
    grads[s].structure = Matrix::Zero(ns, ns);
    grads[s].edge_channels.assign(channels, Matrix::Zero(ns, ns));
  }

  for (std::size_t b = 0; b < samples.size(); ++b) {
    const Graph& sample = samples[b];
    const Unmixing& mix = unmixings[b];
    const Vector& p = mix.sample_plan.col_marginal;  // reconstruction histogram
    const Graph recon = reconstruct_from_atoms(mix.weights, dict, mix.atom_plans, p);
    const Matrix& pi = mix.sample_plan.matrix;
    const Matrix pp = p * p.transpose();

    // residuals against the barycentric projection of the sample
    Matrix res_f, res_a;
    std::vector<Matrix> res_e(channels);
    if (feat_dim > 0)
      res_f = recon.node_features -
              p.cwiseInverse().asDiagonal() * (pi.transpose() * sample.node_features);
    res_a = recon.structure -
            kernels::cross_product(pi.transpose(), sample.structure, pi.transpose())
                .cwiseQuotient(pp);
    for (int t = 0; t < channels; ++t)
      res_e[t] = recon.edge_channels[t] -
                 kernels::cross_product(pi.transpose(), sample.edge_channels[t], pi.transpose())
                     .cwiseQuotient(pp);

    for (int s = 0; s < atom_count; ++s) {
      const Matrix& plan_s = mix.atom_plans[s].matrix;
      const double scale = 2.0 * mix.weights(s) / batch;
      if (feat_dim > 0 && node_w != 0.0)
        grads[s].node_features += (scale * node_w) * (plan_s.transpose() * res_f);
      if (params.beta != 0.0)
        grads[s].structure +=
            (scale * params.beta) *
            kernels::cross_product(plan_s.transpose(), res_a, plan_s.transpose());
      if (params.alpha != 0.0)
        for (int t = 0; t < channels; ++t)
          grads[s].edge_channels[t] +=
              (scale * params.alpha) *
              kernels::cross_product(plan_s.transpose(), res_e[t], plan_s.transpose());
    }
  }
  return grads;
}

Dictionary random_dictionary(const std::vector<Graph>& dataset, const std::vector<int>& atom_sizes,
                             std::uint64_t seed) {
  if (dataset.empty()) throw ValidationError("random_dictionary: empty dataset");
  const int feat_dim = dataset[0].feature_dim();
  const int channels = dataset[0].channel_count();
  Vector channel_mean = Vector::Zero(channels);
  double cells = 0.0;
  for (const Graph& g : dataset) {
    for (int t = 0; t < channels; ++t) channel_mean(t) += g.edge_channels[t].sum();
    cells += static_cast<double>(g.node_count()) * g.node_count();
  }
  if (channels > 0) channel_mean /= cells;

  Rng rng(seed);
  std::vector<std::pair<int, int>> pool;
  for (std::size_t k = 0; k < dataset.size(); ++k)
    for (int i = 0; i < dataset[k].node_count(); ++i) pool.push_back({static_cast<int>(k), i});

  Dictionary dict;
  for (int size : atom_sizes) {
    if (size < 1) throw ValidationError("random_dictionary: atom sizes must be >= 1");
    Graph atom;
    atom.node_features.resize(size, feat_dim);
    for (int i = 0; i < size; ++i) {
      const auto [k, row] = pool[rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1)];
      if (feat_dim > 0) atom.node_features.row(i) = dataset[k].node_features.row(row);
    }
    atom.structure.resize(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) atom.structure(i, j) = rng.uniform();
    atom.edge_channels.assign(channels, Matrix());
    for (int t = 0; t < channels; ++t) {
      atom.edge_channels[t].resize(size, size);
      for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
          atom.edge_channels[t](i, j) = channel_mean(t) + 0.01 * rng.normal();
    }
    atom.weights = uniform_weights(size);
    dict.atoms.push_back(std::move(atom));
  }
  return dict;
}

DictLearnResult dictionary_learn(const std::vector<Graph>& dataset,
                                 const std::vector<int>& atom_sizes, const FngwParams& params,
                                 const DictLearnConfig& config) {
  if (dataset.empty()) throw ValidationError("dictionary_learn: empty dataset");
  if (atom_sizes.empty()) throw ValidationError("dictionary_learn: need at least one atom");
  if (config.batch_size < 1 || config.epochs < 0)
    throw ValidationError("dictionary_learn: invalid batch size or epoch count");
  for (const Graph& g : dataset) require_valid(g);

  DictLearnResult result;
  result.dictionary = random_dictionary(dataset, atom_sizes, config.seed);

  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates shuffle
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    double epoch_loss = 0.0;
    int seen = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<Graph> batch;
      batch.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) batch.push_back(dataset[order[i]]);

      std::vector<Unmixing> mixes(batch.size());
      std::vector<std::string> failures(batch.size());
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
      for (std::size_t i = 0; i < batch.size(); ++i) {
        try {
          mixes[i] = unmix(batch[i], result.dictionary, config.lambda_reg, params, config.unmix);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
      for (std::size_t i = 0; i < batch.size(); ++i)
        if (!failures[i].empty())
          throw SolverError("dictionary_learn: unmixing failed for sample " +
                            std::to_string(order[begin + i]) + ": " + failures[i]);

      for (const Unmixing& mix : mixes) {
        epoch_loss += mix.loss;
        ++seen;
      }
      if (config.learning_rate != 0.0) {
        const std::vector<AtomGradients> grads =
            atom_gradients(batch, mixes, result.dictionary, params);
        for (int s = 0; s < result.dictionary.atom_count(); ++s) {
          Graph& atom = result.dictionary.atoms[s];
          if (atom.feature_dim() > 0)
            atom.node_features -= config.learning_rate * grads[s].node_features;
          atom.structure =
              (atom.structure - config.learning_rate * grads[s].structure).cwiseMax(0.0);
          for (int t = 0; t < atom.channel_count(); ++t)
            atom.edge_channels[t] -= config.learning_rate * grads[s].edge_channels[t];
        }
      }
    }
    result.epoch_loss.push_back(epoch_loss / std::max(1, seen));
  }
  return result;
}

}  // namespace fngw
