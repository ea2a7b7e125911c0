#pragma once

#include <vector>

#include "fngw/barycenter.hpp"

namespace fngw {

// Learnable atom graphs with fixed per-atom histograms. All atoms share the
// dataset's node-feature and edge-channel dimensions.
struct Dictionary {
  std::vector<Graph> atoms;

  int atom_count() const { return static_cast<int>(atoms.size()); }
};

// Result of embedding one graph into the dictionary: simplex weights, the
// plan between the sample and its reconstruction, the plans between the
// reconstruction and each atom, and the unregularized reconstruction energy.
struct Unmixing {
  Vector weights;
  TransportPlan sample_plan;               // sample rows, reconstruction columns
  std::vector<TransportPlan> atom_plans;   // reconstruction rows, atom columns
  double loss = 0.0;
  int rounds = 0;
};

// Relaxed graph induced by simplex weights and fixed atom plans:
// features  diag(1/p) sum_s w_s plan_s F_s,
// structure (sum_s w_s plan_s A_s plan_s^T) / (p p^T),
// edges     per channel the same congruence average.
Graph reconstruct_from_atoms(const Vector& w, const Dictionary& dict,
                             const std::vector<TransportPlan>& atom_plans, const Vector& p);

struct UnmixConfig {
  int outer_iters = 10;
  double rel_tol = 1e-6;
  int weight_iters = 200;       // conditional-gradient steps of the weight update
  double weight_rel_tol = 1e-9;
  int bary_outer_iters = 20;    // inner barycenter rounds
  int bary_prox_iters = 10;
  std::uint64_t seed = 0;
};

// Alternating solver: barycenter of the atoms under the current weights
// (keeping the atom plans), plan between the sample and the reconstruction,
// then a conditional-gradient weight update over the simplex with the exact
// quadratic line search. lambda_reg is the concave -lambda ||w||^2 term.
Unmixing unmix(const Graph& g, const Dictionary& dict, double lambda_reg,
               const FngwParams& params, const UnmixConfig& config);

struct AtomGradients {
  Matrix node_features;
  Matrix structure;
  std::vector<Matrix> edge_channels;
};

// Exact gradients of the plan-fixed mean batch energy with respect to each
// atom block, in residual form (they vanish when every reconstruction matches
// the barycentric projection of its sample).
std::vector<AtomGradients> atom_gradients(const std::vector<Graph>& samples,
                                          const std::vector<Unmixing>& unmixings,
                                          const Dictionary& dict, const FngwParams& params);

struct DictLearnConfig {
  int epochs = 30;
  int batch_size = 16;
  double learning_rate = 0.01;
  double lambda_reg = 0.0;
  std::uint64_t seed = 0;
  UnmixConfig unmix;
};

struct DictLearnResult {
  Dictionary dictionary;
  std::vector<double> epoch_loss;  // mean batch reconstruction loss per epoch
};

// Mini-batch alternation: unmix every batch sample against the current atoms,
// take one fixed-rate gradient step per atom, clamp atom structures at 0.
DictLearnResult dictionary_learn(const std::vector<Graph>& dataset,
                                 const std::vector<int>& atom_sizes, const FngwParams& params,
                                 const DictLearnConfig& config);

// Seeded random dictionary: atom feature rows drawn from the dataset rows,
// structures iid uniform [0,1], edge channels at the dataset channel means
// plus Gaussian noise.
Dictionary random_dictionary(const std::vector<Graph>& dataset, const std::vector<int>& atom_sizes,
                             std::uint64_t seed);

}  // namespace fngw
