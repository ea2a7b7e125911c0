#pragma once

#include <vector>

#include "fngw/barycenter.hpp"

namespace fngw {

// Surrogate kernel-ridge graph predictor: weights from the training Gram
// matrix, decoding by a barycenter over the best-weighted training outputs
// followed by candidate ranking.
struct PredictionModel {
  Matrix gram_train;                 // n x n, symmetric within 1e-9
  double ridge_lambda = 1e-4;        // > 0
  std::vector<Graph> train_outputs;  // length n
  int barycenter_nodes = 0;          // node count of the relaxed output
  int top_weights = 5;               // active-support truncation
  FngwParams decode_params;
  BarycenterConfig decode_config;    // node_count/weights filled per call
};

void validate_model(const PredictionModel& model);

// Solves (K + n lambda I) gamma = k_x by Cholesky; reports the smallest
// eigenvalue estimate when the factorization fails.
Vector ridge_weights(const PredictionModel& model, const Vector& k_x);

// Keeps the top_weights largest surrogate weights, clamps negatives to zero,
// renormalizes to the simplex and returns the barycenter of the selected
// training outputs with uniform node weights and no sparsity.
Graph predict_relaxed(const PredictionModel& model, const Vector& k_x);

struct CandidateRank {
  int index = -1;
  double value = 0.0;
  bool failed = false;  // solver error; ranked last
};

// Distance of every candidate to the relaxed prediction, sorted ascending,
// ties broken by candidate index.
std::vector<CandidateRank> decode_candidates(const Graph& relaxed,
                                             const std::vector<Graph>& candidates,
                                             const FngwParams& params);

// Fraction of test points whose true candidate appears in the first k ranks.
double top_k_accuracy(const std::vector<std::vector<int>>& rankings,
                      const std::vector<int>& truths, int k);

// Utility mapping a relaxed graph back to the discrete family: threshold the
// structure, snap feature rows and edge vectors to the nearest vocabulary
// elements. Not used by the decode path.
Graph discretize_graph(const Graph& relaxed, const std::vector<Vector>& feature_vocab,
                       const std::vector<Vector>& edge_vocab, double structure_threshold = 0.5);

// Gaussian kernel k(x, y) = exp(-gamma ||x - y||^2) on fixed-length vectors.
Matrix gaussian_kernel(const Matrix& rows_x, const Matrix& rows_y, double gamma);

}  // namespace fngw
