#pragma once

#include <tuple>
#include <vector>

#include "fngw/common.hpp"

namespace fngw {

// All-pairs shortest paths over a nonnegative weighted adjacency (entry 0 =
// no edge). Entry (i,j) is the shortest-path length i -> j; with
// directed=false the edge weight is the smaller positive entry of the two
// orientations. Unreachable pairs are filled with the maximum finite distance
// in the graph unless strict_unreachable, which raises instead.
Matrix shortest_path_matrix(const Matrix& adjacency, bool directed,
                            bool strict_unreachable = false);

// Iterative neighborhood-refinement labels for a whole dataset. Column 0 of
// each output is the original label; column k the label after k rounds. The
// relabeling dictionary is shared across the dataset and built in
// deterministic insertion order (graphs, then nodes, in their given order).
// Neighbors are taken over nonzero entries of either orientation.
std::vector<Eigen::MatrixXi> wl_relabel(const std::vector<std::vector<int>>& labels,
                                        const std::vector<Matrix>& adjacency, int iterations);

// Integer label matrix as node features (compared with the Hamming metric).
Matrix wl_to_features(const Eigen::MatrixXi& labels);

// exp(-tau * Lap(A)) * F with the symmetric normalized Laplacian
// Lap(A) = I - D^{-1/2} A D^{-1/2}; zero-degree nodes keep an identity row.
// Computed by symmetric eigendecomposition; A must be symmetric within 1e-10.
Matrix laplacian_diffuse(const Matrix& features, const Matrix& adjacency, double tau);

// (i, j, label) triplet for a labeled directed edge.
using EdgeLabelTriplet = std::tuple<int, int, int>;

// One-hot edge channels: labeled pairs get the unit vector of their label,
// every other ordered pair (diagonal included) gets empty_edge_vector.
std::vector<Matrix> one_hot_edge_tensor(const std::vector<EdgeLabelTriplet>& triplets, int n,
                                        int vocab_size, const Vector& empty_edge_vector);

// Standard-normal empty-edge vector derived from a seed, for datasets that
// want a shared random feature on unlabeled pairs.
Vector seeded_empty_edge_vector(int size, std::uint64_t seed);

}  // namespace fngw
