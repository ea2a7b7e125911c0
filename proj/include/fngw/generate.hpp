#pragma once

#include <vector>

#include "fngw/graph.hpp"

namespace fngw {

// Circle graphs: scalar node features on one sine period plus Gaussian noise;
// each adjacent pair carries two directed one-hot edges (ascending = blue
// channel 0, descending = green channel 1, channel 2 marks the absence of an
// edge); second-neighbor skip edges appear with skip_edge_prob. The structure
// matrix is the 0/1 adjacency, weights are uniform.
struct CircleParams {
  int count = 8;
  int min_nodes = 10;
  int max_nodes = 20;
  double noise_sigma = 0.3;
  double skip_edge_prob = 0.5;
};

inline constexpr int kCircleEdgeChannels = 3;  // blue, green, none

std::vector<Graph> generate_circle_graphs(const CircleParams& params, std::uint64_t seed);

// Block-model graph: blocks are fully connected internally with black edges
// (channel 0); pairs from adjacent blocks connect with inter_block_prob, the
// ascending direction blue (channel 1), descending green (channel 2);
// channel 3 marks the absence of an edge. Node features are scalars, either
// the constant feature_mean of the block or N(feature_mean, 1) samples.
struct SbmBlock {
  int size = 0;
  double feature_mean = 0.0;
  bool gaussian_features = false;
};

inline constexpr int kSbmEdgeChannels = 4;  // black, blue, green, none

Graph generate_sbm_graph(const std::vector<SbmBlock>& blocks, double inter_block_prob,
                         std::uint64_t seed);

// node_count split as evenly as possible into block_count parts
std::vector<int> even_block_sizes(int node_count, int block_count);

}  // namespace fngw
