#include "fngw/generate.hpp"

#include <cmath>

namespace fngw {

namespace {
constexpr int kBlue = 0, kGreen = 1, kCircleNone = 2;
constexpr int kBlack = 0, kSbmBlue = 1, kSbmGreen = 2, kSbmNone = 3;
}  // namespace

std::vector<Graph> generate_circle_graphs(const CircleParams& params, std::uint64_t seed) {
  if (params.count < 0) throw ValidationError("circle generator: negative count");
  if (params.min_nodes < 3 || params.max_nodes < params.min_nodes)
    throw ValidationError("circle generator: node range must lie in [3, inf)");
  if (params.noise_sigma < 0.0) throw ValidationError("circle generator: negative noise sigma");
  if (params.skip_edge_prob < 0.0 || params.skip_edge_prob > 1.0)
    throw ValidationError("circle generator: skip_edge_prob must be in [0,1]");

  Rng rng(seed);
  std::vector<Graph> out;
  out.reserve(params.count);
  for (int g = 0; g < params.count; ++g) {
    const int n = static_cast<int>(rng.uniform_int(params.min_nodes, params.max_nodes));
    Matrix features(n, 1);
    for (int i = 0; i < n; ++i) {
      double f = std::sin(2.0 * M_PI * i / n);
      if (params.noise_sigma > 0.0) f += params.noise_sigma * rng.normal();
      features(i, 0) = f;
    }

    Matrix structure = Matrix::Zero(n, n);
    std::vector<Matrix> channels(kCircleEdgeChannels, Matrix::Zero(n, n));
    auto color_pair = [&](int from, int to) {
      structure(from, to) = 1.0;
      structure(to, from) = 1.0;
      channels[kBlue](from, to) = 1.0;
      channels[kGreen](to, from) = 1.0;
    };
    for (int i = 0; i < n; ++i) color_pair(i, (i + 1) % n);
    for (int i = 0; i < n; ++i) {
      const int j = (i + 2) % n;
      const bool wanted = rng.uniform() < params.skip_edge_prob;
      // tiny circles alias skip pairs onto ring pairs; keep the ring colors
      if (wanted && channels[kBlue](i, j) == 0.0 && channels[kGreen](i, j) == 0.0)
        color_pair(i, j);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (channels[kBlue](i, j) == 0.0 && channels[kGreen](i, j) == 0.0)
          channels[kCircleNone](i, j) = 1.0;

    out.push_back(make_graph(std::move(features), std::move(structure), std::move(channels)));
  }
  return out;
}

Graph generate_sbm_graph(const std::vector<SbmBlock>& blocks, double inter_block_prob,
                         std::uint64_t seed) {
  if (blocks.empty()) throw ValidationError("sbm generator: block_spec must be nonempty");
  if (inter_block_prob < 0.0 || inter_block_prob > 1.0)
    throw ValidationError("sbm generator: inter_block_prob must be in [0,1]");
  int n = 0;
  for (const SbmBlock& b : blocks) {
    if (b.size < 1) throw ValidationError("sbm generator: block sizes must be >= 1");
    n += b.size;
  }

  std::vector<int> block_of(n);
  std::vector<int> start(blocks.size());
  {
    int offset = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      start[b] = offset;
      for (int i = 0; i < blocks[b].size; ++i) block_of[offset + i] = static_cast<int>(b);
      offset += blocks[b].size;
    }
  }

  Rng rng(seed);
  Matrix features(n, 1);
  for (int i = 0; i < n; ++i) {
    const SbmBlock& b = blocks[block_of[i]];
    features(i, 0) = b.gaussian_features ? rng.normal(b.feature_mean, 1.0) : b.feature_mean;
  }

  Matrix structure = Matrix::Zero(n, n);
  std::vector<Matrix> channels(kSbmEdgeChannels, Matrix::Zero(n, n));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int i = start[b]; i < start[b] + blocks[b].size; ++i)
      for (int j = start[b]; j < start[b] + blocks[b].size; ++j)
        if (i != j) {
          structure(i, j) = 1.0;
          channels[kBlack](i, j) = 1.0;
        }
  }
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    for (int u = start[b]; u < start[b] + blocks[b].size; ++u) {
      for (int v = start[b + 1]; v < start[b + 1] + blocks[b + 1].size; ++v) {
        if (rng.uniform() < inter_block_prob) {
          structure(u, v) = 1.0;
          structure(v, u) = 1.0;
          channels[kSbmBlue](u, v) = 1.0;   // ascending block order
          channels[kSbmGreen](v, u) = 1.0;  // descending
        }
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (channels[kBlack](i, j) == 0.0 && channels[kSbmBlue](i, j) == 0.0 &&
          channels[kSbmGreen](i, j) == 0.0)
        channels[kSbmNone](i, j) = 1.0;

  return make_graph(std::move(features), std::move(structure), std::move(channels));
}

std::vector<int> even_block_sizes(int node_count, int block_count) {
  if (node_count < 1 || block_count < 1 || block_count > node_count)
    throw ValidationError("even_block_sizes: need 1 <= block_count <= node_count");
  std::vector<int> sizes(block_count, node_count / block_count);
  for (int b = 0; b < node_count % block_count; ++b) ++sizes[b];
  return sizes;
}

}  // namespace fngw
