#pragma once

#include <vector>

#include "fngw/common.hpp"

// Dense inner kernels of the distance computations. Two implementations of the
// same contracts live side by side:
//
//   kernels::ref    plain serial loops, the reference the OpenMP versions and
//                   the benchmark are checked against
//   kernels::       OpenMP versions used by the library; work is split one
//                   output row per task, so every entry is accumulated in the
//                   same order regardless of the thread count and results are
//                   bit-identical for any --threads value
namespace fngw::kernels {

namespace ref {

// M(i,j) = ||f.row(i) - g.row(j)||^2
Matrix node_cost_sqeuclidean(const Matrix& f, const Matrix& g);

// M(i,j) = #{s : f(i,s) != g(j,s)}, exact comparison
Matrix node_cost_hamming(const Matrix& f, const Matrix& g);

// a * pi * b^T  with a: n.n, pi: n.m, b: m.m  ->  n.m
Matrix cross_product(const Matrix& a, const Matrix& pi, const Matrix& b);

// sum_t  ea[t] * pi * eb[t]^T
Matrix edge_cross_product(const std::vector<Matrix>& ea, const Matrix& pi,
                          const std::vector<Matrix>& eb);

// out(i,j) = sum_t channels[t](i,j)^2 ; n gives the shape when channels is empty
Matrix slice_sq_norms(const std::vector<Matrix>& channels, int n);

}  // namespace ref

Matrix node_cost_sqeuclidean(const Matrix& f, const Matrix& g);
Matrix node_cost_hamming(const Matrix& f, const Matrix& g);
Matrix cross_product(const Matrix& a, const Matrix& pi, const Matrix& b);
Matrix edge_cross_product(const std::vector<Matrix>& ea, const Matrix& pi,
                          const std::vector<Matrix>& eb);
Matrix slice_sq_norms(const std::vector<Matrix>& channels, int n);

}  // namespace fngw::kernels
