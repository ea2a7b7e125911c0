#include "fngw/kernels.hpp"

// OpenMP kernels. Each output row is produced by exactly one task with a fixed
// inner accumulation order, so results do not depend on the thread count.

namespace fngw::kernels {

Matrix node_cost_sqeuclidean(const Matrix& f, const Matrix& g) {
  const Eigen::Index n = f.rows(), m = g.rows();
  Matrix out(n, m);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = (f.row(i) - g.row(j)).squaredNorm();
    }
  }
  return out;
}

Matrix node_cost_hamming(const Matrix& f, const Matrix& g) {
  const Eigen::Index n = f.rows(), m = g.rows(), s = f.cols();
  Matrix out(n, m);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double count = 0.0;
      for (Eigen::Index k = 0; k < s; ++k) {
        if (f(i, k) != g(j, k)) count += 1.0;
      }
      out(i, j) = count;
    }
  }
  return out;
}

Matrix cross_product(const Matrix& a, const Matrix& pi, const Matrix& b) {
  const Eigen::Index n = a.rows(), m = b.rows();
  Matrix tmp(n, pi.cols());
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) tmp.row(i) = a.row(i) * pi;
  Matrix out(n, m);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = tmp.row(i) * b.transpose();
  return out;
}

Matrix edge_cross_product(const std::vector<Matrix>& ea, const Matrix& pi,
                          const std::vector<Matrix>& eb) {
  const Eigen::Index n = pi.rows(), m = pi.cols();
  const std::size_t channels = ea.size();
  std::vector<Matrix> tmp(channels);
  for (std::size_t t = 0; t < channels; ++t) tmp[t].resize(n, pi.cols());
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < channels; ++t) tmp[t].row(i) = ea[t].row(i) * pi;
  }
  Matrix out = Matrix::Zero(n, m);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < channels; ++t) out.row(i) += tmp[t].row(i) * eb[t].transpose();
  }
  return out;
}

Matrix slice_sq_norms(const std::vector<Matrix>& channels, int n) {
  Matrix out = Matrix::Zero(n, n);
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const Matrix& c : channels) {
      out.row(i) += c.row(i).cwiseProduct(c.row(i));
    }
  }
  return out;
}

}  // namespace fngw::kernels
