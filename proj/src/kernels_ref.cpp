#include "fngw/kernels.hpp"

// Serial reference kernels. Straight loops, no vectorization tricks; kept as
// the ground truth for the OpenMP implementations.

namespace fngw::kernels::ref {

Matrix node_cost_sqeuclidean(const Matrix& f, const Matrix& g) {
  const Eigen::Index n = f.rows(), m = g.rows(), s = f.cols();
  Matrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < s; ++k) {
        const double d = f(i, k) - g(j, k);
        acc += d * d;
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix node_cost_hamming(const Matrix& f, const Matrix& g) {
  const Eigen::Index n = f.rows(), m = g.rows(), s = f.cols();
  Matrix out(n, m);
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
  const Eigen::Index n = a.rows(), m = b.rows(), k = pi.cols();
  Matrix tmp = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < k; ++l) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < a.cols(); ++r) acc += a(i, r) * pi(r, l);
      tmp(i, l) = acc;
    }
  }
  Matrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double acc = 0.0;
      for (Eigen::Index l = 0; l < k; ++l) acc += tmp(i, l) * b(j, l);
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix edge_cross_product(const std::vector<Matrix>& ea, const Matrix& pi,
                          const std::vector<Matrix>& eb) {
  Matrix out = Matrix::Zero(pi.rows(), pi.cols());
  for (std::size_t t = 0; t < ea.size(); ++t) out += cross_product(ea[t], pi, eb[t]);
  return out;
}

Matrix slice_sq_norms(const std::vector<Matrix>& channels, int n) {
  Matrix out = Matrix::Zero(n, n);
  for (const Matrix& c : channels) {
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += c(i, j) * c(i, j);
  }
  return out;
}

}  // namespace fngw::kernels::ref
