#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "oceancast/common.hpp"
#include "oceancast/threading.hpp"

namespace ocean {

// Row-major dense matrix. The GNN kernels only ever need 2-D arrays; vectors
// are 1 x n or n x 1.
template <class T>
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, T(0)) {}

  T& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  T operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  T* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  std::size_t size() const { return data.size(); }

  bool all_finite() const {
    for (T v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

namespace dense {

template <class T>
using EigenMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class T>
using ConstEigenMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

template <class T>
EigenMap<T> map(Matrix<T>& m) {
  return EigenMap<T>(m.data.data(), m.rows, m.cols);
}
template <class T>
ConstEigenMap<T> map(const Matrix<T>& m) {
  return ConstEigenMap<T>(m.data.data(), m.rows, m.cols);
}

// C = A * B, parallelized over disjoint row blocks of C.
template <class T>
void matmul(Matrix<T>& c, const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
    throw NumericError("matmul: shape mismatch");
  auto bm = map(b);
  parallel_for(static_cast<std::size_t>(a.rows), [&](std::size_t lo, std::size_t hi) {
    const int n = static_cast<int>(hi - lo);
    ConstEigenMap<T> ablk(a.row(static_cast<int>(lo)), n, a.cols);
    EigenMap<T> cblk(c.data.data() + lo * c.cols, n, c.cols);
    cblk.noalias() = ablk * bm;
  });
}

// C += A * B^T (used for dX = dY * W^T).
template <class T>
void matmul_nt_add(Matrix<T>& c, const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.cols || c.rows != a.rows || c.cols != b.rows)
    throw NumericError("matmul_nt_add: shape mismatch");
  auto bm = map(b);
  parallel_for(static_cast<std::size_t>(a.rows), [&](std::size_t lo, std::size_t hi) {
    const int n = static_cast<int>(hi - lo);
    ConstEigenMap<T> ablk(a.row(static_cast<int>(lo)), n, a.cols);
    EigenMap<T> cblk(c.data.data() + lo * c.cols, n, c.cols);
    cblk.noalias() += ablk * bm.transpose();
  });
}

// C += A^T * B (used for dW = X^T * dY). Single call: the output is small and
// a fixed summation order keeps results independent of the worker count.
template <class T>
void matmul_tn_add(Matrix<T>& c, const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols)
    throw NumericError("matmul_tn_add: shape mismatch");
  map(c).noalias() += map(a).transpose() * map(b);
}

template <class T>
void add_row_broadcast(Matrix<T>& m, const Matrix<T>& rowvec) {
  parallel_for(static_cast<std::size_t>(m.rows), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      T* out = m.row(static_cast<int>(r));
      for (int c = 0; c < m.cols; ++c) out[c] += rowvec.data[c];
    }
  });
}

}  // namespace dense

}  // namespace ocean
