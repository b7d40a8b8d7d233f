#pragma once

// Spatial-matrix extension of the 6-D algebra: spatial matrices (stacked
// motion/force columns), dense rank-3 tensors with (row, column, page)
// indexing, the three matrix cross-product operators, tensor-matrix products
// and the three tensor rotations. Also hosts the runnable identity suite for
// the nineteen operator identities so the CLI can exercise it on demand.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynhess/spatial.hpp"

namespace dynhess {

// Dynamic matrix, column-major.
template <typename S>
class MatX {
 public:
  MatX() = default;
  MatX(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int r, int c) { return d_[static_cast<std::size_t>(r) + static_cast<std::size_t>(rows_) * c]; }
  const S& operator()(int r, int c) const {
    return d_[static_cast<std::size_t>(r) + static_cast<std::size_t>(rows_) * c];
  }

  static MatX identity(int n) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  MatX transposed() const {
    MatX r(cols_, rows_);
    for (int c = 0; c < cols_; ++c)
      for (int i = 0; i < rows_; ++i) r(c, i) = (*this)(i, c);
    return r;
  }

  MatX operator*(const MatX& o) const {
    if (cols_ != o.rows_)
      throw std::invalid_argument("matrix product shape mismatch: " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_) + " times " + std::to_string(o.rows_) + "x" +
                                  std::to_string(o.cols_));
    MatX r(rows_, o.cols_);
    for (int c = 0; c < o.cols_; ++c)
      for (int k = 0; k < cols_; ++k) {
        const S b = o(k, c);
        for (int i = 0; i < rows_; ++i) r(i, c) += (*this)(i, k) * b;
      }
    return r;
  }

  MatX operator-(const MatX& o) const {
    MatX r(rows_, cols_);
    for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] - o.d_[i];
    return r;
  }
  MatX operator+(const MatX& o) const {
    MatX r(rows_, cols_);
    for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] + o.d_[i];
    return r;
  }

  const std::vector<S>& data() const { return d_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> d_;
};

enum class MatKind { motion, force };

/// 6 x n matrix whose columns are spatial motion or force vectors.
template <typename S>
class SpatialMatrix {
 public:
  SpatialMatrix() = default;
  SpatialMatrix(MatKind kind, int cols) : kind_(kind), cols_(cols), d_(static_cast<std::size_t>(6) * cols) {}

  MatKind kind() const { return kind_; }
  int cols() const { return cols_; }

  S& operator()(int r, int c) { return d_[static_cast<std::size_t>(r + 6 * c)]; }
  const S& operator()(int r, int c) const { return d_[static_cast<std::size_t>(r + 6 * c)]; }

  void set_col(int c, const SpatialMotion<S>& v) {
    for (int r = 0; r < 6; ++r) (*this)(r, c) = v[r];
  }
  void set_col(int c, const SpatialForce<S>& f) {
    for (int r = 0; r < 6; ++r) (*this)(r, c) = f[r];
  }
  SpatialMotion<S> motion_col(int c) const {
    return {{(*this)(0, c), (*this)(1, c), (*this)(2, c)}, {(*this)(3, c), (*this)(4, c), (*this)(5, c)}};
  }
  SpatialForce<S> force_col(int c) const {
    return {{(*this)(0, c), (*this)(1, c), (*this)(2, c)}, {(*this)(3, c), (*this)(4, c), (*this)(5, c)}};
  }

  MatX<S> as_matrix() const {
    MatX<S> m(6, cols_);
    for (int c = 0; c < cols_; ++c)
      for (int r = 0; r < 6; ++r) m(r, c) = (*this)(r, c);
    return m;
  }

 private:
  MatKind kind_ = MatKind::motion;
  int cols_ = 0;
  std::vector<S> d_;
};

/// Dense rank-3 array indexed (row, column, page). Storage is contiguous with
/// pages outermost and columns major within a page, so a page slice is an
/// ordinary column-major matrix.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int n1, int n2, int n3)
      : n1_(n1), n2_(n2), n3_(n3), d_(static_cast<std::size_t>(n1) * n2 * n3) {}

  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }

  double& operator()(int i, int j, int k) {
    return d_[static_cast<std::size_t>(i) + static_cast<std::size_t>(n1_) * j +
              static_cast<std::size_t>(n1_) * n2_ * k];
  }
  const double& operator()(int i, int j, int k) const {
    return d_[static_cast<std::size_t>(i) + static_cast<std::size_t>(n1_) * j +
              static_cast<std::size_t>(n1_) * n2_ * k];
  }

  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }
  std::size_t size() const { return d_.size(); }

  Tensor3 operator-(const Tensor3& o) const;
  Tensor3 operator+(const Tensor3& o) const;
  friend Tensor3 operator*(double s, const Tensor3& t);

  double max_abs() const;

 private:
  int n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<double> d_;
};

/// Page k is the 6x6 motion cross operator of column k of U.
Tensor3 cross_motion_tensor(const SpatialMatrix<double>& u);
/// Page k is the 6x6 force cross operator of column k of U.
Tensor3 cross_force_tensor(const SpatialMatrix<double>& u);
/// Page k is the swapped-order operator of force column k of F.
Tensor3 cross_swapped_tensor(const SpatialMatrix<double>& f);

/// Z(i,j,k) = sum_l A(i,l,k) B(l,j).
Tensor3 tensor_matrix_product(const Tensor3& a, const MatX<double>& b);
/// Y(i,j,k) = sum_l B(i,l) A(l,j,k).
Tensor3 matrix_tensor_product(const MatX<double>& b, const Tensor3& a);

/// Transpose along dims 1-2: out(j,i,k) = in(i,j,k).
Tensor3 rot_T(const Tensor3& a);
/// Rotation along dims 2-3: out(i,k,j) = in(i,j,k).
Tensor3 rot_R(const Tensor3& a);
/// R followed by T: out(k,i,j) = in(i,j,k).
Tensor3 rot_RT(const Tensor3& a);

// Runnable checks for the operator identities (M1..M19). Each draws random
// conforming operands with column counts in 1..6 and returns the worst
// relative error seen.
struct IdentityCheck {
  std::string name;
  double max_rel_err = 0;
};

double run_m_identity(int index, int instances, std::uint64_t seed);
std::vector<IdentityCheck> run_m_identity_suite(int instances, std::uint64_t seed);

}  // namespace dynhess
