#include "dynhess/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace dynhess {

namespace {

std::string shape3(const Tensor3& t) {
  return std::to_string(t.dim1()) + "x" + std::to_string(t.dim2()) + "x" + std::to_string(t.dim3());
}
std::string shape2(const MatX<double>& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_kind(const SpatialMatrix<double>& m, MatKind kind, const char* op) {
  if (m.kind() != kind)
    throw std::invalid_argument(std::string(op) + ": operand has the wrong motion/force tag");
}

}  // namespace

Tensor3 Tensor3::operator-(const Tensor3& o) const {
  Tensor3 r(n1_, n2_, n3_);
  for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] - o.d_[i];
  return r;
}

Tensor3 Tensor3::operator+(const Tensor3& o) const {
  Tensor3 r(n1_, n2_, n3_);
  for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] + o.d_[i];
  return r;
}

Tensor3 operator*(double s, const Tensor3& t) {
  Tensor3 r(t.n1_, t.n2_, t.n3_);
  for (std::size_t i = 0; i < t.d_.size(); ++i) r.d_[i] = s * t.d_[i];
  return r;
}

double Tensor3::max_abs() const {
  double m = 0;
  for (double v : d_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3 cross_motion_tensor(const SpatialMatrix<double>& u) {
  require_kind(u, MatKind::motion, "cross_motion_tensor");
  Tensor3 t(6, 6, u.cols());
  for (int k = 0; k < u.cols(); ++k) {
    const Mat66<double> op = cross_motion_matrix(u.motion_col(k));
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 6; ++r) t(r, c, k) = op(r, c);
  }
  return t;
}

Tensor3 cross_force_tensor(const SpatialMatrix<double>& u) {
  require_kind(u, MatKind::motion, "cross_force_tensor");
  Tensor3 t(6, 6, u.cols());
  for (int k = 0; k < u.cols(); ++k) {
    const Mat66<double> op = cross_force_matrix(u.motion_col(k));
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 6; ++r) t(r, c, k) = op(r, c);
  }
  return t;
}

Tensor3 cross_swapped_tensor(const SpatialMatrix<double>& f) {
  require_kind(f, MatKind::force, "cross_swapped_tensor");
  Tensor3 t(6, 6, f.cols());
  for (int k = 0; k < f.cols(); ++k) {
    const Mat66<double> op = cross_swap_matrix(f.force_col(k));
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 6; ++r) t(r, c, k) = op(r, c);
  }
  return t;
}

Tensor3 tensor_matrix_product(const Tensor3& a, const MatX<double>& b) {
  if (a.dim2() != b.rows())
    throw std::invalid_argument("tensor_matrix_product shape mismatch: tensor " + shape3(a) + " times matrix " +
                                shape2(b));
  Tensor3 z(a.dim1(), b.cols(), a.dim3());
  for (int k = 0; k < a.dim3(); ++k)
    for (int j = 0; j < b.cols(); ++j)
      for (int l = 0; l < a.dim2(); ++l) {
        const double blj = b(l, j);
        if (blj == 0) continue;
        for (int i = 0; i < a.dim1(); ++i) z(i, j, k) += a(i, l, k) * blj;
      }
  return z;
}

Tensor3 matrix_tensor_product(const MatX<double>& b, const Tensor3& a) {
  if (b.cols() != a.dim1())
    throw std::invalid_argument("matrix_tensor_product shape mismatch: matrix " + shape2(b) + " times tensor " +
                                shape3(a));
  Tensor3 y(b.rows(), a.dim2(), a.dim3());
  for (int k = 0; k < a.dim3(); ++k)
    for (int j = 0; j < a.dim2(); ++j)
      for (int i = 0; i < b.rows(); ++i) {
        double acc = 0;
        for (int l = 0; l < b.cols(); ++l) acc += b(i, l) * a(l, j, k);
        y(i, j, k) = acc;
      }
  return y;
}

Tensor3 rot_T(const Tensor3& a) {
  Tensor3 b(a.dim2(), a.dim1(), a.dim3());
  for (int k = 0; k < a.dim3(); ++k)
    for (int j = 0; j < a.dim2(); ++j)
      for (int i = 0; i < a.dim1(); ++i) b(j, i, k) = a(i, j, k);
  return b;
}

Tensor3 rot_R(const Tensor3& a) {
  Tensor3 b(a.dim1(), a.dim3(), a.dim2());
  for (int k = 0; k < a.dim3(); ++k)
    for (int j = 0; j < a.dim2(); ++j)
      for (int i = 0; i < a.dim1(); ++i) b(i, k, j) = a(i, j, k);
  return b;
}

Tensor3 rot_RT(const Tensor3& a) {
  Tensor3 b(a.dim3(), a.dim1(), a.dim2());
  for (int k = 0; k < a.dim3(); ++k)
    for (int j = 0; j < a.dim2(); ++j)
      for (int i = 0; i < a.dim1(); ++i) b(k, i, j) = a(i, j, k);
  return b;
}

}  // namespace dynhess
