#include <cmath>
#include <random>

#include "dynhess/tensor.hpp"

// Numeric checks for the nineteen spatial-matrix operator identities. Each
// check evaluates both sides with independently coded operation chains on
// random conforming operands and reports the worst relative deviation.

namespace dynhess {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

int dim(Rng& rng) { return std::uniform_int_distribution<int>(1, 6)(rng); }

SpatialMatrix<double> random_spatial(Rng& rng, MatKind kind, int cols) {
  SpatialMatrix<double> m(kind, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < 6; ++r) m(r, c) = uniform(rng);
  return m;
}

MatX<double> random_matrix(Rng& rng, int rows, int cols) {
  MatX<double> m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = uniform(rng);
  return m;
}

SpatialMotion<double> random_motion(Rng& rng) {
  return {{uniform(rng), uniform(rng), uniform(rng)}, {uniform(rng), uniform(rng), uniform(rng)}};
}

SpatialForce<double> random_force(Rng& rng) {
  return {{uniform(rng), uniform(rng), uniform(rng)}, {uniform(rng), uniform(rng), uniform(rng)}};
}

MatX<double> neg_transpose(const SpatialMatrix<double>& m) {
  MatX<double> t(m.cols(), 6);
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < 6; ++r) t(c, r) = -m(r, c);
  return t;
}

MatX<double> transpose_of(const SpatialMatrix<double>& m) {
  MatX<double> t(m.cols(), 6);
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < 6; ++r) t(c, r) = m(r, c);
  return t;
}

MatX<double> to_matx(const Mat66<double>& m) {
  MatX<double> r(6, 6);
  for (int c = 0; c < 6; ++c)
    for (int i = 0; i < 6; ++i) r(i, c) = m(i, c);
  return r;
}

double rel_diff(const Tensor3& a, const Tensor3& b) {
  if (a.dim1() != b.dim1() || a.dim2() != b.dim2() || a.dim3() != b.dim3()) return 1e30;
  const double scale = std::max({a.max_abs(), b.max_abs(), 1e-12});
  return (a - b).max_abs() / scale;
}

Tensor3 neg(const Tensor3& t) { return -1.0 * t; }

// One random evaluation of identity `index`; returns the relative error.
double eval_identity(int index, Rng& rng) {
  const int n = dim(rng), m = dim(rng), l = dim(rng);
  const auto u = random_spatial(rng, MatKind::motion, n);
  const auto vmat = random_spatial(rng, MatKind::motion, l);
  const auto fmat = random_spatial(rng, MatKind::force, m);
  const auto v = random_motion(rng);
  const auto f = random_force(rng);

  switch (index) {
    case 1:
      return rel_diff(cross_force_tensor(u), neg(rot_T(cross_motion_tensor(u))));
    case 2:
      return rel_diff(matrix_tensor_product(neg_transpose(vmat), cross_force_tensor(u)),
                      rot_T(tensor_matrix_product(cross_motion_tensor(u), vmat.as_matrix())));
    case 3:
      return rel_diff(
          tensor_matrix_product(matrix_tensor_product(neg_transpose(vmat), cross_force_tensor(u)),
                                fmat.as_matrix()),
          tensor_matrix_product(rot_T(tensor_matrix_product(cross_motion_tensor(u), vmat.as_matrix())),
                                fmat.as_matrix()));
    case 4: {
      MatX<double> vcol(6, 1);
      for (int r = 0; r < 6; ++r) vcol(r, 0) = v[r];
      const Tensor3 lhs = tensor_matrix_product(cross_motion_tensor(u), vcol);
      Tensor3 rhs(6, 1, n);
      for (int k = 0; k < n; ++k) {
        const SpatialMotion<double> c = cross_motion(v, u.motion_col(k));
        for (int r = 0; r < 6; ++r) rhs(r, 0, k) = -c[r];
      }
      return rel_diff(lhs, rhs);
    }
    case 5:
      return rel_diff(tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix()),
                      rot_R(tensor_matrix_product(cross_swapped_tensor(fmat), u.as_matrix())));
    case 6:
      return rel_diff(tensor_matrix_product(cross_swapped_tensor(fmat), u.as_matrix()),
                      rot_R(tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix())));
    case 7: {
      const double lambda = 2.0 * uniform(rng);
      SpatialMatrix<double> lu(MatKind::motion, n);
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < 6; ++r) lu(r, c) = lambda * u(r, c);
      return rel_diff(cross_motion_tensor(lu), lambda * cross_motion_tensor(u));
    }
    case 8:
      return rel_diff(tensor_matrix_product(cross_motion_tensor(u), vmat.as_matrix()),
                      neg(rot_R(tensor_matrix_product(cross_motion_tensor(vmat), u.as_matrix()))));
    case 9: {
      SpatialMatrix<double> w(MatKind::motion, n);
      for (int k = 0; k < n; ++k) w.set_col(k, cross_motion(v, u.motion_col(k)));
      const MatX<double> vx = to_matx(cross_motion_matrix(v));
      return rel_diff(cross_motion_tensor(w),
                      matrix_tensor_product(vx, cross_motion_tensor(u)) -
                          tensor_matrix_product(cross_motion_tensor(u), vx));
    }
    case 10: {
      SpatialMatrix<double> w(MatKind::motion, n);
      for (int k = 0; k < n; ++k) w.set_col(k, cross_motion(v, u.motion_col(k)));
      const MatX<double> vf = to_matx(cross_force_matrix(v));
      return rel_diff(cross_force_tensor(w),
                      matrix_tensor_product(vf, cross_force_tensor(u)) -
                          tensor_matrix_product(cross_force_tensor(u), vf));
    }
    case 11: {
      // The operand applied through xbar* is force-valued; build (U x~* f).
      SpatialMatrix<double> w(MatKind::force, n);
      for (int k = 0; k < n; ++k) w.set_col(k, cross_force(u.motion_col(k), f));
      const MatX<double> fb = to_matx(cross_swap_matrix(f));
      return rel_diff(cross_swapped_tensor(w),
                      tensor_matrix_product(cross_force_tensor(u), fb) -
                          matrix_tensor_product(fb, cross_motion_tensor(u)));
    }
    case 12:
      return rel_diff(rot_T(tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix())),
                      matrix_tensor_product(neg_transpose(fmat), cross_motion_tensor(u)));
    case 13: {
      const Tensor3 lhs = matrix_tensor_product(
          transpose_of(vmat), tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix()));
      const Tensor3 vxu = tensor_matrix_product(cross_motion_tensor(vmat), u.as_matrix());
      const Tensor3 mid = tensor_matrix_product(rot_RT(vxu), fmat.as_matrix());
      const Tensor3 rhs = rot_T(matrix_tensor_product(transpose_of(fmat), rot_R(vxu)));
      return std::max(rel_diff(lhs, mid), rel_diff(lhs, rhs));
    }
    case 14: {
      Tensor3 lhs(6, 1, m);
      for (int k = 0; k < m; ++k) {
        const SpatialForce<double> c = cross_force(v, fmat.force_col(k));
        for (int r = 0; r < 6; ++r) lhs(r, 0, k) = c[r];
      }
      MatX<double> vcol(6, 1);
      for (int r = 0; r < 6; ++r) vcol(r, 0) = v[r];
      return rel_diff(lhs, tensor_matrix_product(cross_swapped_tensor(fmat), vcol));
    }
    case 15: {
      Tensor3 lhs(6, 1, n);
      for (int k = 0; k < n; ++k) {
        const SpatialForce<double> c = cross_force_swapped(f, u.motion_col(k));
        for (int r = 0; r < 6; ++r) lhs(r, 0, k) = c[r];
      }
      MatX<double> fcol(6, 1);
      for (int r = 0; r < 6; ++r) fcol(r, 0) = f[r];
      return rel_diff(lhs, tensor_matrix_product(cross_force_tensor(u), fcol));
    }
    case 16: {
      const Tensor3 lhs = rot_R(matrix_tensor_product(
          transpose_of(vmat), tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix())));
      const Tensor3 vxu = tensor_matrix_product(cross_motion_tensor(vmat), u.as_matrix());
      return rel_diff(lhs, rot_R(tensor_matrix_product(rot_RT(vxu), fmat.as_matrix())));
    }
    case 17: {
      const Tensor3 lhs = rot_R(matrix_tensor_product(
          transpose_of(vmat), tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix())));
      const Tensor3 inner = rot_R(matrix_tensor_product(
          transpose_of(u), tensor_matrix_product(cross_force_tensor(vmat), fmat.as_matrix())));
      return rel_diff(lhs, neg(rot_T(inner)));
    }
    case 18: {
      const Tensor3 prod = tensor_matrix_product(cross_force_tensor(u), fmat.as_matrix());
      return rel_diff(matrix_tensor_product(transpose_of(vmat), rot_R(prod)),
                      rot_R(matrix_tensor_product(transpose_of(vmat), prod)));
    }
    case 19: {
      const int n1 = dim(rng), n2 = dim(rng), n3 = dim(rng), n4 = dim(rng);
      const MatX<double> b = random_matrix(rng, n1, n2);
      Tensor3 y(n2, n3, n4);
      for (int k = 0; k < n4; ++k)
        for (int j = 0; j < n3; ++j)
          for (int i = 0; i < n2; ++i) y(i, j, k) = uniform(rng);
      return rel_diff(rot_T(matrix_tensor_product(b, y)), tensor_matrix_product(rot_T(y), b.transposed()));
    }
    default:
      throw std::invalid_argument("identity index must be 1..19");
  }
}

}  // namespace

double run_m_identity(int index, int instances, std::uint64_t seed) {
  Rng rng(seed + static_cast<std::uint64_t>(index) * 7919);
  double worst = 0;
  for (int it = 0; it < instances; ++it) worst = std::max(worst, eval_identity(index, rng));
  return worst;
}

std::vector<IdentityCheck> run_m_identity_suite(int instances, std::uint64_t seed) {
  std::vector<IdentityCheck> out;
  out.reserve(19);
  for (int i = 1; i <= 19; ++i) out.push_back({"M" + std::to_string(i), run_m_identity(i, instances, seed)});
  return out;
}

}  // namespace dynhess
