#pragma once

// Test-support second path for the second-order sweep: every per-block
// expression family rebuilt in full tensor form (operator tensors,
// tensor-matrix products, page rotations) and compared against the shipped
// scalar-reduced sweep on random connected index triples.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dynhess/second_order.hpp"

namespace dynhess::testsupport {

inline MatX<double> matx_of(const Mat66<double>& m) {
  MatX<double> r(6, 6);
  for (int c = 0; c < 6; ++c)
    for (int i = 0; i < 6; ++i) r(i, c) = m(i, c);
  return r;
}

struct TensorFormContext {
  const KinematicModel& model;
  ForwardPassData<double> fp;  // composites accumulated

  TensorFormContext(const KinematicModel& m, const JointState& st) : model(m), fp(forward_pass(m, st)) {
    accumulate_composites(m, fp);
  }

  SpatialMatrix<double> s(int x) const { return motion_block(model, fp.s, x); }
  SpatialMatrix<double> psid(int x) const { return motion_block(model, fp.psid, x); }
  SpatialMatrix<double> psidd(int x) const { return motion_block(model, fp.psidd, x); }
  SpatialMatrix<double> phid(int x) const { return motion_block(model, fp.phid, x); }
  MatX<double> psid_plus_phid(int x) const {
    const SpatialMatrix<double> a = psid(x), b = phid(x);
    MatX<double> m(6, a.cols());
    for (int c = 0; c < a.cols(); ++c)
      for (int r = 0; r < 6; ++r) m(r, c) = a(r, c) + b(r, c);
    return m;
  }
  MatX<double> transpose_of(const SpatialMatrix<double>& m) const { return m.as_matrix().transposed(); }

  const Mat66<double>& ic(int x) const { return fp.inertia_c[static_cast<std::size_t>(x)]; }
  const Mat66<double>& bu(int x) const { return fp.coriolis_c[static_cast<std::size_t>(x)]; }  // 2B
  Mat66<double> bh(int x) const { return 0.5 * bu(x); }

  SpatialMatrix<double> apply_force(const Mat66<double>& a, const SpatialMatrix<double>& x) const {
    SpatialMatrix<double> out(MatKind::force, x.cols());
    for (int c = 0; c < x.cols(); ++c) out.set_col(c, force_from_array(a.mul(to_array(x.motion_col(c)))));
    return out;
  }

  // 1/2 [ (X x~*) I^C - I^C (X x~) + (I^C X) xbar~* ]: the subtree Coriolis
  // tensor with a spatial-matrix argument.
  Tensor3 bt(int body, const SpatialMatrix<double>& x) const {
    const MatX<double> im = matx_of(ic(body));
    const Tensor3 t = tensor_matrix_product(cross_force_tensor(x), im) -
                      matrix_tensor_product(im, cross_motion_tensor(x)) +
                      cross_swapped_tensor(apply_force(ic(body), x));
    return 0.5 * t;
  }

  Tensor3 a1t(int body) const {  // S_i x~* B - B S_i x~  (halved B)
    const MatX<double> bm = matx_of(bh(body));
    const SpatialMatrix<double> si = s(body);
    return tensor_matrix_product(cross_force_tensor(si), bm) -
           matrix_tensor_product(bm, cross_motion_tensor(si));
  }
  Tensor3 a2t(int body) const {  // S_i x~* I^C - I^C S_i x~
    const MatX<double> im = matx_of(ic(body));
    const SpatialMatrix<double> si = s(body);
    return tensor_matrix_product(cross_force_tensor(si), im) -
           matrix_tensor_product(im, cross_motion_tensor(si));
  }
};

inline double slice_err(const Tensor3& full, const Tensor3& block, const KinematicModel& m, int row_joint,
                        int col_joint, int page_joint) {
  double worst = 0;
  for (int p = 0; p < block.dim1(); ++p)
    for (int t = 0; t < block.dim2(); ++t)
      for (int r = 0; r < block.dim3(); ++r) {
        const double a = full(m.dof_offset(row_joint) + p, m.dof_offset(col_joint) + t,
                              m.dof_offset(page_joint) + r);
        const double b = block(p, t, r);
        worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}));
      }
  return worst;
}

struct Triple {
  int i, j, k;
};

// Random connected triple k <= j <= i with optional strictness.
inline Triple pick_triple(const KinematicModel& m, std::mt19937_64& rng, bool strict_ji, bool strict_kj) {
  std::uniform_int_distribution<int> body(1, m.num_bodies());
  for (;;) {
    const int i = body(rng);
    std::vector<int> path;
    for (int x = i; x > 0; x = m.parent(x)) path.push_back(x);
    std::uniform_int_distribution<int> along(0, static_cast<int>(path.size()) - 1);
    const int j = path[static_cast<std::size_t>(along(rng))];
    std::vector<int> path_j;
    for (int x = j; x > 0; x = m.parent(x)) path_j.push_back(x);
    std::uniform_int_distribution<int> along_j(0, static_cast<int>(path_j.size()) - 1);
    const int k = path_j[static_cast<std::size_t>(along_j(rng))];
    if (strict_ji && j == i) continue;
    if (strict_kj && k == j) continue;
    return {i, j, k};
  }
}

struct TensorFormCheck {
  std::string family;
  double err = 0;
};

// Requires a model whose depth is at least 3 so strict triples exist.
inline std::vector<TensorFormCheck> run_tensor_form_checks(const KinematicModel& model, const JointState& st,
                                                           int triples, std::uint64_t seed) {
  const SecondOrderDerivatives so = id_so_derivatives(model, st);
  const Tensor3 qdq_rot = cross_hessian_q_qd(so);  // (row, qd-direction, q-direction)
  TensorFormContext c(model, st);
  std::mt19937_64 rng(seed);

  std::vector<TensorFormCheck> out;
  auto row = [&](const char* name) -> double& {
    out.push_back({name, 0.0});
    return out.back().err;
  };

  {  // d2tau_i / dq_j dq_k and its page rotation, k <= j <= i
    double& err = row("q2: rows i");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, false);
      const SpatialMatrix<double> bct_si = c.apply_force(c.bu(i).transposed(), c.s(i));
      const SpatialMatrix<double> ic_si = c.apply_force(c.ic(i), c.s(i));
      const Tensor3 block = -1.0 * rot_T(
          rot_R(matrix_tensor_product(c.transpose_of(c.psid(j)),
                                      tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.psid(k).as_matrix()))) +
          rot_R(matrix_tensor_product(
              c.transpose_of(c.s(j)),
              tensor_matrix_product(cross_swapped_tensor(bct_si), c.psid(k).as_matrix()))) +
          rot_R(matrix_tensor_product(
              c.transpose_of(c.s(j)),
              tensor_matrix_product(cross_swapped_tensor(ic_si), c.psidd(k).as_matrix()))));
      err = std::max(err, slice_err(so.d2tau_dq2, block, model, i, j, k));
      if (k != j) err = std::max(err, slice_err(so.d2tau_dq2, rot_R(block), model, i, k, j));
    }
  }
  {  // d2tau_k / dq_i dq_j and rotation, k < j <= i
    double& err = row("q2: rows k");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, true);
      const Tensor3 inner = 2.0 * (c.bt(i, c.psid(i)) + c.a1t(i));
      MatX<double> fo_term(6, model.joint_dof(i));  // 2B psid_i + I^C psidd_i + f^C xbar* S_i
      {
        const SpatialMatrix<double> si = c.s(i), pd = c.psid(i), pdd = c.psidd(i);
        const Mat66<double> fswap = cross_swap_matrix(c.fp.f_c[static_cast<std::size_t>(i)]);
        for (int col = 0; col < si.cols(); ++col) {
          const auto t1 = c.bu(i).mul(to_array(pd.motion_col(col)));
          const auto t2 = c.ic(i).mul(to_array(pdd.motion_col(col)));
          const auto t3 = fswap.mul(to_array(si.motion_col(col)));
          for (int r = 0; r < 6; ++r)
            fo_term(r, col) = t1[static_cast<std::size_t>(r)] + t2[static_cast<std::size_t>(r)] +
                              t3[static_cast<std::size_t>(r)];
        }
      }
      const Tensor3 block = matrix_tensor_product(
          c.transpose_of(c.s(k)),
          rot_R(tensor_matrix_product(inner, c.psid(j).as_matrix()) +
                tensor_matrix_product(c.a2t(i), c.psidd(j).as_matrix())) +
              tensor_matrix_product(cross_force_tensor(c.s(j)), fo_term));
      err = std::max(err, slice_err(so.d2tau_dq2, block, model, k, i, j));
      if (j != i) err = std::max(err, slice_err(so.d2tau_dq2, rot_R(block), model, k, j, i));
    }
  }
  {  // d2tau_j / dq_k dq_i and rotation, k <= j < i
    double& err = row("q2: rows j");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, false);
      const Tensor3 inner = 2.0 * (c.bt(i, c.psid(i)) + c.a1t(i));
      const Tensor3 block = matrix_tensor_product(
          c.transpose_of(c.s(j)), tensor_matrix_product(inner, c.psid(k).as_matrix()) +
                                      tensor_matrix_product(c.a2t(i), c.psidd(k).as_matrix()));
      err = std::max(err, slice_err(so.d2tau_dq2, block, model, j, k, i));
      err = std::max(err, slice_err(so.d2tau_dq2, rot_R(block), model, j, i, k));
    }
  }

  {  // d2tau_i / dqd_j dqd_k and rotation, k < j <= i
    double& err = row("qd2: rows i");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, true);
      const Tensor3 block = -1.0 * rot_T(rot_R(matrix_tensor_product(
          c.transpose_of(c.s(j)),
          tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.s(k).as_matrix()))));
      err = std::max(err, slice_err(so.d2tau_dqd2, block, model, i, j, k));
      err = std::max(err, slice_err(so.d2tau_dqd2, rot_R(block), model, i, k, j));
    }
  }
  {  // same second direction: k = j <= i
    double& err = row("qd2: rows i, same joint");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, false);
      (void)k;
      const Tensor3 block = -1.0 * rot_T(rot_R(matrix_tensor_product(
          c.transpose_of(c.s(j)), tensor_matrix_product(c.a2t(i), c.s(j).as_matrix()))));
      err = std::max(err, slice_err(so.d2tau_dqd2, block, model, i, j, j));
    }
  }
  {  // d2tau_k / dqd_i dqd_j and rotation, k < j < i
    double& err = row("qd2: rows k");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, true);
      const Tensor3 block = rot_R(matrix_tensor_product(
          c.transpose_of(c.s(k)),
          tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.s(j).as_matrix())));
      err = std::max(err, slice_err(so.d2tau_dqd2, block, model, k, i, j));
      err = std::max(err, slice_err(so.d2tau_dqd2, rot_R(block), model, k, j, i));
    }
  }
  {  // k < j = i
    double& err = row("qd2: rows k, j = i");
    for (int it = 0; it < triples; ++it) {
      const auto [i, jj, k] = pick_triple(model, rng, false, true);
      (void)jj;
      if (k == i) continue;
      const Tensor3 inner = cross_swapped_tensor(c.apply_force(c.ic(i), c.s(i))) +
                            tensor_matrix_product(cross_force_tensor(c.s(i)), matx_of(c.ic(i)));
      const Tensor3 block = rot_R(matrix_tensor_product(
          c.transpose_of(c.s(k)), tensor_matrix_product(inner, c.s(i).as_matrix())));
      err = std::max(err, slice_err(so.d2tau_dqd2, block, model, k, i, i));
    }
  }
  {  // d2tau_j / dqd_k dqd_i and rotation, k <= j < i
    double& err = row("qd2: rows j");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, false);
      const Tensor3 block = matrix_tensor_product(
          c.transpose_of(c.s(j)), tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.s(k).as_matrix()));
      err = std::max(err, slice_err(so.d2tau_dqd2, block, model, j, k, i));
      err = std::max(err, slice_err(so.d2tau_dqd2, rot_R(block), model, j, i, k));
    }
  }

  // Cross blocks are (rows, qd-direction, q-direction); qdq_rot matches.
  {  // d2tau_i / dqd_j dq_k, k <= j <= i
    double& err = row("cross: rows i, qd j");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, false);
      const Tensor3 block = -1.0 * rot_T(rot_R(matrix_tensor_product(
          c.transpose_of(c.s(j)),
          tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.psid(k).as_matrix()))));
      err = std::max(err, slice_err(qdq_rot, block, model, i, j, k));
    }
  }
  {  // d2tau_j / dqd_i dq_k, k <= j < i
    double& err = row("cross: rows j, qd i");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, false);
      const Tensor3 block = rot_R(matrix_tensor_product(
          c.transpose_of(c.s(j)),
          tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.psid(k).as_matrix())));
      err = std::max(err, slice_err(qdq_rot, block, model, j, i, k));
    }
  }
  {  // d2tau_i / dqd_k dq_j, k < j <= i
    double& err = row("cross: rows i, qd k");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, true);
      const SpatialMatrix<double> bct_si = c.apply_force(c.bu(i).transposed(), c.s(i));
      const SpatialMatrix<double> ic_si = c.apply_force(c.ic(i), c.s(i));
      const Tensor3 part1 = rot_R(matrix_tensor_product(
          c.transpose_of(c.s(k)),
          tensor_matrix_product(-2.0 * c.bt(i, c.s(i)), c.psid(j).as_matrix()) +
              tensor_matrix_product(cross_swapped_tensor(bct_si), c.s(j).as_matrix()) +
              2.0 * tensor_matrix_product(cross_swapped_tensor(ic_si), c.psid(j).as_matrix())));
      const Tensor3 part2 = rot_R(matrix_tensor_product(
          c.psid_plus_phid(k).transposed(),
          tensor_matrix_product(cross_swapped_tensor(ic_si), c.s(j).as_matrix())));
      const Tensor3 block = rot_T(part1 + part2);
      err = std::max(err, slice_err(qdq_rot, block, model, i, k, j));
    }
  }
  {  // d2tau_k / dqd_i dq_j, k < j <= i
    double& err = row("cross: rows k, qd i");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, true);
      SpatialMatrix<double> arg(MatKind::force, model.joint_dof(i));
      {
        const SpatialMatrix<double> si = c.s(i);
        const MatX<double> pp = c.psid_plus_phid(i);
        for (int col = 0; col < si.cols(); ++col) {
          const auto t1 = c.bu(i).mul(to_array(si.motion_col(col)));
          std::array<double, 6> ppc{};
          for (int r = 0; r < 6; ++r) ppc[static_cast<std::size_t>(r)] = pp(r, col);
          const auto t2 = c.ic(i).mul(ppc);
          std::array<double, 6> sum{};
          for (std::size_t r = 0; r < 6; ++r) sum[r] = t1[r] + t2[r];
          arg.set_col(col, force_from_array(sum));
        }
      }
      const Tensor3 block = rot_R(matrix_tensor_product(
          c.transpose_of(c.s(k)),
          tensor_matrix_product(cross_swapped_tensor(arg), c.s(j).as_matrix()) +
              tensor_matrix_product(2.0 * c.bt(i, c.s(i)), c.psid(j).as_matrix())));
      err = std::max(err, slice_err(qdq_rot, block, model, k, i, j));
    }
  }
  {  // d2tau_j / dqd_k dq_i, k <= j < i
    double& err = row("cross: rows j, qd k");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, false);
      const Tensor3 inner = 2.0 * (c.bt(i, c.psid(i)) + c.a1t(i));
      const Tensor3 block = matrix_tensor_product(
          c.transpose_of(c.s(j)), tensor_matrix_product(inner, c.s(k).as_matrix()) +
                                      tensor_matrix_product(c.a2t(i), c.psid_plus_phid(k)));
      err = std::max(err, slice_err(qdq_rot, block, model, j, k, i));
    }
  }
  {  // d2tau_k / dqd_j dq_i, k < j < i
    double& err = row("cross: rows k, qd j");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, true);
      const Tensor3 inner = 2.0 * (c.bt(i, c.psid(i)) + c.a1t(i));
      const Tensor3 block = matrix_tensor_product(
          c.transpose_of(c.s(k)), tensor_matrix_product(inner, c.s(j).as_matrix()) +
                                      tensor_matrix_product(c.a2t(i), c.psid_plus_phid(j)));
      err = std::max(err, slice_err(qdq_rot, block, model, k, j, i));
    }
  }

  {  // dM_ji / dq_k = dM_ij / dq_k = 0 for k <= j <= i
    double& err = row("dM: zero on common path");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, false);
      const Tensor3 zero_a(model.joint_dof(j), model.joint_dof(i), model.joint_dof(k));
      const Tensor3 zero_b(model.joint_dof(i), model.joint_dof(j), model.joint_dof(k));
      err = std::max(err, slice_err(so.dM_dq, zero_a, model, j, i, k));
      err = std::max(err, slice_err(so.dM_dq, zero_b, model, i, j, k));
    }
  }
  {  // dM_ki / dq_j and its transpose, k < j <= i
    double& err = row("dM: rows k, cols i");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, false, true);
      const SpatialMatrix<double> ic_si = c.apply_force(c.ic(i), c.s(i));
      const Tensor3 block = rot_R(matrix_tensor_product(
          c.transpose_of(c.s(k)),
          tensor_matrix_product(cross_swapped_tensor(ic_si), c.s(j).as_matrix())));
      err = std::max(err, slice_err(so.dM_dq, block, model, k, i, j));
      err = std::max(err, slice_err(so.dM_dq, rot_T(block), model, i, k, j));
    }
  }
  {  // dM_kj / dq_i and its transpose, k <= j < i
    double& err = row("dM: rows k, cols j");
    for (int it = 0; it < triples; ++it) {
      const auto [i, j, k] = pick_triple(model, rng, true, false);
      const Tensor3 block = matrix_tensor_product(
          c.transpose_of(c.s(k)), tensor_matrix_product(c.a2t(i), c.s(j).as_matrix()));
      err = std::max(err, slice_err(so.dM_dq, block, model, k, j, i));
      err = std::max(err, slice_err(so.dM_dq, rot_T(block), model, j, k, i));
    }
  }

  return out;
}

}  // namespace dynhess::testsupport
