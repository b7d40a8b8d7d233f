#include "dynhess/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace dynhess {

namespace {

JointStateT<Dual> seeded_state(const KinematicModel& model, const JointState& state, int g, Var var) {
  JointStateT<Dual> ds = promote_state<Dual>(state);
  switch (var) {
    case Var::q: {
      std::vector<Dual> delta(static_cast<std::size_t>(model.dof()), Dual(0));
      delta[static_cast<std::size_t>(g)] = Dual(0, 1);
      ds.q = integrate_config(model, ds.q, delta);
      break;
    }
    case Var::qd:
      ds.qd[static_cast<std::size_t>(g)].du = 1;
      break;
    case Var::qdd:
      ds.qdd[static_cast<std::size_t>(g)].du = 1;
      break;
  }
  return ds;
}

std::vector<double> fd_tau_column(const KinematicModel& model, const JointState& state, int g, Var var,
                                  double h) {
  JointState plus = state, minus = state;
  if (var == Var::q) {
    std::vector<double> delta(static_cast<std::size_t>(model.dof()), 0.0);
    delta[static_cast<std::size_t>(g)] = h;
    plus.q = integrate_config(model, state.q, delta);
    delta[static_cast<std::size_t>(g)] = -h;
    minus.q = integrate_config(model, state.q, delta);
  } else {
    std::vector<double>& p = (var == Var::qd) ? plus.qd : plus.qdd;
    std::vector<double>& m = (var == Var::qd) ? minus.qd : minus.qdd;
    p[static_cast<std::size_t>(g)] += h;
    m[static_cast<std::size_t>(g)] -= h;
  }
  const std::vector<double> tp = rnea(model, plus), tm = rnea(model, minus);
  std::vector<double> col(tp.size());
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = (tp[i] - tm[i]) / (2 * h);
  return col;
}

}  // namespace

std::vector<double> dual_id_directional(const KinematicModel& model, const JointState& state,
                                        const PerturbationDirection& dir) {
  if (dir.joint < 1 || dir.joint > model.num_bodies() || dir.dof < 0 || dir.dof >= model.joint_dof(dir.joint))
    throw ModelError("dual_id_directional: direction out of range");
  const int g = model.dof_offset(dir.joint) + dir.dof;
  const std::vector<Dual> tau = rnea(model, seeded_state(model, state, g, dir.var));
  std::vector<double> out(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) out[i] = tau[i].du;
  return out;
}

FirstOrderDerivatives dual_fo(const KinematicModel& model, const JointState& state) {
  const int n = model.dof();
  FirstOrderDerivatives out{MatX<double>(n, n), MatX<double>(n, n), MatX<double>(n, n)};
  for (int g = 0; g < n; ++g) {
    for (Var var : {Var::q, Var::qd, Var::qdd}) {
      const std::vector<Dual> tau = rnea(model, seeded_state(model, state, g, var));
      MatX<double>& dst = (var == Var::q) ? out.dtau_dq : (var == Var::qd) ? out.dtau_dqd : out.dtau_dqdd;
      for (int a = 0; a < n; ++a) dst(a, g) = tau[static_cast<std::size_t>(a)].du;
    }
  }
  return out;
}

FirstOrderDerivatives fd_fo(const KinematicModel& model, const JointState& state, double h) {
  if (!(h > 0) || h >= 1e-2) throw std::invalid_argument("fd_fo: step must be in (0, 1e-2)");
  const int n = model.dof();
  FirstOrderDerivatives out{MatX<double>(n, n), MatX<double>(n, n), MatX<double>(n, n)};
  for (int g = 0; g < n; ++g) {
    for (Var var : {Var::q, Var::qd, Var::qdd}) {
      const std::vector<double> col = fd_tau_column(model, state, g, var, h);
      MatX<double>& dst = (var == Var::q) ? out.dtau_dq : (var == Var::qd) ? out.dtau_dqd : out.dtau_dqdd;
      for (int a = 0; a < n; ++a) dst(a, g) = col[static_cast<std::size_t>(a)];
    }
  }
  return out;
}

SecondOrderDerivatives so_oracle(const KinematicModel& model, const JointState& state, DiffMethod method,
                                 double h) {
  const int n = model.dof();
  SecondOrderDerivatives out{Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n), Tensor3(n, n, n)};

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int c = 0; c < n; ++c) {
    // Pages along a configuration direction: second q-derivatives and dM/dq.
    if (method == DiffMethod::dual) {
      const JointStateT<Dual> ds = seeded_state(model, state, c, Var::q);
      const FirstOrderDerivativesT<Dual> fo = id_fo_derivatives(model, ds);
      const MatX<Dual> mm = mass_matrix(model, ds.q);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          out.d2tau_dq2(a, b, c) = fo.dtau_dq(a, b).du;
          out.dM_dq(a, b, c) = mm(a, b).du;
        }
    } else {
      std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
      delta[static_cast<std::size_t>(c)] = h;
      JointState plus = state, minus = state;
      plus.q = integrate_config(model, state.q, delta);
      delta[static_cast<std::size_t>(c)] = -h;
      minus.q = integrate_config(model, state.q, delta);
      const FirstOrderDerivatives fp = id_fo_derivatives(model, plus);
      const FirstOrderDerivatives fm = id_fo_derivatives(model, minus);
      const MatX<double> mp = mass_matrix(model, plus.q);
      const MatX<double> mm = mass_matrix(model, minus.q);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          out.d2tau_dq2(a, b, c) = (fp.dtau_dq(a, b) - fm.dtau_dq(a, b)) / (2 * h);
          out.dM_dq(a, b, c) = (mp(a, b) - mm(a, b)) / (2 * h);
        }
    }

    // Pages along a velocity direction: second qd-derivatives and the mixed
    // partials (stored with the qd direction as the page).
    if (method == DiffMethod::dual) {
      const JointStateT<Dual> ds = seeded_state(model, state, c, Var::qd);
      const FirstOrderDerivativesT<Dual> fo = id_fo_derivatives(model, ds);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          out.d2tau_dqd2(a, b, c) = fo.dtau_dqd(a, b).du;
          out.d2tau_dqd_dq(a, b, c) = fo.dtau_dq(a, b).du;
        }
    } else {
      JointState plus = state, minus = state;
      plus.qd[static_cast<std::size_t>(c)] += h;
      minus.qd[static_cast<std::size_t>(c)] -= h;
      const FirstOrderDerivatives fp = id_fo_derivatives(model, plus);
      const FirstOrderDerivatives fm = id_fo_derivatives(model, minus);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          out.d2tau_dqd2(a, b, c) = (fp.dtau_dqd(a, b) - fm.dtau_dqd(a, b)) / (2 * h);
          out.d2tau_dqd_dq(a, b, c) = (fp.dtau_dq(a, b) - fm.dtau_dq(a, b)) / (2 * h);
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// K-identity suite

namespace {

// Everything the identity right-hand sides consume, in doubles: the per-body
// (seeded) and subtree (accumulated) quantities of one forward pass.
struct FpBoth {
  ForwardPassData<double> seed, acc;
};

FpBoth both_passes(const KinematicModel& model, const JointState& state) {
  FpBoth f;
  f.seed = forward_pass(model, state);
  f.acc = f.seed;
  accumulate_composites(model, f.acc);
  return f;
}

MatX<double> matx_of(const Mat66<double>& m) {
  MatX<double> r(6, 6);
  for (int c = 0; c < 6; ++c)
    for (int i = 0; i < 6; ++i) r(i, c) = m(i, c);
  return r;
}

// 1/2 [ (X x~*) I - I (X x~) + (I X) xbar~* ] built from tensor ops.
Tensor3 coriolis_tensor_halved(const Mat66<double>& inertia, const SpatialMatrix<double>& x) {
  const MatX<double> im = matx_of(inertia);
  SpatialMatrix<double> ix(MatKind::force, x.cols());
  for (int c = 0; c < x.cols(); ++c)
    ix.set_col(c, force_from_array(inertia.mul(to_array(x.motion_col(c)))));
  const Tensor3 t = tensor_matrix_product(cross_force_tensor(x), im) -
                    matrix_tensor_product(im, cross_motion_tensor(x)) + cross_swapped_tensor(ix);
  return 0.5 * t;
}

// (S_j x~*) A - A (S_j x~) for a 6x6 A.
Tensor3 frame_variation(const SpatialMatrix<double>& sj, const Mat66<double>& a) {
  const MatX<double> am = matx_of(a);
  return tensor_matrix_product(cross_force_tensor(sj), am) -
         matrix_tensor_product(am, cross_motion_tensor(sj));
}

Tensor3 matrix_as_pages(const MatX<double>& m) {  // 6 x n matrix -> 6 x 1 x n
  Tensor3 t(6, 1, m.cols());
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < 6; ++r) t(r, 0, c) = m(r, c);
  return t;
}

// One dual forward pass per direction; eps-parts of every quantity the
// identity left-hand sides need.
struct DualSlice {
  std::vector<std::array<double, 6>> s, phid, psid, psidd, vjxs;  // per global DoF
  std::vector<std::array<double, 6>> v, a, f_body, f_comp, ia;    // per body (1-based)
  std::vector<Mat66<double>> inertia, inertia_comp, bc_body, bc_comp;  // halved B
};

std::array<double, 6> eps_of(const SpatialMotion<Dual>& m) {
  return {m.ang[0].du, m.ang[1].du, m.ang[2].du, m.lin[0].du, m.lin[1].du, m.lin[2].du};
}
std::array<double, 6> eps_of(const SpatialForce<Dual>& f) {
  return {f.ang[0].du, f.ang[1].du, f.ang[2].du, f.lin[0].du, f.lin[1].du, f.lin[2].du};
}
Mat66<double> eps_of(const Mat66<Dual>& m) {
  Mat66<double> r;
  for (std::size_t i = 0; i < 36; ++i) r.a[i] = m.a[i].du;
  return r;
}

DualSlice dual_slice(const KinematicModel& model, const JointState& state, int g, Var var) {
  const JointStateT<Dual> ds = seeded_state(model, state, g, var);
  ForwardPassData<Dual> fp = forward_pass(model, ds);
  ForwardPassData<Dual> fa = fp;
  accumulate_composites(model, fa);

  const int nb = model.num_bodies();
  const int n = model.dof();
  DualSlice sl;
  sl.s.resize(static_cast<std::size_t>(n));
  sl.phid.resize(static_cast<std::size_t>(n));
  sl.psid.resize(static_cast<std::size_t>(n));
  sl.psidd.resize(static_cast<std::size_t>(n));
  sl.vjxs.resize(static_cast<std::size_t>(n));
  sl.v.resize(static_cast<std::size_t>(nb) + 1);
  sl.a.resize(static_cast<std::size_t>(nb) + 1);
  sl.f_body.resize(static_cast<std::size_t>(nb) + 1);
  sl.f_comp.resize(static_cast<std::size_t>(nb) + 1);
  sl.ia.resize(static_cast<std::size_t>(nb) + 1);
  sl.inertia.resize(static_cast<std::size_t>(nb) + 1);
  sl.inertia_comp.resize(static_cast<std::size_t>(nb) + 1);
  sl.bc_body.resize(static_cast<std::size_t>(nb) + 1);
  sl.bc_comp.resize(static_cast<std::size_t>(nb) + 1);

  for (int i = 1; i <= nb; ++i) {
    const auto bi = static_cast<std::size_t>(i);
    sl.v[bi] = eps_of(fp.v[bi]);
    sl.a[bi] = eps_of(fp.a[bi]);
    sl.f_body[bi] = eps_of(fp.f_body[bi]);
    sl.f_comp[bi] = eps_of(fa.f_c[bi]);
    sl.ia[bi] = eps_of(force_from_array(fp.inertia_c[bi].mul(to_array(fp.a[bi]))));
    sl.inertia[bi] = eps_of(fp.inertia_c[bi]);  // before accumulation: the body inertia
    sl.inertia_comp[bi] = eps_of(fa.inertia_c[bi]);
    sl.bc_body[bi] = 0.5 * eps_of(fp.coriolis_c[bi]);
    sl.bc_comp[bi] = 0.5 * eps_of(fa.coriolis_c[bi]);
    const SpatialMotion<Dual> vj = fp.v[bi] - fp.v[static_cast<std::size_t>(model.parent(i))];
    for (int t = 0; t < model.joint_dof(i); ++t) {
      const auto gd = static_cast<std::size_t>(model.dof_offset(i) + t);
      sl.s[gd] = eps_of(fp.s[gd]);
      sl.phid[gd] = eps_of(fp.phid[gd]);
      sl.psid[gd] = eps_of(fp.psid[gd]);
      sl.psidd[gd] = eps_of(fp.psidd[gd]);
      sl.vjxs[gd] = eps_of(cross_motion(vj, fp.s[gd]));
    }
  }
  return sl;
}

double tensor_err(const Tensor3& lhs, const Tensor3& rhs) {
  const double scale = std::max({lhs.max_abs(), rhs.max_abs(), 1.0});
  return (lhs - rhs).max_abs() / scale;
}

// LHS pages for a joint-indexed 6 x cols quantity, from the per-direction
// dual slices of joint j.
template <typename Get>
Tensor3 lhs_pages(const KinematicModel& model, int j, int cols, Get&& get) {
  Tensor3 t(6, cols, model.joint_dof(j));
  for (int p = 0; p < model.joint_dof(j); ++p) {
    const int g = model.dof_offset(j) + p;
    for (int c = 0; c < cols; ++c) {
      const std::array<double, 6> col = get(g, c);
      for (int r = 0; r < 6; ++r) t(r, c, p) = col[static_cast<std::size_t>(r)];
    }
  }
  return t;
}

}  // namespace

KIdentityReport check_identities_K(const KinematicModel& model, const JointState& state) {
  const FpBoth fp = both_passes(model, state);
  const int nb = model.num_bodies();
  const int n = model.dof();

  // One dual pass per q direction and per qd direction.
  std::vector<DualSlice> dq(static_cast<std::size_t>(n)), dqd(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int g = 0; g < n; ++g) {
    dq[static_cast<std::size_t>(g)] = dual_slice(model, state, g, Var::q);
    dqd[static_cast<std::size_t>(g)] = dual_slice(model, state, g, Var::qd);
  }

  KIdentityReport rep;
  auto upd = [&rep](int which, double err) {
    double& slot = rep.max_rel_err[static_cast<std::size_t>(which - 1)];
    slot = std::max(slot, err);
  };

  for (int i = 1; i <= nb; ++i) {
    const auto bi = static_cast<std::size_t>(i);
    const int ni = model.joint_dof(i);
    const SpatialMatrix<double> si = motion_block(model, fp.seed.s, i);
    const SpatialMatrix<double> phidi = motion_block(model, fp.seed.phid, i);
    const SpatialMatrix<double> psidi = motion_block(model, fp.seed.psid, i);
    const SpatialMatrix<double> psiddi = motion_block(model, fp.seed.psidd, i);
    const MatX<double> si_m = si.as_matrix();
    const SpatialMotion<double> vi = fp.seed.v[bi];
    const SpatialMotion<double> ai = fp.seed.a[bi];
    const SpatialMotion<double> vj_i = vi - fp.seed.v[static_cast<std::size_t>(model.parent(i))];
    MatX<double> vjxsi(6, ni);
    for (int c = 0; c < ni; ++c) {
      const SpatialMotion<double> x = cross_motion(vj_i, si.motion_col(c));
      for (int r = 0; r < 6; ++r) vjxsi(r, c) = x[r];
    }

    for (int j = 1; j <= nb; ++j) {
      const int nj = model.joint_dof(j);
      const bool j_below_i = is_ancestor_or_equal(model, j, i);   // j on path of i: j <= i
      const bool j_above_i = is_ancestor_or_equal(model, i, j);   // i on path of j: j >= i
      const SpatialMatrix<double> sj = motion_block(model, fp.seed.s, j);
      const SpatialMatrix<double> psidj = motion_block(model, fp.seed.psid, j);
      const SpatialMatrix<double> psiddj = motion_block(model, fp.seed.psidd, j);
      const Tensor3 sj_cm = cross_motion_tensor(sj);
      const Tensor3 zero_6ni(6, ni, nj), zero_66(6, 6, nj), zero_61(6, 1, nj), zero_ni6(ni, 6, nj);

      auto q_lhs_dof = [&](auto member) {
        return lhs_pages(model, j, ni, [&](int g, int c) {
          return (dq[static_cast<std::size_t>(g)].*member)[static_cast<std::size_t>(model.dof_offset(i) + c)];
        });
      };
      auto q_lhs_body = [&](auto member) {
        return lhs_pages(model, j, 1, [&](int g, int) {
          return (dq[static_cast<std::size_t>(g)].*member)[bi];
        });
      };
      auto q_lhs_mat = [&](auto member) {
        Tensor3 t(6, 6, nj);
        for (int p = 0; p < nj; ++p) {
          const Mat66<double>& m = (dq[static_cast<std::size_t>(model.dof_offset(j) + p)].*member)[bi];
          for (int c = 0; c < 6; ++c)
            for (int r = 0; r < 6; ++r) t(r, c, p) = m(r, c);
        }
        return t;
      };

      // K1: dS_i/dq_j
      upd(1, tensor_err(q_lhs_dof(&DualSlice::s),
                        j_below_i ? tensor_matrix_product(sj_cm, si_m) : zero_6ni));
      // K2: dPhid_i/dq_j
      upd(2, tensor_err(q_lhs_dof(&DualSlice::phid),
                        j_below_i ? tensor_matrix_product(cross_motion_tensor(psidj), si_m) +
                                        tensor_matrix_product(sj_cm, phidi.as_matrix())
                                  : zero_6ni));
      // K3: d(S_i qd_i x S_i)/dq_j
      upd(3, tensor_err(q_lhs_dof(&DualSlice::vjxs),
                        j_below_i ? tensor_matrix_product(sj_cm, vjxsi) : zero_6ni));
      // K4: dPsid_i/dq_j
      upd(4, tensor_err(q_lhs_dof(&DualSlice::psid),
                        j_below_i ? tensor_matrix_product(cross_motion_tensor(psidj), si_m) +
                                        tensor_matrix_product(sj_cm, psidi.as_matrix())
                                  : zero_6ni));
      // K5: dI_i/dq_j (body inertia)
      upd(5, tensor_err(q_lhs_mat(&DualSlice::inertia),
                        j_below_i ? frame_variation(sj, fp.seed.inertia_c[bi]) : zero_66));
      // K6: dI^C_i/dq_j
      upd(6, tensor_err(q_lhs_mat(&DualSlice::inertia_comp),
                        j_below_i
                            ? frame_variation(sj, fp.acc.inertia_c[bi])
                            : (j_above_i ? frame_variation(sj, fp.acc.inertia_c[static_cast<std::size_t>(j)])
                                         : zero_66)));
      // K7: da_i/dq_j
      {
        Tensor3 rhs = zero_61;
        if (j_below_i) {
          const MatX<double> m = matx_of(cross_motion_matrix(vi)) * psidj.as_matrix();
          const MatX<double> m2 = matx_of(cross_motion_matrix(ai)) * sj.as_matrix();
          rhs = matrix_as_pages(psiddj.as_matrix() - m - m2);
        }
        upd(7, tensor_err(q_lhs_body(&DualSlice::a), rhs));
      }
      // K8: d(I_i a_i)/dq_j
      {
        Tensor3 rhs = zero_61;
        if (j_below_i) {
          const Mat66<double>& ii = fp.seed.inertia_c[bi];
          const SpatialForce<double> iai = force_from_array(ii.mul(to_array(ai)));
          MatX<double> m(6, nj);
          for (int t = 0; t < nj; ++t) {
            const SpatialForce<double> t1 = cross_force(sj.motion_col(t), iai);
            const std::array<double, 6> t2 = ii.mul(to_array(psiddj.motion_col(t)));
            const std::array<double, 6> t3 = ii.mul(to_array(cross_motion(vi, psidj.motion_col(t))));
            for (int r = 0; r < 6; ++r) m(r, t) = t1[r] + t2[static_cast<std::size_t>(r)] - t3[static_cast<std::size_t>(r)];
          }
          rhs = matrix_as_pages(m);
        }
        upd(8, tensor_err(q_lhs_body(&DualSlice::ia), rhs));
      }
      // K9: dPsidd_i/dq_j
      upd(9, tensor_err(q_lhs_dof(&DualSlice::psidd),
                        j_below_i ? tensor_matrix_product(cross_motion_tensor(psiddj), si_m) +
                                        2.0 * tensor_matrix_product(cross_motion_tensor(psidj),
                                                                    psidi.as_matrix()) +
                                        tensor_matrix_product(sj_cm, psiddi.as_matrix())
                                  : zero_6ni));
      // K10: dB^C_i/dq_j (1/2-convention composite Coriolis matrix)
      {
        Tensor3 rhs = zero_66;
        if (j_below_i || j_above_i) {
          const int b = j_below_i ? i : j;
          const auto bb = static_cast<std::size_t>(b);
          const SpatialMatrix<double> psid_arg = motion_block(model, fp.seed.psid, j);
          const Mat66<double> bch = 0.5 * fp.acc.coriolis_c[bb];
          rhs = coriolis_tensor_halved(fp.acc.inertia_c[bb], psid_arg) + frame_variation(sj, bch);
        }
        upd(10, tensor_err(q_lhs_mat(&DualSlice::bc_comp), rhs));
      }
      // K11: df_i/dq_j (per-body force)
      {
        Tensor3 rhs = zero_61;
        if (j_below_i) {
          const Mat66<double>& ii = fp.seed.inertia_c[bi];
          const Mat66<double> bu = fp.seed.coriolis_c[bi];  // un-halved = 2 B_i
          MatX<double> m(6, nj);
          for (int t = 0; t < nj; ++t) {
            const std::array<double, 6> t1 = ii.mul(to_array(psiddj.motion_col(t)));
            const SpatialForce<double> t2 = cross_force(sj.motion_col(t), fp.seed.f_body[bi]);
            const std::array<double, 6> t3 = bu.mul(to_array(psidj.motion_col(t)));
            for (int r = 0; r < 6; ++r) m(r, t) = t1[static_cast<std::size_t>(r)] + t2[r] + t3[static_cast<std::size_t>(r)];
          }
          rhs = matrix_as_pages(m);
        }
        upd(11, tensor_err(q_lhs_body(&DualSlice::f_body), rhs));
      }
      // K12: df^C_i/dq_j
      {
        Tensor3 rhs = zero_61;
        if (j_below_i || j_above_i) {
          const int b = j_below_i ? i : j;
          const auto bb = static_cast<std::size_t>(b);
          MatX<double> m(6, nj);
          for (int t = 0; t < nj; ++t) {
            const std::array<double, 6> t1 = fp.acc.inertia_c[bb].mul(to_array(psiddj.motion_col(t)));
            const SpatialForce<double> t2 = cross_force(sj.motion_col(t), fp.acc.f_c[bb]);
            const std::array<double, 6> t3 = fp.acc.coriolis_c[bb].mul(to_array(psidj.motion_col(t)));
            for (int r = 0; r < 6; ++r) m(r, t) = t1[static_cast<std::size_t>(r)] + t2[r] + t3[static_cast<std::size_t>(r)];
          }
          rhs = matrix_as_pages(m);
        }
        upd(12, tensor_err(q_lhs_body(&DualSlice::f_comp), rhs));
      }
      // K13: dS_i^T/dq_j
      {
        Tensor3 lhs(ni, 6, nj);
        for (int p = 0; p < nj; ++p) {
          const int g = model.dof_offset(j) + p;
          for (int c = 0; c < ni; ++c) {
            const std::array<double, 6>& col =
                dq[static_cast<std::size_t>(g)].s[static_cast<std::size_t>(model.dof_offset(i) + c)];
            for (int r = 0; r < 6; ++r) lhs(c, r, p) = col[static_cast<std::size_t>(r)];
          }
        }
        MatX<double> neg_sit(ni, 6);
        for (int c = 0; c < ni; ++c)
          for (int r = 0; r < 6; ++r) neg_sit(c, r) = -si_m(r, c);
        upd(13, tensor_err(lhs, j_below_i ? matrix_tensor_product(neg_sit, cross_force_tensor(sj)) : zero_ni6));
      }

      // Velocity-direction identities.
      auto qd_lhs_dof = [&](auto member) {
        return lhs_pages(model, j, ni, [&](int g, int c) {
          return (dqd[static_cast<std::size_t>(g)].*member)[static_cast<std::size_t>(model.dof_offset(i) + c)];
        });
      };
      // K14: dPhid_i/dqd_j
      upd(14, tensor_err(qd_lhs_dof(&DualSlice::phid),
                         j_below_i ? tensor_matrix_product(sj_cm, si_m) : zero_6ni));
      // K15: dPsid_i/dqd_j, zero when j == i
      upd(15, tensor_err(qd_lhs_dof(&DualSlice::psid),
                         (j_below_i && j != i) ? tensor_matrix_product(sj_cm, si_m) : zero_6ni));
      // K16: dB^C_i/dqd_j
      {
        Tensor3 rhs = zero_66;
        if (j_below_i || j_above_i) {
          const int b = j_below_i ? i : j;
          rhs = coriolis_tensor_halved(fp.acc.inertia_c[static_cast<std::size_t>(b)], sj);
        }
        Tensor3 lhs(6, 6, nj);
        for (int p = 0; p < nj; ++p) {
          const Mat66<double>& m =
              dqd[static_cast<std::size_t>(model.dof_offset(j) + p)].bc_comp[bi];
          for (int c = 0; c < 6; ++c)
            for (int r = 0; r < 6; ++r) lhs(r, c, p) = m(r, c);
        }
        upd(16, tensor_err(lhs, rhs));
      }
    }
  }
  return rep;
}

}  // namespace dynhess
