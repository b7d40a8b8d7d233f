#include "dynhess/second_order.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dynhess {

namespace {

using V6 = std::array<double, 6>;

V6 add(const V6& a, const V6& b) {
  V6 r;
  for (std::size_t i = 0; i < 6; ++i) r[i] = a[i] + b[i];
  return r;
}
V6 sub(const V6& a, const V6& b) {
  V6 r;
  for (std::size_t i = 0; i < 6; ++i) r[i] = a[i] - b[i];
  return r;
}

// (v x*) f on raw angular-first arrays; used instead of materializing
// (f xbar*) operator matrices, since (f xbar*) v == (v x*) f.
V6 cross_vf(const V6& v, const V6& f) {
  return {v[1] * f[2] - v[2] * f[1] + v[4] * f[5] - v[5] * f[4],
          v[2] * f[0] - v[0] * f[2] + v[5] * f[3] - v[3] * f[5],
          v[0] * f[1] - v[1] * f[0] + v[3] * f[4] - v[4] * f[3],
          v[1] * f[5] - v[2] * f[4],
          v[2] * f[3] - v[0] * f[5],
          v[0] * f[4] - v[1] * f[3]};
}

struct DofColumns {
  std::vector<V6> s, phid, psid, psidd;
};

// Backward-sweep writes for one body i. Requires the composites of i to hold
// the full subtree values already.
void sweep_body(const KinematicModel& model, const ForwardPassData<double>& fp, const DofColumns& cols, int i,
                SecondOrderDerivatives& out) {
  Tensor3& q2 = out.d2tau_dq2;
  Tensor3& qd2 = out.d2tau_dqd2;
  Tensor3& qdq = out.d2tau_dqd_dq;
  Tensor3& dm = out.dM_dq;

  const Mat66<double>& ic = fp.inertia_c[static_cast<std::size_t>(i)];
  const Mat66<double>& bc = fp.coriolis_c[static_cast<std::size_t>(i)];
  const SpatialForce<double>& fci = fp.f_c[static_cast<std::size_t>(i)];

  BackwardPassScratch w;
  const bool i_has_ancestor = model.parent(i) > 0;

  for (int p = 0; p < model.joint_dof(i); ++p) {
    const int ip = model.dof_offset(i) + p;
    const SpatialMotion<double>& sp = fp.s[static_cast<std::size_t>(ip)];
    const SpatialMotion<double>& psid_p = fp.psid[static_cast<std::size_t>(ip)];
    const SpatialMotion<double>& psidd_p = fp.psidd[static_cast<std::size_t>(ip)];
    const SpatialMotion<double>& phid_p = fp.phid[static_cast<std::size_t>(ip)];

    const Mat66<double> spf_ic = cross_force_times(sp, ic);
    const Mat66<double> ic_spm = times_cross_motion(ic, sp);

    w.a0 = ic.mul(to_array(sp));
    w.a1 = spf_ic - ic_spm;
    w.bic_sp = w.a1 + cross_swap_matrix(force_from_array(w.a0));
    w.bic_psip = coriolis_matrix_unhalved(ic, psid_p);
    w.a3 = w.bic_psip + cross_force_times(sp, bc) - times_cross_motion(bc, sp);
    w.a4 = bc.tmul(to_array(sp));
    // The force seeding a5 is the subtree composite; the per-body force makes
    // the dual-number cross-check fail on any chain deeper than one.
    w.a5 = add(add(bc.mul(to_array(psid_p)), ic.mul(to_array(psidd_p))), to_array(cross_force(sp, fci)));
    w.a7 = add(bc.mul(to_array(sp)), ic.mul(to_array(psid_p + phid_p)));
    if (i_has_ancestor) w.a6 = spf_ic + cross_swap_matrix(force_from_array(w.a0));

    for (int j = i; j > 0; j = model.parent(j)) {
      const bool off_diag = j != i;
      const bool strict_k = model.parent(j) > 0;  // the k-walk passes k != j
      for (int t = 0; t < model.joint_dof(j); ++t) {
        const int jt = model.dof_offset(j) + t;
        const V6& st = cols.s[static_cast<std::size_t>(jt)];
        const V6& psid_t = cols.psid[static_cast<std::size_t>(jt)];
        const V6& psidd_t = cols.psidd[static_cast<std::size_t>(jt)];
        const V6& phid_t = cols.phid[static_cast<std::size_t>(jt)];

        // Only the temporaries some write below consumes are formed.
        const V6 st_x_a4 = cross_vf(st, w.a4);
        w.u2 = w.a1.tmul(st);
        w.u8 = sub(st_x_a4, w.bic_sp.tmul(psid_t));
        w.u9 = cross_vf(st, w.a0);
        w.u11 = w.bic_sp.tmul(st);
        if (off_diag) {
          w.u1 = w.a3.tmul(st);
          w.u12 = w.a1.mul(st);
        }
        if (strict_k) {
          const V6 bic_psid_t = w.bic_sp.mul(psid_t);
          w.u3 = add(add(w.a3.mul(psid_t), w.a1.mul(psidd_t)), cross_vf(st, w.a5));
          V6 a0_psid2 = cross_vf(psid_t, w.a0);
          for (double& x : a0_psid2) x *= 2.0;
          w.u5 = add(sub(a0_psid2, bic_psid_t), st_x_a4);
          w.u6 = add(bic_psid_t, cross_vf(st, w.a7));
          if (off_diag) {
            w.u7 = add(w.a3.mul(st), w.a1.mul(add(psid_t, phid_t)));
            w.u10 = w.bic_sp.mul(st);
          } else {
            w.u4 = w.a6.mul(st);
          }
        }

        for (int k = j; k > 0; k = model.parent(k)) {
          for (int r = 0; r < model.joint_dof(k); ++r) {
            const int kr = model.dof_offset(k) + r;
            const V6& sr = cols.s[static_cast<std::size_t>(kr)];
            const V6& psid_r = cols.psid[static_cast<std::size_t>(kr)];
            const V6& psidd_r = cols.psidd[static_cast<std::size_t>(kr)];
            const V6& phid_r = cols.phid[static_cast<std::size_t>(kr)];

            const double p1 = dot6(w.u11, psid_r);
            const double p2 = dot6(w.u8, psid_r) + dot6(w.u9, psidd_r);

            q2(ip, jt, kr) = p2;
            qdq(ip, kr, jt) = -p1;

            if (j != i) {
              const double v = dot6(w.u1, psid_r) + dot6(w.u2, psidd_r);
              q2(jt, kr, ip) = v;
              q2(jt, ip, kr) = v;
              qdq(jt, ip, kr) = dot6(w.u1, sr) + dot6(w.u2, add(phid_r, psid_r));
              qdq(jt, kr, ip) = p1;
              const double h = dot6(w.u11, sr);
              qd2(jt, kr, ip) = h;
              qd2(jt, ip, kr) = h;
              const double g = dot6(sr, w.u12);
              dm(kr, jt, ip) = g;
              dm(jt, kr, ip) = g;
            }

            if (k != j) {
              q2(ip, kr, jt) = p2;
              const double v3 = dot6(sr, w.u3);
              q2(kr, ip, jt) = v3;
              const double h = -dot6(w.u11, sr);
              qd2(ip, jt, kr) = h;
              qd2(ip, kr, jt) = h;
              qdq(ip, jt, kr) = dot6(sr, w.u5) + dot6(w.u9, add(phid_r, psid_r));
              qdq(kr, jt, ip) = dot6(sr, w.u6);
              const double g = dot6(sr, w.u9);
              dm(kr, ip, jt) = g;
              dm(ip, kr, jt) = g;
              if (j != i) {
                q2(kr, jt, ip) = v3;
                qdq(kr, ip, jt) = dot6(sr, w.u7);
                const double h10 = dot6(sr, w.u10);
                qd2(kr, ip, jt) = h10;
                qd2(kr, jt, ip) = h10;
              } else {
                qd2(kr, jt, ip) = dot6(sr, w.u4);
              }
            } else {
              qd2(ip, jt, kr) = -dot6(w.u2, sr);
            }
          }
        }
      }
    }
  }
}

DofColumns collect_columns(const ForwardPassData<double>& fp) {
  DofColumns c;
  const std::size_t n = fp.s.size();
  c.s.resize(n);
  c.phid.resize(n);
  c.psid.resize(n);
  c.psidd.resize(n);
  for (std::size_t g = 0; g < n; ++g) {
    c.s[g] = to_array(fp.s[g]);
    c.phid[g] = to_array(fp.phid[g]);
    c.psid[g] = to_array(fp.psid[g]);
    c.psidd[g] = to_array(fp.psidd[g]);
  }
  return c;
}

void ensure_outputs(SecondOrderDerivatives& out, int n) {
  if (out.d2tau_dq2.dim1() != n || out.d2tau_dq2.dim2() != n || out.d2tau_dq2.dim3() != n) {
    out.d2tau_dq2 = Tensor3(n, n, n);
    out.d2tau_dqd2 = Tensor3(n, n, n);
    out.d2tau_dqd_dq = Tensor3(n, n, n);
    out.dM_dq = Tensor3(n, n, n);
  }
}

}  // namespace

void id_so_derivatives_serial(const KinematicModel& model, const JointState& state,
                              SecondOrderDerivatives& out) {
  ForwardPassData<double> fp = forward_pass(model, state);
  const DofColumns cols = collect_columns(fp);
  ensure_outputs(out, model.dof());
  for (int i = model.num_bodies(); i >= 1; --i) {
    sweep_body(model, fp, cols, i, out);
    const int parent = model.parent(i);
    if (parent > 0) {
      fp.inertia_c[static_cast<std::size_t>(parent)] += fp.inertia_c[static_cast<std::size_t>(i)];
      fp.coriolis_c[static_cast<std::size_t>(parent)] += fp.coriolis_c[static_cast<std::size_t>(i)];
      fp.f_c[static_cast<std::size_t>(parent)] += fp.f_c[static_cast<std::size_t>(i)];
    }
  }
}

void id_so_derivatives(const KinematicModel& model, const JointState& state, SecondOrderDerivatives& out) {
  ForwardPassData<double> fp = forward_pass(model, state);
  // Accumulating bottom-up first gives every body the same composite values
  // the interleaved sweep would see, and decouples the body sweeps.
  accumulate_composites(model, fp);
  const DofColumns cols = collect_columns(fp);
  ensure_outputs(out, model.dof());
  const int nb = model.num_bodies();
  // Deep bodies carry O(d_i^2) work; handing them out first keeps the
  // dynamic schedule balanced.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int i = nb; i >= 1; --i) sweep_body(model, fp, cols, i, out);
}

SecondOrderDerivatives id_so_derivatives_serial(const KinematicModel& model, const JointState& state) {
  SecondOrderDerivatives out;
  id_so_derivatives_serial(model, state, out);
  return out;
}

SecondOrderDerivatives id_so_derivatives(const KinematicModel& model, const JointState& state) {
  SecondOrderDerivatives out;
  id_so_derivatives(model, state, out);
  return out;
}

Tensor3 cross_hessian_q_qd(const SecondOrderDerivatives& d) { return rot_R(d.d2tau_dqd_dq); }

}  // namespace dynhess
