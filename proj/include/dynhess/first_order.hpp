#pragma once

// First-order analytical partials of inverse dynamics. This is a direct
// two-loop accumulation over (joint, ancestor) pairs, deliberately not a
// truncation of the second-order sweep, so the two codepaths cross-validate.

#include "dynhess/dynamics.hpp"

namespace dynhess {

template <typename S>
struct FirstOrderDerivativesT {
  MatX<S> dtau_dq, dtau_dqd, dtau_dqdd;
};
using FirstOrderDerivatives = FirstOrderDerivativesT<double>;

template <typename S>
FirstOrderDerivativesT<S> id_fo_derivatives(const KinematicModel& model, const JointStateT<S>& state) {
  ForwardPassData<S> fp = forward_pass(model, state);
  accumulate_composites(model, fp);

  const int n = model.dof();
  FirstOrderDerivativesT<S> out{MatX<S>(n, n), MatX<S>(n, n), MatX<S>(n, n)};

  for (int i = 1; i <= model.num_bodies(); ++i) {
    const Mat66<S>& ic = fp.inertia_c[static_cast<std::size_t>(i)];
    const Mat66<S>& bc = fp.coriolis_c[static_cast<std::size_t>(i)];  // un-halved: equals 2B of the definition
    const SpatialForce<S>& fc = fp.f_c[static_cast<std::size_t>(i)];

    for (int p = 0; p < model.joint_dof(i); ++p) {
      const int ip = model.dof_offset(i) + p;
      const SpatialMotion<S>& sp = fp.s[static_cast<std::size_t>(ip)];
      const std::array<S, 6> w_b = bc.tmul(to_array(sp));  // B^T s_p
      const std::array<S, 6> w_i = ic.mul(to_array(sp));   // I^C s_p

      // Column (i,p) of the j-row blocks (j strictly above i):
      //   dtau_dq:  B psid_p + I^C psidd_p + (s_p x*) f^C
      //   dtau_dqd: B s_p + I^C (psid_p + phid_p)
      std::array<S, 6> col_q = bc.mul(to_array(fp.psid[static_cast<std::size_t>(ip)]));
      {
        const std::array<S, 6> t1 = ic.mul(to_array(fp.psidd[static_cast<std::size_t>(ip)]));
        const std::array<S, 6> t2 = to_array(cross_force(sp, fc));
        for (std::size_t k = 0; k < 6; ++k) col_q[k] += t1[k] + t2[k];
      }
      std::array<S, 6> col_qd = bc.mul(to_array(sp));
      {
        const SpatialMotion<S> pp =
            fp.psid[static_cast<std::size_t>(ip)] + fp.phid[static_cast<std::size_t>(ip)];
        const std::array<S, 6> t1 = ic.mul(to_array(pp));
        for (std::size_t k = 0; k < 6; ++k) col_qd[k] += t1[k];
      }

      for (int j = i; j > 0; j = model.parent(j)) {
        for (int t = 0; t < model.joint_dof(j); ++t) {
          const int jt = model.dof_offset(j) + t;
          const std::array<S, 6> st = to_array(fp.s[static_cast<std::size_t>(jt)]);
          const std::array<S, 6> psid_t = to_array(fp.psid[static_cast<std::size_t>(jt)]);
          const std::array<S, 6> psidd_t = to_array(fp.psidd[static_cast<std::size_t>(jt)]);
          const SpatialMotion<S> ppt =
              fp.psid[static_cast<std::size_t>(jt)] + fp.phid[static_cast<std::size_t>(jt)];

          out.dtau_dq(ip, jt) = dot6(w_b, psid_t) + dot6(w_i, psidd_t);
          out.dtau_dqd(ip, jt) = dot6(w_b, st) + dot6(w_i, to_array(ppt));
          const S mval = dot6(w_i, st);
          out.dtau_dqdd(ip, jt) = mval;
          out.dtau_dqdd(jt, ip) = mval;
          if (j != i) {
            out.dtau_dq(jt, ip) = dot6(st, col_q);
            out.dtau_dqd(jt, ip) = dot6(st, col_qd);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace dynhess
