#pragma once

// Ground-frame kinematics sweep and inverse dynamics. All per-body and
// per-DoF quantities are expressed in the ground frame, so the derivative
// sweeps downstream never touch a coordinate transform. Composite quantities
// are seeded with per-body values by forward_pass; accumulation toward the
// root is a separate explicit step so callers can place it where their sweep
// needs it.

#include <vector>

#include "dynhess/model.hpp"
#include "dynhess/tensor.hpp"

namespace dynhess {

template <typename S>
S dot6(const std::array<S, 6>& a, const std::array<S, 6>& b) {
  S acc = S(0);
  for (std::size_t i = 0; i < 6; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename S>
struct ForwardPassData {
  int num_bodies = 0;
  int dof = 0;

  // Per body, indices 0..N with 0 the ground. v[0] = 0, a[0] = -a_g.
  std::vector<Mat33<S>> rot;
  std::vector<Vec3<S>> pos;
  std::vector<SpatialMotion<S>> v, a;
  std::vector<Mat66<S>> inertia_c;            // I^C (ground frame)
  std::vector<Mat66<S>> coriolis_c;           // B^C, un-halved (2x the 1/2-convention)
  std::vector<SpatialForce<S>> f_body, f_c;   // per-body force and its composite

  // Per global DoF: columns of S, Phi-dot, Psi-dot, Psi-ddot (ground frame).
  std::vector<SpatialMotion<S>> s, phid, psid, psidd;
};

namespace detail {

template <typename S>
Mat33<S> mat33_cast(const Mat33<double>& m) {
  Mat33<S> r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = S(m.a[i]);
  return r;
}

template <typename S>
Mat66<S> mat66_cast(const Mat66<double>& m) {
  Mat66<S> r;
  for (std::size_t i = 0; i < 36; ++i) r.a[i] = S(m.a[i]);
  return r;
}

// [[R^T, 0], [-R^T p^, R^T]]: motion transform from ground to body coords.
template <typename S>
Mat66<S> ground_to_body(const Mat33<S>& r, const Vec3<S>& p) {
  Mat66<S> x;
  const Mat33<S> rt = r.transposed();
  const Mat33<S> low = (-1.0) * (rt * skew(p));
  for (int c = 0; c < 3; ++c)
    for (int row = 0; row < 3; ++row) {
      x(row, c) = rt(row, c);
      x(row + 3, c) = low(row, c);
      x(row + 3, c + 3) = rt(row, c);
    }
  return x;
}

template <typename S>
SpatialMotion<S> to_ground(const Mat33<S>& r, const Vec3<S>& p, const SpatialMotion<S>& local) {
  const Vec3<S> ang = r * local.ang;
  return {ang, r * local.lin + cross(p, ang)};
}

}  // namespace detail

/// Shared forward sweep: ground poses, joint motion subspaces, velocities,
/// accelerations, Phi-dot/Psi-dot/Psi-ddot columns, per-body ground-frame
/// inertias, un-halved Coriolis matrices and body forces. Composites are
/// seeded, not accumulated.
template <typename S>
ForwardPassData<S> forward_pass(const KinematicModel& model, const JointStateT<S>& state) {
  const int nb = model.num_bodies();
  const int n = model.dof();
  if (static_cast<int>(state.q.size()) != model.config_size() || static_cast<int>(state.qd.size()) != n ||
      static_cast<int>(state.qdd.size()) != n)
    throw ModelError("forward_pass: state dimensions do not match the model");

  ForwardPassData<S> fp;
  fp.num_bodies = nb;
  fp.dof = n;
  fp.rot.assign(static_cast<std::size_t>(nb) + 1, Mat33<S>::identity());
  fp.pos.assign(static_cast<std::size_t>(nb) + 1, Vec3<S>{});
  fp.v.assign(static_cast<std::size_t>(nb) + 1, SpatialMotion<S>{});
  fp.a.assign(static_cast<std::size_t>(nb) + 1, SpatialMotion<S>{});
  fp.inertia_c.assign(static_cast<std::size_t>(nb) + 1, Mat66<S>{});
  fp.coriolis_c.assign(static_cast<std::size_t>(nb) + 1, Mat66<S>{});
  fp.f_body.assign(static_cast<std::size_t>(nb) + 1, SpatialForce<S>{});
  fp.f_c.assign(static_cast<std::size_t>(nb) + 1, SpatialForce<S>{});
  fp.s.assign(static_cast<std::size_t>(n), SpatialMotion<S>{});
  fp.phid.assign(static_cast<std::size_t>(n), SpatialMotion<S>{});
  fp.psid.assign(static_cast<std::size_t>(n), SpatialMotion<S>{});
  fp.psidd.assign(static_cast<std::size_t>(n), SpatialMotion<S>{});

  // Gravity enters once as the fictitious base acceleration.
  fp.a[0].lin = Vec3<S>{S(-model.gravity()[0]), S(-model.gravity()[1]), S(-model.gravity()[2])};

  for (int i = 1; i <= nb; ++i) {
    const Body& b = model.body(i);
    const int parent = b.parent;
    const int qo = model.q_offset(i);
    const int vo = model.dof_offset(i);
    const int ni = b.joint.dof();

    // Pose of body i: parent pose, fixed placement, then the joint transform.
    Mat33<S> r_joint = detail::mat33_cast<S>(b.placement_rotation.to_mat33());
    Vec3<S> t_joint{S(b.placement_translation[0]), S(b.placement_translation[1]), S(b.placement_translation[2])};
    switch (b.joint.kind) {
      case JointKind::revolute: {
        const Vec3<S> ax{S(b.joint.axis[0]), S(b.joint.axis[1]), S(b.joint.axis[2])};
        r_joint = r_joint * quat_exp_so3(Vec3<S>{state.q[qo] * ax[0], state.q[qo] * ax[1], state.q[qo] * ax[2]})
                                .to_mat33();
        break;
      }
      case JointKind::prismatic: {
        const Vec3<S> ax{S(b.joint.axis[0]), S(b.joint.axis[1]), S(b.joint.axis[2])};
        t_joint += r_joint * Vec3<S>{state.q[qo] * ax[0], state.q[qo] * ax[1], state.q[qo] * ax[2]};
        break;
      }
      case JointKind::spherical: {
        const Quat<S> q{state.q[qo], state.q[qo + 1], state.q[qo + 2], state.q[qo + 3]};
        r_joint = r_joint * q.to_mat33();
        break;
      }
      case JointKind::free_joint: {
        const Vec3<S> t{state.q[qo], state.q[qo + 1], state.q[qo + 2]};
        const Quat<S> q{state.q[qo + 3], state.q[qo + 4], state.q[qo + 5], state.q[qo + 6]};
        t_joint += r_joint * t;
        r_joint = r_joint * q.to_mat33();
        break;
      }
    }
    const Mat33<S>& rp = fp.rot[static_cast<std::size_t>(parent)];
    const Vec3<S>& pp = fp.pos[static_cast<std::size_t>(parent)];
    const Mat33<S> ri = rp * r_joint;
    const Vec3<S> pi = pp + rp * t_joint;
    fp.rot[static_cast<std::size_t>(i)] = ri;
    fp.pos[static_cast<std::size_t>(i)] = pi;

    // Joint motion subspace columns, local then rotated to ground.
    for (int t = 0; t < ni; ++t) {
      SpatialMotion<S> local;
      switch (b.joint.kind) {
        case JointKind::revolute:
          local.ang = Vec3<S>{S(b.joint.axis[0]), S(b.joint.axis[1]), S(b.joint.axis[2])};
          break;
        case JointKind::prismatic:
          local.lin = Vec3<S>{S(b.joint.axis[0]), S(b.joint.axis[1]), S(b.joint.axis[2])};
          break;
        case JointKind::spherical:
          local.ang[t] = S(1);
          break;
        case JointKind::free_joint:
          if (t < 3)
            local.ang[t] = S(1);
          else
            local.lin[t - 3] = S(1);
          break;
      }
      fp.s[static_cast<std::size_t>(vo + t)] = detail::to_ground(ri, pi, local);
    }

    SpatialMotion<S> vj{}, aj{};
    for (int t = 0; t < ni; ++t) {
      vj += state.qd[static_cast<std::size_t>(vo + t)] * fp.s[static_cast<std::size_t>(vo + t)];
      aj += state.qdd[static_cast<std::size_t>(vo + t)] * fp.s[static_cast<std::size_t>(vo + t)];
    }
    const SpatialMotion<S>& vp = fp.v[static_cast<std::size_t>(parent)];
    const SpatialMotion<S>& ap = fp.a[static_cast<std::size_t>(parent)];
    const SpatialMotion<S> vi = vp + vj;
    fp.v[static_cast<std::size_t>(i)] = vi;
    fp.a[static_cast<std::size_t>(i)] = ap + aj + cross_motion(vi, vj);

    for (int t = 0; t < ni; ++t) {
      const SpatialMotion<S>& sc = fp.s[static_cast<std::size_t>(vo + t)];
      const SpatialMotion<S> psd = cross_motion(vp, sc);
      fp.phid[static_cast<std::size_t>(vo + t)] = cross_motion(vi, sc);
      fp.psid[static_cast<std::size_t>(vo + t)] = psd;
      fp.psidd[static_cast<std::size_t>(vo + t)] = cross_motion(ap, sc) + cross_motion(vp, psd);
    }

    // Ground-frame inertia: X^{-T} I X^{-1}.
    const Mat66<S> xinv = detail::ground_to_body(ri, pi);
    const Mat66<S> ig = xinv.transposed() * (detail::mat66_cast<S>(b.inertia.m) * xinv);
    fp.inertia_c[static_cast<std::size_t>(i)] = ig;
    fp.coriolis_c[static_cast<std::size_t>(i)] = coriolis_matrix_unhalved(ig, vi);
    const SpatialForce<S> iv = force_from_array(ig.mul(to_array(vi)));
    const SpatialForce<S> f =
        force_from_array(ig.mul(to_array(fp.a[static_cast<std::size_t>(i)]))) + cross_force(vi, iv);
    fp.f_body[static_cast<std::size_t>(i)] = f;
    fp.f_c[static_cast<std::size_t>(i)] = f;
  }
  return fp;
}

/// Backward sweep adding each body's composites into its parent.
template <typename S>
void accumulate_composites(const KinematicModel& model, ForwardPassData<S>& fp) {
  for (int i = model.num_bodies(); i >= 1; --i) {
    const int parent = model.parent(i);
    if (parent > 0) {
      fp.inertia_c[static_cast<std::size_t>(parent)] += fp.inertia_c[static_cast<std::size_t>(i)];
      fp.coriolis_c[static_cast<std::size_t>(parent)] += fp.coriolis_c[static_cast<std::size_t>(i)];
      fp.f_c[static_cast<std::size_t>(parent)] += fp.f_c[static_cast<std::size_t>(i)];
    }
  }
}

/// Inverse dynamics: tau_i = S_i^T f_i^C with gravity folded in via a_0.
template <typename S>
std::vector<S> rnea(const KinematicModel& model, const JointStateT<S>& state) {
  ForwardPassData<S> fp = forward_pass(model, state);
  accumulate_composites(model, fp);
  std::vector<S> tau(static_cast<std::size_t>(model.dof()));
  for (int g = 0; g < model.dof(); ++g) {
    const int joint = model.joint_of_dof(g);
    tau[static_cast<std::size_t>(g)] =
        dot(fp.s[static_cast<std::size_t>(g)], fp.f_c[static_cast<std::size_t>(joint)]);
  }
  return tau;
}

/// Joint-space mass matrix M_ji = S_j^T I_i^C S_i for j on the path of i,
/// mirrored by symmetry.
template <typename S>
MatX<S> mass_matrix(const KinematicModel& model, const std::vector<S>& q) {
  JointStateT<S> state;
  state.q = q;
  state.qd.assign(static_cast<std::size_t>(model.dof()), S(0));
  state.qdd.assign(static_cast<std::size_t>(model.dof()), S(0));
  ForwardPassData<S> fp = forward_pass(model, state);
  accumulate_composites(model, fp);

  MatX<S> m(model.dof(), model.dof());
  for (int i = 1; i <= model.num_bodies(); ++i) {
    for (int p = 0; p < model.joint_dof(i); ++p) {
      const int ip = model.dof_offset(i) + p;
      const std::array<S, 6> w =
          fp.inertia_c[static_cast<std::size_t>(i)].mul(to_array(fp.s[static_cast<std::size_t>(ip)]));
      for (int j = i; j > 0; j = model.parent(j)) {
        for (int t = 0; t < model.joint_dof(j); ++t) {
          const int jt = model.dof_offset(j) + t;
          const S val = dot6(to_array(fp.s[static_cast<std::size_t>(jt)]), w);
          m(jt, ip) = val;
          m(ip, jt) = val;
        }
      }
    }
  }
  return m;
}

/// 6 x n_i block view of per-DoF motion columns for joint i.
template <typename S>
SpatialMatrix<S> motion_block(const KinematicModel& model, const std::vector<SpatialMotion<S>>& cols, int joint) {
  SpatialMatrix<S> b(MatKind::motion, model.joint_dof(joint));
  for (int t = 0; t < model.joint_dof(joint); ++t)
    b.set_col(t, cols[static_cast<std::size_t>(model.dof_offset(joint) + t)]);
  return b;
}

/// True when a is an ancestor of b or equal to it (a on the path b -> root).
inline bool is_ancestor_or_equal(const KinematicModel& model, int a, int b) {
  for (int k = b; k > 0; k = model.parent(k))
    if (k == a) return true;
  return false;
}

}  // namespace dynhess
