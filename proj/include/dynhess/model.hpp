#pragma once

// Kinematic tree data model: joints whose configurations live on Lie groups
// (revolute, prismatic, spherical, free), fixed placements, per-body spatial
// inertias and gravity. Configuration coordinates use unit quaternions
// (scalar first) for the rotational parts; free joints store translation
// then quaternion. Tangent/velocity coordinates are angular-first,
// matching the spatial-vector layout.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynhess/spatial.hpp"

namespace dynhess {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Quaternions (w, x, y, z)

template <typename S>
struct Quat {
  S w{1}, x{}, y{}, z{};

  Quat() = default;
  Quat(S w_, S x_, S y_, S z_) : w(w_), x(x_), y(y_), z(z_) {}

  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }

  S squared_norm() const { return w * w + x * x + y * y + z * z; }

  Quat normalized() const {
    using std::sqrt;
    const S inv = S(1) / sqrt(squared_norm());
    return {w * inv, x * inv, y * inv, z * inv};
  }

  Mat33<S> to_mat33() const {
    Mat33<S> r;
    const S xx = x * x, yy = y * y, zz = z * z;
    const S xy = x * y, xz = x * z, yz = y * z;
    const S wx = w * x, wy = w * y, wz = w * z;
    r(0, 0) = S(1) - S(2) * (yy + zz);
    r(0, 1) = S(2) * (xy - wz);
    r(0, 2) = S(2) * (xz + wy);
    r(1, 0) = S(2) * (xy + wz);
    r(1, 1) = S(1) - S(2) * (xx + zz);
    r(1, 2) = S(2) * (yz - wx);
    r(2, 0) = S(2) * (xz - wy);
    r(2, 1) = S(2) * (yz + wx);
    r(2, 2) = S(1) - S(2) * (xx + yy);
    return r;
  }
};

/// Quaternion of the rotation exp(delta^), series-switched near zero.
template <typename S>
Quat<S> quat_exp_so3(const Vec3<S>& delta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const S th2 = dot(delta, delta);
  S w, coeff;
  if (scalar_real(th2) < 1e-14) {
    w = S(1) - th2 * S(1.0 / 8.0);
    coeff = S(0.5) - th2 * S(1.0 / 48.0);
  } else {
    const S th = sqrt(th2);
    w = cos(S(0.5) * th);
    coeff = sin(S(0.5) * th) / th;
  }
  return {w, coeff * delta[0], coeff * delta[1], coeff * delta[2]};
}

/// Translation factor of the SE(3) exponential:
/// V(w) = 1 + a w^ + b w^ w^ with a = (1-cos t)/t^2, b = (t-sin t)/t^3.
template <typename S>
Mat33<S> se3_exp_translation_factor(const Vec3<S>& omega) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const S th2 = dot(omega, omega);
  S ca, cb;
  if (scalar_real(th2) < 1e-14) {
    ca = S(0.5) - th2 * S(1.0 / 24.0);
    cb = S(1.0 / 6.0) - th2 * S(1.0 / 120.0);
  } else {
    const S th = sqrt(th2);
    ca = (S(1) - cos(th)) / th2;
    cb = (th - sin(th)) / (th2 * th);
  }
  const Mat33<S> wx = skew(omega);
  Mat33<S> v = Mat33<S>::identity();
  const Mat33<S> wx2 = wx * wx;
  for (std::size_t i = 0; i < 9; ++i) v.a[i] = v.a[i] + ca * wx.a[i] + cb * wx2.a[i];
  return v;
}

// ---------------------------------------------------------------------------
// Joints and bodies

enum class JointKind : std::uint8_t { revolute, prismatic, spherical, free_joint };

struct JointType {
  JointKind kind = JointKind::revolute;
  Vec3<double> axis{0, 0, 1};  // revolute/prismatic only

  int dof() const {
    switch (kind) {
      case JointKind::revolute:
      case JointKind::prismatic:
        return 1;
      case JointKind::spherical:
        return 3;
      case JointKind::free_joint:
        return 6;
    }
    return 0;
  }

  int nq() const {
    switch (kind) {
      case JointKind::revolute:
      case JointKind::prismatic:
        return 1;
      case JointKind::spherical:
        return 4;
      case JointKind::free_joint:
        return 7;
    }
    return 0;
  }

  static JointType revolute(const Vec3<double>& axis) { return {JointKind::revolute, axis}; }
  static JointType prismatic(const Vec3<double>& axis) { return {JointKind::prismatic, axis}; }
  static JointType spherical() { return {JointKind::spherical, {0, 0, 1}}; }
  static JointType free() { return {JointKind::free_joint, {0, 0, 1}}; }
};

const char* joint_kind_name(JointKind k);
JointType joint_type_from_name(const std::string& name, const Vec3<double>& axis);

struct Body {
  int id = 0;
  int parent = 0;  // 0 = root/ground
  JointType joint;
  Vec3<double> placement_translation{};
  Quat<double> placement_rotation{};
  SpatialInertia<double> inertia;
};

/// Immutable tree of bodies. Body indices are 1..N; index 0 is the ground.
class KinematicModel {
 public:
  KinematicModel(std::string name, const Vec3<double>& gravity, std::vector<Body> bodies);

  const std::string& name() const { return name_; }
  const Vec3<double>& gravity() const { return gravity_; }

  int num_bodies() const { return static_cast<int>(bodies_.size()); }
  int dof() const { return dof_; }
  int config_size() const { return nq_; }
  int depth() const { return depth_; }

  const Body& body(int i) const { return bodies_[static_cast<std::size_t>(i - 1)]; }
  int parent(int i) const { return body(i).parent; }
  int joint_dof(int i) const { return body(i).joint.dof(); }
  int joint_nq(int i) const { return body(i).joint.nq(); }
  int dof_offset(int i) const { return dof_offset_[static_cast<std::size_t>(i - 1)]; }
  int q_offset(int i) const { return q_offset_[static_cast<std::size_t>(i - 1)]; }

  /// Joint index owning global DoF g, plus the DoF's index within the joint.
  int joint_of_dof(int g) const { return dof_to_joint_[static_cast<std::size_t>(g)]; }

 private:
  std::string name_;
  Vec3<double> gravity_{0, 0, -9.81};
  std::vector<Body> bodies_;
  std::vector<int> dof_offset_, q_offset_, dof_to_joint_;
  int dof_ = 0, nq_ = 0, depth_ = 0;
};

template <typename S>
struct JointStateT {
  std::vector<S> q, qd, qdd;
};
using JointState = JointStateT<double>;

template <typename S>
JointStateT<S> promote_state(const JointState& st) {
  JointStateT<S> out;
  out.q.assign(st.q.begin(), st.q.end());
  out.qd.assign(st.qd.begin(), st.qd.end());
  out.qdd.assign(st.qdd.begin(), st.qdd.end());
  return out;
}

// ---------------------------------------------------------------------------
// Model I/O and generators

KinematicModel load_model(const std::string& json_text);
KinematicModel load_model_file(const std::string& path);
std::string save_model(const KinematicModel& model);

/// Unbranched N-body chain; link lengths, masses and placement orientations
/// are randomized but reproducible per seed. Inertias come from a solid
/// cylinder along the link.
KinematicModel serial_chain(int n, const JointType& joint, std::uint64_t seed);

/// Complete bf-ary tree filled level by level with N bodies.
KinematicModel branched_chain(int n, int bf, const JointType& joint, std::uint64_t seed);

/// Uniform random state: angles in [-pi, pi], quaternions uniform on S^3,
/// free translations in [-1, 1]^3, rates and accelerations in [-1, 1].
JointState random_state(const KinematicModel& model, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Configuration integration (local/right perturbation)

/// Per joint: additive for revolute/prismatic, right multiplication by the
/// SO(3)/SE(3) exponential of the tangent slice for spherical/free.
/// Quaternions are re-normalized.
template <typename S>
std::vector<S> integrate_config(const KinematicModel& model, const std::vector<S>& q,
                                const std::vector<S>& delta) {
  if (static_cast<int>(q.size()) != model.config_size() || static_cast<int>(delta.size()) != model.dof())
    throw ModelError("integrate_config: configuration or tangent size mismatch");
  std::vector<S> out = q;
  for (int i = 1; i <= model.num_bodies(); ++i) {
    const int qo = model.q_offset(i);
    const int vo = model.dof_offset(i);
    switch (model.body(i).joint.kind) {
      case JointKind::revolute:
      case JointKind::prismatic:
        out[qo] = q[qo] + delta[vo];
        break;
      case JointKind::spherical: {
        const Quat<S> q0{q[qo], q[qo + 1], q[qo + 2], q[qo + 3]};
        const Vec3<S> d{delta[vo], delta[vo + 1], delta[vo + 2]};
        const Quat<S> q1 = (q0 * quat_exp_so3(d)).normalized();
        out[qo] = q1.w;
        out[qo + 1] = q1.x;
        out[qo + 2] = q1.y;
        out[qo + 3] = q1.z;
        break;
      }
      case JointKind::free_joint: {
        const Vec3<S> t0{q[qo], q[qo + 1], q[qo + 2]};
        const Quat<S> q0{q[qo + 3], q[qo + 4], q[qo + 5], q[qo + 6]};
        const Vec3<S> w{delta[vo], delta[vo + 1], delta[vo + 2]};
        const Vec3<S> v{delta[vo + 3], delta[vo + 4], delta[vo + 5]};
        const Vec3<S> step = q0.to_mat33() * (se3_exp_translation_factor(w) * v);
        const Quat<S> q1 = (q0 * quat_exp_so3(w)).normalized();
        out[qo] = t0[0] + step[0];
        out[qo + 1] = t0[1] + step[1];
        out[qo + 2] = t0[2] + step[2];
        out[qo + 3] = q1.w;
        out[qo + 4] = q1.x;
        out[qo + 5] = q1.y;
        out[qo + 6] = q1.z;
        break;
      }
    }
  }
  return out;
}

}  // namespace dynhess
