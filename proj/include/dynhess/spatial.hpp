#pragma once

// 6-D spatial vector algebra: motion/force vectors, cross products, spatial
// inertia and the body-level Coriolis matrix. All 6-vectors are angular-first
// (components 0-2 angular, 3-5 linear). Everything is templated on the scalar
// so the same formulas run over plain doubles and over dual numbers.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dynhess {

inline double scalar_real(double v) { return v; }

// ---------------------------------------------------------------------------
// 3-vectors and 3x3 matrices

template <typename S>
struct Vec3 {
  std::array<S, 3> c{};

  Vec3() = default;
  Vec3(S a, S b, S d) : c{a, b, d} {}

  S& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  const S& operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec3 operator+(const Vec3& o) const { return {c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2]}; }
  Vec3 operator-(const Vec3& o) const { return {c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}; }
  Vec3 operator-() const { return {-c[0], -c[1], -c[2]}; }
  Vec3& operator+=(const Vec3& o) {
    c[0] += o.c[0];
    c[1] += o.c[1];
    c[2] += o.c[2];
    return *this;
  }
  template <typename T>
  friend Vec3 operator*(T s, const Vec3& v) {
    return {s * v.c[0], s * v.c[1], s * v.c[2]};
  }
};

template <typename S>
Vec3<S> cross(const Vec3<S>& a, const Vec3<S>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <typename S>
S dot(const Vec3<S>& a, const Vec3<S>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Column-major 3x3.
template <typename S>
struct Mat33 {
  std::array<S, 9> a{};

  S& operator()(int r, int c) { return a[static_cast<std::size_t>(r + 3 * c)]; }
  const S& operator()(int r, int c) const { return a[static_cast<std::size_t>(r + 3 * c)]; }

  static Mat33 identity() {
    Mat33 m;
    m(0, 0) = m(1, 1) = m(2, 2) = S(1);
    return m;
  }

  Vec3<S> operator*(const Vec3<S>& v) const {
    Vec3<S> r;
    for (int i = 0; i < 3; ++i) r[i] = (*this)(i, 0) * v[0] + (*this)(i, 1) * v[1] + (*this)(i, 2) * v[2];
    return r;
  }

  Mat33 operator*(const Mat33& o) const {
    Mat33 r;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 3; ++i) {
        S acc = S(0);
        for (int k = 0; k < 3; ++k) acc += (*this)(i, k) * o(k, c);
        r(i, c) = acc;
      }
    return r;
  }

  Mat33 transposed() const {
    Mat33 r;
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 3; ++i) r(i, c) = (*this)(c, i);
    return r;
  }
};

template <typename S>
Mat33<S> operator+(const Mat33<S>& a, const Mat33<S>& b) {
  Mat33<S> r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = a.a[i] + b.a[i];
  return r;
}
template <typename S, typename T>
Mat33<S> operator*(T s, const Mat33<S>& m) {
  Mat33<S> r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = s * m.a[i];
  return r;
}

template <typename S>
Mat33<S> skew(const Vec3<S>& v) {
  Mat33<S> m;
  m(0, 1) = -v[2];
  m(0, 2) = v[1];
  m(1, 0) = v[2];
  m(1, 2) = -v[0];
  m(2, 0) = -v[1];
  m(2, 1) = v[0];
  return m;
}

// ---------------------------------------------------------------------------
// Spatial vectors

/// Member of M^6: angular part first, then linear.
template <typename S>
struct SpatialMotion {
  Vec3<S> ang{}, lin{};

  SpatialMotion() = default;
  SpatialMotion(const Vec3<S>& a, const Vec3<S>& l) : ang(a), lin(l) {}

  S& operator[](int i) { return i < 3 ? ang[i] : lin[i - 3]; }
  const S& operator[](int i) const { return i < 3 ? ang[i] : lin[i - 3]; }

  SpatialMotion operator+(const SpatialMotion& o) const { return {ang + o.ang, lin + o.lin}; }
  SpatialMotion operator-(const SpatialMotion& o) const { return {ang - o.ang, lin - o.lin}; }
  SpatialMotion operator-() const { return {-ang, -lin}; }
  SpatialMotion& operator+=(const SpatialMotion& o) {
    ang += o.ang;
    lin += o.lin;
    return *this;
  }
  template <typename T>
  friend SpatialMotion operator*(T s, const SpatialMotion& v) {
    return {s * v.ang, s * v.lin};
  }
};

/// Member of F^6: moment first, then force.
template <typename S>
struct SpatialForce {
  Vec3<S> ang{}, lin{};

  SpatialForce() = default;
  SpatialForce(const Vec3<S>& a, const Vec3<S>& l) : ang(a), lin(l) {}

  S& operator[](int i) { return i < 3 ? ang[i] : lin[i - 3]; }
  const S& operator[](int i) const { return i < 3 ? ang[i] : lin[i - 3]; }

  SpatialForce operator+(const SpatialForce& o) const { return {ang + o.ang, lin + o.lin}; }
  SpatialForce operator-(const SpatialForce& o) const { return {ang - o.ang, lin - o.lin}; }
  SpatialForce operator-() const { return {-ang, -lin}; }
  SpatialForce& operator+=(const SpatialForce& o) {
    ang += o.ang;
    lin += o.lin;
    return *this;
  }
  template <typename T>
  friend SpatialForce operator*(T s, const SpatialForce& f) {
    return {s * f.ang, s * f.lin};
  }
};

/// M^6 x F^6 pairing (power when v is a velocity and f a force).
template <typename S>
S dot(const SpatialMotion<S>& v, const SpatialForce<S>& f) {
  return dot(v.ang, f.ang) + dot(v.lin, f.lin);
}

/// (v x) u: angular = w_v x w_u, linear = vbar_v x w_u + w_v x vbar_u.
template <typename S>
SpatialMotion<S> cross_motion(const SpatialMotion<S>& v, const SpatialMotion<S>& u) {
  return {cross(v.ang, u.ang), cross(v.lin, u.ang) + cross(v.ang, u.lin)};
}

/// (v x*) f: moment = w x m + vbar x fbar, force = w x fbar.
template <typename S>
SpatialForce<S> cross_force(const SpatialMotion<S>& v, const SpatialForce<S>& f) {
  return {cross(v.ang, f.ang) + cross(v.lin, f.lin), cross(v.ang, f.lin)};
}

/// (f xbar*) v, defined by swapping the cross-product order: equals (v x*) f.
template <typename S>
SpatialForce<S> cross_force_swapped(const SpatialForce<S>& f, const SpatialMotion<S>& v) {
  return cross_force(v, f);
}

// ---------------------------------------------------------------------------
// 6x6 matrices

/// Dense 6x6, column-major. Mixed units; used for cross-product operators,
/// spatial inertias in matrix form and Coriolis matrices.
template <typename S>
struct Mat66 {
  std::array<S, 36> a{};

  S& operator()(int r, int c) { return a[static_cast<std::size_t>(r + 6 * c)]; }
  const S& operator()(int r, int c) const { return a[static_cast<std::size_t>(r + 6 * c)]; }

  static Mat66 identity() {
    Mat66 m;
    for (int i = 0; i < 6; ++i) m(i, i) = S(1);
    return m;
  }

  Mat66 operator+(const Mat66& o) const {
    Mat66 r;
    for (std::size_t i = 0; i < 36; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }
  Mat66 operator-(const Mat66& o) const {
    Mat66 r;
    for (std::size_t i = 0; i < 36; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }
  Mat66 operator-() const {
    Mat66 r;
    for (std::size_t i = 0; i < 36; ++i) r.a[i] = -a[i];
    return r;
  }
  Mat66& operator+=(const Mat66& o) {
    for (std::size_t i = 0; i < 36; ++i) a[i] += o.a[i];
    return *this;
  }
  template <typename T>
  friend Mat66 operator*(T s, const Mat66& m) {
    Mat66 r;
    for (std::size_t i = 0; i < 36; ++i) r.a[i] = s * m.a[i];
    return r;
  }

  Mat66 operator*(const Mat66& o) const {
    Mat66 r;
    for (int c = 0; c < 6; ++c)
      for (int i = 0; i < 6; ++i) {
        S acc = S(0);
        for (int k = 0; k < 6; ++k) acc += (*this)(i, k) * o(k, c);
        r(i, c) = acc;
      }
    return r;
  }

  Mat66 transposed() const {
    Mat66 r;
    for (int c = 0; c < 6; ++c)
      for (int i = 0; i < 6; ++i) r(i, c) = (*this)(c, i);
    return r;
  }

  std::array<S, 6> mul(const std::array<S, 6>& v) const {
    std::array<S, 6> r{};
    for (int c = 0; c < 6; ++c) {
      const S vc = v[static_cast<std::size_t>(c)];
      for (int i = 0; i < 6; ++i) r[static_cast<std::size_t>(i)] += (*this)(i, c) * vc;
    }
    return r;
  }

  /// r = this^T v without forming the transpose.
  std::array<S, 6> tmul(const std::array<S, 6>& v) const {
    std::array<S, 6> r{};
    for (int c = 0; c < 6; ++c) {
      S acc = S(0);
      for (int i = 0; i < 6; ++i) acc += (*this)(i, c) * v[static_cast<std::size_t>(i)];
      r[static_cast<std::size_t>(c)] = acc;
    }
    return r;
  }
};

template <typename S>
std::array<S, 6> to_array(const SpatialMotion<S>& v) {
  return {v.ang[0], v.ang[1], v.ang[2], v.lin[0], v.lin[1], v.lin[2]};
}
template <typename S>
std::array<S, 6> to_array(const SpatialForce<S>& f) {
  return {f.ang[0], f.ang[1], f.ang[2], f.lin[0], f.lin[1], f.lin[2]};
}
template <typename S>
SpatialMotion<S> motion_from_array(const std::array<S, 6>& a) {
  return {{a[0], a[1], a[2]}, {a[3], a[4], a[5]}};
}
template <typename S>
SpatialForce<S> force_from_array(const std::array<S, 6>& a) {
  return {{a[0], a[1], a[2]}, {a[3], a[4], a[5]}};
}

namespace detail {
template <typename S>
void put_block(Mat66<S>& m, int r0, int c0, const Mat33<S>& b) {
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) m(r0 + r, c0 + c) = b(r, c);
}
template <typename S>
void add_block(Mat66<S>& m, int r0, int c0, const Mat33<S>& b) {
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) m(r0 + r, c0 + c) += b(r, c);
}
}  // namespace detail

/// Matrix of the motion cross operator (v x) = [[wx, 0], [vx, wx]].
template <typename S>
Mat66<S> cross_motion_matrix(const SpatialMotion<S>& v) {
  Mat66<S> m;
  const Mat33<S> wx = skew(v.ang), vx = skew(v.lin);
  detail::put_block(m, 0, 0, wx);
  detail::put_block(m, 3, 0, vx);
  detail::put_block(m, 3, 3, wx);
  return m;
}

/// Matrix of the force cross operator (v x*) = [[wx, vx], [0, wx]].
template <typename S>
Mat66<S> cross_force_matrix(const SpatialMotion<S>& v) {
  Mat66<S> m;
  const Mat33<S> wx = skew(v.ang), vx = skew(v.lin);
  detail::put_block(m, 0, 0, wx);
  detail::put_block(m, 0, 3, vx);
  detail::put_block(m, 3, 3, wx);
  return m;
}

/// Matrix of (f xbar*) = [[-mx, -fx], [-fx, 0]]; skew-symmetric as a 6x6.
template <typename S>
Mat66<S> cross_swap_matrix(const SpatialForce<S>& f) {
  Mat66<S> m;
  const Mat33<S> mx = skew(Vec3<S>{-f.ang[0], -f.ang[1], -f.ang[2]});
  const Mat33<S> fx = skew(Vec3<S>{-f.lin[0], -f.lin[1], -f.lin[2]});
  detail::put_block(m, 0, 0, mx);
  detail::put_block(m, 0, 3, fx);
  detail::put_block(m, 3, 0, fx);
  return m;
}

// ---------------------------------------------------------------------------
// Spatial inertia

namespace detail {
// Eigenvalue range of a symmetric 6x6 via cyclic Jacobi; enough accuracy for
// a definiteness check.
inline void sym_eigen_range_6(const Mat66<double>& m, double& lo, double& hi) {
  Mat66<double> a = m;
  for (int sweep = 0; sweep < 30; ++sweep) {
    double off = 0;
    for (int p = 0; p < 6; ++p)
      for (int q = p + 1; q < 6; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < 6; ++p)
      for (int q = p + 1; q < 6; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < 6; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < 6; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  lo = hi = a(0, 0);
  for (int i = 1; i < 6; ++i) {
    lo = std::min(lo, a(i, i));
    hi = std::max(hi, a(i, i));
  }
}
}  // namespace detail

/// Spatial inertia as a dense 6x6: [[I_o, m cx], [m cx^T, m 1]] with I_o the
/// rotational inertia about the body-frame origin.
template <typename S>
struct SpatialInertia {
  Mat66<S> m;

  SpatialInertia() = default;
  explicit SpatialInertia(const Mat66<S>& mm) : m(mm) {}

  SpatialForce<S> apply(const SpatialMotion<S>& v) const { return force_from_array(m.mul(to_array(v))); }

  /// Assemble about the body-frame origin from mass, COM offset and the
  /// rotational inertia about the COM (Ixx, Iyy, Izz, Ixy, Ixz, Iyz).
  static SpatialInertia from_mass_com_rot(S mass, const Vec3<S>& com, const std::array<S, 6>& rot) {
    Mat33<S> ic;
    ic(0, 0) = rot[0];
    ic(1, 1) = rot[1];
    ic(2, 2) = rot[2];
    ic(0, 1) = ic(1, 0) = rot[3];
    ic(0, 2) = ic(2, 0) = rot[4];
    ic(1, 2) = ic(2, 1) = rot[5];
    const Mat33<S> cx = skew(com);
    const Mat33<S> io = ic + (mass * (cx * cx.transposed()));
    Mat66<S> mm;
    detail::put_block(mm, 0, 0, io);
    detail::put_block(mm, 0, 3, mass * cx);
    detail::put_block(mm, 3, 0, mass * cx.transposed());
    Mat33<S> mid;
    mid(0, 0) = mid(1, 1) = mid(2, 2) = mass;
    detail::put_block(mm, 3, 3, mid);
    return SpatialInertia(mm);
  }
};

/// Symmetrize and validate a raw 6x6 as a spatial inertia. Throws
/// std::invalid_argument naming the violated invariant.
inline SpatialInertia<double> make_spatial_inertia(const Mat66<double>& raw) {
  Mat66<double> sym;
  double scale = 0, drift = 0;
  for (int c = 0; c < 6; ++c)
    for (int r = 0; r < 6; ++r) {
      sym(r, c) = 0.5 * (raw(r, c) + raw(c, r));
      scale = std::max(scale, std::abs(raw(r, c)));
      drift = std::max(drift, std::abs(raw(r, c) - raw(c, r)));
    }
  if (scale > 0 && drift > 1e-12 * scale)
    throw std::invalid_argument("spatial inertia not symmetric (drift " + std::to_string(drift / scale) + ")");
  const double mass = sym(3, 3);
  if (!(mass > 0)) throw std::invalid_argument("spatial inertia mass must be positive");
  for (int c = 3; c < 6; ++c)
    for (int r = 3; r < 6; ++r) {
      const double want = (r == c) ? mass : 0.0;
      if (std::abs(sym(r, c) - want) > 1e-9 * std::max(1.0, mass))
        throw std::invalid_argument("spatial inertia mass block is not m*Identity");
    }
  double lo, hi;
  detail::sym_eigen_range_6(sym, lo, hi);
  if (lo < -1e-9 * std::max(1.0, hi)) throw std::invalid_argument("spatial inertia not positive semi-definite");
  return SpatialInertia<double>(sym);
}

namespace detail {
template <typename S>
Mat33<S> get_block(const Mat66<S>& m, int r0, int c0) {
  Mat33<S> b;
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) b(r, c) = m(r0 + r, c0 + c);
  return b;
}
// a~ X: every column crossed from the left.
template <typename S>
Mat33<S> skew_times(const Vec3<S>& a, const Mat33<S>& x) {
  Mat33<S> r;
  for (int c = 0; c < 3; ++c) {
    const Vec3<S> col = cross(a, Vec3<S>{x(0, c), x(1, c), x(2, c)});
    for (int i = 0; i < 3; ++i) r(i, c) = col[i];
  }
  return r;
}
// X a~: columns are combinations of two columns of X.
template <typename S>
Mat33<S> times_skew(const Mat33<S>& x, const Vec3<S>& a) {
  Mat33<S> r;
  for (int i = 0; i < 3; ++i) {
    r(i, 0) = a[2] * x(i, 1) - a[1] * x(i, 2);
    r(i, 1) = a[0] * x(i, 2) - a[2] * x(i, 0);
    r(i, 2) = a[1] * x(i, 0) - a[0] * x(i, 1);
  }
  return r;
}
}  // namespace detail

/// (v x*) M without forming the operator matrix (its lower-left block is 0).
template <typename S>
Mat66<S> cross_force_times(const SpatialMotion<S>& v, const Mat66<S>& m) {
  using detail::get_block;
  using detail::skew_times;
  const Mat33<S> a = get_block(m, 0, 0), b = get_block(m, 0, 3);
  const Mat33<S> c = get_block(m, 3, 0), d = get_block(m, 3, 3);
  Mat66<S> out;
  detail::put_block(out, 0, 0, skew_times(v.ang, a) + skew_times(v.lin, c));
  detail::put_block(out, 0, 3, skew_times(v.ang, b) + skew_times(v.lin, d));
  detail::put_block(out, 3, 0, skew_times(v.ang, c));
  detail::put_block(out, 3, 3, skew_times(v.ang, d));
  return out;
}

/// M (v x) without forming the operator matrix (its upper-right block is 0).
template <typename S>
Mat66<S> times_cross_motion(const Mat66<S>& m, const SpatialMotion<S>& v) {
  using detail::get_block;
  using detail::times_skew;
  const Mat33<S> a = get_block(m, 0, 0), b = get_block(m, 0, 3);
  const Mat33<S> c = get_block(m, 3, 0), d = get_block(m, 3, 3);
  Mat66<S> out;
  detail::put_block(out, 0, 0, times_skew(a, v.ang) + times_skew(b, v.lin));
  detail::put_block(out, 0, 3, times_skew(b, v.ang));
  detail::put_block(out, 3, 0, times_skew(c, v.ang) + times_skew(d, v.lin));
  detail::put_block(out, 3, 3, times_skew(d, v.ang));
  return out;
}

/// Un-halved variant used inside the derivative sweeps:
/// (v x*) I - I (v x) + (I v) xbar*.
template <typename S>
Mat66<S> coriolis_matrix_unhalved(const Mat66<S>& inertia, const SpatialMotion<S>& v) {
  const SpatialForce<S> iv = force_from_array(inertia.mul(to_array(v)));
  return cross_force_times(v, inertia) - times_cross_motion(inertia, v) + cross_swap_matrix(iv);
}

/// Body-level Coriolis matrix B = 1/2 [(v x*) I - I (v x) + (I v) xbar*].
template <typename S>
Mat66<S> body_coriolis(const SpatialInertia<S>& inertia, const SpatialMotion<S>& v) {
  return S(0.5) * coriolis_matrix_unhalved(inertia.m, v);
}

}  // namespace dynhess
