#include <doctest.h>

#include <cmath>
#include <random>

#include "dynhess/spatial.hpp"

using namespace dynhess;

namespace {

std::mt19937_64 rng(987654321);

double u() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }

SpatialMotion<double> rand_motion() { return {{u(), u(), u()}, {u(), u(), u()}}; }
SpatialForce<double> rand_force() { return {{u(), u(), u()}, {u(), u(), u()}}; }

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

// Operator matrix of (v x) assembled scalar-by-scalar, independent of the
// library's block helpers.
void motion_op(const SpatialMotion<double>& v, double m[6][6]) {
  const double wx = v.ang[0], wy = v.ang[1], wz = v.ang[2];
  const double vx = v.lin[0], vy = v.lin[1], vz = v.lin[2];
  const double zero[6][6] = {};
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) m[r][c] = zero[r][c];
  // [w]x in both diagonal blocks
  m[0][1] = -wz; m[0][2] = wy; m[1][0] = wz; m[1][2] = -wx; m[2][0] = -wy; m[2][1] = wx;
  m[3][4] = -wz; m[3][5] = wy; m[4][3] = wz; m[4][5] = -wx; m[5][3] = -wy; m[5][4] = wx;
  // [v]x lower-left
  m[3][1] = -vz; m[3][2] = vy; m[4][0] = vz; m[4][2] = -vx; m[5][0] = -vy; m[5][1] = vx;
}

void apply(const double m[6][6], const double in[6], double out[6]) {
  for (int r = 0; r < 6; ++r) {
    out[r] = 0;
    for (int c = 0; c < 6; ++c) out[r] += m[r][c] * in[c];
  }
}

SpatialInertia<double> rand_inertia() {
  // Random but valid: positive mass, PSD rotational block about the COM.
  const double mass = 0.5 + 2.0 * std::abs(u()) + 0.1;
  const Vec3<double> com{0.5 * u(), 0.5 * u(), 0.5 * u()};
  double a[3][3];
  for (auto& row : a)
    for (double& x : row) x = u();
  // I_com = A A^T + small diagonal
  std::array<double, 6> rot{};
  double sym[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      sym[r][c] = 0;
      for (int k = 0; k < 3; ++k) sym[r][c] += a[r][k] * a[c][k];
    }
  rot = {sym[0][0] + 0.1, sym[1][1] + 0.1, sym[2][2] + 0.1, sym[0][1], sym[0][2], sym[1][2]};
  return SpatialInertia<double>::from_mass_com_rot(mass, com, rot);
}

}  // namespace

TEST_CASE("cross_motion: v x v vanishes") {
  for (int it = 0; it < 200; ++it) {
    const auto v = rand_motion();
    const auto r = cross_motion(v, v);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r[i]) <= 1e-15);
  }
}

TEST_CASE("cross_motion: canonical angular case") {
  const SpatialMotion<double> v{{0, 0, 1}, {0, 0, 0}};
  const SpatialMotion<double> w{{1, 0, 0}, {0, 0, 0}};
  const auto r = cross_motion(v, w);
  CHECK(r.ang[0] == doctest::Approx(0));
  CHECK(r.ang[1] == doctest::Approx(1));
  CHECK(r.ang[2] == doctest::Approx(0));
  for (int i = 3; i < 6; ++i) CHECK(r[i] == doctest::Approx(0));
}

TEST_CASE("cross_motion matches the explicit operator matrix") {
  for (int it = 0; it < 200; ++it) {
    const auto v = rand_motion(), w = rand_motion();
    double m[6][6], in[6], out[6];
    motion_op(v, m);
    for (int i = 0; i < 6; ++i) in[i] = w[i];
    apply(m, in, out);
    const auto r = cross_motion(v, w);
    for (int i = 0; i < 6; ++i) CHECK(rel(r[i], out[i]) <= 1e-15);
  }
}

TEST_CASE("cross_motion bilinearity") {
  for (int it = 0; it < 100; ++it) {
    const auto v = rand_motion(), a = rand_motion(), b = rand_motion();
    const double al = u(), be = u();
    const auto lhs = cross_motion(v, al * a + be * b);
    const auto rhs = al * cross_motion(v, a) + be * cross_motion(v, b);
    for (int i = 0; i < 6; ++i) CHECK(rel(lhs[i], rhs[i]) <= 1e-14);
  }
}

TEST_CASE("cross_motion Jacobi-style consistency") {
  for (int it = 0; it < 200; ++it) {
    const auto v = rand_motion(), w = rand_motion(), x = rand_motion();
    const auto lhs = cross_motion(v, cross_motion(w, x)) - cross_motion(w, cross_motion(v, x));
    const auto rhs = cross_motion(cross_motion(v, w), x);
    for (int i = 0; i < 6; ++i) CHECK(rel(lhs[i], rhs[i]) <= 1e-13);
  }
}

TEST_CASE("motion/force duality pairing") {
  for (int it = 0; it < 1000; ++it) {
    const auto v = rand_motion(), w = rand_motion();
    const auto f = rand_force();
    const double lhs = dot(cross_motion(v, w), f) + dot(w, cross_force(v, f));
    CHECK(std::abs(lhs) <= 1e-13);
  }
}

TEST_CASE("cross_force: zero force maps to zero") {
  const auto v = rand_motion();
  const auto r = cross_force(v, SpatialForce<double>{});
  for (int i = 0; i < 6; ++i) CHECK(r[i] == 0.0);
}

TEST_CASE("cross_force is minus the transposed motion operator") {
  for (int it = 0; it < 200; ++it) {
    const auto v = rand_motion();
    const auto f = rand_force();
    double m[6][6];
    motion_op(v, m);
    // -(v x)^T f
    double want[6];
    for (int r = 0; r < 6; ++r) {
      want[r] = 0;
      for (int c = 0; c < 6; ++c) want[r] -= m[c][r] * f[c];
    }
    const auto got = cross_force(v, f);
    for (int i = 0; i < 6; ++i) CHECK(rel(got[i], want[i]) <= 1e-15);
  }
}

TEST_CASE("cross_force: pure rotation acts on the moment block") {
  const SpatialMotion<double> v{{0, 0, 1}, {0, 0, 0}};
  const SpatialForce<double> f{{1, 0, 0}, {0, 0, 0}};
  const auto r = cross_force(v, f);
  CHECK(r.ang[1] == doctest::Approx(1));
  CHECK(std::abs(r.ang[0]) + std::abs(r.ang[2]) + std::abs(r.lin[0]) + std::abs(r.lin[1]) +
            std::abs(r.lin[2]) ==
        doctest::Approx(0));
}

TEST_CASE("cross_force_swapped equals cross_force on 1000 random pairs") {
  for (int it = 0; it < 1000; ++it) {
    const auto v = rand_motion();
    const auto f = rand_force();
    const auto a = cross_force_swapped(f, v), b = cross_force(v, f);
    for (int i = 0; i < 6; ++i) CHECK(rel(a[i], b[i]) <= 1e-15);
  }
}

TEST_CASE("cross_force_swapped: zero force") {
  const auto r = cross_force_swapped(SpatialForce<double>{}, rand_motion());
  for (int i = 0; i < 6; ++i) CHECK(r[i] == 0.0);
}

TEST_CASE("cross_swap_matrix columns come from basis expansion") {
  for (int it = 0; it < 100; ++it) {
    const auto f = rand_force();
    const auto op = cross_swap_matrix(f);
    for (int c = 0; c < 6; ++c) {
      SpatialMotion<double> e;
      e[c] = 1.0;
      const auto col = cross_force_swapped(f, e);
      for (int r = 0; r < 6; ++r) CHECK(rel(op(r, c), col[r]) <= 1e-15);
    }
  }
}

TEST_CASE("body_coriolis: zero velocity gives the zero matrix") {
  const auto inertia = rand_inertia();
  const auto b = body_coriolis(inertia, SpatialMotion<double>{});
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) CHECK(b(r, c) == 0.0);
}

TEST_CASE("body_coriolis assembled term-by-term") {
  for (int it = 0; it < 100; ++it) {
    const auto inertia = rand_inertia();
    const auto v = rand_motion();
    const auto b = body_coriolis(inertia, v);
    // Independent assembly of the three terms from operator matrices.
    const auto t1 = cross_force_matrix(v) * inertia.m;
    const auto t2 = inertia.m * cross_motion_matrix(v);
    const auto t3 = cross_swap_matrix(inertia.apply(v));
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) CHECK(rel(b(r, c), 0.5 * (t1(r, c) - t2(r, c) + t3(r, c))) <= 1e-14);
    // B + B^T drops the antisymmetric swap term.
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) CHECK(rel(b(r, c) + b(c, r), t1(r, c) - t2(r, c)) <= 1e-13);
  }
}

TEST_CASE("body_coriolis reproduces the gyroscopic force") {
  for (int it = 0; it < 100; ++it) {
    const auto inertia = rand_inertia();
    const auto v = rand_motion();
    const auto b = body_coriolis(inertia, v);
    const auto arr = b.mul(to_array(v));
    const auto gyro = cross_force(v, inertia.apply(v));
    for (int i = 0; i < 6; ++i) CHECK(rel(arr[static_cast<std::size_t>(i)], gyro[i]) <= 1e-13);
  }
  // Spin about a principal axis through the COM: the gyroscopic wrench is zero.
  const auto top = SpatialInertia<double>::from_mass_com_rot(2.0, {0, 0, 0}, {1.0, 1.0, 3.0, 0, 0, 0});
  const SpatialMotion<double> spin{{0, 0, 4.0}, {0, 0, 0}};
  const auto bv = body_coriolis(top, spin).mul(to_array(spin));
  for (int i = 0; i < 6; ++i) CHECK(std::abs(bv[static_cast<std::size_t>(i)]) <= 1e-14);
}

TEST_CASE("make_spatial_inertia validates its invariants") {
  auto good = rand_inertia();
  CHECK_NOTHROW(make_spatial_inertia(good.m));

  auto asym = good.m;
  asym(0, 1) += 1e-3;
  CHECK_THROWS_AS(make_spatial_inertia(asym), std::invalid_argument);

  auto negmass = good.m;
  for (int i = 3; i < 6; ++i) negmass(i, i) = -1.0;
  CHECK_THROWS_AS(make_spatial_inertia(negmass), std::invalid_argument);

  auto indef = good.m;
  for (int i = 0; i < 3; ++i) indef(i, i) = -5.0;
  CHECK_THROWS_AS(make_spatial_inertia(indef), std::invalid_argument);
}

TEST_CASE("spatial inertia assembly about the origin") {
  // Point mass at c: moment of I*v for pure rotation w is m c x (w x c).
  const double mass = 3.0;
  const Vec3<double> c{0.4, -0.2, 0.7};
  const auto inertia = SpatialInertia<double>::from_mass_com_rot(mass, c, {0, 0, 0, 0, 0, 0});
  for (int it = 0; it < 20; ++it) {
    const Vec3<double> w{u(), u(), u()};
    const auto f = inertia.apply({w, {0, 0, 0}});
    const Vec3<double> want_m = mass * cross(c, cross(w, c));
    const Vec3<double> want_f = mass * cross(w, c);
    for (int i = 0; i < 3; ++i) {
      CHECK(rel(f.ang[i], want_m[i]) <= 1e-13);
      CHECK(rel(f.lin[i], want_f[i]) <= 1e-13);
    }
  }
}
