#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "dynhess/dynamics.hpp"

using namespace dynhess;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

// Point-mass pendulum: revolute about z, COM at distance l along x,
// gravity -y. Closed form: tau = m l^2 qdd + m g l cos(q).
KinematicModel pendulum(double mass, double l, double g) {
  std::vector<Body> bodies(1);
  bodies[0].id = 1;
  bodies[0].parent = 0;
  bodies[0].joint = JointType::revolute({0, 0, 1});
  bodies[0].inertia = SpatialInertia<double>::from_mass_com_rot(mass, {l, 0, 0}, {0, 0, 0, 0, 0, 0});
  return KinematicModel("pendulum", {0, -g, 0}, std::move(bodies));
}

JointState pendulum_state(double q, double qd, double qdd) {
  return {{q}, {qd}, {qdd}};
}

}  // namespace

TEST_CASE("forward_pass: zero rates propagate only the gravity bias") {
  const KinematicModel m = branched_chain(6, 2, JointType::spherical(), 4);
  JointState st = random_state(m, 8);
  std::fill(st.qd.begin(), st.qd.end(), 0.0);
  std::fill(st.qdd.begin(), st.qdd.end(), 0.0);
  const auto fp = forward_pass(m, st);
  for (int i = 0; i <= m.num_bodies(); ++i) {
    for (int c = 0; c < 6; ++c) {
      CHECK(fp.v[static_cast<std::size_t>(i)][c] == 0.0);
      CHECK(fp.a[static_cast<std::size_t>(i)][c] ==
            doctest::Approx(fp.a[0][c]).epsilon(1e-14));  // pure bias everywhere
    }
  }
  for (int g = 0; g < m.dof(); ++g)
    for (int c = 0; c < 6; ++c) {
      CHECK(fp.psid[static_cast<std::size_t>(g)][c] == 0.0);
      CHECK(fp.phid[static_cast<std::size_t>(g)][c] == 0.0);
    }
  CHECK(fp.a[0].lin[2] == doctest::Approx(9.81));
}

TEST_CASE("forward_pass: single revolute pendulum velocity") {
  const KinematicModel m = pendulum(1.2, 0.7, 9.81);
  const auto fp = forward_pass(m, pendulum_state(0.4, 2.5, 0.0));
  // Only the joint axis component of the angular velocity is set.
  CHECK(fp.v[1].ang[2] == doctest::Approx(2.5));
  CHECK(std::abs(fp.v[1].ang[0]) <= 1e-15);
  CHECK(std::abs(fp.v[1].ang[1]) <= 1e-15);
}

TEST_CASE("forward_pass: velocities equal the predecessor sum") {
  const KinematicModel m = serial_chain(5, JointType::spherical(), 31);
  const JointState st = random_state(m, 13);
  const auto fp = forward_pass(m, st);
  for (int i = 1; i <= 5; ++i) {
    SpatialMotion<double> want{};
    for (int l = i; l > 0; l = m.parent(l))
      for (int t = 0; t < m.joint_dof(l); ++t) {
        const int g = m.dof_offset(l) + t;
        want += st.qd[static_cast<std::size_t>(g)] * fp.s[static_cast<std::size_t>(g)];
      }
    for (int c = 0; c < 6; ++c) CHECK(rel(fp.v[static_cast<std::size_t>(i)][c], want[c]) <= 1e-13);
  }
}

TEST_CASE("rnea: pendulum closed form") {
  const double mass = 1.7, l = 0.45, g = 9.81;
  const KinematicModel m = pendulum(mass, l, g);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int it = 0; it < 100; ++it) {
    const double q = dist(rng), qd = dist(rng), qdd = dist(rng);
    const auto tau = rnea(m, pendulum_state(q, qd, qdd));
    const double want = mass * l * l * qdd + mass * g * l * std::cos(q);
    CHECK(rel(tau[0], want) <= 1e-12);
  }
}

TEST_CASE("rnea: zero state with gravity off gives zero torque") {
  std::vector<Body> bodies;
  const KinematicModel chain = branched_chain(7, 2, JointType::free(), 3);
  for (int i = 1; i <= chain.num_bodies(); ++i) bodies.push_back(chain.body(i));
  const KinematicModel m("nogravity", {0, 0, 0}, std::move(bodies));
  JointState st = random_state(m, 2);
  std::fill(st.qd.begin(), st.qd.end(), 0.0);
  std::fill(st.qdd.begin(), st.qdd.end(), 0.0);
  for (double t : rnea(m, st)) CHECK(std::abs(t) <= 1e-12);
}

TEST_CASE("rnea: mass-matrix/bias decomposition") {
  const KinematicModel m = branched_chain(8, 3, JointType::spherical(), 77);
  const JointState st = random_state(m, 6);
  const auto tau = rnea(m, st);
  const MatX<double> mm = mass_matrix(m, st.q);
  JointState bias_state = st;
  std::fill(bias_state.qdd.begin(), bias_state.qdd.end(), 0.0);
  const auto bias = rnea(m, bias_state);
  for (int a = 0; a < m.dof(); ++a) {
    double acc = bias[static_cast<std::size_t>(a)];
    for (int b = 0; b < m.dof(); ++b) acc += mm(a, b) * st.qdd[static_cast<std::size_t>(b)];
    CHECK(rel(tau[static_cast<std::size_t>(a)], acc) <= 1e-12);
  }
}

TEST_CASE("mass_matrix: pendulum value and symmetry") {
  const double mass = 2.2, l = 0.6;
  const KinematicModel m = pendulum(mass, l, 9.81);
  const MatX<double> mm = mass_matrix(m, std::vector<double>{0.3});
  CHECK(rel(mm(0, 0), mass * l * l) <= 1e-12);

  const KinematicModel chain = serial_chain(10, JointType::revolute({0, 0, 1}), 15);
  const JointState st = random_state(chain, 4);
  const MatX<double> big = mass_matrix(chain, st.q);
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) CHECK(rel(big(a, b), big(b, a)) <= 1e-13);
}

TEST_CASE("mass_matrix: columns match rnea with gravity off") {
  const KinematicModel chain = branched_chain(6, 2, JointType::free(), 19);
  std::vector<Body> bodies;
  for (int i = 1; i <= chain.num_bodies(); ++i) bodies.push_back(chain.body(i));
  const KinematicModel m("nog", {0, 0, 0}, std::move(bodies));
  const JointState st = random_state(m, 3);
  const MatX<double> mm = mass_matrix(m, st.q);
  for (int col = 0; col < m.dof(); ++col) {
    JointState unit = st;
    std::fill(unit.qd.begin(), unit.qd.end(), 0.0);
    std::fill(unit.qdd.begin(), unit.qdd.end(), 0.0);
    unit.qdd[static_cast<std::size_t>(col)] = 1.0;
    const auto tau = rnea(m, unit);
    for (int row = 0; row < m.dof(); ++row) CHECK(rel(mm(row, col), tau[static_cast<std::size_t>(row)]) <= 1e-12);
  }
}

TEST_CASE("kinetic energy consistency") {
  const KinematicModel m = branched_chain(9, 2, JointType::spherical(), 55);
  const JointState st = random_state(m, 10);
  const auto fp = forward_pass(m, st);
  double twice_ke = 0;
  for (int i = 1; i <= m.num_bodies(); ++i) {
    const auto& v = fp.v[static_cast<std::size_t>(i)];
    twice_ke += dot(v, force_from_array(fp.inertia_c[static_cast<std::size_t>(i)].mul(to_array(v))));
  }
  const MatX<double> mm = mass_matrix(m, st.q);
  double qmq = 0;
  for (int a = 0; a < m.dof(); ++a)
    for (int b = 0; b < m.dof(); ++b)
      qmq += st.qd[static_cast<std::size_t>(a)] * mm(a, b) * st.qd[static_cast<std::size_t>(b)];
  CHECK(qmq >= 0);
  CHECK(rel(qmq, twice_ke) <= 1e-12);
}

TEST_CASE("rnea is linear in the acceleration") {
  const KinematicModel m = serial_chain(7, JointType::free(), 23);
  const JointState st = random_state(m, 1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double al = dist(rng), be = dist(rng);
  JointState s1 = st, s2 = st, mix = st, zero = st;
  for (std::size_t i = 0; i < st.qdd.size(); ++i) {
    s2.qdd[i] = dist(rng);
    mix.qdd[i] = al * s1.qdd[i] + be * s2.qdd[i];
    zero.qdd[i] = 0.0;
  }
  const auto t1 = rnea(m, s1), t2 = rnea(m, s2), tm = rnea(m, mix), t0 = rnea(m, zero);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    const double want = al * t1[i] + be * t2[i] - (al + be - 1.0) * t0[i];
    CHECK(rel(tm[i], want) <= 1e-12);
  }
}

TEST_CASE("composite quantities equal explicit subtree sums") {
  const KinematicModel m = branched_chain(10, 2, JointType::spherical(), 66);
  const JointState st = random_state(m, 12);
  auto fp = forward_pass(m, st);
  const auto seed = fp;
  accumulate_composites(m, fp);
  for (int i = 1; i <= m.num_bodies(); ++i) {
    Mat66<double> isum;
    SpatialForce<double> fsum{};
    for (int k = 1; k <= m.num_bodies(); ++k)
      if (is_ancestor_or_equal(m, i, k)) {
        isum += seed.inertia_c[static_cast<std::size_t>(k)];
        fsum += seed.f_c[static_cast<std::size_t>(k)];
      }
    for (int r = 0; r < 6; ++r) {
      CHECK(rel(fsum[r], fp.f_c[static_cast<std::size_t>(i)][r]) <= 1e-13);
      for (int c = 0; c < 6; ++c)
        CHECK(rel(isum(r, c), fp.inertia_c[static_cast<std::size_t>(i)](r, c)) <= 1e-13);
    }
  }
}

TEST_CASE("forward_pass runtime grows about linearly" * doctest::skip(false)) {
  auto time_n = [](int n) {
    const KinematicModel m = serial_chain(n, JointType::revolute({0, 0, 1}), 7);
    const JointState st = random_state(m, 7);
    forward_pass(m, st);  // warm
    double best = 1e100;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int it = 0; it < 20; ++it) forward_pass(m, st);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double t64 = time_n(64), t512 = time_n(512);
  // 8x the size should cost clearly less than quadratic growth would.
  CHECK(t512 / t64 <= 32.0);
}

TEST_CASE("forward_pass rejects mismatched state dimensions") {
  const KinematicModel m = serial_chain(3, JointType::spherical(), 1);
  JointState st = random_state(m, 1);
  st.qd.pop_back();
  CHECK_THROWS_AS(forward_pass(m, st), ModelError);
  JointState st2 = random_state(m, 1);
  st2.q.push_back(0.0);
  CHECK_THROWS_AS(rnea(m, st2), ModelError);
  CHECK_THROWS_AS(integrate_config(m, st2.q, std::vector<double>(m.dof(), 0.0)), ModelError);
}
