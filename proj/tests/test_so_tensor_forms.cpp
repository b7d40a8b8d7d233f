// The backward sweep ships scalar-reduced expressions. This suite rebuilds
// every per-block expression family in full tensor form and checks the two
// formulations agree on random connected index triples.

#include <doctest.h>

#include "tensor_form_checks.hpp"

using namespace dynhess;
using namespace dynhess::testsupport;

namespace {

// Deep mixed tree so strict triples with multi-DoF joints exist.
KinematicModel deep_mixed() {
  const KinematicModel base = serial_chain(7, JointType::revolute({0, 0, 1}), 5150);
  std::vector<Body> bodies;
  for (int i = 1; i <= 7; ++i) bodies.push_back(base.body(i));
  bodies[0].joint = JointType::free();
  bodies[2].joint = JointType::spherical();
  bodies[4].joint = JointType::prismatic({0, 1, 0});
  bodies[5].joint = JointType::spherical();
  return KinematicModel("deep-mixed", {0, 0, -9.81}, std::move(bodies));
}

const std::vector<TensorFormCheck>& checks() {
  static const std::vector<TensorFormCheck> rows = [] {
    const KinematicModel m = deep_mixed();
    return run_tensor_form_checks(m, random_state(m, 909), 20, 4242);
  }();
  return rows;
}

void check_group(const char* prefix) {
  bool any = false;
  for (const TensorFormCheck& c : checks()) {
    if (c.family.rfind(prefix, 0) != 0) continue;
    any = true;
    INFO(c.family);
    CHECK(c.err <= 1e-12);
  }
  CHECK(any);
}

}  // namespace

TEST_CASE("tensor-form SO-q expressions match the scalar sweep") { check_group("q2:"); }
TEST_CASE("tensor-form SO-qd expressions match the scalar sweep") { check_group("qd2:"); }
TEST_CASE("tensor-form cross expressions match the scalar sweep") { check_group("cross:"); }
TEST_CASE("tensor-form mass-matrix derivative expressions match the scalar sweep") { check_group("dM:"); }
