#include "dynhess/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace dynhess {

using nlohmann::json;

const char* joint_kind_name(JointKind k) {
  switch (k) {
    case JointKind::revolute:
      return "revolute";
    case JointKind::prismatic:
      return "prismatic";
    case JointKind::spherical:
      return "spherical";
    case JointKind::free_joint:
      return "free";
  }
  return "?";
}

JointType joint_type_from_name(const std::string& name, const Vec3<double>& axis) {
  if (name == "revolute") return JointType::revolute(axis);
  if (name == "prismatic") return JointType::prismatic(axis);
  if (name == "spherical") return JointType::spherical();
  if (name == "free") return JointType::free();
  throw ModelError("unknown joint type \"" + name + "\"");
}

KinematicModel::KinematicModel(std::string name, const Vec3<double>& gravity, std::vector<Body> bodies)
    : name_(std::move(name)), gravity_(gravity), bodies_(std::move(bodies)) {
  const int n = static_cast<int>(bodies_.size());
  if (n == 0) throw ModelError("model has no bodies");
  std::sort(bodies_.begin(), bodies_.end(), [](const Body& a, const Body& b) { return a.id < b.id; });
  dof_offset_.resize(bodies_.size());
  q_offset_.resize(bodies_.size());
  std::vector<int> depth(bodies_.size() + 1, 0);
  for (int i = 1; i <= n; ++i) {
    const Body& b = body(i);
    if (b.id != i) throw ModelError("body ids must be 1..N without gaps (missing id " + std::to_string(i) + ")");
    if (b.parent < 0 || b.parent >= b.id)
      throw ModelError("body " + std::to_string(b.id) + ": non-topological parent ordering (parent " +
                       std::to_string(b.parent) + ")");
    if (b.joint.kind == JointKind::revolute || b.joint.kind == JointKind::prismatic) {
      const double nrm = std::sqrt(dot(b.joint.axis, b.joint.axis));
      if (std::abs(nrm - 1.0) > 1e-12)
        throw ModelError("body " + std::to_string(b.id) + ": non-unit axis (norm " + std::to_string(nrm) + ")");
    }
    const double qn = std::sqrt(b.placement_rotation.squared_norm());
    if (std::abs(qn - 1.0) > 1e-9)
      throw ModelError("body " + std::to_string(b.id) + ": non-unit placement quaternion");
    dof_offset_[static_cast<std::size_t>(i - 1)] = dof_;
    q_offset_[static_cast<std::size_t>(i - 1)] = nq_;
    dof_ += b.joint.dof();
    nq_ += b.joint.nq();
    depth[static_cast<std::size_t>(i)] = depth[static_cast<std::size_t>(b.parent)] + 1;
    depth_ = std::max(depth_, depth[static_cast<std::size_t>(i)]);
  }
  // Exact unit placement quaternions internally.
  for (Body& b : bodies_) b.placement_rotation = b.placement_rotation.normalized();
  dof_to_joint_.resize(static_cast<std::size_t>(dof_));
  for (int i = 1; i <= n; ++i)
    for (int t = 0; t < joint_dof(i); ++t) dof_to_joint_[static_cast<std::size_t>(dof_offset(i) + t)] = i;
}

namespace {

Vec3<double> vec3_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ModelError(where + ": expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ModelError(where + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace

KinematicModel load_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("model parse error: ") + e.what());
  }
  try {
    const std::string name = doc.value("name", "unnamed");
    Vec3<double> gravity{0, 0, -9.81};
    if (doc.contains("gravity")) gravity = vec3_from(doc["gravity"], "gravity");
    const json& jb = field(doc, "bodies", "document");
    if (!jb.is_array() || jb.empty()) throw ModelError("bodies: expected a non-empty array");
    std::vector<Body> bodies;
    bodies.reserve(jb.size());
    for (std::size_t idx = 0; idx < jb.size(); ++idx) {
      const std::string where = "bodies[" + std::to_string(idx) + "]";
      const json& b = jb[idx];
      Body body;
      body.id = field(b, "id", where).get<int>();
      body.parent = field(b, "parent", where).get<int>();
      const json& joint = field(b, "joint", where);
      const std::string type = field(joint, "type", where + ".joint").get<std::string>();
      Vec3<double> axis{0, 0, 1};
      if (type == "revolute" || type == "prismatic") axis = vec3_from(field(joint, "axis", where + ".joint"), where + ".joint.axis");
      body.joint = joint_type_from_name(type, axis);
      const json& placement = field(b, "placement", where);
      body.placement_translation = vec3_from(field(placement, "translation", where + ".placement"), where + ".placement.translation");
      const json& quat = field(placement, "quaternion", where + ".placement");
      if (!quat.is_array() || quat.size() != 4) throw ModelError(where + ".placement.quaternion: expected 4 numbers (w,x,y,z)");
      body.placement_rotation = {quat[0].get<double>(), quat[1].get<double>(), quat[2].get<double>(), quat[3].get<double>()};
      const json& inertia = field(b, "inertia", where);
      const double mass = field(inertia, "mass", where + ".inertia").get<double>();
      const Vec3<double> com = vec3_from(field(inertia, "com", where + ".inertia"), where + ".inertia.com");
      const json& rot = field(inertia, "rotational", where + ".inertia");
      if (!rot.is_array() || rot.size() != 6)
        throw ModelError(where + ".inertia.rotational: expected 6 numbers (Ixx,Iyy,Izz,Ixy,Ixz,Iyz)");
      std::array<double, 6> r{};
      for (int k = 0; k < 6; ++k) r[static_cast<std::size_t>(k)] = rot[static_cast<std::size_t>(k)].get<double>();
      try {
        body.inertia = make_spatial_inertia(SpatialInertia<double>::from_mass_com_rot(mass, com, r).m);
      } catch (const std::invalid_argument& e) {
        throw ModelError(where + ".inertia: " + e.what());
      }
      bodies.push_back(body);
    }
    return KinematicModel(name, gravity, std::move(bodies));
  } catch (const json::exception& e) {
    throw ModelError(std::string("model parse error: ") + e.what());
  }
}

KinematicModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

std::string save_model(const KinematicModel& model) {
  json doc;
  doc["name"] = model.name();
  doc["gravity"] = {model.gravity()[0], model.gravity()[1], model.gravity()[2]};
  json bodies = json::array();
  for (int i = 1; i <= model.num_bodies(); ++i) {
    const Body& b = model.body(i);
    json jb;
    jb["id"] = b.id;
    jb["parent"] = b.parent;
    json joint;
    joint["type"] = joint_kind_name(b.joint.kind);
    if (b.joint.kind == JointKind::revolute || b.joint.kind == JointKind::prismatic)
      joint["axis"] = {b.joint.axis[0], b.joint.axis[1], b.joint.axis[2]};
    jb["joint"] = joint;
    jb["placement"] = {
        {"translation", {b.placement_translation[0], b.placement_translation[1], b.placement_translation[2]}},
        {"quaternion", {b.placement_rotation.w, b.placement_rotation.x, b.placement_rotation.y, b.placement_rotation.z}}};
    // Recover (mass, com, rotational-about-com) from the 6x6.
    const Mat66<double>& m = b.inertia.m;
    const double mass = m(3, 3);
    const Vec3<double> mc{m(2, 4), m(0, 5), m(1, 3)};  // m*cx upper-right block off-diagonals
    const Vec3<double> com{mc[0] / mass, mc[1] / mass, mc[2] / mass};
    const Mat33<double> cx = skew(com);
    Mat33<double> io;
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 3; ++r) io(r, c) = m(r, c);
    const Mat33<double> ic = io + (-mass) * (cx * cx.transposed());
    jb["inertia"] = {{"mass", mass},
                     {"com", {com[0], com[1], com[2]}},
                     {"rotational", {ic(0, 0), ic(1, 1), ic(2, 2), ic(0, 1), ic(0, 2), ic(1, 2)}}};
    bodies.push_back(jb);
  }
  doc["bodies"] = bodies;
  return doc.dump(2);
}

namespace {

Quat<double> random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Quat<double> q{g(rng), g(rng), g(rng), g(rng)};
  return q.normalized();
}

Body make_link(int id, int parent, const JointType& joint, double prev_len, double len, double mass,
               std::mt19937_64& rng) {
  Body b;
  b.id = id;
  b.parent = parent;
  b.joint = joint;
  b.placement_translation = {prev_len, 0, 0};
  b.placement_rotation = random_unit_quat(rng);
  const double radius = 0.1 * len;
  const double ax = 0.5 * mass * radius * radius;
  const double perp = mass * (3 * radius * radius + len * len) / 12.0;
  b.inertia = SpatialInertia<double>::from_mass_com_rot(mass, {0.5 * len, 0, 0}, {ax, perp, perp, 0, 0, 0});
  return b;
}

}  // namespace

KinematicModel serial_chain(int n, const JointType& joint, std::uint64_t seed) {
  if (n < 1) throw ModelError("serial_chain: N must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> len_dist(0.1, 1.0), mass_dist(0.5, 5.0);
  std::vector<Body> bodies;
  bodies.reserve(static_cast<std::size_t>(n));
  double prev_len = 0;
  for (int i = 1; i <= n; ++i) {
    const double len = len_dist(rng), mass = mass_dist(rng);
    bodies.push_back(make_link(i, i - 1, joint, prev_len, len, mass, rng));
    prev_len = len;
  }
  return KinematicModel("serial" + std::to_string(n) + "-" + joint_kind_name(joint.kind), {0, 0, -9.81},
                        std::move(bodies));
}

KinematicModel branched_chain(int n, int bf, const JointType& joint, std::uint64_t seed) {
  if (n < 1) throw ModelError("branched_chain: N must be >= 1");
  if (bf < 2) throw ModelError("branched_chain: branching factor must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> len_dist(0.1, 1.0), mass_dist(0.5, 5.0);
  std::vector<double> lengths(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<Body> bodies;
  bodies.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int parent = (i == 1) ? 0 : (i - 2) / bf + 1;
    const double len = len_dist(rng), mass = mass_dist(rng);
    lengths[static_cast<std::size_t>(i)] = len;
    bodies.push_back(make_link(i, parent, joint, lengths[static_cast<std::size_t>(parent)], len, mass, rng));
  }
  return KinematicModel("branched" + std::to_string(n) + "x" + std::to_string(bf) + "-" +
                            joint_kind_name(joint.kind),
                        {0, 0, -9.81}, std::move(bodies));
}

JointState random_state(const KinematicModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-3.14159265358979323846, 3.14159265358979323846);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  JointState st;
  st.q.resize(static_cast<std::size_t>(model.config_size()));
  st.qd.resize(static_cast<std::size_t>(model.dof()));
  st.qdd.resize(static_cast<std::size_t>(model.dof()));
  for (int i = 1; i <= model.num_bodies(); ++i) {
    const int qo = model.q_offset(i);
    switch (model.body(i).joint.kind) {
      case JointKind::revolute:
      case JointKind::prismatic:
        st.q[static_cast<std::size_t>(qo)] = angle(rng);
        break;
      case JointKind::spherical: {
        const Quat<double> q = random_unit_quat(rng);
        st.q[static_cast<std::size_t>(qo)] = q.w;
        st.q[static_cast<std::size_t>(qo + 1)] = q.x;
        st.q[static_cast<std::size_t>(qo + 2)] = q.y;
        st.q[static_cast<std::size_t>(qo + 3)] = q.z;
        break;
      }
      case JointKind::free_joint: {
        for (int k = 0; k < 3; ++k) st.q[static_cast<std::size_t>(qo + k)] = unit(rng);
        const Quat<double> q = random_unit_quat(rng);
        st.q[static_cast<std::size_t>(qo + 3)] = q.w;
        st.q[static_cast<std::size_t>(qo + 4)] = q.x;
        st.q[static_cast<std::size_t>(qo + 5)] = q.y;
        st.q[static_cast<std::size_t>(qo + 6)] = q.z;
        break;
      }
    }
  }
  for (double& v : st.qd) v = unit(rng);
  for (double& v : st.qdd) v = unit(rng);
  return st;
}

}  // namespace dynhess
