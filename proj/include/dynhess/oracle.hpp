#pragma once

// Independent ground truth for every derivative the analytical sweeps
// produce: forward-mode dual differentiation and central finite differences
// of inverse dynamics and of the first-order derivatives, with
// configuration perturbations taken along the joints' local exponential
// coordinates (the same convention integrate_config uses). Also hosts the
// numeric checks for the sixteen multi-DoF joint derivative identities.

#include <array>
#include <string>
#include <vector>

#include "dynhess/dual.hpp"
#include "dynhess/first_order.hpp"
#include "dynhess/second_order.hpp"

namespace dynhess {

enum class Var { q, qd, qdd };

struct PerturbationDirection {
  int joint = 1;  // body/joint index
  int dof = 0;    // free mode within the joint
  Var var = Var::q;
};

/// Exact directional derivative of inverse dynamics along one free mode,
/// via one dual-number evaluation.
std::vector<double> dual_id_directional(const KinematicModel& model, const JointState& state,
                                        const PerturbationDirection& dir);

/// All first-order partials assembled from dual directional sweeps.
FirstOrderDerivatives dual_fo(const KinematicModel& model, const JointState& state);

/// Central finite differences of inverse dynamics, O(h^2).
FirstOrderDerivatives fd_fo(const KinematicModel& model, const JointState& state, double h);

enum class DiffMethod { dual, fd };

/// Second-order reference: differentiates the analytical first-order
/// derivatives (and the mass matrix for dM/dq) along every direction,
/// assembling tensors in the same index convention as the analytical sweep.
SecondOrderDerivatives so_oracle(const KinematicModel& model, const JointState& state, DiffMethod method,
                                 double h = 1e-6);

struct KIdentityReport {
  std::array<double, 16> max_rel_err{};
  double worst() const {
    double w = 0;
    for (double e : max_rel_err) w = w > e ? w : e;
    return w;
  }
};

/// Checks the sixteen derivative identities for every ordered body pair
/// (i, j): the dual-differentiated left side against the analytical right
/// side built from tensor operations, honoring the ancestor/descendant case
/// splits. Reports per-identity worst relative error; never throws on a
/// mismatch.
KIdentityReport check_identities_K(const KinematicModel& model, const JointState& state);

}  // namespace dynhess
