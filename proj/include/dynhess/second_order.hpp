#pragma once

// Second-order partials of inverse dynamics in one backward sweep over the
// tree, O(N d^2). Outputs are dense n x n x n tensors whose entries follow
// the sweep's write targets:
//
//   d2tau_dq2   (a, b, c) = d^2 tau_a / dq_b dq_c
//   d2tau_dqd2  (a, b, c) = d^2 tau_a / dqd_b dqd_c
//   d2tau_dqd_dq(a, b, c) = d/dqd_c of (d tau_a / dq_b)
//   dM_dq       (a, b, c) = d M(a, b) / dq_c
//
// Entries whose index triple does not connect along the tree are zero.

#include "dynhess/dynamics.hpp"
#include "dynhess/tensor.hpp"

namespace dynhess {

struct SecondOrderDerivatives {
  Tensor3 d2tau_dq2;
  Tensor3 d2tau_dqd2;
  Tensor3 d2tau_dqd_dq;
  Tensor3 dM_dq;
};

/// Per-(joint, DoF) temporaries of the backward sweep. Contents are undefined
/// between top-level calls. The swapped-cross operators built from a0, a4,
/// a5 and a7 are never materialized as matrices: their products are formed
/// directly as cross products from these 6-vector seeds.
struct BackwardPassScratch {
  Mat66<double> bic_sp, bic_psip;
  Mat66<double> a1, a3, a6;
  std::array<double, 6> a0, a4, a5, a7;
  std::array<double, 6> u1, u2, u3, u4, u5, u6, u7, u8, u9, u10, u11, u12;
};

/// OpenMP kernel: composites are pre-accumulated, then bodies are swept in
/// parallel (distinct bodies write disjoint tensor entries).
SecondOrderDerivatives id_so_derivatives(const KinematicModel& model, const JointState& state);

/// Reference implementation with the composite accumulation interleaved in
/// the backward sweep; output is identical to the parallel kernel.
SecondOrderDerivatives id_so_derivatives_serial(const KinematicModel& model, const JointState& state);

/// In-place variants. Every structurally nonzero entry is assigned on every
/// call, so a workspace may be reused across calls with the same model
/// without re-zeroing; it is resized and zeroed when the DoF count changes.
/// Reusing one workspace across different models of equal DoF count is not
/// supported (stale entries outside the new connectivity would survive).
void id_so_derivatives(const KinematicModel& model, const JointState& state, SecondOrderDerivatives& out);
void id_so_derivatives_serial(const KinematicModel& model, const JointState& state,
                              SecondOrderDerivatives& out);

/// d/dq_b of (d tau_a / dqd_c): the 2-3 rotation of d2tau_dqd_dq.
Tensor3 cross_hessian_q_qd(const SecondOrderDerivatives& d);

}  // namespace dynhess
