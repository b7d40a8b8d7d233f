// Times the serial reference sweep against the OpenMP kernel on the same
// models and confirms the outputs are identical.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dynhess/second_order.hpp"

using namespace dynhess;

namespace {

double time_best_ms(const std::function<void()>& fn, int reps) {
  double best = 1e100;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

double max_abs_diff(const SecondOrderDerivatives& a, const SecondOrderDerivatives& b) {
  return std::max({(a.d2tau_dq2 - b.d2tau_dq2).max_abs(), (a.d2tau_dqd2 - b.d2tau_dqd2).max_abs(),
                   (a.d2tau_dqd_dq - b.d2tau_dqd_dq).max_abs(), (a.dM_dq - b.dM_dq).max_abs()});
}

void run_case(const char* label, const KinematicModel& model, std::uint64_t seed) {
  const JointState st = random_state(model, seed);
  SecondOrderDerivatives ws_serial, ws_par;
  id_so_derivatives_serial(model, st, ws_serial);  // warm
  id_so_derivatives(model, st, ws_par);
  const double t_serial = time_best_ms([&] { id_so_derivatives_serial(model, st, ws_serial); }, 5);
  const double t_par = time_best_ms([&] { id_so_derivatives(model, st, ws_par); }, 5);
  const double diff = max_abs_diff(ws_serial, ws_par);
  std::printf("%-14s N=%4d n=%4d d=%3d  serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx  max|diff| %g\n",
              label, model.num_bodies(), model.dof(), model.depth(), t_serial, t_par, t_serial / t_par,
              diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both kernels run serially\n");
#endif
  for (int n : {16, 32, 64})
    run_case("serial-chain", serial_chain(n, JointType::revolute({0, 0, 1}), 7), 7);
  for (int n : {21, 85})
    run_case("branched-bf4", branched_chain(n, 4, JointType::revolute({0, 0, 1}), 7), 7);
  run_case("spherical-16", serial_chain(16, JointType::spherical(), 9), 9);
  return 0;
}
