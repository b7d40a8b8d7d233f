// Command-line front end: model generation, verification sweeps against the
// differentiation oracles and identity suites, and timing benchmarks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynhess/first_order.hpp"
#include "dynhess/model.hpp"
#include "dynhess/oracle.hpp"
#include "dynhess/second_order.hpp"
#include "dynhess/tensor.hpp"

namespace {

using namespace dynhess;

constexpr int kExitVerifyFailure = 1;
constexpr int kExitBadInput = 2;

JointType parse_joint(const std::string& name) { return joint_type_from_name(name, {0, 0, 1}); }

struct GeneratorArgs {
  int serial_n = 0;
  int branched_n = 0;
  int bf = 2;
  std::string joint = "revolute";
  std::uint64_t seed = 1;
};

KinematicModel build_model(const GeneratorArgs& g) {
  if (g.serial_n > 0) return serial_chain(g.serial_n, parse_joint(g.joint), g.seed);
  return branched_chain(g.branched_n, g.bf, parse_joint(g.joint), g.seed);
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
  std::string name;
  double err = 0;
  double tol = 0;
  bool pass() const { return err <= tol; }
};

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

double max_rel(const MatX<double>& a, const MatX<double>& b) {
  double worst = 0;
  for (int c = 0; c < a.cols(); ++c)
    for (int r = 0; r < a.rows(); ++r) worst = std::max(worst, rel(a(r, c), b(r, c)));
  return worst;
}

double max_rel(const Tensor3& a, const Tensor3& b) {
  double worst = 0;
  for (int k = 0; k < a.dim3(); ++k)
    for (int j = 0; j < a.dim2(); ++j)
      for (int i = 0; i < a.dim1(); ++i) worst = std::max(worst, rel(a(i, j, k), b(i, j, k)));
  return worst;
}

double max_rel_all(const SecondOrderDerivatives& a, const SecondOrderDerivatives& b) {
  return std::max({max_rel(a.d2tau_dq2, b.d2tau_dq2), max_rel(a.d2tau_dqd2, b.d2tau_dqd2),
                   max_rel(a.d2tau_dqd_dq, b.d2tau_dqd_dq), max_rel(a.dM_dq, b.dM_dq)});
}

std::vector<CheckResult> run_checks(const KinematicModel& model, const std::set<std::string>& wanted,
                                    int states, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const bool all = wanted.empty() || wanted.count("all") > 0;
  auto want = [&](const char* name) { return all || wanted.count(name) > 0; };

  if (want("identities-m")) {
    double worst = 0;
    for (const IdentityCheck& c : run_m_identity_suite(200, seed)) worst = std::max(worst, c.max_rel_err);
    out.push_back({"identities-m", worst, 1e-13});
  }

  double fo_dual = 0, fo_fd = 0, fo_mass = 0, so_dual = 0, so_fd = 0, ident_k = 0;
  double sym = 0, sparse = 0;
  for (int s = 0; s < states; ++s) {
    const JointState st = random_state(model, seed + static_cast<std::uint64_t>(s));
    if (want("fo")) {
      const auto fo = id_fo_derivatives(model, st);
      const auto du = dual_fo(model, st);
      const auto fd = fd_fo(model, st, 1e-6);
      fo_dual = std::max({fo_dual, max_rel(fo.dtau_dq, du.dtau_dq), max_rel(fo.dtau_dqd, du.dtau_dqd),
                          max_rel(fo.dtau_dqdd, du.dtau_dqdd)});
      fo_fd = std::max({fo_fd, max_rel(fo.dtau_dq, fd.dtau_dq), max_rel(fo.dtau_dqd, fd.dtau_dqd)});
      fo_mass = std::max(fo_mass, max_rel(fo.dtau_dqdd, mass_matrix(model, st.q)));
    }
    if (want("so")) {
      const auto so = id_so_derivatives(model, st);
      so_dual = std::max(so_dual, max_rel_all(so, so_oracle(model, st, DiffMethod::dual)));
      so_fd = std::max(so_fd, max_rel_all(so, so_oracle(model, st, DiffMethod::fd, 1e-6)));
    }
    if (want("identities-k")) ident_k = std::max(ident_k, check_identities_K(model, st).worst());
    if (want("symmetry") || want("sparsity")) {
      const auto so = id_so_derivatives(model, st);
      const int n = model.dof();
      auto rel_pair = [&](int x, int y) {
        return is_ancestor_or_equal(model, x, y) || is_ancestor_or_equal(model, y, x);
      };
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) {
            const int jb = model.joint_of_dof(b), jc = model.joint_of_dof(c);
            if (want("symmetry") && jb != jc) {
              sym = std::max(sym, std::abs(so.d2tau_dq2(a, b, c) - so.d2tau_dq2(a, c, b)));
              sym = std::max(sym, std::abs(so.d2tau_dqd2(a, b, c) - so.d2tau_dqd2(a, c, b)));
            }
            if (want("sparsity")) {
              const int ja = model.joint_of_dof(a);
              if (!(rel_pair(ja, jb) && rel_pair(ja, jc) && rel_pair(jb, jc))) {
                sparse = std::max({sparse, std::abs(so.d2tau_dq2(a, b, c)), std::abs(so.d2tau_dqd2(a, b, c)),
                                   std::abs(so.d2tau_dqd_dq(a, b, c)), std::abs(so.dM_dq(a, b, c))});
              }
            }
          }
    }
  }
  if (want("fo")) {
    out.push_back({"fo-vs-dual", fo_dual, 1e-10});
    out.push_back({"fo-vs-fd", fo_fd, 1e-5});
    out.push_back({"fo-mass-matrix", fo_mass, 1e-13});
  }
  if (want("so")) {
    out.push_back({"so-vs-dual", so_dual, 1e-9});
    out.push_back({"so-vs-fd", so_fd, 1e-4});
  }
  if (want("identities-k")) out.push_back({"identities-k", ident_k, 1e-8});
  if (want("symmetry")) out.push_back({"hessian-symmetry", sym, 0.0});
  if (want("sparsity")) out.push_back({"branch-sparsity", sparse, 0.0});
  return out;
}

// ---------------------------------------------------------------------------
// bench

struct BenchRow {
  std::string algorithm, chain, joint;
  int bf = 0, n_bodies = 0, dof = 0, depth = 0;
  std::uint64_t median_ns = 0, p10_ns = 0, p90_ns = 0;
  std::uint64_t seed = 0;
};

template <typename F>
void time_algorithm(F&& fn, int warmup, int trials, BenchRow& row) {
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<std::uint64_t> ns(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    ns[static_cast<std::size_t>(i)] =
        static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  std::sort(ns.begin(), ns.end());
  auto at = [&](double q) { return ns[static_cast<std::size_t>(q * (trials - 1) + 0.5)]; };
  row.p10_ns = at(0.10);
  row.median_ns = at(0.50);
  row.p90_ns = at(0.90);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigid-body inverse dynamics derivatives: generate, verify, benchmark"};
  app.require_subcommand(1);

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a chain model file");
  GeneratorArgs gen_args;
  std::string gen_out = "-";
  gen->add_option("--serial", gen_args.serial_n, "serial chain with N bodies");
  gen->add_option("--branched", gen_args.branched_n, "branched chain with N bodies");
  gen->add_option("--bf", gen_args.bf, "branching factor (branched only)")->default_val(2);
  gen->add_option("--joint", gen_args.joint, "revolute|prismatic|spherical|free")->default_val("revolute");
  gen->add_option("--seed", gen_args.seed, "generator seed")->default_val(1);
  gen->add_option("-o,--output", gen_out, "output path (default stdout)");

  // verify ------------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run derivative and identity checks");
  std::string verify_model_path;
  GeneratorArgs verify_gen;
  std::string checks_csv, verify_format = "text";
  int verify_states = 2;
  verify->add_option("model", verify_model_path, "model JSON file");
  verify->add_option("--serial", verify_gen.serial_n, "generate a serial chain instead");
  verify->add_option("--branched", verify_gen.branched_n, "generate a branched chain instead");
  verify->add_option("--bf", verify_gen.bf, "branching factor")->default_val(2);
  verify->add_option("--joint", verify_gen.joint, "joint type for generated chains")->default_val("revolute");
  verify->add_option("--seed", verify_gen.seed, "seed for generated chains and states")->default_val(1);
  verify->add_option("--states", verify_states, "random states per model")->default_val(2);
  verify->add_option("--checks", checks_csv,
                     "comma list: fo,so,identities-m,identities-k,symmetry,sparsity (default all)");
  verify->add_option("--format", verify_format, "text|csv")->default_val("text");

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "time rnea/fo/so kernels over chain sizes");
  std::vector<int> bench_serial, bench_branched;
  GeneratorArgs bench_gen;
  int trials = 100, warmup = 10;
  std::string bench_out = "-";
  bench->add_option("--serial", bench_serial, "serial chain sizes")->delimiter(',');
  bench->add_option("--branched", bench_branched, "branched chain sizes")->delimiter(',');
  bench->add_option("--bf", bench_gen.bf, "branching factor")->default_val(2);
  bench->add_option("--joint", bench_gen.joint, "joint type")->default_val("revolute");
  bench->add_option("--trials", trials, "timed repetitions")->default_val(100);
  bench->add_option("--warmup", warmup, "warmup repetitions")->default_val(10);
  bench->add_option("--seed", bench_gen.seed, "model/state seed")->default_val(1);
  bench->add_option("-o,--output", bench_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (gen->parsed()) {
      if (gen_args.serial_n != 0 && gen_args.branched_n != 0) {
        std::cerr << "gen: pass exactly one of --serial or --branched\n";
        return kExitBadInput;
      }
      if (!gen->count("--serial") && !gen->count("--branched")) {
        std::cerr << "gen: pass one of --serial or --branched\n";
        return kExitBadInput;
      }
      if (gen_args.serial_n < 1 && gen_args.branched_n < 1) {
        std::cerr << "gen: N must be >= 1\n";
        return kExitBadInput;
      }
      if (gen_args.branched_n > 0 && gen_args.bf < 2) {
        std::cerr << "gen: branching factor must be >= 2\n";
        return kExitBadInput;
      }
      const std::string text = save_model(build_model(gen_args));
      if (gen_out == "-") {
        std::cout << text << "\n";
      } else {
        std::ofstream f(gen_out);
        if (!f) {
          std::cerr << "gen: cannot write " << gen_out << "\n";
          return kExitBadInput;
        }
        f << text << "\n";
      }
      return 0;
    }

    if (verify->parsed()) {
      if (verify_states < 1) {
        std::cerr << "verify: --states must be >= 1\n";
        return kExitBadInput;
      }
      KinematicModel model = [&] {
        if (!verify_model_path.empty()) return load_model_file(verify_model_path);
        if (verify_gen.serial_n > 0 || verify_gen.branched_n > 0) return build_model(verify_gen);
        throw ModelError("verify: pass a model file or --serial/--branched");
      }();
      std::set<std::string> wanted;
      std::stringstream ss(checks_csv);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) wanted.insert(item);
      const std::vector<CheckResult> results = run_checks(model, wanted, verify_states, verify_gen.seed);
      if (results.empty()) {
        std::cerr << "verify: no checks selected\n";
        return kExitBadInput;
      }
      bool ok = true;
      if (verify_format == "csv") std::cout << "check,max_rel_err,tolerance,status\n";
      for (const CheckResult& r : results) {
        ok = ok && r.pass();
        if (verify_format == "csv")
          std::cout << r.name << "," << r.err << "," << r.tol << "," << (r.pass() ? "pass" : "fail") << "\n";
        else
          std::cout << (r.pass() ? "PASS" : "FAIL") << "  " << r.name << "  max_rel_err=" << r.err
                    << "  tol=" << r.tol << "\n";
      }
      if (!ok) {
        for (const CheckResult& r : results)
          if (!r.pass()) std::cerr << "verify: tolerance breach in check \"" << r.name << "\"\n";
        return kExitVerifyFailure;
      }
      return 0;
    }

    if (bench->parsed()) {
      if (trials < 1 || warmup < 0) {
        std::cerr << "bench: trials must be >= 1 and warmup >= 0\n";
        return kExitBadInput;
      }
      if (bench_serial.empty() == bench_branched.empty()) {
        std::cerr << "bench: pass exactly one of --serial or --branched size lists\n";
        return kExitBadInput;
      }
      const bool serial = !bench_serial.empty();
      const std::vector<int>& sizes = serial ? bench_serial : bench_branched;
      for (int n : sizes)
        if (n < 1) {
          std::cerr << "bench: N must be >= 1\n";
          return kExitBadInput;
        }

      std::vector<BenchRow> rows;
      for (const char* algo : {"rnea", "fo", "so"}) {
        for (int n : sizes) {
          GeneratorArgs g = bench_gen;
          g.serial_n = serial ? n : 0;
          g.branched_n = serial ? 0 : n;
          const KinematicModel model = build_model(g);
          const JointState st = random_state(model, g.seed);
          BenchRow row;
          row.algorithm = algo;
          row.chain = serial ? "serial" : "branched";
          row.bf = serial ? 0 : g.bf;
          row.joint = g.joint;
          row.n_bodies = n;
          row.dof = model.dof();
          row.depth = model.depth();
          row.seed = g.seed;
          const std::string name = algo;
          SecondOrderDerivatives ws;
          if (name == "rnea")
            time_algorithm([&] { rnea(model, st); }, warmup, trials, row);
          else if (name == "fo")
            time_algorithm([&] { id_fo_derivatives(model, st); }, warmup, trials, row);
          else
            time_algorithm([&] { id_so_derivatives_serial(model, st, ws); }, warmup, trials, row);
          rows.push_back(row);
        }
      }

      std::ostringstream csv;
      csv << "algorithm,chain,bf,joint,N,n,d,median_ns,p10_ns,p90_ns,seed\n";
      for (const BenchRow& r : rows)
        csv << r.algorithm << "," << r.chain << "," << r.bf << "," << r.joint << "," << r.n_bodies << ","
            << r.dof << "," << r.depth << "," << r.median_ns << "," << r.p10_ns << "," << r.p90_ns << ","
            << r.seed << "\n";
      if (bench_out == "-") {
        std::cout << csv.str();
      } else {
        std::ofstream f(bench_out);
        if (!f) {
          std::cerr << "bench: cannot write " << bench_out << "\n";
          return kExitBadInput;
        }
        f << csv.str();
      }
      return 0;
    }
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return 0;
}
