// Times every analysis kernel in both execution modes and verifies that the
// parallel lane reproduces the serial reference bit for bit.  Exits nonzero
// on any mismatch, so the --quick variant doubles as a smoke test.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "dqma/classical.hpp"
#include "dqma/path.hpp"
#include "dqma/random.hpp"
#include "dqma/tree.hpp"

using namespace dqma;

namespace {

struct Bench {
  std::string name;
  std::function<double(exec::Mode)> run;
};

Network big_star(int arms, int arm_length) {
  Network net;
  net.nodes.push_back(0);
  for (int a = 0; a < arms; ++a) {
    int prev = 0;
    for (int i = 1; i <= arm_length; ++i) {
      const int id = a * arm_length + i;
      net.nodes.push_back(id);
      net.edges.push_back({prev, id});
      prev = id;
    }
    net.terminals.push_back(prev);
    net.inputs.push_back(a + 1 == arms ? "1" : "0");
  }
  return net;
}

double timed(const std::function<double(exec::Mode)>& fn, exec::Mode mode, double& out) {
  const auto start = std::chrono::steady_clock::now();
  out = fn(mode);
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  const int path_r = quick ? 7 : 9;
  const long mc_trials = quick ? 20000 : 200000;
  const int star_arm = quick ? 3 : 4;
  const long cls_trials = quick ? 50000 : 500000;

  std::vector<Bench> benches;

  // Entangled-certificate path analysis: per-coin dense operator assembly.
  benches.push_back({"path exact, joint certificate (r=" + std::to_string(path_r) + ")",
                     [path_r](exec::Mode mode) {
                       rnd::Rng rng(1001);
                       Index dim = 1;
                       for (int i = 1; i < path_r; ++i) dim *= 2;
                       const PathInstance inst{path_r, qubit_eq_protocol(), "0", "1"};
                       const GlobalStrategy strategy{rnd::ginibre_density(rng, dim)};
                       return exact_acceptance(inst, strategy, mode)
                           .accept_probability;
                     }});

  // Monte Carlo path runs: one independent stream per trial.
  benches.push_back({"path sampled, rotation (r=6, " + std::to_string(mc_trials) + " trials)",
                     [mc_trials](exec::Mode mode) {
                       const PathInstance inst{6, qubit_eq_protocol(), "0", "1"};
                       return sampled_acceptance(inst, RotationStrategy{}, mc_trials, 2024,
                                                 mode)
                           .accept_probability;
                     }});

  // Exact tree analysis: 3 arms, many coin assignments.
  benches.push_back(
      {"tree exact, honest (3 arms of length " + std::to_string(star_arm) + ")",
       [star_arm](exec::Mode mode) {
         return run_tree_protocol(big_star(3, star_arm), qubit_eq_protocol(), TreeHonest{},
                                  1, mode)
             .accept_probability;
       }});

  // Classical Monte Carlo.
  benches.push_back({"classical sampled, parity hash (" + std::to_string(cls_trials) +
                         " trials)",
                     [cls_trials](exec::Mode mode) {
                       const ClassicalDMA pi = parity_hash_protocol(5, 3, 0.25);
                       const auto certs = pi.honest_certificates("00000", "00000");
                       return sampled_classical_acceptance(pi, "00000", "00000", certs,
                                                           cls_trials, 77, mode);
                     }});

  std::printf("execution modes benchmark (%d OpenMP thread%s)\n", exec::thread_count(),
              exec::thread_count() == 1 ? "" : "s");
  std::printf("%-55s %12s %12s %9s %7s\n", "kernel", "serial(ms)", "parallel(ms)",
              "speedup", "equal");

  bool all_equal = true;
  for (const auto& bench : benches) {
    double serial_value = 0.0, parallel_value = 0.0;
    const double serial_ms = timed(bench.run, exec::Mode::serial, serial_value);
    const double parallel_ms = timed(bench.run, exec::Mode::parallel, parallel_value);
    const bool equal = serial_value == parallel_value;
    all_equal = all_equal && equal;
    std::printf("%-55s %12.1f %12.1f %8.2fx %7s\n", bench.name.c_str(), serial_ms,
                parallel_ms, serial_ms / parallel_ms, equal ? "yes" : "NO");
  }
  if (!all_equal) {
    std::fprintf(stderr, "serial and parallel results diverged\n");
    return 1;
  }
  return 0;
}
