#pragma once

// Classical Merlin-Arthur certification on the path v_0..v_r, and the
// constructive fooling-set attack showing why equality needs linear-size
// classical certificates.
//
// A protocol is a deterministic behavior on top of (certificates, shared
// randomness, terminal inputs): after mu synchronous message rounds, every
// node outputs accept or reject, and the protocol accepts when all do.  The
// simulator feeds each node only its own certificate, its input (terminals
// only), the shared random outcome, and the messages that physically arrived,
// so the locality the lower-bound proof relies on — node i's output can
// depend only on certificates within distance mu and on an input only within
// distance mu of its terminal — holds by construction.
//
// The attack: when a function has a 1-fooling set larger than the number of
// distinct certificate patterns on v_1..v_{2mu}, two fooling pairs share
// those certificates; splicing their honest assignments around the midpoint
// produces a certificate for a crossed 0-input that the protocol accepts
// with probability at least completeness_a + completeness_b - 1 (= 1 - 2p).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dqma/common.hpp"
#include "dqma/exec.hpp"

namespace dqma {

// Everything node `node` can see when computing a message or its output.
struct ClassicalView {
  int node = 0;         // position on the path, 0..path_length
  int path_length = 0;  // r
  std::string certificate;
  std::optional<std::string> input;          // set at v_0 and v_r only
  std::size_t random_outcome = 0;            // index into the randomness table
  // received[round] = {message from the left neighbor, from the right};
  // empty string when there is no such neighbor or it sent nothing.
  std::vector<std::array<std::string, 2>> received;
};

struct ClassicalDMA {
  std::string name;
  int path_length = 0;       // r edges, nodes v_0..v_r
  int rounds = 0;            // mu
  int certificate_bits = 0;  // c
  int input_bits = 0;        // n
  std::vector<double> randomness;  // shared-outcome distribution (enumerable)
  // Honest certificates for a 1-input (x, y): one string per node v_0..v_r.
  std::function<std::vector<std::string>(const std::string&, const std::string&)>
      honest_certificates;
  // Message sent in `round` toward the right (to_right) or left neighbor.
  std::function<std::string(const ClassicalView&, int round, bool to_right)> message;
  std::function<bool(const ClassicalView&)> output;

  void validate() const;
};

struct ClassicalRunResult {
  std::vector<bool> outputs;  // per node v_0..v_r
  bool all_accept = false;
};

// One deterministic run under a fixed shared-randomness outcome.
ClassicalRunResult run_classical(const ClassicalDMA& protocol, const std::string& x,
                                 const std::string& y,
                                 const std::vector<std::string>& certificates,
                                 std::size_t outcome);

// Pr[all nodes accept], exactly, by enumerating the randomness table.
double classical_acceptance(const ClassicalDMA& protocol, const std::string& x,
                            const std::string& y,
                            const std::vector<std::string>& certificates,
                            exec::Mode mode = exec::Mode::parallel);

// Pr[every node in [lo, hi] accepts] — the half-path events of the attack.
double classical_event(const ClassicalDMA& protocol, const std::string& x, const std::string& y,
                       const std::vector<std::string>& certificates, int lo, int hi,
                       exec::Mode mode = exec::Mode::parallel);

// Monte Carlo acceptance (counter-mode streams; thread-count independent).
double sampled_classical_acceptance(const ClassicalDMA& protocol, const std::string& x,
                                    const std::string& y,
                                    const std::vector<std::string>& certificates, long trials,
                                    std::uint64_t seed, exec::Mode mode = exec::Mode::parallel);

struct FoolingSet {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::function<bool(const std::string&, const std::string&)> f;
};

// {(x, x)} over all n-bit x, with f = equality; a 1-fooling set of size 2^n.
FoolingSet eq_fooling_set(int n);

// Exhaustive check of the 1-fooling property (f = 1 on pairs, every pair of
// distinct members has a crossed 0); quadratic, intended for small sets.
bool fooling_property_holds(const FoolingSet& set);

struct AttackResult {
  std::pair<std::string, std::string> pair_a;   // first colliding fooling pair
  std::pair<std::string, std::string> pair_b;   // second colliding fooling pair
  std::pair<std::string, std::string> crossed;  // the 0-input under attack
  std::vector<std::string> spliced_certificates;  // w'' per node v_0..v_r
  double acceptance = 0.0;           // exact acceptance of (crossed, w'')
  double witness_lower_bound = 0.0;  // P[left half accepts] + P[right half] - 1
};

// The constructive lower-bound attack.  Requires path_length ≥ 2·rounds+1 and
// |set| ≥ 2^(2·rounds·certificate_bits) + 1 (otherwise the pigeonhole does
// not apply and std::invalid_argument is thrown; this is exactly the
// "certificates too large" failure).  Colliding pairs are found by scanning
// the set in order and taking the first repeated certificate pattern.
AttackResult fooling_attack(const ClassicalDMA& protocol, const FoolingSet& set,
                            exec::Mode mode = exec::Mode::parallel);

// Optimal-gap protocol for 1-bit equality: shared X in {-1, 0, 1} with
// Pr[X=0] = Pr[X=1] = p; v_0 accepts iff X = -1 or X = x, v_r accepts iff
// X = -1 or X = y, everyone else accepts.  Completeness exactly 1-p,
// soundness error exactly 1-2p.
ClassicalDMA eq1_optimal_protocol(double p, int path_length);

// Parity-hash protocol for n-bit equality with 1-bit certificates: honest
// certificates equal parity(x) at every node, round 1 exchanges certificates,
// every node checks agreement with its neighbors, the terminals check their
// own parity, and v_0 additionally passes a shared random gate that accepts
// with probability exactly 1-p.  Completeness 1-p; the fooling attack drives
// its soundness error to 1-p (≥ 1-2p) because parity collides.
ClassicalDMA parity_hash_protocol(int n, int path_length, double p);

// Certificate-ignoring protocol in which every node accepts; completeness 1,
// and the attack demonstrates soundness error 1.
ClassicalDMA always_accept_protocol(int n, int path_length, int certificate_bits);

}  // namespace dqma
