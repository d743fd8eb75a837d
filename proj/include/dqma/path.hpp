#pragma once

// Analyzer for the one-round certification protocol on a path v_0..v_r.
//
// v_0 prepares the protocol message for its input x in register R_0; a prover
// places certificate states in R_1..R_{r-1}.  Every v_j (j < r) flips a fair
// coin b_j and forwards R_j to v_{j+1} when b_j = 0.  An intermediate node
// that kept its register (b_j = 1) and received its left neighbor's register
// (b_{j-1} = 0) SWAP-tests the two; when a node forwards its own register,
// any register it received is dropped from further use.  v_r, if it received
// R_{r-1}, applies the protocol's binary measurement for its input y.  A run
// accepts when every performed test accepts.
//
// Exact analysis enumerates all 2^r coin strings (r ≤ 16); sampled analysis
// draws per-trial streams in counter mode so results are independent of the
// thread count.  Product strategies are evaluated through pairwise overlaps,
// so real fingerprint dimensions never materialize a joint space; global
// (entangled) strategies materialize only the certificate space R_1..R_{r-1},
// with ρ_0 contracted analytically, subject to the dimension cap.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dqma/comm.hpp"
#include "dqma/exec.hpp"

namespace dqma {

struct PathInstance {
  int r = 0;
  OneWayProtocol protocol;
  std::string left_input;   // x at v_0
  std::string right_input;  // y at v_r
  void validate() const;
};

// Prover strategies.  Honest: every certificate is the message state for x.
// Rotation: certificate j interpolates between the x-message and the
// orthogonalized y-message at angle j·π/(2r).  Product: arbitrary per-node
// density matrices.  Global: an arbitrary joint state over R_1..R_{r-1}.
struct HonestStrategy {};
struct RotationStrategy {};
struct ProductStrategy {
  std::vector<DensityMatrix> certificates;  // R_1..R_{r-1}
};
struct GlobalStrategy {
  DensityMatrix joint;  // over R_1..R_{r-1}, register order left to right
};
using ProverStrategy =
    std::variant<HonestStrategy, RotationStrategy, ProductStrategy, GlobalStrategy>;

// cos(theta)·|a⟩ + sin(theta)·|b_perp⟩ with b orthogonalized against a.
PureState rotation_state(const PureState& a, const PureState& b, double theta);

// Local tests triggered by a coin string (bit j = coin of v_j).
struct LocalTest {
  int node = 0;        // 1..r
  bool is_swap = true; // false: the final binary measurement at v_r
  int left_register = 0;
  int right_register = 0;  // the measured register for the final test
};
std::vector<LocalTest> active_tests(std::uint32_t coins, int r);

struct RegisterRelocation {
  int reg = 0;
  double stay_probability = 0.0;  // odds the register ends where it started
};

struct AcceptanceReport {
  double accept_probability = 0.0;
  // alpha_j = Pr[test j rejects | test j occurs], j = 1..r; computed from the
  // (unconditional) reduced certificate states.
  std::vector<double> per_test_conditionals;
  std::vector<double> test_occurrence_probabilities;  // Pr[F_j], j = 1..r
  bool soundness_sum_met = false;                     // Σ alpha_j ≥ 1/(21 r) − 1e-9
  int repetition_count = 1;
  double repeated_acceptance = 0.0;  // accept_probability^repetition_count
  // Size accounting per intermediate node / message.
  int register_qubits = 0;
  long certificate_qubits = 0;
  long message_qubits = 0;
  int index_bits = 0;            // per-register repetition tag, ⌈log2 k⌉
  long message_classical_bits = 0;
  // Sampling metadata (zero/false for exact runs).
  bool sampled = false;
  long trials = 0;
  std::uint64_t seed = 0;
  double confidence_radius = 0.0;  // 99% Wilson half-width
  std::vector<RegisterRelocation> relocations;

  double soundness_sum() const;
};

AcceptanceReport exact_acceptance(const PathInstance& instance, const ProverStrategy& strategy,
                                  exec::Mode mode = exec::Mode::parallel,
                                  Index dim_cap = kDefaultDimCap);

AcceptanceReport sampled_acceptance(const PathInstance& instance,
                                    const ProverStrategy& strategy, long trials,
                                    std::uint64_t seed, exec::Mode mode = exec::Mode::parallel,
                                    Index dim_cap = kDefaultDimCap);

// Σ alpha_j ≥ 1/(21 r) − 1e-9, the per-test rejection budget every 0-input
// strategy must grant.
bool check_soundness_sum(const AcceptanceReport& report, int r);

// k-fold parallel repetition with conjunctive acceptance for strategies that
// are product across repetitions: acceptance = Π (per-repetition acceptance).
AcceptanceReport repeat_protocol(const PathInstance& instance, const ProverStrategy& strategy,
                                 int repetitions, exec::Mode mode = exec::Mode::parallel,
                                 Index dim_cap = kDefaultDimCap);
AcceptanceReport repeat_protocol(const PathInstance& instance,
                                 std::span<const ProverStrategy> per_repetition,
                                 exec::Mode mode = exec::Mode::parallel,
                                 Index dim_cap = kDefaultDimCap);

// Certificates entangled across repetitions are outside the verified scope of
// this analyzer; repeat_protocol rejects them with scope_error.
struct EntangledRepetitionCertificate {
  DensityMatrix joint;  // over the k·(r-1) certificate registers
  int repetitions = 0;
};
AcceptanceReport repeat_protocol(const PathInstance& instance,
                                 const EntangledRepetitionCertificate& certificate,
                                 exec::Mode mode = exec::Mode::parallel,
                                 Index dim_cap = kDefaultDimCap);

// Standard repetition budget k = 84 r² and the resulting certificate and
// message sizes for one instance of the given protocol.
struct RepetitionPlan {
  int repetitions = 0;       // 84 r²
  int register_qubits = 0;   // per repetition
  long certificate_qubits = 0;
  long message_qubits = 0;
  int index_bits = 0;
  long message_classical_bits = 0;
};
RepetitionPlan repetition_plan(const OneWayProtocol& protocol, int r);

// Probability bounds relating a conjunction/disjunction of n events to the
// mean of their marginals, evaluated on an explicit joint distribution
// (table[i] = probability of the outcome pattern with event-membership bits i).
struct JointEventBounds {
  double conjunction = 0.0;
  double disjunction = 0.0;
  double marginal_mean = 0.0;
};
JointEventBounds joint_event_bounds(std::span<const double> table);
bool joint_event_bounds_hold(std::span<const double> table, double tol = 1e-12);

}  // namespace dqma
