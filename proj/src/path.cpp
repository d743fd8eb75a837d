#include "dqma/path.hpp"

#include <cmath>
#include <numbers>

#include "dqma/random.hpp"

namespace dqma {

namespace {

constexpr int kMaxExactPathLength = 16;  // 2^r coin strings are enumerated
constexpr double kSoundnessSlack = 1e-9;
// 99% two-sided normal quantile for the Wilson interval.
constexpr double kWilsonZ99 = 2.5758293035489004;

double wilson_radius(long accepted, long trials) {
  const double z = kWilsonZ99;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(accepted) / n;
  const double denom = 1.0 + z * z / n;
  return (z / denom) * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n));
}

double wilson_center(long accepted, long trials) {
  const double z = kWilsonZ99;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(accepted) / n;
  return (phat + z * z / (2.0 * n)) / (1.0 + z * z / n);
}

// Certificates materialized for analysis.  Product strategies keep per-node
// states (pure where possible); global strategies keep the joint over
// R_1..R_{r-1} plus its pairwise reductions for the alpha_j fields.
struct Prepared {
  int r = 0;
  Index m = 0;
  PureState rho0;
  BinaryPOVM povm;
  bool product = true;
  std::vector<PureState> pure_certs;        // used when pure == true
  std::vector<DensityMatrix> mixed_certs;   // used when pure == false
  bool pure = true;
  std::optional<DensityMatrix> joint;

  // Per-test acceptance probabilities (product backend) and the
  // unconditional per-test conditionals alpha_j for both backends.
  std::vector<double> swap_accept;  // index j-1 for test at v_j, j = 1..r-1
  double povm_accept = 1.0;
  std::vector<double> alpha;        // alpha_1..alpha_r
};

DensityMatrix cert_density(const Prepared& prep, int j /* 1-based */) {
  if (prep.pure) return prep.pure_certs[j - 1].to_density();
  return prep.mixed_certs[j - 1];
}

Prepared prepare(const PathInstance& instance, const ProverStrategy& strategy, Index dim_cap) {
  instance.validate();
  const OneWayProtocol& pi = instance.protocol;
  Prepared prep{instance.r,
                pi.message_dim,
                pi.message_state(instance.left_input),
                pi.receiver_povm(instance.right_input)};
  const int certs = instance.r - 1;

  if (std::holds_alternative<HonestStrategy>(strategy)) {
    prep.pure_certs.assign(certs, prep.rho0);
  } else if (std::holds_alternative<RotationStrategy>(strategy)) {
    const PureState target = pi.message_state(instance.right_input);
    for (int j = 1; j <= certs; ++j)
      prep.pure_certs.push_back(
          rotation_state(prep.rho0, target, std::numbers::pi * j / (2.0 * instance.r)));
  } else if (const auto* product = std::get_if<ProductStrategy>(&strategy)) {
    if (static_cast<int>(product->certificates.size()) != certs)
      throw std::invalid_argument("exact_acceptance: expected " + std::to_string(certs) +
                                  " certificates, got " +
                                  std::to_string(product->certificates.size()));
    for (const auto& c : product->certificates)
      if (c.dim() != prep.m)
        throw std::invalid_argument("exact_acceptance: certificate dimension mismatch");
    prep.pure = false;
    prep.mixed_certs = product->certificates;
  } else {
    const auto& global = std::get<GlobalStrategy>(strategy);
    if (certs == 0)
      throw std::invalid_argument("exact_acceptance: global strategy needs r >= 2");
    Index want = 1;
    for (int i = 0; i < certs; ++i) {
      if (want > dim_cap / prep.m)
        throw cap_exceeded_error("exact_acceptance: certificate space exceeds the cap of " +
                                 std::to_string(dim_cap));
      want *= prep.m;
    }
    if (global.joint.dim() != want)
      throw std::invalid_argument("exact_acceptance: joint certificate dimension mismatch");
    prep.product = false;
    prep.pure = false;
    prep.joint = global.joint;
  }

  // Pairwise data: swap acceptance per test (product backend) and alpha_j.
  prep.alpha.assign(instance.r, 0.0);
  if (prep.product) {
    prep.swap_accept.assign(std::max(certs, 0), 0.0);
    for (int j = 1; j <= certs; ++j) {
      double acc;
      if (prep.pure)
        acc = swap_test_accept_product(j == 1 ? prep.rho0 : prep.pure_certs[j - 2],
                                       prep.pure_certs[j - 1]);
      else
        acc = swap_test_accept_product(j == 1 ? prep.rho0.to_density() : prep.mixed_certs[j - 2],
                                       prep.mixed_certs[j - 1]);
      prep.swap_accept[j - 1] = acc;
      prep.alpha[j - 1] = 1.0 - acc;
    }
    if (instance.r == 1)  // no certificates: the measured register is R_0
      prep.povm_accept = measure_accept(prep.povm.accept, prep.rho0);
    else if (prep.pure)
      prep.povm_accept = measure_accept(prep.povm.accept, prep.pure_certs[certs - 1]);
    else
      prep.povm_accept = measure_accept(prep.povm.accept, prep.mixed_certs[certs - 1]);
  } else {
    // Global backend: alpha from reduced states of the joint.
    RegisterLayout layout;
    for (int j = 1; j <= certs; ++j)
      layout.registers.push_back({static_cast<RegisterId>(j), prep.m});
    const DensityMatrix& joint = *prep.joint;
    DensityMatrix r1 = certs == 1 ? joint : partial_trace(joint, layout, {1});
    // alpha_1: pair (R_0, R_1) is a product of the pure rho0 with r1.
    prep.alpha[0] = 1.0 - swap_test_accept_product(prep.rho0.to_density(), r1);
    for (int j = 2; j <= certs; ++j) {
      DensityMatrix pair =
          certs == 2 ? joint
                     : partial_trace(joint, layout,
                                     {static_cast<RegisterId>(j - 1), static_cast<RegisterId>(j)});
      RegisterLayout pair_layout{{0, prep.m}, {1, prep.m}};
      prep.alpha[j - 1] = 1.0 - swap_test_accept_probability(pair, pair_layout);
    }
    DensityMatrix last =
        certs == 1 ? joint : partial_trace(joint, layout, {static_cast<RegisterId>(certs)});
    prep.povm_accept = measure_accept(prep.povm.accept, last);
  }
  if (instance.r >= 1) prep.alpha[instance.r - 1] = 1.0 - prep.povm_accept;
  return prep;
}

// Fused acceptance operator of the SWAP test at v_1 after contracting the
// pure R_0: (⟨h_x| ⊗ I) Π_sym (|h_x⟩ ⊗ I) = (I + |h_x⟩⟨h_x|)/2.
Matrix fused_first_swap(const Prepared& prep) {
  const Vector& h = prep.rho0.amplitudes();
  return (Matrix::Identity(prep.m, prep.m) + h * h.adjoint()) / 2.0;
}

// Acceptance operator on the certificate space R_1..R_{r-1} for one coin
// string, assembled as an ordered Kronecker product (every active SWAP test
// touches adjacent slots).
Matrix coin_operator_global(const Prepared& prep, const std::vector<LocalTest>& tests,
                            const Matrix& fused_swap1, const Matrix& sym_pair) {
  const int certs = prep.r - 1;
  std::vector<char> swap_at(prep.r + 1, 0);
  bool povm_active = false;
  for (const auto& t : tests) {
    if (t.is_swap)
      swap_at[t.node] = 1;
    else
      povm_active = true;
  }
  // Active tests never overlap: the SWAP at node j needs b_{j-1}=0, b_j=1,
  // which excludes SWAPs at j±1 and (for j = r-1) the final measurement.
  Matrix op = Matrix::Identity(1, 1);
  for (int slot = 1; slot <= certs; ++slot) {
    if (slot + 1 <= certs && swap_at[slot + 1]) {
      op = kron(op, sym_pair);  // SWAP at node slot+1 covers slots (slot, slot+1)
      ++slot;
    } else if (slot == 1 && swap_at[1]) {
      op = kron(op, fused_swap1);
    } else if (slot == certs && povm_active) {
      op = kron(op, prep.povm.accept);
    } else {
      op = kron(op, Matrix::Identity(prep.m, prep.m));
    }
  }
  return op;
}

double coin_accept_product(const Prepared& prep, const std::vector<LocalTest>& tests) {
  double acc = 1.0;
  for (const auto& t : tests)
    acc *= t.is_swap ? prep.swap_accept[t.node - 1] : prep.povm_accept;
  return acc;
}

void fill_common(AcceptanceReport& report, const Prepared& prep, const PathInstance& instance) {
  report.per_test_conditionals = prep.alpha;
  report.test_occurrence_probabilities.assign(instance.r, 0.25);
  report.test_occurrence_probabilities[instance.r - 1] = 0.5;
  report.soundness_sum_met = check_soundness_sum(report, instance.r);
  report.register_qubits = instance.protocol.message_qubits();
  report.certificate_qubits = report.register_qubits;
  report.message_qubits = report.register_qubits;
  report.index_bits = 0;
  report.message_classical_bits = 0;
  report.repeated_acceptance = report.accept_probability;
  for (int j = 0; j < instance.r; ++j)
    report.relocations.push_back({j, 0.5});  // R_j stays at v_j iff b_j = 1
}

}  // namespace

void PathInstance::validate() const {
  if (r < 1) throw std::invalid_argument("PathInstance: path length r must be at least 1");
  if (!protocol.message_state || !protocol.receiver_povm)
    throw std::invalid_argument("PathInstance: protocol is missing its maps");
  require_bitstring(left_input, protocol.input_bits, "PathInstance");
  require_bitstring(right_input, protocol.input_bits, "PathInstance");
}

PureState rotation_state(const PureState& a, const PureState& b, double theta) {
  if (a.dim() != b.dim()) throw std::invalid_argument("rotation_state: dimension mismatch");
  const Complex overlap = a.amplitudes().dot(b.amplitudes());
  Vector perp = b.amplitudes() - overlap * a.amplitudes();
  const double norm = perp.norm();
  if (norm < 1e-12)
    throw std::invalid_argument(
        "rotation_state: states are parallel, no orthogonal component to rotate toward");
  perp /= norm;
  return PureState::trusted(std::cos(theta) * a.amplitudes() + std::sin(theta) * perp);
}

std::vector<LocalTest> active_tests(std::uint32_t coins, int r) {
  if (r < 1 || r > 31) throw std::invalid_argument("active_tests: r out of range");
  const auto bit = [coins](int j) { return (coins >> j) & 1U; };
  std::vector<LocalTest> tests;
  for (int j = 1; j <= r - 1; ++j)
    if (bit(j - 1) == 0 && bit(j) == 1) tests.push_back({j, true, j - 1, j});
  if (bit(r - 1) == 0) tests.push_back({r, false, r - 1, r - 1});
  return tests;
}

double AcceptanceReport::soundness_sum() const {
  double s = 0.0;
  for (double a : per_test_conditionals) s += a;
  return s;
}

bool check_soundness_sum(const AcceptanceReport& report, int r) {
  if (r < 1) throw std::invalid_argument("check_soundness_sum: r must be positive");
  return report.soundness_sum() >= 1.0 / (21.0 * r) - kSoundnessSlack;
}

AcceptanceReport exact_acceptance(const PathInstance& instance, const ProverStrategy& strategy,
                                  exec::Mode mode, Index dim_cap) {
  Prepared prep = prepare(instance, strategy, dim_cap);
  const int r = instance.r;
  if (r > kMaxExactPathLength)
    throw std::invalid_argument("exact_acceptance: r > " +
                                std::to_string(kMaxExactPathLength) +
                                " enumerates too many coin strings; use sampled_acceptance");
  const std::size_t coin_count = std::size_t{1} << r;

  double total;
  if (prep.product) {
    total = exec::indexed_sum(coin_count, mode, [&](std::size_t coins) {
      return coin_accept_product(prep, active_tests(static_cast<std::uint32_t>(coins), r));
    });
  } else {
    const Matrix fused = fused_first_swap(prep);
    const Matrix sym = r >= 3 ? symmetric_projector(prep.m, dim_cap) : Matrix();
    const Matrix joint_t = prep.joint->matrix().transpose();
    total = exec::indexed_sum(coin_count, mode, [&](std::size_t coins) {
      const auto tests = active_tests(static_cast<std::uint32_t>(coins), r);
      if (tests.empty()) return 1.0;
      Matrix op = coin_operator_global(prep, tests, fused, sym);
      return std::clamp(op.cwiseProduct(joint_t).sum().real(), 0.0, 1.0);
    });
  }

  AcceptanceReport report;
  report.accept_probability = total / static_cast<double>(coin_count);
  fill_common(report, prep, instance);
  return report;
}

namespace {

// Packed per-trial outcome: bit 0 = accepted; bits 1+2j / 2+2j = test j
// occurred / rejected.  Keeps the parallel reduction a plain integer sum.
std::uint64_t run_trial_product(const Prepared& prep, int r, rnd::Rng& rng) {
  const std::uint32_t coins = static_cast<std::uint32_t>(rng.bits() & ((1ULL << r) - 1));
  std::uint64_t packed = 1;  // accepted until a test rejects
  for (const auto& t : active_tests(coins, r)) {
    const double p = t.is_swap ? prep.swap_accept[t.node - 1] : prep.povm_accept;
    packed |= (1ULL << (1 + 2 * (t.node - 1)));
    if (rng.uniform() >= p) {
      packed |= (1ULL << (2 + 2 * (t.node - 1)));
      packed &= ~1ULL;
    }
  }
  return packed;
}

std::uint64_t run_trial_global(const Prepared& prep, int r, rnd::Rng& rng,
                               const std::vector<Matrix>& accept_ops,
                               const std::vector<Matrix>& reject_ops) {
  const std::uint32_t coins = static_cast<std::uint32_t>(rng.bits() & ((1ULL << r) - 1));
  std::uint64_t packed = 1;
  const auto tests = active_tests(coins, r);
  if (tests.empty()) return packed;
  // A coin string's active tests act on disjoint registers, so the joint
  // outcome probability is tr((⊗ chosen elements) ρ); sample the outcomes
  // sequentially through conditionals on `weighted` = (elements so far)·ρ.
  Matrix weighted = prep.joint->matrix();
  double mass = 1.0;
  for (const auto& t : tests) {
    packed |= (1ULL << (1 + 2 * (t.node - 1)));
    const Matrix& acc = accept_ops[t.node - 1];
    const double joint_acc =
        std::clamp(acc.cwiseProduct(weighted.transpose()).sum().real(), 0.0, mass);
    const double conditional = mass > 0.0 ? joint_acc / mass : 0.0;
    if (rng.uniform() < conditional) {
      weighted = (acc * weighted).eval();
      mass = joint_acc;
    } else {
      weighted = (reject_ops[t.node - 1] * weighted).eval();
      mass -= joint_acc;
      packed |= (1ULL << (2 + 2 * (t.node - 1)));
      packed &= ~1ULL;
    }
  }
  return packed;
}

// Embedded acceptance/rejection operators on the full certificate space for
// every possible test, used by the sampled global backend.
void build_embedded_ops(const Prepared& prep, Index dim_cap, std::vector<Matrix>& accept_ops,
                        std::vector<Matrix>& reject_ops) {
  const int certs = prep.r - 1;
  const Index m = prep.m;
  auto embed = [&](const Matrix& op, int first_slot, int slots) {
    Matrix full = Matrix::Identity(1, 1);
    int slot = 1;
    while (slot <= certs) {
      if (slot == first_slot) {
        full = kron(full, op);
        slot += slots;
      } else {
        full = kron(full, Matrix::Identity(m, m));
        slot += 1;
      }
    }
    return full;
  };
  const Matrix fused = fused_first_swap(prep);
  accept_ops.assign(prep.r, Matrix());
  reject_ops.assign(prep.r, Matrix());
  accept_ops[0] = embed(fused, 1, 1);
  reject_ops[0] = embed(Matrix::Identity(m, m) - fused, 1, 1);
  if (certs >= 2) {
    const Matrix sym = symmetric_projector(m, dim_cap);
    const Matrix antisym = Matrix::Identity(m * m, m * m) - sym;
    for (int j = 2; j <= certs; ++j) {
      accept_ops[j - 1] = embed(sym, j - 1, 2);
      reject_ops[j - 1] = embed(antisym, j - 1, 2);
    }
  }
  accept_ops[prep.r - 1] = embed(prep.povm.accept, certs, 1);
  reject_ops[prep.r - 1] = embed(prep.povm.reject, certs, 1);
}

}  // namespace

AcceptanceReport sampled_acceptance(const PathInstance& instance, const ProverStrategy& strategy,
                                    long trials, std::uint64_t seed, exec::Mode mode,
                                    Index dim_cap) {
  if (trials < 1) throw std::invalid_argument("sampled_acceptance: trials must be positive");
  Prepared prep = prepare(instance, strategy, dim_cap);
  const int r = instance.r;

  std::vector<Matrix> accept_ops, reject_ops;
  if (!prep.product) {
    // Sampling embeds every test operator on the full certificate space, so
    // it stays restricted to small joints; exact analysis covers the rest.
    if (prep.joint->dim() > 512)
      throw cap_exceeded_error(
          "sampled_acceptance: global strategies are sampled only up to joint dimension 512; "
          "use exact_acceptance");
    build_embedded_ops(prep, dim_cap, accept_ops, reject_ops);
  }

  const auto packed = exec::indexed_map<std::uint64_t>(
      static_cast<std::size_t>(trials), mode, [&](std::size_t t) {
        rnd::Rng rng = rnd::Rng::stream(seed, t);
        return prep.product ? run_trial_product(prep, r, rng)
                            : run_trial_global(prep, r, rng, accept_ops, reject_ops);
      });

  long accepted = 0;
  std::vector<long> occurred(r, 0), rejected(r, 0);
  for (std::uint64_t p : packed) {
    accepted += static_cast<long>(p & 1ULL);
    for (int j = 0; j < r; ++j) {
      occurred[j] += static_cast<long>((p >> (1 + 2 * j)) & 1ULL);
      rejected[j] += static_cast<long>((p >> (2 + 2 * j)) & 1ULL);
    }
  }

  AcceptanceReport report;
  report.accept_probability = wilson_center(accepted, trials);
  fill_common(report, prep, instance);
  // Replace the analytic alphas/occurrences with their sampled estimates.
  for (int j = 0; j < r; ++j) {
    report.test_occurrence_probabilities[j] =
        static_cast<double>(occurred[j]) / static_cast<double>(trials);
    report.per_test_conditionals[j] =
        occurred[j] > 0 ? static_cast<double>(rejected[j]) / static_cast<double>(occurred[j])
                        : 0.0;
  }
  report.soundness_sum_met = check_soundness_sum(report, r);
  report.sampled = true;
  report.trials = trials;
  report.seed = seed;
  report.confidence_radius = wilson_radius(accepted, trials);
  report.repeated_acceptance = report.accept_probability;
  return report;
}

namespace {

AcceptanceReport repeat_common(const PathInstance& instance,
                               std::span<const ProverStrategy> per_repetition, int repetitions,
                               exec::Mode mode, Index dim_cap) {
  if (repetitions < 1)
    throw std::invalid_argument("repeat_protocol: repetition count must be positive");
  if (per_repetition.empty())
    throw std::invalid_argument("repeat_protocol: missing strategy");
  AcceptanceReport report = exact_acceptance(instance, per_repetition[0], mode, dim_cap);
  double acc = 1.0;
  if (per_repetition.size() == 1) {
    acc = std::pow(report.accept_probability, repetitions);
  } else {
    if (static_cast<int>(per_repetition.size()) != repetitions)
      throw std::invalid_argument("repeat_protocol: expected one strategy or one per repetition");
    acc = report.accept_probability;
    for (int i = 1; i < repetitions; ++i)
      acc *= exact_acceptance(instance, per_repetition[i], mode, dim_cap).accept_probability;
  }
  report.repetition_count = repetitions;
  report.repeated_acceptance = acc;
  const int q = instance.protocol.message_qubits();
  report.index_bits = ceil_log2(repetitions);
  report.certificate_qubits = static_cast<long>(repetitions) * q;
  report.message_qubits = static_cast<long>(repetitions) * q;
  report.message_classical_bits = static_cast<long>(repetitions) * report.index_bits;
  return report;
}

}  // namespace

AcceptanceReport repeat_protocol(const PathInstance& instance, const ProverStrategy& strategy,
                                 int repetitions, exec::Mode mode, Index dim_cap) {
  return repeat_common(instance, std::span<const ProverStrategy>(&strategy, 1), repetitions,
                       mode, dim_cap);
}

AcceptanceReport repeat_protocol(const PathInstance& instance,
                                 std::span<const ProverStrategy> per_repetition, exec::Mode mode,
                                 Index dim_cap) {
  return repeat_common(instance, per_repetition, static_cast<int>(per_repetition.size()), mode,
                       dim_cap);
}

AcceptanceReport repeat_protocol(const PathInstance&, const EntangledRepetitionCertificate&,
                                 exec::Mode, Index) {
  throw scope_error(
      "repeat_protocol: certificates entangled across repetitions are out of verified scope; "
      "the analyzer only covers strategies that are product across repetitions");
}

RepetitionPlan repetition_plan(const OneWayProtocol& protocol, int r) {
  if (r < 1) throw std::invalid_argument("repetition_plan: r must be positive");
  RepetitionPlan plan;
  plan.repetitions = 84 * r * r;
  plan.register_qubits = protocol.message_qubits();
  plan.index_bits = ceil_log2(plan.repetitions);
  plan.certificate_qubits = static_cast<long>(plan.repetitions) * plan.register_qubits;
  plan.message_qubits = plan.certificate_qubits;
  plan.message_classical_bits = static_cast<long>(plan.repetitions) * plan.index_bits;
  return plan;
}

JointEventBounds joint_event_bounds(std::span<const double> table) {
  if (table.empty() || (table.size() & (table.size() - 1)) != 0)
    throw std::invalid_argument("joint_event_bounds: table size must be a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < table.size()) ++n;
  if (n == 0) throw std::invalid_argument("joint_event_bounds: need at least one event");
  double total = 0.0;
  for (double p : table) {
    if (p < -1e-12) throw std::invalid_argument("joint_event_bounds: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("joint_event_bounds: probabilities must sum to 1");

  JointEventBounds out;
  out.conjunction = table[table.size() - 1];
  out.disjunction = 1.0 - table[0];
  double sum_marginals = 0.0;
  for (int j = 0; j < n; ++j) {
    double marginal = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
      if (i & (std::size_t{1} << j)) marginal += table[i];
    sum_marginals += marginal;
  }
  out.marginal_mean = sum_marginals / n;
  return out;
}

bool joint_event_bounds_hold(std::span<const double> table, double tol) {
  const JointEventBounds b = joint_event_bounds(table);
  return b.conjunction <= b.marginal_mean + tol && b.disjunction >= b.marginal_mean - tol;
}

}  // namespace dqma
