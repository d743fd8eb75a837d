#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "dqma/path.hpp"
#include "dqma/random.hpp"
#include "oracles.hpp"

using namespace dqma;

namespace {

PathInstance toy_instance(int r, const std::string& x, const std::string& y) {
  return PathInstance{r, qubit_eq_protocol(), x, y};
}

PathInstance fingerprint_instance(int r, int n, const std::string& x, const std::string& y) {
  return PathInstance{r, eq_protocol(make_family(n)), x, y};
}

// Explicit certificate states for the built-in strategies, so the dense
// oracle can evaluate them on the full register space.
std::vector<DensityMatrix> rotation_certificates(const PathInstance& inst) {
  const PureState hx = inst.protocol.message_state(inst.left_input);
  const PureState hy = inst.protocol.message_state(inst.right_input);
  std::vector<DensityMatrix> certs;
  for (int j = 1; j < inst.r; ++j)
    certs.push_back(
        rotation_state(hx, hy, std::numbers::pi * j / (2.0 * inst.r)).to_density());
  return certs;
}

Matrix dense_joint(const PathInstance& inst, const std::vector<DensityMatrix>& certs) {
  Matrix rho = inst.protocol.message_state(inst.left_input).to_density().matrix();
  for (const auto& c : certs) rho = kron(rho, c.matrix());
  return rho;
}

double dense_acceptance(const PathInstance& inst, const std::vector<DensityMatrix>& certs) {
  const Matrix accept = inst.protocol.receiver_povm(inst.right_input).accept;
  return oracles::dense_path_acceptance(inst.r, inst.protocol.message_dim,
                                        dense_joint(inst, certs), accept);
}

std::vector<DensityMatrix> random_certificates(rnd::Rng& rng, int count, Index dim) {
  std::vector<DensityMatrix> certs;
  for (int i = 0; i < count; ++i)
    certs.push_back(i % 2 == 0 ? rnd::haar_state(rng, dim).to_density()
                               : rnd::ginibre_density(rng, dim));
  return certs;
}

}  // namespace

TEST_CASE("active tests follow the register flow and never overlap") {
  for (int r = 1; r <= 10; ++r) {
    for (std::uint32_t coins = 0; coins < (1u << r); ++coins) {
      const auto tests = active_tests(coins, r);
      const auto flow = oracles::path_flow_tests(coins, r);
      std::vector<std::pair<int, int>> swaps;
      bool has_povm = false;
      std::set<int> touched;
      for (const auto& t : tests) {
        if (t.is_swap) {
          swaps.push_back({t.left_register, t.right_register});
          CHECK(t.right_register == t.node);
          CHECK(t.left_register == t.node - 1);
        } else {
          has_povm = true;
          CHECK(t.node == r);
          CHECK(t.right_register == r - 1);
          CHECK(touched.insert(t.right_register).second);
          continue;
        }
        CHECK(touched.insert(t.left_register).second);
        CHECK(touched.insert(t.right_register).second);
      }
      CHECK(swaps == flow.swaps);
      CHECK(has_povm == (flow.povm_register >= 0));
    }
  }
}

TEST_CASE("honest provers on equal inputs are accepted with certainty") {
  for (int r = 1; r <= 6; ++r) {
    const auto toy = exact_acceptance(toy_instance(r, "1", "1"), HonestStrategy{});
    CHECK(toy.accept_probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(toy.repeated_acceptance == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int r : {1, 3, 5}) {
    const auto fp =
        exact_acceptance(fingerprint_instance(r, 4, "0110", "0110"), HonestStrategy{});
    CHECK(fp.accept_probability == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("analyzer matches the dense full-space oracle on qubit instances") {
  rnd::Rng rng(301);
  for (int r = 2; r <= 4; ++r) {
    const PathInstance inst = toy_instance(r, "0", "1");

    const auto honest = exact_acceptance(inst, HonestStrategy{});
    const std::vector<DensityMatrix> honest_certs(
        static_cast<std::size_t>(r - 1),
        inst.protocol.message_state(inst.left_input).to_density());
    CHECK(honest.accept_probability ==
          doctest::Approx(dense_acceptance(inst, honest_certs)).epsilon(1e-10));

    const auto rotation = exact_acceptance(inst, RotationStrategy{});
    CHECK(rotation.accept_probability ==
          doctest::Approx(dense_acceptance(inst, rotation_certificates(inst))).epsilon(1e-10));

    for (int rep = 0; rep < 4; ++rep) {
      const auto certs = random_certificates(rng, r - 1, 2);
      const auto got = exact_acceptance(inst, ProductStrategy{certs});
      CHECK(got.accept_probability ==
            doctest::Approx(dense_acceptance(inst, certs)).epsilon(1e-10));
    }

    for (int rep = 0; rep < 4; ++rep) {
      Index joint_dim = 1;
      for (int i = 1; i < r; ++i) joint_dim *= 2;
      const DensityMatrix joint = rnd::ginibre_density(rng, joint_dim);
      const auto got = exact_acceptance(inst, GlobalStrategy{joint});
      const Matrix rho_full =
          kron(inst.protocol.message_state("0").to_density().matrix(), joint.matrix());
      const double want = oracles::dense_path_acceptance(
          r, 2, rho_full, inst.protocol.receiver_povm("1").accept);
      CHECK(got.accept_probability == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("product and global backends agree on product certificates") {
  rnd::Rng rng(302);
  // Toy register: r = 4.
  {
    const PathInstance inst = toy_instance(4, "0", "1");
    const auto certs = random_certificates(rng, 3, 2);
    Matrix joint = certs[0].matrix();
    for (std::size_t i = 1; i < certs.size(); ++i) joint = kron(joint, certs[i].matrix());
    const auto prod = exact_acceptance(inst, ProductStrategy{certs});
    const auto glob = exact_acceptance(inst, GlobalStrategy{DensityMatrix::trusted(joint)});
    CHECK(prod.accept_probability ==
          doctest::Approx(glob.accept_probability).epsilon(1e-10));
  }
  // Real fingerprint register (dimension 49): r = 2 keeps the joint space small.
  {
    const PathInstance inst = fingerprint_instance(2, 2, "01", "10");
    const DensityMatrix cert = rnd::ginibre_density(rng, 49);
    const auto prod = exact_acceptance(inst, ProductStrategy{{cert}});
    const auto glob = exact_acceptance(inst, GlobalStrategy{cert});
    CHECK(prod.accept_probability ==
          doctest::Approx(glob.accept_probability).epsilon(1e-10));
  }
}

TEST_CASE("rotation strategy has the analytic per-test statistics") {
  for (int r = 2; r <= 6; ++r) {
    const auto report = exact_acceptance(toy_instance(r, "0", "1"), RotationStrategy{});
    const double step = std::numbers::pi / (2.0 * r);
    REQUIRE(static_cast<int>(report.per_test_conditionals.size()) == r);
    for (int j = 1; j < r; ++j) {
      // SWAP of two pure states an angle `step` apart rejects with sin²(step)/2.
      CHECK(report.per_test_conditionals[j - 1] ==
            doctest::Approx(std::sin(step) * std::sin(step) / 2.0).epsilon(1e-10));
      CHECK(report.test_occurrence_probabilities[j - 1] == doctest::Approx(0.25));
    }
    // The final measurement sees the last certificate at angle (r-1)·step from
    // the wrong-input axis, so it rejects with cos²((r-1)·step) = sin²(step).
    CHECK(report.per_test_conditionals[r - 1] ==
          doctest::Approx(std::sin(step) * std::sin(step)).epsilon(1e-10));
    CHECK(report.test_occurrence_probabilities[r - 1] == doctest::Approx(0.5));
    CHECK(report.soundness_sum() ==
          doctest::Approx(std::sin(step) * std::sin(step) * (r + 1) / 2.0).epsilon(1e-10));
    CHECK(report.soundness_sum_met);
    for (const auto& reloc : report.relocations) CHECK(reloc.stay_probability == 0.5);
  }
}

TEST_CASE("acceptance decomposes over occurrence and conditional rejection") {
  // With product certificates the tests are independent given the coins, so
  // acceptance = E over coins of Π (1 - rejection of active tests).  Check the
  // closed form for r = 2: A = (2·a_povm + a_swap + 1)/4 with a = 1 - α.
  const PathInstance inst = toy_instance(2, "0", "1");
  const auto report = exact_acceptance(inst, RotationStrategy{});
  const double a_swap = 1.0 - report.per_test_conditionals[0];
  const double a_povm = 1.0 - report.per_test_conditionals[1];
  CHECK(report.accept_probability ==
        doctest::Approx((2.0 * a_povm + a_swap + 1.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("frozen regression values for the rotation strategy") {
  // Captured from the analytic closed forms; guards against silent changes.
  const auto r2 = exact_acceptance(fingerprint_instance(2, 4, "0000", "1111"),
                                   RotationStrategy{});
  const auto r4 = exact_acceptance(fingerprint_instance(4, 4, "0000", "1111"),
                                   RotationStrategy{});
  // Closed forms, derived independently: per-swap acceptance
  // a_s = 1/2 + cos²(π/2r)/2; final-measure acceptance from the rotated state
  // overlap cos(θ)·ip + sin(θ)·sqrt(1-ip²) with θ = (r-1)π/2r and
  // ip = ⟨h_x|h_y⟩ = 3/13 for these inputs.
  const double ip = 3.0 / 13.0;
  auto closed_form_r2 = [&] {
    const double theta = std::numbers::pi / 4.0;
    const double a_s = 0.5 + 0.5 * std::pow(std::cos(std::numbers::pi / 4.0), 2);
    const double amp = std::cos(theta) * ip + std::sin(theta) * std::sqrt(1 - ip * ip);
    const double a_p = amp * amp;
    return (2 * a_p + a_s + 1) / 4.0;
  }();
  CHECK(r2.accept_probability == doctest::Approx(closed_form_r2).epsilon(1e-11));
  auto closed_form_r4 = [&] {
    const double step = std::numbers::pi / 8.0;
    const double a_s = 0.5 + 0.5 * std::pow(std::cos(step), 2);
    const double theta = 3.0 * step;
    const double amp = std::cos(theta) * ip + std::sin(theta) * std::sqrt(1 - ip * ip);
    const double a_p = amp * amp;
    // Sum over the 16 coin strings of the products of active-test acceptances.
    return (4 * a_p + 4 * a_s * a_p + 6 * a_s + a_s * a_s + 1) / 16.0;
  }();
  CHECK(r4.accept_probability == doctest::Approx(closed_form_r4).epsilon(1e-11));
}

TEST_CASE("soundness floor holds for adversarial strategies on unequal inputs") {
  rnd::Rng rng(303);
  for (int r = 2; r <= 5; ++r) {
    const PathInstance inst = fingerprint_instance(r, 4, "0000", "1111");
    for (int rep = 0; rep < 5; ++rep) {
      const auto certs = random_certificates(rng, r - 1, inst.protocol.message_dim);
      const auto report = exact_acceptance(inst, ProductStrategy{certs});
      CHECK(report.soundness_sum() >= 1.0 / (21.0 * r) - 1e-9);
      CHECK(report.soundness_sum_met);
      CHECK(check_soundness_sum(report, r));
    }
  }
}

TEST_CASE("sampling converges to the exact acceptance") {
  const PathInstance inst = toy_instance(3, "0", "1");
  const auto exact = exact_acceptance(inst, RotationStrategy{});
  const auto sampled = sampled_acceptance(inst, RotationStrategy{}, 20000, 424242);
  CHECK(sampled.sampled);
  CHECK(sampled.trials == 20000);
  CHECK(sampled.seed == 424242);
  CHECK(sampled.confidence_radius > 0.0);
  CHECK(std::abs(sampled.accept_probability - exact.accept_probability) <=
        sampled.confidence_radius);
}

TEST_CASE("sampling is reproducible and thread-count independent") {
  const PathInstance inst = toy_instance(3, "0", "1");
  const auto a = sampled_acceptance(inst, RotationStrategy{}, 5000, 7, exec::Mode::serial);
  const auto b = sampled_acceptance(inst, RotationStrategy{}, 5000, 7, exec::Mode::parallel);
  const auto c = sampled_acceptance(inst, RotationStrategy{}, 5000, 7, exec::Mode::parallel);
  CHECK(a.accept_probability == b.accept_probability);
  CHECK(b.accept_probability == c.accept_probability);
  // A different seed gives a different (but nearby) estimate.
  const auto d = sampled_acceptance(inst, RotationStrategy{}, 5000, 8);
  CHECK(d.accept_probability != a.accept_probability);
}

TEST_CASE("exact analysis is identical across execution modes") {
  rnd::Rng rng(304);
  const PathInstance inst = fingerprint_instance(3, 2, "01", "11");
  const auto certs = random_certificates(rng, 2, 49);
  const auto serial = exact_acceptance(inst, ProductStrategy{certs}, exec::Mode::serial);
  const auto parallel = exact_acceptance(inst, ProductStrategy{certs}, exec::Mode::parallel);
  CHECK(serial.accept_probability == parallel.accept_probability);
  CHECK(serial.per_test_conditionals == parallel.per_test_conditionals);
}

TEST_CASE("repetition multiplies acceptance for product-across-repetition provers") {
  const PathInstance inst = toy_instance(3, "0", "1");
  const auto single = exact_acceptance(inst, RotationStrategy{});
  const auto repeated = repeat_protocol(inst, RotationStrategy{}, 5);
  CHECK(repeated.repetition_count == 5);
  CHECK(repeated.repeated_acceptance ==
        doctest::Approx(std::pow(single.accept_probability, 5)).epsilon(1e-12));

  const std::vector<ProverStrategy> mixed = {RotationStrategy{}, HonestStrategy{}};
  const auto two = repeat_protocol(inst, std::span<const ProverStrategy>(mixed));
  const auto honest = exact_acceptance(inst, HonestStrategy{});
  CHECK(two.repeated_acceptance ==
        doctest::Approx(single.accept_probability * honest.accept_probability)
            .epsilon(1e-12));
  CHECK_THROWS_AS(repeat_protocol(inst, RotationStrategy{}, 0), std::invalid_argument);
}

TEST_CASE("certificates entangled across repetitions are out of scope") {
  const PathInstance inst = toy_instance(2, "0", "1");
  // Two repetitions, one certificate register each: a 4-dimensional joint state.
  rnd::Rng rng(305);
  const EntangledRepetitionCertificate cert{rnd::ginibre_density(rng, 4), 2};
  CHECK_THROWS_AS(repeat_protocol(inst, cert), scope_error);
}

TEST_CASE("repetition budget for the standard soundness target") {
  for (int r : {1, 2, 5, 8}) {
    const RepetitionPlan plan = repetition_plan(qubit_eq_protocol(), r);
    CHECK(plan.repetitions == 84 * r * r);
    CHECK(plan.register_qubits == 1);
    CHECK(plan.index_bits == ceil_log2(84L * r * r));
    CHECK(plan.certificate_qubits == static_cast<long>(plan.repetitions));
    CHECK(plan.message_classical_bits ==
          static_cast<long>(plan.repetitions) * plan.index_bits);
    // k·(rejection floor) = 84r² / (42r²) = 2, so repeated acceptance is ≤ e⁻².
    const double floor = 1.0 / (42.0 * r * r);
    CHECK(std::pow(1.0 - floor, plan.repetitions) <= std::exp(-2.0) + 1e-12);
  }
  // Size accounting rides along on repeated reports.
  const PathInstance inst = toy_instance(2, "0", "1");
  const auto rep = repeat_protocol(inst, RotationStrategy{}, 336);
  CHECK(rep.index_bits == ceil_log2(336));
  CHECK(rep.certificate_qubits == 336);
  CHECK(rep.message_classical_bits == 336L * rep.index_bits);
}

TEST_CASE("joint event bounds on hand-built tables") {
  // Independent fair events.
  const std::vector<double> indep = {0.25, 0.25, 0.25, 0.25};
  auto b = joint_event_bounds(indep);
  CHECK(b.conjunction == doctest::Approx(0.25));
  CHECK(b.disjunction == doctest::Approx(0.75));
  CHECK(b.marginal_mean == doctest::Approx(0.5));
  CHECK(joint_event_bounds_hold(indep));
  // Perfectly correlated events: both bounds are tight.
  const std::vector<double> corr = {0.5, 0.0, 0.0, 0.5};
  b = joint_event_bounds(corr);
  CHECK(b.conjunction == doctest::Approx(b.marginal_mean));
  CHECK(b.disjunction == doctest::Approx(b.marginal_mean));
  // Anti-correlated events.
  const std::vector<double> anti = {0.0, 0.5, 0.5, 0.0};
  b = joint_event_bounds(anti);
  CHECK(b.conjunction == doctest::Approx(0.0));
  CHECK(b.disjunction == doctest::Approx(1.0));
  CHECK(b.marginal_mean == doctest::Approx(0.5));
  CHECK(joint_event_bounds_hold(anti));
  // Malformed tables.
  CHECK_THROWS_AS(joint_event_bounds(std::vector<double>{0.5, 0.25, 0.25}),
                  std::invalid_argument);
  CHECK_THROWS_AS(joint_event_bounds(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("global strategies respect the dimension cap when sampling") {
  const PathInstance inst = fingerprint_instance(3, 2, "01", "10");
  rnd::Rng rng(306);
  const DensityMatrix joint = rnd::ginibre_density(rng, 49 * 49);
  // Exact analysis handles this joint dimension fine...
  CHECK_NOTHROW(exact_acceptance(inst, GlobalStrategy{joint}));
  // ...but per-trial sequential sampling of a 2401-dimensional joint state is
  // refused rather than silently slow.
  CHECK_THROWS_AS(sampled_acceptance(inst, GlobalStrategy{joint}, 10, 1),
                  cap_exceeded_error);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(exact_acceptance(toy_instance(0, "0", "0"), HonestStrategy{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(exact_acceptance(toy_instance(2, "00", "0"), HonestStrategy{}),
                  std::invalid_argument);
  // Product strategy must supply exactly r-1 certificates of the right dimension.
  const PathInstance inst = toy_instance(3, "0", "1");
  CHECK_THROWS_AS(
      exact_acceptance(inst, ProductStrategy{{PureState::basis(2, 0).to_density()}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      exact_acceptance(inst, GlobalStrategy{PureState::basis(2, 0).to_density()}),
      std::invalid_argument);
  // Rotation needs distinct message states to rotate toward.
  CHECK_THROWS_AS(exact_acceptance(toy_instance(3, "1", "1"), RotationStrategy{}),
                  std::invalid_argument);
}
