#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "dqma/classical.hpp"

using namespace dqma;

namespace {

std::string parity_of(const std::string& x) {
  int ones = 0;
  for (char c : x) ones += (c == '1');
  return ones % 2 ? "1" : "0";
}

}  // namespace

TEST_CASE("the one-bit protocol has exact completeness and soundness") {
  for (const double p : {0.1, 0.25, 0.5}) {
    for (const int r : {1, 3, 5}) {
      const ClassicalDMA pi = eq1_optimal_protocol(p, r);
      pi.validate();
      for (const std::string x : {"0", "1"}) {
        const auto certs = pi.honest_certificates(x, x);
        CHECK(classical_acceptance(pi, x, x, certs) ==
              doctest::Approx(1.0 - p).epsilon(1e-12));
      }
      // Soundness: for unequal inputs the best case is accepting iff X = -1 or
      // the gate misses both terminals, which happens with probability 1-2p.
      const auto certs = pi.honest_certificates("0", "0");
      CHECK(classical_acceptance(pi, "0", "1", certs) ==
            doctest::Approx(1.0 - 2.0 * p).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(eq1_optimal_protocol(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(eq1_optimal_protocol(0.6, 3), std::invalid_argument);
}

TEST_CASE("parity-hash completeness is exactly the gate pass rate") {
  const ClassicalDMA pi = parity_hash_protocol(5, 3, 0.25);
  pi.validate();
  for (const std::string x : {"00000", "10101", "11111"}) {
    const auto certs = pi.honest_certificates(x, x);
    CHECK(static_cast<int>(certs.size()) == 4);
    for (const auto& c : certs) CHECK(c == parity_of(x));
    CHECK(classical_acceptance(pi, x, x, certs) == doctest::Approx(0.75).epsilon(1e-12));
  }
  // A certificate disagreeing with its neighbor is caught deterministically.
  auto certs = pi.honest_certificates("00000", "00000");
  certs[2] = "1";
  CHECK(classical_acceptance(pi, "00000", "00000", certs) == doctest::Approx(0.0));
}

TEST_CASE("node outputs depend only on information within reach") {
  // With mu rounds of messaging, changing one certificate can influence
  // outputs only within distance mu of it.
  const ClassicalDMA pi = parity_hash_protocol(3, 4, 0.25);
  const std::string x = "101";
  const auto base = pi.honest_certificates(x, x);
  for (int changed = 0; changed <= 4; ++changed) {
    auto certs = base;
    certs[static_cast<std::size_t>(changed)] =
        certs[static_cast<std::size_t>(changed)] == "0" ? "1" : "0";
    for (std::size_t outcome = 0; outcome < pi.randomness.size(); ++outcome) {
      const auto before = run_classical(pi, x, x, base, outcome);
      const auto after = run_classical(pi, x, x, certs, outcome);
      for (int node = 0; node <= 4; ++node)
        if (std::abs(node - changed) > pi.rounds)
          CHECK(before.outputs[static_cast<std::size_t>(node)] ==
                after.outputs[static_cast<std::size_t>(node)]);
    }
  }
}

TEST_CASE("messages travel one hop per round") {
  // In the parity-hash protocol every node learns its neighbors' certificates
  // in round 1; verify the received views by checking that outputs change
  // exactly when a neighbor's certificate changes.
  const ClassicalDMA pi = parity_hash_protocol(3, 3, 0.25);
  const std::string x = "101";
  const auto base = pi.honest_certificates(x, x);
  auto certs = base;
  certs[1] = "1";  // parity of "101" is 0, so this disagrees
  const auto result = run_classical(pi, x, x, certs, 0);
  // Nodes 0, 1, 2 see the mismatch; node 3 does not neighbor node 1.
  CHECK(!result.outputs[0]);
  CHECK(!result.outputs[1]);
  CHECK(!result.outputs[2]);
  CHECK(result.outputs[3]);
}

TEST_CASE("fooling sets for equality") {
  const FoolingSet set = eq_fooling_set(3);
  CHECK(set.pairs.size() == 8);
  CHECK(set.pairs.front().first == "000");
  CHECK(set.pairs.back().second == "111");
  for (const auto& [x, y] : set.pairs) CHECK(x == y);
  CHECK(fooling_property_holds(set));

  // A set with a repeated member is not 1-fooling.
  FoolingSet broken = set;
  broken.pairs.push_back(broken.pairs.front());
  CHECK(!fooling_property_holds(broken));

  CHECK_THROWS_AS(eq_fooling_set(0), std::invalid_argument);
  CHECK_THROWS_AS(eq_fooling_set(21), std::invalid_argument);
}

TEST_CASE("the attack splices the first colliding certificate pattern") {
  const ClassicalDMA pi = parity_hash_protocol(5, 3, 0.25);
  const AttackResult attack = fooling_attack(pi, eq_fooling_set(5));
  // Certificates are a single parity bit, so inputs collide as soon as their
  // parities match: lexicographically, 00001 and 00010.
  CHECK(attack.pair_a.first == "00001");
  CHECK(attack.pair_b.first == "00010");
  CHECK(attack.crossed.first != attack.crossed.second);
  // The spliced certificate keeps the left half from one pair and the right
  // half from the other.
  CHECK(static_cast<int>(attack.spliced_certificates.size()) == 4);
  // Acceptance of the crossed input meets the witness bound 1 - 2p = 1/2 and
  // in fact reaches 1 - p: only the v_0 gate can reject.
  CHECK(attack.acceptance == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(attack.witness_lower_bound >= 0.5 - 1e-12);
  CHECK(attack.acceptance >= attack.witness_lower_bound - 1e-12);
}

TEST_CASE("the attack certifies soundness failure of the trivial protocol") {
  const ClassicalDMA pi = always_accept_protocol(4, 3, 1);
  const AttackResult attack = fooling_attack(pi, eq_fooling_set(4));
  CHECK(attack.acceptance == doctest::Approx(1.0));
  CHECK(attack.witness_lower_bound == doctest::Approx(1.0));
}

TEST_CASE("the pigeonhole needs more pairs than certificate patterns") {
  // One messaging round exposes the certificates of v_1 and v_2 to the split.
  auto with_round = [](int cert_bits) {
    ClassicalDMA pi = always_accept_protocol(4, 3, cert_bits);
    pi.rounds = 1;
    pi.message = [](const ClassicalView&, int, bool) { return std::string(); };
    pi.validate();
    return pi;
  };
  // Width 2: 2^(2·1·2) = 16 patterns; the 16 pairs of the 4-bit equality set
  // do not guarantee a collision, so the attack must refuse.
  CHECK_THROWS_AS(fooling_attack(with_round(2), eq_fooling_set(4)), std::invalid_argument);
  // One certificate bit fewer (4 patterns) and the same set collides.
  CHECK_NOTHROW(fooling_attack(with_round(1), eq_fooling_set(4)));
  // A path shorter than 2·rounds+1 leaves no clean split point.
  CHECK_THROWS_AS(fooling_attack(parity_hash_protocol(4, 2, 0.25), eq_fooling_set(4)),
                  std::invalid_argument);
}

TEST_CASE("the attack rejects sets without the fooling property") {
  FoolingSet degenerate;
  degenerate.f = [](const std::string&, const std::string&) { return true; };
  for (int v = 0; v < 4; ++v) {
    const std::string s = std::string(1, static_cast<char>('0' + (v >> 1))) +
                          std::string(1, static_cast<char>('0' + (v & 1)));
    degenerate.pairs.push_back({s, s});
  }
  const ClassicalDMA pi = always_accept_protocol(2, 3, 0);
  CHECK_THROWS_AS(fooling_attack(pi, degenerate), std::invalid_argument);
}

TEST_CASE("half-path events and their combination") {
  const ClassicalDMA pi = eq1_optimal_protocol(0.25, 3);
  const auto certs = pi.honest_certificates("0", "0");
  // Left half {v_0}: accepts unless the gate points at the other bit: 1 - p.
  CHECK(classical_event(pi, "0", "1", certs, 0, 1) == doctest::Approx(0.75).epsilon(1e-12));
  // Right half {v_2, v_3}: v_3 holds input 1, gate X=1... accepts iff X ≠ 0’s
  // gate value: also 1 - p.
  CHECK(classical_event(pi, "0", "1", certs, 2, 3) == doctest::Approx(0.75).epsilon(1e-12));
  // Full-path acceptance is bounded below by the inclusion-exclusion witness.
  const double whole = classical_acceptance(pi, "0", "1", certs);
  CHECK(whole >= 0.75 + 0.75 - 1.0 - 1e-12);
  CHECK_THROWS_AS(classical_event(pi, "0", "1", certs, 2, 1), std::invalid_argument);
}

TEST_CASE("sampled acceptance converges and is mode independent") {
  const ClassicalDMA pi = parity_hash_protocol(5, 3, 0.25);
  const auto certs = pi.honest_certificates("00000", "00000");
  const double exact = classical_acceptance(pi, "00000", "00000", certs);
  const double est =
      sampled_classical_acceptance(pi, "00000", "00000", certs, 40000, 11);
  CHECK(std::abs(est - exact) < 0.01);
  const double serial = sampled_classical_acceptance(pi, "00000", "00000", certs, 5000, 3,
                                                     exec::Mode::serial);
  const double parallel = sampled_classical_acceptance(pi, "00000", "00000", certs, 5000, 3,
                                                       exec::Mode::parallel);
  CHECK(serial == parallel);
}

TEST_CASE("exact acceptance is identical across execution modes") {
  const ClassicalDMA pi = parity_hash_protocol(5, 3, 0.25);
  const auto certs = pi.honest_certificates("10101", "10101");
  CHECK(classical_acceptance(pi, "10101", "10101", certs, exec::Mode::serial) ==
        classical_acceptance(pi, "10101", "10101", certs, exec::Mode::parallel));
}

TEST_CASE("protocol validation") {
  ClassicalDMA pi = eq1_optimal_protocol(0.25, 3);
  pi.randomness = {0.5, 0.4};  // does not sum to 1
  CHECK_THROWS_AS(pi.validate(), std::invalid_argument);
  pi = eq1_optimal_protocol(0.25, 3);
  pi.path_length = 0;
  CHECK_THROWS_AS(pi.validate(), std::invalid_argument);
  pi = eq1_optimal_protocol(0.25, 3);
  pi.rounds = 1;  // rounds > 0 require a message function
  pi.message = nullptr;
  CHECK_THROWS_AS(pi.validate(), std::invalid_argument);

  // Mismatched certificate vectors are rejected at run time.
  const ClassicalDMA ok = eq1_optimal_protocol(0.25, 3);
  CHECK_THROWS_AS(run_classical(ok, "0", "0", {"", ""}, 0), std::invalid_argument);
  CHECK_THROWS_AS(
      classical_acceptance(ok, "0", "0", {"x", "x", "x", "x"}, exec::Mode::serial),
      std::invalid_argument);
  CHECK_THROWS_AS(sampled_classical_acceptance(ok, "0", "0",
                                               ok.honest_certificates("0", "0"), 0, 1),
                  std::invalid_argument);
}
