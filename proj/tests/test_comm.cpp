#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "dqma/comm.hpp"
#include "oracles.hpp"

using namespace dqma;

TEST_CASE("fingerprint equality protocol acceptance values") {
  const HashFamily fam = make_family(4);
  const OneWayProtocol pi = eq_protocol(fam);
  CHECK(pi.error_kind == ErrorKind::one_sided);
  CHECK(pi.message_dim == fam.state_dim());
  CHECK(accept_probability(pi, "0101", "0101") == doctest::Approx(1.0).epsilon(1e-12));
  // Unequal inputs are accepted with probability exactly (agreement/p)².
  for (const auto& [x, y] : std::vector<std::pair<std::string, std::string>>{
           {"0000", "1111"}, {"0011", "0010"}, {"1000", "0001"}}) {
    const double ip = static_cast<double>(agreement_count(fam, x, y)) /
                      static_cast<double>(fam.field_prime);
    CHECK(accept_probability(pi, x, y) == doctest::Approx(ip * ip).epsilon(1e-11));
    CHECK(accept_probability(pi, x, y) <= pi.error_bound + 1e-12);
  }
  CHECK(pi.error_bound == doctest::Approx(std::pow(fam.max_inner_product(), 2)));
  CHECK(pi.message_qubits() == fam.state_qubits());
}

TEST_CASE("qubit equality protocol is exact") {
  const OneWayProtocol pi = qubit_eq_protocol();
  CHECK(accept_probability(pi, "0", "0") == doctest::Approx(1.0));
  CHECK(accept_probability(pi, "1", "1") == doctest::Approx(1.0));
  CHECK(accept_probability(pi, "0", "1") == doctest::Approx(0.0));
  CHECK(accept_probability(pi, "1", "0") == doctest::Approx(0.0));
  CHECK(pi.error_bound == 0.0);
  CHECK(pi.message_qubits() == 1);
}

TEST_CASE("measurement noise mixes both outcomes toward 1/2") {
  const double lambda = 0.1;
  const OneWayProtocol noisy = noisy_measurement(qubit_eq_protocol(), lambda);
  CHECK(noisy.error_kind == ErrorKind::two_sided);
  // Equal inputs: accept with 1 - λ/2.  Unequal: accept with λ/2.
  CHECK(accept_probability(noisy, "0", "0") == doctest::Approx(1.0 - lambda / 2).epsilon(1e-12));
  CHECK(accept_probability(noisy, "0", "1") == doctest::Approx(lambda / 2).epsilon(1e-12));
  CHECK(noisy.error_bound == doctest::Approx(lambda / 2).epsilon(1e-12));

  // On a one-sided base with error ε the bound becomes (1-λ)ε + λ/2.
  const OneWayProtocol base = eq_protocol(make_family(2));
  const OneWayProtocol noisy_eq = noisy_measurement(base, lambda);
  CHECK(noisy_eq.error_bound ==
        doctest::Approx((1.0 - lambda) * base.error_bound + lambda / 2).epsilon(1e-12));

  // The noisy POVM is still a valid POVM.
  const BinaryPOVM povm = noisy.receiver_povm("1");
  CHECK((povm.accept + povm.reject - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(noisy_measurement(qubit_eq_protocol(), 1.0), std::invalid_argument);
}

TEST_CASE("majority amplification matches the exact binomial tail") {
  // Noise 2/3 puts each side's error at exactly 1/3.
  const OneWayProtocol noisy = noisy_measurement(qubit_eq_protocol(), 2.0 / 3.0);
  CHECK(noisy.error_bound == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const OneWayProtocol amplified = amplify_by_majority(noisy, 5);
  // P[Bin(5, 1/3) ≥ 3] = 51/243.
  const double tail = 51.0 / 243.0;
  CHECK(amplified.error_bound == doctest::Approx(tail).epsilon(1e-12));
  CHECK(accept_probability(amplified, "0", "0") == doctest::Approx(1.0 - tail).epsilon(1e-11));
  CHECK(accept_probability(amplified, "0", "1") == doctest::Approx(tail).epsilon(1e-11));
  CHECK(amplified.message_dim == 32);
}

TEST_CASE("majority error bound agrees with the combinatorial oracle") {
  for (const int k : {1, 3, 5, 7, 9}) {
    for (const double eps : {0.05, 0.2, 1.0 / 3.0, 0.49}) {
      CHECK(majority_error_bound(k, eps) ==
            doctest::Approx(oracles::binomial_tail(k, eps, (k + 1) / 2)).epsilon(1e-12));
    }
  }
  CHECK(majority_error_bound(1, 0.25) == doctest::Approx(0.25));
  CHECK_THROWS_AS(majority_error_bound(4, 0.1), std::invalid_argument);
}

TEST_CASE("repetition search returns the smallest odd count") {
  const double eps = 1.0 / 3.0;
  const int k = repetitions_for_error(eps, 0.1);
  CHECK(majority_error_bound(k, eps) <= 0.1);
  for (int smaller = 1; smaller < k; smaller += 2)
    CHECK(majority_error_bound(smaller, eps) > 0.1);
  CHECK(repetitions_for_error(0.0, 0.5) == 1);
  CHECK_THROWS_AS(repetitions_for_error(0.5, 0.1), std::invalid_argument);
}

TEST_CASE("amplification preconditions") {
  CHECK_THROWS_AS(amplify_by_majority(qubit_eq_protocol(), 3), std::invalid_argument);
  const OneWayProtocol noisy = noisy_measurement(qubit_eq_protocol(), 0.2);
  CHECK_THROWS_AS(amplify_by_majority(noisy, 4), std::invalid_argument);
  CHECK_THROWS_AS(amplify_by_majority(noisy, 31), cap_exceeded_error);
  // Error ≥ 1/2 cannot be amplified.
  OneWayProtocol hopeless = noisy;
  hopeless.error_bound = 0.5;
  CHECK_THROWS_AS(amplify_by_majority(hopeless, 3), std::invalid_argument);
}

TEST_CASE("input validation") {
  const OneWayProtocol pi = qubit_eq_protocol();
  CHECK_THROWS_AS(accept_probability(pi, "00", "0"), std::invalid_argument);
  CHECK_THROWS_AS(accept_probability(pi, "0", "x"), std::invalid_argument);
}
