#pragma once

// One-way communication protocols: a sender maps its input to a message
// state, a receiver measures a binary POVM chosen by its own input.  Includes
// the fingerprint-based equality protocol, a 1-bit toy equality protocol,
// measurement-noise injection (to manufacture two-sided protocols) and exact
// majority-vote amplification.

#include <functional>
#include <string>

#include "dqma/fingerprint.hpp"
#include "dqma/linalg.hpp"

namespace dqma {

enum class ErrorKind { one_sided, two_sided };

struct OneWayProtocol {
  std::string name;
  int input_bits = 0;
  Index message_dim = 0;
  ErrorKind error_kind = ErrorKind::one_sided;
  // Worst-case probability of the wrong output; for one_sided protocols the
  // wrong output can only occur on unequal inputs.
  double error_bound = 0.0;
  std::function<PureState(const std::string&)> message_state;
  std::function<BinaryPOVM(const std::string&)> receiver_povm;

  int message_qubits() const;  // ⌈log2 message_dim⌉
};

// Equality via quantum fingerprints: message |h_x⟩, receiver projects onto
// |h_y⟩.  One-sided; unequal inputs are accepted with probability at most
// maxInnerProduct² ≤ 1/9.
OneWayProtocol eq_protocol(const HashFamily& family);

// Equality on a single bit with a qubit message |x⟩ and projective check on
// |y⟩; zero error on both sides.  The smallest useful protocol for desk-scale
// joint analyses.
OneWayProtocol qubit_eq_protocol();

// Mix both POVM elements with weight `noise` toward I/2.  Turns any protocol
// into a genuinely two-sided one: each side's error grows by at most noise/2.
OneWayProtocol noisy_measurement(const OneWayProtocol& pi, double noise);

// Majority vote over `repetitions` independent runs (message = tensor power,
// POVM = sum over majority-accepting outcome patterns).  Requires a two-sided
// base protocol with error < 1/2 and an odd repetition count; the amplified
// error bound is the exact binomial majority tail.
OneWayProtocol amplify_by_majority(const OneWayProtocol& pi, int repetitions,
                                   Index dim_cap = kDefaultDimCap);

// P[Bin(repetitions, eps) ≥ (repetitions+1)/2], the majority error.
double majority_error_bound(int repetitions, double eps);

// Smallest odd repetition count whose majority error is ≤ target.
int repetitions_for_error(double eps, double target);

// Acceptance probability of the protocol on inputs (x, y).
double accept_probability(const OneWayProtocol& pi, const std::string& x,
                          const std::string& y);

}  // namespace dqma
