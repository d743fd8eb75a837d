#pragma once

// Quantum fingerprints from a Reed-Solomon style hash family over F_p.
//
// An n-bit input is encoded as blockCount field symbols (one symbol per bit
// by default, or packed ⌈n/⌊log2 p⌋⌉ symbols) interpreted as polynomial
// coefficients.  The hash indexed by an evaluation point a ∈ F_p maps x to
// the polynomial value at a, so distinct inputs agree on at most
// blockCount−1 of the p evaluation points.  The fingerprint state is
//   |h_x⟩ = (1/√p) Σ_a |a⟩|h_a(x)⟩,
// a unit vector of dimension p·p with flat index a·p + h_a(x), and the inner
// product of two fingerprints is exactly (agreement count)/p.

#include <cstdint>
#include <string>
#include <vector>

#include "dqma/linalg.hpp"

namespace dqma {

struct HashFamily {
  int input_bits = 0;           // n
  std::int64_t field_prime = 0; // p, also the number of hash functions K
  int block_count = 0;          // symbols per input
  bool packed = false;          // true: ⌈n/⌊log2 p⌋⌉ symbols, false: one per bit

  std::int64_t hash_count() const { return field_prime; }
  Index state_dim() const { return static_cast<Index>(field_prime * field_prime); }
  int state_qubits() const;                       // ⌈log2(K·p)⌉
  double max_inner_product() const;               // (block_count − 1)/p
  std::vector<std::int64_t> symbols_of(const std::string& x) const;
  // Horner evaluation of the symbol polynomial at point a, mod p.
  std::int64_t evaluate(const std::vector<std::int64_t>& symbols, std::int64_t a) const;
  void validate() const;
};

// Smallest prime p with p ≥ blockCount/(1 − minSoundness); the default target
// keeps every distinct-input inner product at or below 1/3.
HashFamily make_family(int input_bits, double min_soundness = 2.0 / 3.0, bool packed = false);

struct Fingerprint {
  HashFamily family;
  std::string input;
  PureState state;
};

Fingerprint fingerprint_of(const HashFamily& family, const std::string& x);

// ⟨h_x|h_y⟩ computed from the states (real and in [0, 1] by construction).
double inner_product(const Fingerprint& a, const Fingerprint& b);

// Exact agreement count |{a : h_a(x) = h_a(y)}| by field arithmetic.
std::int64_t agreement_count(const HashFamily& family, const std::string& x,
                             const std::string& y);

bool is_prime(std::int64_t n);

}  // namespace dqma
