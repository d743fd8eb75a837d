#pragma once

// Deterministic seeded randomness.  Seeds are 64-bit; anything that runs
// per-trial derives an independent stream from (seed, trial index) in counter
// mode, so results never depend on thread count or iteration order.

#include <cstdint>
#include <random>
#include <vector>

#include "dqma/linalg.hpp"

namespace dqma::rnd {

// splitmix64 finalizer; also the stream-derivation mixer.
std::uint64_t mix(std::uint64_t x);
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix(seed ^ 0x9e3779b97f4a7c15ULL)) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_stream(seed, index));
  }

  double uniform() { return uni_(eng_); }                   // [0, 1)
  double normal() { return normal_(eng_); }
  std::uint64_t bits() { return eng_(); }
  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
  }
  Complex gaussian() { return Complex(normal(), normal()); }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Haar-random unit vector of the given dimension.
PureState haar_state(Rng& rng, Index dim);

// Random density matrix GG†/tr(GG†) with G a dim x rank complex Gaussian
// (rank = dim gives a full-rank Ginibre state).
DensityMatrix ginibre_density(Rng& rng, Index dim, Index rank = 0);

// Random Hermitian 0 ≤ M ≤ I via a Haar-ish unitary and uniform eigenvalues.
Matrix random_psd_contraction(Rng& rng, Index dim);

// Random probability vector of the given size (normalized uniforms).
std::vector<double> random_distribution(Rng& rng, std::size_t size);

}  // namespace dqma::rnd
