#pragma once

// Shared aliases, tolerances and error types used across the library.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dqma {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Validity tolerance for state/POVM invariants (Hermiticity, trace, norm)
// and the eigenvalue floor for positive-semidefiniteness checks.
inline constexpr double kValidityTol = 1e-9;
// Constructors repair (renormalize) inputs within this window and reject beyond it.
inline constexpr double kRepairTol = 1e-6;
// Default ceiling on any materialized joint Hilbert-space dimension.
inline constexpr Index kDefaultDimCap = 20000;

// Requested operation would materialize a space above the configured cap.
struct cap_exceeded_error : std::runtime_error {
  explicit cap_exceeded_error(const std::string& what) : std::runtime_error(what) {}
};

// Requested analysis is outside the verified scope of the analyzer.
struct scope_error : std::runtime_error {
  explicit scope_error(const std::string& what) : std::runtime_error(what) {}
};

inline bool is_bitstring(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

inline void require_bitstring(const std::string& s, int n, const char* who) {
  if (!is_bitstring(s) || static_cast<int>(s.size()) != n)
    throw std::invalid_argument(std::string(who) + ": expected a " + std::to_string(n) +
                                "-bit string, got \"" + s + "\"");
}

// Smallest b with 2^b >= v (0 for v <= 1).
inline int ceil_log2(long v) {
  int bits = 0;
  while ((1L << bits) < v) ++bits;
  return bits;
}

}  // namespace dqma
