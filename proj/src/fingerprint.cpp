#include "dqma/fingerprint.hpp"

#include <cmath>

namespace dqma {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void HashFamily::validate() const {
  if (input_bits < 1) throw std::invalid_argument("HashFamily: input_bits must be positive");
  if (block_count < 1) throw std::invalid_argument("HashFamily: block_count must be positive");
  if (!is_prime(field_prime))
    throw std::invalid_argument("HashFamily: field size must be prime");
  // The symbol polynomial has degree < block_count, so p ≥ block_count keeps
  // distinct inputs from agreeing on every evaluation point.
  if (field_prime < static_cast<std::int64_t>(block_count))
    throw std::invalid_argument("HashFamily: field must be at least as large as block_count");
}

int HashFamily::state_qubits() const {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(state_dim()))));
}

double HashFamily::max_inner_product() const {
  return static_cast<double>(block_count - 1) / static_cast<double>(field_prime);
}

std::vector<std::int64_t> HashFamily::symbols_of(const std::string& x) const {
  require_bitstring(x, input_bits, "HashFamily::symbols_of");
  std::vector<std::int64_t> symbols(block_count, 0);
  if (!packed) {
    for (int i = 0; i < input_bits; ++i) symbols[i] = x[i] - '0';
    return symbols;
  }
  const int bits_per_symbol =
      static_cast<int>(std::floor(std::log2(static_cast<double>(field_prime))));
  for (int i = 0; i < input_bits; ++i) {
    const int block = i / bits_per_symbol;
    const int offset = i % bits_per_symbol;
    if (x[i] == '1') symbols[block] |= (std::int64_t{1} << offset);
  }
  return symbols;
}

std::int64_t HashFamily::evaluate(const std::vector<std::int64_t>& symbols,
                                  std::int64_t a) const {
  if (a < 0 || a >= field_prime)
    throw std::out_of_range("HashFamily::evaluate: point outside the field");
  std::int64_t acc = 0;
  for (std::size_t i = symbols.size(); i-- > 0;) acc = (acc * a + symbols[i]) % field_prime;
  return acc;
}

HashFamily make_family(int input_bits, double min_soundness, bool packed) {
  if (input_bits < 1) throw std::invalid_argument("make_family: input_bits must be positive");
  if (min_soundness <= 0.0 || min_soundness >= 1.0)
    throw std::invalid_argument("make_family: min_soundness must lie in (0, 1)");
  const double slack = 1.0 - min_soundness;
  auto blocks_for = [&](std::int64_t p) -> int {
    if (!packed) return input_bits;
    const int bits_per_symbol = static_cast<int>(std::floor(std::log2(static_cast<double>(p))));
    return (input_bits + bits_per_symbol - 1) / bits_per_symbol;
  };
  for (std::int64_t p = 2;; ++p) {
    if (!is_prime(p)) continue;
    const int blocks = blocks_for(p);
    if (static_cast<double>(blocks) / static_cast<double>(p) <= slack) {
      HashFamily fam{input_bits, p, blocks, packed};
      fam.validate();
      return fam;
    }
  }
}

Fingerprint fingerprint_of(const HashFamily& family, const std::string& x) {
  family.validate();
  const auto symbols = family.symbols_of(x);
  const std::int64_t p = family.field_prime;
  Vector amps = Vector::Zero(family.state_dim());
  const double amp = 1.0 / std::sqrt(static_cast<double>(p));
  for (std::int64_t a = 0; a < p; ++a) amps(a * p + family.evaluate(symbols, a)) = amp;
  return Fingerprint{family, x, PureState::trusted(std::move(amps))};
}

double inner_product(const Fingerprint& a, const Fingerprint& b) {
  if (a.family.field_prime != b.family.field_prime ||
      a.family.block_count != b.family.block_count)
    throw std::invalid_argument("inner_product: fingerprints from different families");
  return a.state.amplitudes().dot(b.state.amplitudes()).real();
}

std::int64_t agreement_count(const HashFamily& family, const std::string& x,
                             const std::string& y) {
  const auto sx = family.symbols_of(x);
  const auto sy = family.symbols_of(y);
  std::int64_t agree = 0;
  for (std::int64_t a = 0; a < family.field_prime; ++a)
    if (family.evaluate(sx, a) == family.evaluate(sy, a)) ++agree;
  return agree;
}

}  // namespace dqma
