#include "dqma/comm.hpp"

#include <cmath>

namespace dqma {

int OneWayProtocol::message_qubits() const {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(message_dim))));
}

OneWayProtocol eq_protocol(const HashFamily& family) {
  family.validate();
  OneWayProtocol pi;
  pi.name = "eq-fingerprint-n" + std::to_string(family.input_bits);
  pi.input_bits = family.input_bits;
  pi.message_dim = family.state_dim();
  pi.error_kind = ErrorKind::one_sided;
  const double ip = family.max_inner_product();
  pi.error_bound = ip * ip;
  pi.message_state = [family](const std::string& x) { return fingerprint_of(family, x).state; };
  pi.receiver_povm = [family](const std::string& y) {
    return BinaryPOVM::projective(fingerprint_of(family, y).state);
  };
  return pi;
}

OneWayProtocol qubit_eq_protocol() {
  OneWayProtocol pi;
  pi.name = "eq-qubit";
  pi.input_bits = 1;
  pi.message_dim = 2;
  pi.error_kind = ErrorKind::one_sided;
  pi.error_bound = 0.0;
  pi.message_state = [](const std::string& x) {
    require_bitstring(x, 1, "qubit_eq_protocol");
    return PureState::basis(2, x[0] - '0');
  };
  pi.receiver_povm = [](const std::string& y) {
    require_bitstring(y, 1, "qubit_eq_protocol");
    return BinaryPOVM::projective(PureState::basis(2, y[0] - '0'));
  };
  return pi;
}

OneWayProtocol noisy_measurement(const OneWayProtocol& pi, double noise) {
  if (noise < 0.0 || noise >= 1.0)
    throw std::invalid_argument("noisy_measurement: noise must lie in [0, 1)");
  OneWayProtocol out = pi;
  out.name = pi.name + "-noisy";
  out.error_kind = ErrorKind::two_sided;
  out.error_bound = (1.0 - noise) * pi.error_bound + noise / 2.0;
  auto base = pi.receiver_povm;
  const Index dim = pi.message_dim;
  out.receiver_povm = [base, noise, dim](const std::string& y) {
    BinaryPOVM povm = base(y);
    const Matrix half = (noise / 2.0) * Matrix::Identity(dim, dim);
    return BinaryPOVM((1.0 - noise) * povm.accept + half,
                      (1.0 - noise) * povm.reject + half);
  };
  return out;
}

double majority_error_bound(int repetitions, double eps) {
  if (repetitions < 1 || repetitions % 2 == 0)
    throw std::invalid_argument("majority_error_bound: repetition count must be odd");
  const int threshold = (repetitions + 1) / 2;
  double tail = 0.0;
  for (int j = threshold; j <= repetitions; ++j) {
    double term = 1.0;
    for (int i = 0; i < j; ++i)
      term *= eps * static_cast<double>(repetitions - i) / static_cast<double>(i + 1);
    term *= std::pow(1.0 - eps, repetitions - j);
    tail += term;
  }
  return tail;
}

int repetitions_for_error(double eps, double target) {
  if (eps >= 0.5) throw std::invalid_argument("repetitions_for_error: error must be < 1/2");
  for (int k = 1;; k += 2)
    if (majority_error_bound(k, eps) <= target) return k;
}

OneWayProtocol amplify_by_majority(const OneWayProtocol& pi, int repetitions, Index dim_cap) {
  if (pi.error_kind != ErrorKind::two_sided)
    throw std::invalid_argument("amplify_by_majority: base protocol must be two-sided");
  if (pi.error_bound >= 0.5)
    throw std::invalid_argument("amplify_by_majority: base error must be below 1/2");
  if (repetitions < 1 || repetitions % 2 == 0)
    throw std::invalid_argument("amplify_by_majority: repetition count must be odd");
  Index dim = 1;
  for (int i = 0; i < repetitions; ++i) {
    if (dim > dim_cap / pi.message_dim)
      throw cap_exceeded_error("amplify_by_majority: message dimension exceeds cap");
    dim *= pi.message_dim;
  }

  OneWayProtocol out;
  out.name = pi.name + "-maj" + std::to_string(repetitions);
  out.input_bits = pi.input_bits;
  out.message_dim = dim;
  out.error_kind = ErrorKind::two_sided;
  out.error_bound = majority_error_bound(repetitions, pi.error_bound);

  auto base_state = pi.message_state;
  out.message_state = [base_state, repetitions, dim_cap](const std::string& x) {
    PureState acc = base_state(x);
    for (int i = 1; i < repetitions; ++i) acc = tensor(acc, base_state(x), dim_cap);
    return acc;
  };
  auto base_povm = pi.receiver_povm;
  out.receiver_povm = [base_povm, repetitions, dim](const std::string& y) {
    const BinaryPOVM single = base_povm(y);
    Matrix accept = Matrix::Zero(dim, dim);
    const int threshold = (repetitions + 1) / 2;
    for (std::uint64_t pattern = 0; pattern < (1ULL << repetitions); ++pattern) {
      int accepts = 0;
      for (int i = 0; i < repetitions; ++i)
        if (pattern & (1ULL << i)) ++accepts;
      if (accepts < threshold) continue;
      Matrix term = Matrix::Identity(1, 1);
      for (int i = 0; i < repetitions; ++i)
        term = kron(term, (pattern & (1ULL << i)) ? single.accept : single.reject);
      accept += term;
    }
    return BinaryPOVM::from_accept(std::move(accept));
  };
  return out;
}

double accept_probability(const OneWayProtocol& pi, const std::string& x,
                          const std::string& y) {
  require_bitstring(x, pi.input_bits, "accept_probability");
  require_bitstring(y, pi.input_bits, "accept_probability");
  const DensityMatrix message = pi.message_state(x).to_density();
  return measure_binary(message, pi.receiver_povm(y));
}

}  // namespace dqma
